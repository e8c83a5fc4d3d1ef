/*
 * geometry.hpp
 *
 * Axis-aligned interval boxes over labeled dimensions and grid partitions
 * built as Cartesian products of per-dimension cut sets. Boxes are the
 * common currency of the library: cells, symbols and reach sets are all
 * boxes over some subset of the global state dimensions.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "compref/errors.hpp"

namespace compref {

/**
 * Axis-aligned interval over an ordered list of global dimension indices.
 *
 * The empty box is a distinct value (is_empty() == true); intersect() may
 * produce it. A box with zero dimensions is *not* empty: it is the neutral
 * element for products and has volume 1.
 */
class Box {
 public:
  Box() = default;

  Box(std::vector<int> dims, std::vector<double> low, std::vector<double> high)
      : dims_(std::move(dims)), low_(std::move(low)), high_(std::move(high)) {
    if (dims_.size() != low_.size() || dims_.size() != high_.size())
      throw std::invalid_argument("Box: dims/low/high size mismatch");
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i)
      if (dims_[i] >= dims_[i + 1])
        throw std::invalid_argument("Box: dims must be strictly increasing");
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (!(low_[i] <= high_[i]))
        throw std::invalid_argument("Box: low > high in dimension " +
                                    std::to_string(dims_[i]));
  }

  /* uniform box [lo,hi]^n over dims 0..n-1 */
  static Box cube(int n, double lo, double hi) {
    std::vector<int> d(static_cast<std::size_t>(n));
    std::iota(d.begin(), d.end(), 0);
    return Box(std::move(d), std::vector<double>(n, lo),
               std::vector<double>(n, hi));
  }

  /* degenerate box pinning each dim to a single value */
  static Box point(std::vector<int> dims, std::span<const double> value) {
    std::vector<double> v(value.begin(), value.end());
    return Box(std::move(dims), v, v);
  }

  static Box empty() {
    Box b;
    b.empty_ = true;
    return b;
  }

  bool is_empty() const { return empty_; }
  int size() const { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  double low(int pos) const { return low_[static_cast<std::size_t>(pos)]; }
  double high(int pos) const { return high_[static_cast<std::size_t>(pos)]; }
  double width(int pos) const { return high(pos) - low(pos); }

  /* position of a global dimension index in this box, -1 if absent */
  int pos_of(int dim) const {
    auto it = std::lower_bound(dims_.begin(), dims_.end(), dim);
    if (it == dims_.end() || *it != dim) return -1;
    return static_cast<int>(it - dims_.begin());
  }

  double volume() const {
    if (empty_) return 0.0;
    double v = 1.0;
    for (std::size_t i = 0; i < dims_.size(); ++i) v *= high_[i] - low_[i];
    return v;
  }

  std::vector<double> center() const {
    std::vector<double> c(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i)
      c[i] = 0.5 * (low_[i] + high_[i]);
    return c;
  }

  /* closed membership; x ordered like dims() */
  bool contains_point(std::span<const double> x) const {
    if (empty_ || x.size() != dims_.size()) return false;
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (x[i] < low_[i] || x[i] > high_[i]) return false;
    return true;
  }

  /* closed containment: other subset of this (requires identical dims) */
  bool contains(const Box& other) const {
    if (other.empty_) return true;
    if (empty_ || dims_ != other.dims_) return false;
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (other.low_[i] < low_[i] || other.high_[i] > high_[i]) return false;
    return true;
  }

  /* closed intersection test: boundary touching counts */
  bool intersects(const Box& other) const {
    if (empty_ || other.empty_) return false;
    require_same_dims(other);
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (other.high_[i] < low_[i] || other.low_[i] > high_[i]) return false;
    return true;
  }

  /* positive-measure overlap in every dimension */
  bool interior_intersects(const Box& other) const {
    if (empty_ || other.empty_) return false;
    require_same_dims(other);
    for (std::size_t i = 0; i < dims_.size(); ++i)
      if (!(std::max(low_[i], other.low_[i]) <
            std::min(high_[i], other.high_[i])))
        return false;
    return true;
  }

  Box intersect(const Box& other) const {
    if (empty_ || other.empty_) return Box::empty();
    require_same_dims(other);
    std::vector<double> lo(dims_.size()), hi(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      lo[i] = std::max(low_[i], other.low_[i]);
      hi[i] = std::min(high_[i], other.high_[i]);
      if (lo[i] > hi[i]) return Box::empty();
    }
    return Box(dims_, std::move(lo), std::move(hi));
  }

  /* restriction to a subset of this box's dimensions */
  Box project(std::span<const int> dims) const {
    if (empty_) return Box::empty();
    std::vector<int> d(dims.begin(), dims.end());
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    std::vector<double> lo, hi;
    lo.reserve(d.size());
    hi.reserve(d.size());
    for (int dim : d) {
      int pos = pos_of(dim);
      if (pos < 0)
        throw std::invalid_argument("Box::project: dimension " +
                                    std::to_string(dim) +
                                    " not present in box");
      lo.push_back(low_[static_cast<std::size_t>(pos)]);
      hi.push_back(high_[static_cast<std::size_t>(pos)]);
    }
    return Box(std::move(d), std::move(lo), std::move(hi));
  }

  /* copy of this box with bounds on sub's dimensions overwritten */
  Box replaced(const Box& sub) const {
    if (empty_ || sub.empty_)
      throw std::invalid_argument("Box::replaced: empty operand");
    std::vector<double> lo = low_, hi = high_;
    for (int i = 0; i < sub.size(); ++i) {
      int pos = pos_of(sub.dims()[static_cast<std::size_t>(i)]);
      if (pos < 0)
        throw std::invalid_argument("Box::replaced: dimension not present");
      lo[static_cast<std::size_t>(pos)] = sub.low(i);
      hi[static_cast<std::size_t>(pos)] = sub.high(i);
    }
    return Box(dims_, std::move(lo), std::move(hi));
  }

  /* scaled about the center; factor 2 doubles every width */
  Box scaled(double factor) const {
    std::vector<double> lo(dims_.size()), hi(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      double c = 0.5 * (low_[i] + high_[i]);
      double h = 0.5 * (high_[i] - low_[i]) * factor;
      lo[i] = c - h;
      hi[i] = c + h;
    }
    return Box(dims_, std::move(lo), std::move(hi));
  }

  bool operator==(const Box& other) const {
    if (empty_ != other.empty_) return false;
    if (empty_) return true;
    return dims_ == other.dims_ && low_ == other.low_ && high_ == other.high_;
  }

 private:
  void require_same_dims(const Box& other) const {
    if (dims_ != other.dims_)
      throw std::invalid_argument("Box: dimension lists differ");
  }

  std::vector<int> dims_;
  std::vector<double> low_, high_;
  bool empty_ = false;
};

inline std::ostream& operator<<(std::ostream& os, const Box& b) {
  if (b.is_empty()) return os << "{}";
  os << "{";
  for (int i = 0; i < b.size(); ++i) {
    if (i) os << " x ";
    os << "d" << b.dims()[static_cast<std::size_t>(i)] << ":[" << b.low(i)
       << "," << b.high(i) << "]";
  }
  return os << "}";
}

/* pick the entries of a full point (indexed by global dimension) on dims */
inline std::vector<double> project_point(std::span<const double> x,
                                         std::span<const int> dims) {
  std::vector<double> out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(x[static_cast<std::size_t>(d)]);
  return out;
}

/**
 * Partition of an interval domain into cells, obtained as a Cartesian
 * product of per-dimension partitions. cuts[i] holds the sorted interior
 * cut points of dimension i; cell count along i is cuts[i].size() + 1.
 *
 * Cells are indexed row-major with the first dimension most significant.
 * Point location follows the half-open convention: a cell owns
 * [low, high) in each dimension, except that the topmost cell also owns
 * the domain's upper boundary.
 */
class GridPartition {
 public:
  GridPartition(Box domain, std::vector<std::vector<double>> cuts)
      : domain_(std::move(domain)), cuts_(std::move(cuts)) {
    if (domain_.is_empty())
      throw std::invalid_argument("GridPartition: empty domain");
    if (cuts_.size() != static_cast<std::size_t>(domain_.size()))
      throw std::invalid_argument("GridPartition: one cut list per dim");
    for (int i = 0; i < domain_.size(); ++i) {
      const auto& c = cuts_[static_cast<std::size_t>(i)];
      if (!std::is_sorted(c.begin(), c.end()))
        throw std::invalid_argument("GridPartition: cuts must be sorted");
      for (double v : c)
        if (!(v > domain_.low(i) && v < domain_.high(i)))
          throw std::invalid_argument(
              "GridPartition: cut outside domain interior");
      if (std::adjacent_find(c.begin(), c.end()) != c.end())
        throw std::invalid_argument("GridPartition: duplicate cut");
    }
  }

  static GridPartition uniform(const Box& domain,
                               std::span<const int> cells_per_dim) {
    if (static_cast<int>(cells_per_dim.size()) != domain.size())
      throw std::invalid_argument("GridPartition::uniform: size mismatch");
    std::vector<std::vector<double>> cuts(cells_per_dim.size());
    for (int i = 0; i < domain.size(); ++i) {
      int m = cells_per_dim[static_cast<std::size_t>(i)];
      if (m < 1)
        throw std::invalid_argument("GridPartition::uniform: cells < 1");
      double w = domain.width(i) / m;
      for (int j = 1; j < m; ++j)
        cuts[static_cast<std::size_t>(i)].push_back(domain.low(i) + j * w);
    }
    return GridPartition(domain, std::move(cuts));
  }

  const Box& domain() const { return domain_; }
  int dim() const { return domain_.size(); }
  const std::vector<std::vector<double>>& cuts() const { return cuts_; }

  int cells_along(int pos) const {
    return static_cast<int>(cuts_[static_cast<std::size_t>(pos)].size()) + 1;
  }

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (int i = 0; i < dim(); ++i)
      n *= static_cast<std::size_t>(cells_along(i));
    return n;
  }

  /* boundary j of dimension pos; j in [0, cells_along(pos)] */
  double boundary(int pos, int j) const {
    const auto& c = cuts_[static_cast<std::size_t>(pos)];
    if (j == 0) return domain_.low(pos);
    if (j == static_cast<int>(c.size()) + 1) return domain_.high(pos);
    return c[static_cast<std::size_t>(j - 1)];
  }

  std::size_t index_of(std::span<const int> coords) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) {
      int c = coords[static_cast<std::size_t>(i)];
      if (c < 0 || c >= cells_along(i))
        throw std::out_of_range("GridPartition: cell coordinate out of range");
      idx = idx * static_cast<std::size_t>(cells_along(i)) +
            static_cast<std::size_t>(c);
    }
    return idx;
  }

  std::vector<int> coords_of(std::size_t index) const {
    std::vector<int> c(static_cast<std::size_t>(dim()));
    for (int i = dim() - 1; i >= 0; --i) {
      std::size_t m = static_cast<std::size_t>(cells_along(i));
      c[static_cast<std::size_t>(i)] = static_cast<int>(index % m);
      index /= m;
    }
    if (index != 0)
      throw std::out_of_range("GridPartition: cell index out of range");
    return c;
  }

  Box cell_box(std::size_t index) const {
    auto c = coords_of(index);
    std::vector<double> lo(c.size()), hi(c.size());
    for (int i = 0; i < dim(); ++i) {
      lo[static_cast<std::size_t>(i)] =
          boundary(i, c[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] =
          boundary(i, c[static_cast<std::size_t>(i)] + 1);
    }
    return Box(domain_.dims(), std::move(lo), std::move(hi));
  }

  /* half-open location of a coordinate in dimension pos */
  int locate_along(int pos, double x) const {
    if (x < domain_.low(pos) || x > domain_.high(pos))
      throw OutOfDomain("coordinate " + std::to_string(x) +
                        " outside domain in dimension " +
                        std::to_string(domain_.dims()[static_cast<std::size_t>(
                            pos)]));
    const auto& c = cuts_[static_cast<std::size_t>(pos)];
    /* first cut strictly greater than x; x on a cut goes to the upper cell */
    auto it = std::upper_bound(c.begin(), c.end(), x);
    int idx = static_cast<int>(it - c.begin());
    if (idx == static_cast<int>(c.size()) + 1) idx = static_cast<int>(c.size());
    return std::min(idx, cells_along(pos) - 1);
  }

  /* x ordered like domain dims; throws OutOfDomain */
  std::size_t locate_cell(std::span<const double> x) const {
    std::vector<int> c(static_cast<std::size_t>(dim()));
    for (int i = 0; i < dim(); ++i)
      c[static_cast<std::size_t>(i)] =
          locate_along(i, x[static_cast<std::size_t>(i)]);
    return index_of(c);
  }

  /* partition of the projected domain, keeping the cuts of kept dims */
  GridPartition project(std::span<const int> dims) const {
    Box d = domain_.project(dims);
    std::vector<std::vector<double>> cuts;
    cuts.reserve(d.dims().size());
    for (int dim_idx : d.dims())
      cuts.push_back(cuts_[static_cast<std::size_t>(domain_.pos_of(dim_idx))]);
    return GridPartition(std::move(d), std::move(cuts));
  }

  /* index in project(dims) of the projection of this grid's cell */
  std::size_t project_cell(std::size_t index, std::span<const int> dims) const {
    auto full = coords_of(index);
    std::size_t idx = 0;
    std::vector<int> sorted(dims.begin(), dims.end());
    std::sort(sorted.begin(), sorted.end());
    for (int d : sorted) {
      int pos = domain_.pos_of(d);
      if (pos < 0)
        throw std::invalid_argument("GridPartition::project_cell: bad dim");
      idx = idx * static_cast<std::size_t>(cells_along(pos)) +
            static_cast<std::size_t>(full[static_cast<std::size_t>(pos)]);
    }
    return idx;
  }

 private:
  Box domain_;
  std::vector<std::vector<double>> cuts_;
};

}  // namespace compref
