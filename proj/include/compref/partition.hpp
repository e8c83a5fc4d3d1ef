/*
 * partition.hpp
 *
 * Hierarchical refinement of a grid partition. Each base cell carries a
 * split tree whose leaves are the current symbols; a symbol is addressed
 * by its base cell index plus the path of child indices from the root.
 * Symbols are decoded on demand (O(depth)), never stored as boxes.
 */

#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "compref/geometry.hpp"

namespace compref {

/**
 * Address of a symbol: base cell plus child path. With split arity a in a
 * d-dimensional partition every interior node has a^d children; child c
 * encodes one sub-interval index per dimension, dimension position j being
 * digit j of c in base a (least significant first).
 */
struct SymbolId {
  std::size_t cell = 0;
  std::vector<std::uint32_t> path;

  int depth() const { return static_cast<int>(path.size()); }
  bool operator==(const SymbolId&) const = default;
  /* lexicographic (cell, path): stable ordering for exports */
  auto operator<=>(const SymbolId&) const = default;
};

struct SymbolIdHash {
  std::size_t operator()(const SymbolId& s) const {
    std::size_t h = std::hash<std::size_t>{}(s.cell);
    for (std::uint32_t v : s.path)
      h ^= std::hash<std::uint32_t>{}(v) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    return h;
  }
};

using SymbolSet = std::unordered_set<SymbolId, SymbolIdHash>;

class RefinedPartition {
 public:
  explicit RefinedPartition(GridPartition base, int split_arity = 2)
      : base_(std::move(base)), arity_(split_arity) {
    if (arity_ < 2)
      throw std::invalid_argument("RefinedPartition: split arity must be >= 2");
    children_ = 1;
    for (int i = 0; i < base_.dim(); ++i)
      children_ *= static_cast<std::size_t>(arity_);
  }

  const GridPartition& base() const { return base_; }
  int dim() const { return base_.dim(); }
  int arity() const { return arity_; }
  std::size_t children_per_split() const { return children_; }
  const Box& domain() const { return base_.domain(); }

  bool is_leaf(const SymbolId& s) const {
    const Node* n = walk(s);
    if (!n) throw std::invalid_argument("RefinedPartition: no such symbol");
    return n->first_child < 0;
  }

  Box symbol_box(const SymbolId& s) const {
    Box b = base_.cell_box(s.cell);
    std::vector<double> lo(b.dims().size()), hi(b.dims().size());
    for (int i = 0; i < b.size(); ++i) {
      lo[static_cast<std::size_t>(i)] = b.low(i);
      hi[static_cast<std::size_t>(i)] = b.high(i);
    }
    for (std::uint32_t child : s.path) {
      for (int i = 0; i < b.size(); ++i) {
        std::uint32_t digit = digit_of(child, i);
        auto idx = static_cast<std::size_t>(i);
        double w = (hi[idx] - lo[idx]) / arity_;
        double new_lo = lo[idx] + digit * w;
        /* top child keeps the exact parent bound so children tile exactly */
        double new_hi = (digit + 1 == static_cast<std::uint32_t>(arity_))
                            ? hi[idx]
                            : lo[idx] + (digit + 1) * w;
        lo[idx] = new_lo;
        hi[idx] = new_hi;
      }
    }
    return Box(b.dims(), std::move(lo), std::move(hi));
  }

  /* unique leaf containing x under the half-open convention */
  SymbolId locate(std::span<const double> x) const {
    SymbolId s;
    s.cell = base_.locate_cell(x);
    auto it = trees_.find(s.cell);
    if (it == trees_.end()) return s;
    const auto& nodes = it->second;
    Box b = base_.cell_box(s.cell);
    std::vector<double> lo(b.dims().size()), hi(b.dims().size());
    for (int i = 0; i < b.size(); ++i) {
      lo[static_cast<std::size_t>(i)] = b.low(i);
      hi[static_cast<std::size_t>(i)] = b.high(i);
    }
    std::size_t node = 0;
    while (nodes[node].first_child >= 0) {
      std::uint32_t child = 0;
      std::uint32_t mult = 1;
      for (int i = 0; i < dim(); ++i) {
        auto idx = static_cast<std::size_t>(i);
        double w = (hi[idx] - lo[idx]) / arity_;
        auto digit = static_cast<std::int64_t>((x[idx] - lo[idx]) / w);
        if (digit < 0) digit = 0;
        if (digit >= arity_) digit = arity_ - 1;
        /* half-open inside the cell: x exactly on an interior sub-boundary
           belongs to the upper child */
        while (digit + 1 < arity_ && x[idx] >= lo[idx] + (digit + 1) * w)
          ++digit;
        while (digit > 0 && x[idx] < lo[idx] + digit * w) --digit;
        double new_lo = lo[idx] + digit * w;
        double new_hi = (digit + 1 == arity_) ? hi[idx]
                                              : lo[idx] + (digit + 1) * w;
        lo[idx] = new_lo;
        hi[idx] = new_hi;
        child += mult * static_cast<std::uint32_t>(digit);
        mult *= static_cast<std::uint32_t>(arity_);
      }
      s.path.push_back(child);
      node = static_cast<std::size_t>(nodes[node].first_child) + child;
    }
    return s;
  }

  /* replace a leaf by arity^dim identical children; returns the children */
  std::vector<SymbolId> split(const SymbolId& s) {
    Node* n = walk_mutable(s);
    if (!n) throw std::invalid_argument("RefinedPartition::split: no symbol");
    if (n->first_child >= 0)
      throw std::invalid_argument("RefinedPartition::split: not a leaf");
    auto& nodes = trees_[s.cell];  /* may create the root-only tree */
    if (nodes.empty()) nodes.push_back(Node{});
    /* re-walk: the insertion above may have invalidated n */
    std::size_t node = 0;
    for (std::uint32_t child : s.path)
      node = static_cast<std::size_t>(nodes[node].first_child) + child;
    nodes[node].first_child = static_cast<std::int64_t>(nodes.size());
    nodes.resize(nodes.size() + children_);
    std::vector<SymbolId> out;
    out.reserve(children_);
    for (std::uint32_t c = 0; c < children_; ++c) {
      SymbolId ch = s;
      ch.path.push_back(c);
      out.push_back(std::move(ch));
    }
    return out;
  }

  /* all current leaves of one base cell, in depth-first child order */
  std::vector<SymbolId> cell_leaves(std::size_t cell) const {
    std::vector<SymbolId> out;
    SymbolId root;
    root.cell = cell;
    auto it = trees_.find(cell);
    if (it == trees_.end()) {
      out.push_back(root);
      return out;
    }
    collect_leaves(it->second, 0, root, out);
    return out;
  }

  int cell_depth(std::size_t cell) const {
    auto it = trees_.find(cell);
    if (it == trees_.end()) return 0;
    int d = 0;
    SymbolId root;
    root.cell = cell;
    std::vector<SymbolId> leaves;
    collect_leaves(it->second, 0, root, leaves);
    for (const auto& s : leaves) d = std::max(d, s.depth());
    return d;
  }

  std::size_t leaf_count() const {
    std::size_t n = base_.cell_count();
    for (const auto& [cell, nodes] : trees_) {
      (void)cell;
      std::size_t internal = 0;
      for (const auto& node : nodes)
        if (node.first_child >= 0) ++internal;
      /* each split adds (children-1) leaves */
      n += internal * (children_ - 1);
    }
    return n;
  }

  /* leaves whose closed box intersects b (boundary touching counts) */
  std::vector<SymbolId> leaves_touching(const Box& b) const {
    std::vector<SymbolId> out;
    if (b.is_empty()) return out;
    for_cells_overlapping(b, /*closed=*/true, [&](std::size_t cell) {
      Box cb = base_.cell_box(cell);
      SymbolId root;
      root.cell = cell;
      auto it = trees_.find(cell);
      if (it == trees_.end()) {
        out.push_back(root);
        return;
      }
      collect_touching(it->second, 0, root, cb, b, out);
    });
    return out;
  }

  /**
   * Exact containment of b in the union of the region's symbol boxes.
   * Walks every leaf overlapping b with positive measure (plus half-open
   * attribution for zero-width dimensions of b) and requires each to be in
   * the region. Tree-walk, not sampling: soundness of the synthesized
   * controller rests on this test.
   */
  template <class Pred>
    requires std::invocable<Pred, const SymbolId&>
  bool covered_by(const Box& b, Pred&& in_region) const {
    if (b.is_empty()) return true;
    if (!domain().contains(b.project(domain().dims()))) return false;
    bool ok = true;
    for_cells_overlapping(b, /*closed=*/false, [&](std::size_t cell) {
      if (!ok) return;
      Box cb = base_.cell_box(cell);
      SymbolId root;
      root.cell = cell;
      auto it = trees_.find(cell);
      if (it == trees_.end()) {
        if (!in_region(root)) ok = false;
        return;
      }
      if (!check_covered(it->second, 0, root, cb, b, in_region)) ok = false;
    });
    return ok;
  }

  bool covered_by(const Box& b, const SymbolSet& region) const {
    return covered_by(b, [&](const SymbolId& s) { return region.count(s) > 0; });
  }

  void for_each_leaf(const std::function<void(const SymbolId&)>& fn) const {
    for (std::size_t cell = 0; cell < base_.cell_count(); ++cell)
      for (const auto& s : cell_leaves(cell)) fn(s);
  }

 private:
  struct Node {
    std::int64_t first_child = -1;
  };

  std::uint32_t digit_of(std::uint32_t child, int pos) const {
    for (int i = 0; i < pos; ++i) child /= static_cast<std::uint32_t>(arity_);
    return child % static_cast<std::uint32_t>(arity_);
  }

  const Node* walk(const SymbolId& s) const {
    if (s.cell >= base_.cell_count()) return nullptr;
    auto it = trees_.find(s.cell);
    if (it == trees_.end()) {
      static const Node leaf{};
      return s.path.empty() ? &leaf : nullptr;
    }
    const auto& nodes = it->second;
    std::size_t node = 0;
    for (std::uint32_t child : s.path) {
      if (nodes[node].first_child < 0 || child >= children_) return nullptr;
      node = static_cast<std::size_t>(nodes[node].first_child) + child;
    }
    return &nodes[node];
  }

  Node* walk_mutable(const SymbolId& s) {
    if (s.cell >= base_.cell_count()) return nullptr;
    auto it = trees_.find(s.cell);
    if (it == trees_.end()) {
      if (!s.path.empty()) return nullptr;
      auto& nodes = trees_[s.cell];
      nodes.push_back(Node{});
      return &nodes[0];
    }
    auto& nodes = it->second;
    std::size_t node = 0;
    for (std::uint32_t child : s.path) {
      if (nodes[node].first_child < 0 || child >= children_) return nullptr;
      node = static_cast<std::size_t>(nodes[node].first_child) + child;
    }
    return &nodes[node];
  }

  void collect_leaves(const std::vector<Node>& nodes, std::size_t node,
                      const SymbolId& prefix, std::vector<SymbolId>& out) const {
    if (nodes[node].first_child < 0) {
      out.push_back(prefix);
      return;
    }
    for (std::uint32_t c = 0; c < children_; ++c) {
      SymbolId ch = prefix;
      ch.path.push_back(c);
      collect_leaves(nodes, static_cast<std::size_t>(nodes[node].first_child) + c,
                     ch, out);
    }
  }

  Box child_box(const Box& parent, std::uint32_t child) const {
    std::vector<double> lo(parent.dims().size()), hi(parent.dims().size());
    for (int i = 0; i < parent.size(); ++i) {
      auto idx = static_cast<std::size_t>(i);
      std::uint32_t digit = digit_of(child, i);
      double w = parent.width(i) / arity_;
      lo[idx] = parent.low(i) + digit * w;
      hi[idx] = (digit + 1 == static_cast<std::uint32_t>(arity_))
                    ? parent.high(i)
                    : parent.low(i) + (digit + 1) * w;
    }
    return Box(parent.dims(), std::move(lo), std::move(hi));
  }

  void collect_touching(const std::vector<Node>& nodes, std::size_t node,
                        const SymbolId& prefix, const Box& box, const Box& b,
                        std::vector<SymbolId>& out) const {
    if (!box.intersects(b)) return;
    if (nodes[node].first_child < 0) {
      out.push_back(prefix);
      return;
    }
    for (std::uint32_t c = 0; c < children_; ++c) {
      SymbolId ch = prefix;
      ch.path.push_back(c);
      collect_touching(nodes,
                       static_cast<std::size_t>(nodes[node].first_child) + c,
                       ch, child_box(box, c), b, out);
    }
  }

  /* does leaf/node box matter for coverage of b? positive overlap per dim;
     zero-width dims of b follow the half-open attribution */
  bool relevant_for_cover(const Box& node_box, const Box& b) const {
    for (int i = 0; i < b.size(); ++i) {
      int pos = node_box.pos_of(b.dims()[static_cast<std::size_t>(i)]);
      double nlo = node_box.low(pos), nhi = node_box.high(pos);
      double blo = b.low(i), bhi = b.high(i);
      if (blo == bhi) {
        int dpos = domain().pos_of(b.dims()[static_cast<std::size_t>(i)]);
        bool owns = (nlo <= blo && blo < nhi) ||
                    (blo == nhi && nhi == domain().high(dpos));
        if (!owns) return false;
      } else {
        if (!(std::max(nlo, blo) < std::min(nhi, bhi))) return false;
      }
    }
    return true;
  }

  template <class Pred>
  bool check_covered(const std::vector<Node>& nodes, std::size_t node,
                     const SymbolId& prefix, const Box& box, const Box& b,
                     Pred&& in_region) const {
    if (!relevant_for_cover(box, b)) return true;
    if (nodes[node].first_child < 0) return in_region(prefix);
    for (std::uint32_t c = 0; c < children_; ++c) {
      SymbolId ch = prefix;
      ch.path.push_back(c);
      if (!check_covered(nodes,
                         static_cast<std::size_t>(nodes[node].first_child) + c,
                         ch, child_box(box, c), b, in_region))
        return false;
    }
    return true;
  }

  /* visit base cells overlapping b; closed=true counts boundary touching */
  void for_cells_overlapping(
      const Box& b, bool closed,
      const std::function<void(std::size_t)>& fn) const {
    int d = dim();
    std::vector<int> lo(static_cast<std::size_t>(d)),
        hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      int bpos = b.pos_of(domain().dims()[static_cast<std::size_t>(i)]);
      if (bpos < 0)
        throw std::invalid_argument("RefinedPartition: box dims mismatch");
      double blo = b.low(bpos), bhi = b.high(bpos);
      int m = base_.cells_along(i);
      int clo = m, chi = -1;
      for (int j = 0; j < m; ++j) {
        double cell_lo = base_.boundary(i, j);
        double cell_hi = base_.boundary(i, j + 1);
        bool overlap;
        if (closed) {
          overlap = cell_hi >= blo && cell_lo <= bhi;
        } else if (blo == bhi) {
          bool at_top = blo == domain().high(i);
          overlap = at_top ? (j == m - 1 && bhi >= cell_lo)
                           : (cell_lo <= blo && blo < cell_hi);
        } else {
          overlap = std::max(cell_lo, blo) < std::min(cell_hi, bhi);
        }
        if (overlap) {
          clo = std::min(clo, j);
          chi = std::max(chi, j);
        }
      }
      if (chi < clo) return;  /* no overlap at all */
      lo[static_cast<std::size_t>(i)] = clo;
      hi[static_cast<std::size_t>(i)] = chi;
    }
    std::vector<int> c = lo;
    for (;;) {
      fn(base_.index_of(c));
      int i = d - 1;
      while (i >= 0) {
        if (++c[static_cast<std::size_t>(i)] <=
            hi[static_cast<std::size_t>(i)])
          break;
        c[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
        --i;
      }
      if (i < 0) break;
    }
  }

  GridPartition base_;
  int arity_;
  std::size_t children_ = 0;
  std::unordered_map<std::size_t, std::vector<Node>> trees_;
};

}  // namespace compref
