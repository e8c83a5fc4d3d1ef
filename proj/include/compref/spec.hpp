/*
 * spec.hpp
 *
 * Finite cell-sequence specifications: the controlled trajectory must
 * visit cell k of the sequence at sampling instant k.
 */

#pragma once

#include <span>
#include <vector>

#include "compref/geometry.hpp"

namespace compref {

class CellSequence {
 public:
  CellSequence(GridPartition grid, std::vector<std::size_t> cells)
      : grid_(std::move(grid)), cells_(std::move(cells)) {
    if (cells_.size() < 2)
      throw std::invalid_argument("CellSequence: need at least two steps");
    for (std::size_t c : cells_)
      if (c >= grid_.cell_count())
        throw std::invalid_argument("CellSequence: cell index out of range");
  }

  const GridPartition& grid() const { return grid_; }
  int horizon() const { return static_cast<int>(cells_.size()) - 1; }
  std::size_t cell(int k) const { return cells_.at(static_cast<std::size_t>(k)); }
  const std::vector<std::size_t>& cells() const { return cells_; }

  Box box(int k) const { return grid_.cell_box(cell(k)); }

  Box projected_step(int k, std::span<const int> dims) const {
    return box(k).project(dims);
  }

  /**
   * True iff point k of the trace lies in cell k for every step. Cell
   * membership follows the grid's half-open convention, so a point on a
   * shared facet belongs to the upper cell only.
   */
  bool check_trace(std::span<const std::vector<double>> trace) const {
    if (static_cast<int>(trace.size()) != horizon() + 1)
      throw std::invalid_argument("CellSequence::check_trace: length mismatch");
    for (int k = 0; k <= horizon(); ++k) {
      try {
        if (grid_.locate_cell(trace[static_cast<std::size_t>(k)]) != cell(k))
          return false;
      } catch (const OutOfDomain&) {
        return false;
      }
    }
    return true;
  }

 private:
  GridPartition grid_;
  std::vector<std::size_t> cells_;
};

}  // namespace compref
