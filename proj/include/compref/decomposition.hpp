/*
 * decomposition.hpp
 *
 * Decomposition of the dynamics into subsystems, each modeling a subset
 * of the state dimensions (controlled plus observed) and a subset of the
 * control inputs, and the restricted reach operators used to build each
 * subsystem's abstraction.
 */

#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "compref/partition.hpp"
#include "compref/reach.hpp"
#include "compref/spec.hpp"

namespace compref {

/**
 * Index sets of one subsystem. Controlled and observed state dims are
 * disjoint; across all subsystems the controlled dims partition the state
 * dimensions and the modeled inputs partition the control dimensions.
 * Everything not modeled acts as a bounded external input.
 */
struct SubsystemSpec {
  int id = 0;
  std::vector<int> controlled;      /* state dims driven by this subsystem */
  std::vector<int> observed;        /* state dims modeled but not controlled */
  std::vector<int> control_inputs;  /* control dims available to it */

  /* all modeled state dims, sorted */
  std::vector<int> modeled() const {
    std::vector<int> m = controlled;
    m.insert(m.end(), observed.begin(), observed.end());
    std::sort(m.begin(), m.end());
    return m;
  }

  std::vector<int> hidden(int state_dim) const {
    return complement(modeled(), state_dim);
  }

  std::vector<int> external_inputs(int control_dim) const {
    return complement(control_inputs, control_dim);
  }

  static std::vector<int> complement(std::vector<int> set, int total) {
    std::sort(set.begin(), set.end());
    std::vector<int> out;
    for (int d = 0; d < total; ++d)
      if (!std::binary_search(set.begin(), set.end(), d)) out.push_back(d);
    return out;
  }
};

enum class DecompositionFault {
  StateOverlap,    /* a state dim controlled by two subsystems */
  StateUncovered,  /* a state dim controlled by none */
  InputOverlap,
  InputUncovered,
  ObservedControlledClash,  /* controlled and observed overlap inside one */
  IndexOutOfRange,
};

struct DecompositionIssue {
  DecompositionFault fault;
  int index;      /* offending dimension */
  int subsystem;  /* offending subsystem id, -1 if n/a */

  std::string describe() const {
    switch (fault) {
      case DecompositionFault::StateOverlap:
        return "state dim " + std::to_string(index) +
               " controlled by more than one subsystem";
      case DecompositionFault::StateUncovered:
        return "state dim " + std::to_string(index) +
               " controlled by no subsystem";
      case DecompositionFault::InputOverlap:
        return "control dim " + std::to_string(index) +
               " modeled by more than one subsystem";
      case DecompositionFault::InputUncovered:
        return "control dim " + std::to_string(index) +
               " modeled by no subsystem";
      case DecompositionFault::ObservedControlledClash:
        return "subsystem " + std::to_string(subsystem) + " lists dim " +
               std::to_string(index) + " as both controlled and observed";
      case DecompositionFault::IndexOutOfRange:
        return "subsystem " + std::to_string(subsystem) +
               " references out-of-range index " + std::to_string(index);
    }
    return "unknown fault";
  }
};

/* empty result means the decomposition is well formed */
inline std::vector<DecompositionIssue> validate_decomposition(
    std::span<const SubsystemSpec> subsystems, int state_dim,
    int control_dim) {
  std::vector<DecompositionIssue> issues;
  std::vector<int> state_owner(static_cast<std::size_t>(state_dim), 0);
  std::vector<int> input_owner(static_cast<std::size_t>(control_dim), 0);
  for (const auto& sub : subsystems) {
    for (int d : sub.controlled) {
      if (d < 0 || d >= state_dim) {
        issues.push_back({DecompositionFault::IndexOutOfRange, d, sub.id});
        continue;
      }
      ++state_owner[static_cast<std::size_t>(d)];
    }
    for (int d : sub.observed) {
      if (d < 0 || d >= state_dim) {
        issues.push_back({DecompositionFault::IndexOutOfRange, d, sub.id});
        continue;
      }
      if (std::find(sub.controlled.begin(), sub.controlled.end(), d) !=
          sub.controlled.end())
        issues.push_back(
            {DecompositionFault::ObservedControlledClash, d, sub.id});
    }
    for (int d : sub.control_inputs) {
      if (d < 0 || d >= control_dim) {
        issues.push_back({DecompositionFault::IndexOutOfRange, d, sub.id});
        continue;
      }
      ++input_owner[static_cast<std::size_t>(d)];
    }
  }
  for (int d = 0; d < state_dim; ++d) {
    if (state_owner[static_cast<std::size_t>(d)] > 1)
      issues.push_back({DecompositionFault::StateOverlap, d, -1});
    if (state_owner[static_cast<std::size_t>(d)] == 0)
      issues.push_back({DecompositionFault::StateUncovered, d, -1});
  }
  for (int d = 0; d < control_dim; ++d) {
    if (input_owner[static_cast<std::size_t>(d)] > 1)
      issues.push_back({DecompositionFault::InputOverlap, d, -1});
    if (input_owner[static_cast<std::size_t>(d)] == 0)
      issues.push_back({DecompositionFault::InputUncovered, d, -1});
  }
  return issues;
}

/**
 * Finite abstraction of one subsystem: a refinable partition of the
 * projected state space plus an ordered finite control set. Transitions
 * are never stored; they are recomputed on demand from the restricted
 * reach operators below.
 */
class SubsystemAbstraction {
 public:
  SubsystemAbstraction(SubsystemSpec spec, const GridPartition& full_grid,
                       std::vector<std::vector<double>> controls,
                       std::shared_ptr<ReachEvaluator> evaluator,
                       int split_arity = 2)
      : spec_(std::move(spec)),
        modeled_(spec_.modeled()),
        full_grid_(full_grid),
        partition_(full_grid.project(spec_.modeled()), split_arity),
        controls_(std::move(controls)),
        evaluator_(std::move(evaluator)) {
    if (!evaluator_)
      throw std::invalid_argument("SubsystemAbstraction: null evaluator");
    if (controls_.empty())
      throw std::invalid_argument("SubsystemAbstraction: empty control set");
    const Box& full_u = evaluator_->system().control_bounds;
    Box u_proj = full_u.project(spec_.control_inputs);
    for (const auto& u : controls_) {
      if (u.size() != spec_.control_inputs.size())
        throw std::invalid_argument(
            "SubsystemAbstraction: control point has wrong dimension");
      if (!u_proj.contains_point(u))
        throw std::invalid_argument(
            "SubsystemAbstraction: control point outside control bounds");
    }
  }

  const SubsystemSpec& spec() const { return spec_; }
  const std::vector<int>& modeled_dims() const { return modeled_; }
  RefinedPartition& partition() { return partition_; }
  const RefinedPartition& partition() const { return partition_; }
  const std::vector<std::vector<double>>& controls() const { return controls_; }
  ReachEvaluator& evaluator() const { return *evaluator_; }
  std::shared_ptr<ReachEvaluator> evaluator_ptr() const { return evaluator_; }

  /* index of a full-grid cell in this subsystem's projected grid */
  std::size_t project_cell(std::size_t full_cell) const {
    return full_grid_.project_cell(full_cell, modeled_);
  }

  /* all current leaves inside the projection of a full-grid cell */
  std::vector<SymbolId> cell_symbols(std::size_t full_cell) const {
    return partition_.cell_leaves(project_cell(full_cell));
  }

  /**
   * Reach over-approximation from symbol s at specification step k under
   * the subsystem's modeled control pinned to u. Unmodeled state dims
   * start from the step's cell (the internal assumption on hidden states)
   * and unmodeled control dims range over the whole control box. Returns
   * a full-dimensional box.
   */
  Box assumed_reach(const SymbolId& s, std::span<const double> u, int k,
                    const CellSequence& seq) const {
    Box cell = seq.box(k);
    Box sym = partition_.symbol_box(s);
    if (!cell.project(modeled_).contains(sym))
      throw SymbolOutsideCell("subsystem " + std::to_string(spec_.id) +
                              ": symbol not inside cell of step " +
                              std::to_string(k));
    Box x0 = cell.replaced(sym);
    Box u_sub = evaluator_->system().control_bounds.replaced(
        Box::point(spec_.control_inputs, u));
    return evaluator_->over_reach(x0, u_sub);
  }

  Box assumed_reach(const SymbolId& s, int control_index, int k,
                    const CellSequence& seq) const {
    return assumed_reach(s, controls_.at(static_cast<std::size_t>(control_index)),
                         k, seq);
  }

  /**
   * assumed_reach trimmed on the observed-uncontrolled dims to the next
   * step's cell: those states are guaranteed to land there by the other
   * subsystems' controllers. nullopt marks an invalid (symbol, control)
   * pair: the trim emptied the box, so the joint state must leave the
   * next cell no matter what the others do.
   */
  std::optional<Box> constrained_reach(const SymbolId& s,
                                       std::span<const double> u, int k,
                                       const CellSequence& seq) const {
    Box reach = assumed_reach(s, u, k, seq);
    if (spec_.observed.empty()) return reach;
    if (k + 1 > seq.horizon())
      throw std::invalid_argument("constrained_reach: step has no successor");
    Box trim = seq.box(k + 1).project(spec_.observed);
    Box cur = reach.project(spec_.observed);
    Box inter = cur.intersect(trim);
    if (inter.is_empty()) return std::nullopt;
    return reach.replaced(inter);
  }

  std::optional<Box> constrained_reach(const SymbolId& s, int control_index,
                                       int k, const CellSequence& seq) const {
    return constrained_reach(
        s, controls_.at(static_cast<std::size_t>(control_index)), k, seq);
  }

  /**
   * Abstract successors: every current leaf whose box intersects the
   * projection of the constrained reach set. The intersection test is
   * closed (boundary touching counts), which errs on the side of more
   * successors. Empty when the (symbol, control) pair is invalid.
   */
  std::vector<SymbolId> successors(const SymbolId& s, std::span<const double> u,
                                   int k, const CellSequence& seq) const {
    auto reach = constrained_reach(s, u, k, seq);
    if (!reach) return {};
    return partition_.leaves_touching(reach->project(modeled_));
  }

  std::vector<SymbolId> successors(const SymbolId& s, int control_index, int k,
                                   const CellSequence& seq) const {
    return successors(s, controls_.at(static_cast<std::size_t>(control_index)),
                      k, seq);
  }

 private:
  SubsystemSpec spec_;
  std::vector<int> modeled_;
  GridPartition full_grid_;
  RefinedPartition partition_;
  std::vector<std::vector<double>> controls_;
  std::shared_ptr<ReachEvaluator> evaluator_;
};

}  // namespace compref
