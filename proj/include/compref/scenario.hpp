/*
 * scenario.hpp
 *
 * A synthesis problem instance: system, initial grid partition, cell
 * sequence, decomposition and per-subsystem discrete control sets.
 */

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "compref/decomposition.hpp"
#include "compref/spec.hpp"

namespace compref {

struct Scenario {
  std::string name;
  std::shared_ptr<const ControlSystem> system;
  GridPartition grid;
  std::vector<std::size_t> spec_cells;
  std::vector<SubsystemSpec> subsystems;
  /* declaration-ordered control points per subsystem, over its input dims */
  std::vector<std::vector<std::vector<double>>> control_sets;
  double tau = 1.0;
  int integrator_steps = 60;

  CellSequence sequence() const { return CellSequence(grid, spec_cells); }

  void validate() const {
    if (!system) throw ConfigError("scenario: no system");
    auto issues = validate_decomposition(subsystems, system->state_dim,
                                         system->control_dim);
    if (!issues.empty()) throw ConfigError("scenario: " + issues[0].describe());
    if (control_sets.size() != subsystems.size())
      throw ConfigError("scenario: one control set per subsystem required");
    if (!(grid.domain() == system->state_bounds))
      throw ConfigError("scenario: grid domain differs from state bounds");
  }
};

/* Cartesian product of per-dimension value lists, first dim slowest */
inline std::vector<std::vector<double>> control_grid(
    const std::vector<std::vector<double>>& per_dim) {
  std::vector<std::vector<double>> out{{}};
  for (const auto& values : per_dim) {
    std::vector<std::vector<double>> next;
    next.reserve(out.size() * values.size());
    for (const auto& prefix : out) {
      for (double v : values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

/**
 * Analytic evaluation counts for the four abstraction strategies, using
 * the convention that one count equals one reach over-approximation.
 *
 * A finest partition of split_factor = arity^depth pieces per dimension
 * and cell is assumed for the strategies that do not refine:
 *  - compositional, no refinement: every subsystem abstraction is built
 *    in full, sum over i of |finest X_i| * |U_i|;
 *  - centralized, no refinement: one abstraction over all state dims and
 *    the product control set, |finest X| * prod_i |U_i|;
 *  - centralized, with refinement: upper bound assuming every visited
 *    cell walks through all depths 0..depth with a full symbol-control
 *    scan at each level: r * sum_d (arity^n)^d * prod_i |U_i|.
 * The measured compositional-refinement count comes from the evaluator
 * tallies of an actual run and is not computed here.
 */
struct AnalyticCounts {
  double compositional_norefinement = 0;
  double centralized_norefinement = 0;
  double centralized_refinement_bound = 0;
  int depth = 0;
  int split_factor = 0;
};

inline AnalyticCounts analytic_counts(const Scenario& sc, int depth,
                                      int arity = 2) {
  AnalyticCounts out;
  out.depth = depth;
  int split = 1;
  for (int d = 0; d < depth; ++d) split *= arity;
  out.split_factor = split;

  double u_product = 1.0;
  for (const auto& us : sc.control_sets)
    u_product *= static_cast<double>(us.size());

  for (std::size_t i = 0; i < sc.subsystems.size(); ++i) {
    double symbols = 1.0;
    for (int d : sc.subsystems[i].modeled()) {
      int pos = sc.grid.domain().pos_of(d);
      symbols *= static_cast<double>(sc.grid.cells_along(pos)) * split;
    }
    out.compositional_norefinement +=
        symbols * static_cast<double>(sc.control_sets[i].size());
  }

  double full_symbols = 1.0;
  for (int pos = 0; pos < sc.grid.dim(); ++pos)
    full_symbols *= static_cast<double>(sc.grid.cells_along(pos)) * split;
  out.centralized_norefinement = full_symbols * u_product;

  double per_cell_ladder = 0.0;
  double level = 1.0;
  double children = 1.0;
  for (int pos = 0; pos < sc.grid.dim(); ++pos) children *= arity;
  for (int d = 0; d <= depth; ++d) {
    per_cell_ladder += level;
    level *= children;
  }
  int r = static_cast<int>(sc.spec_cells.size()) - 1;
  out.centralized_refinement_bound = r * per_cell_ladder * u_product;
  return out;
}

}  // namespace compref
