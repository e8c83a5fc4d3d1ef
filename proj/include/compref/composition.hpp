/*
 * composition.hpp
 *
 * Composition of subsystem partitions and controllers. The composed
 * partition is only ever materialized at desk scale for the partition-law
 * checks; the runtime controller works directly through per-subsystem
 * symbol lookups, so the (astronomically large) composed symbol set is
 * never built.
 */

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "compref/refinement.hpp"

namespace compref {

/* explicit interval partition: a list of boxes tiling a domain */
struct BoxPartition {
  std::vector<int> dims;
  Box domain;
  std::vector<Box> cells;
};

inline BoxPartition materialize(const RefinedPartition& p) {
  BoxPartition out;
  out.dims = p.domain().dims();
  out.domain = p.domain();
  p.for_each_leaf(
      [&](const SymbolId& s) { out.cells.push_back(p.symbol_box(s)); });
  return out;
}

/**
 * Composition of two interval partitions over possibly overlapping
 * dimension sets: the coarsest common refinement, realized pairwise. A
 * pair of cells with positive overlap on every shared dimension yields
 * one composed cell that keeps each member's bounds on its private dims
 * and the intersection on shared dims. These are exactly the maximal
 * boxes whose projections fit inside one cell of each member; disjoint
 * dimension sets degenerate to the Cartesian product.
 */
inline BoxPartition compose(const BoxPartition& a, const BoxPartition& b) {
  std::vector<int> shared;
  for (int d : a.dims)
    if (std::find(b.dims.begin(), b.dims.end(), d) != b.dims.end())
      shared.push_back(d);
  if (!shared.empty()) {
    if (!(a.domain.project(shared) == b.domain.project(shared)))
      throw DomainMismatch(
          "compose: partitions disagree on the shared-dimension domain");
  }
  std::vector<int> dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());

  BoxPartition out;
  out.dims = dims;
  {
    std::vector<double> lo, hi;
    for (int d : dims) {
      const Box& src = a.domain.pos_of(d) >= 0 ? a.domain : b.domain;
      int pos = src.pos_of(d);
      lo.push_back(src.low(pos));
      hi.push_back(src.high(pos));
    }
    out.domain = Box(dims, std::move(lo), std::move(hi));
  }

  for (const Box& ca : a.cells) {
    for (const Box& cb : b.cells) {
      bool positive = true;
      for (int d : shared) {
        double lo = std::max(ca.low(ca.pos_of(d)), cb.low(cb.pos_of(d)));
        double hi = std::min(ca.high(ca.pos_of(d)), cb.high(cb.pos_of(d)));
        if (!(lo < hi)) {
          positive = false;
          break;
        }
      }
      if (!positive) continue;
      std::vector<double> lo, hi;
      for (int d : dims) {
        int pa = ca.pos_of(d), pb = cb.pos_of(d);
        if (pa >= 0 && pb >= 0) {
          lo.push_back(std::max(ca.low(pa), cb.low(pb)));
          hi.push_back(std::min(ca.high(pa), cb.high(pb)));
        } else if (pa >= 0) {
          lo.push_back(ca.low(pa));
          hi.push_back(ca.high(pa));
        } else {
          lo.push_back(cb.low(pb));
          hi.push_back(cb.high(pb));
        }
      }
      out.cells.emplace_back(dims, std::move(lo), std::move(hi));
    }
  }
  return out;
}

inline BoxPartition compose(std::span<const BoxPartition> parts) {
  if (parts.empty()) throw std::invalid_argument("compose: no partitions");
  BoxPartition acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = compose(acc, parts[i]);
  return acc;
}

/* relative gap between the summed cell volumes and the domain volume */
inline double covering_volume_gap(const BoxPartition& p) {
  double sum = 0.0, comp = 0.0;  /* Kahan summation */
  for (const Box& c : p.cells) {
    double y = c.volume() - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double dv = p.domain.volume();
  return std::abs(sum - dv) / std::max(dv, 1e-300);
}

inline bool any_interior_overlap(const BoxPartition& p) {
  for (std::size_t i = 0; i < p.cells.size(); ++i)
    for (std::size_t j = i + 1; j < p.cells.size(); ++j)
      if (p.cells[i].interior_intersects(p.cells[j])) return true;
  return false;
}

inline bool any_strict_containment(const BoxPartition& p) {
  for (std::size_t i = 0; i < p.cells.size(); ++i)
    for (std::size_t j = 0; j < p.cells.size(); ++j)
      if (i != j && p.cells[i].contains(p.cells[j]) &&
          !(p.cells[i] == p.cells[j]))
        return true;
  return false;
}

/**
 * Composed controller over the original state space: for a state x and a
 * specification step k it assembles the full control vector from the
 * per-subsystem entries at the symbols containing the projections of x.
 * Defined exactly where every member lookup succeeds.
 */
class GlobalController {
 public:
  struct Member {
    SubsystemSpec spec;
    std::shared_ptr<const RefinedPartition> partition;
    LocalController controller;
  };

  struct Lookup {
    std::vector<double> u;
    int missing_subsystem = -1;  /* id of the first failing member */
    bool ok() const { return missing_subsystem < 0; }
  };

  GlobalController(std::vector<Member> members, int state_dim, int control_dim)
      : members_(std::move(members)),
        state_dim_(state_dim),
        control_dim_(control_dim) {}

  const std::vector<Member>& members() const { return members_; }
  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }

  /* symbol of member i containing the projection of the full state x */
  SymbolId decompose(std::size_t i, std::span<const double> x) const {
    const Member& m = members_[i];
    auto xi = project_point(x, m.spec.modeled());
    return m.partition->locate(xi);
  }

  /* unique symbol of member i containing the projection of a composed cell */
  SymbolId decompose_cell(std::size_t i, const Box& cell) const {
    const Member& m = members_[i];
    auto c = cell.project(m.spec.modeled()).center();
    return m.partition->locate(c);
  }

  Lookup control(std::span<const double> x, int k) const {
    Lookup out;
    out.u.assign(static_cast<std::size_t>(control_dim_), 0.0);
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const Member& m = members_[i];
      SymbolId s;
      try {
        s = decompose(i, x);
      } catch (const OutOfDomain&) {
        out.missing_subsystem = m.spec.id;
        return out;
      }
      const std::vector<double>* u = m.controller.find(k, s);
      if (!u) {
        out.missing_subsystem = m.spec.id;
        return out;
      }
      for (std::size_t j = 0; j < m.spec.control_inputs.size(); ++j)
        out.u[static_cast<std::size_t>(m.spec.control_inputs[j])] = (*u)[j];
    }
    return out;
  }

 private:
  std::vector<Member> members_;
  int state_dim_;
  int control_dim_;
};

struct TransitionViolation {
  int step = 0;
  int subsystem = -1;  /* -1: the concrete state missed the next cell */
  std::vector<double> state;
  std::string note;
};

struct FeedbackCheckReport {
  int samples = 0;
  int violations = 0;
  std::vector<TransitionViolation> details;
};

/**
 * Empirical transition-matching check: for sampled pairs (k, x) where the
 * composed controller is defined, applies it, draws a random disturbance
 * trajectory, and verifies that every subsystem's successor symbol is an
 * abstract successor of its current symbol and that the concrete state
 * reaches the next cell. A correct synthesis yields zero violations.
 */
inline FeedbackCheckReport check_feedback_refinement(
    std::span<const std::shared_ptr<SubsystemAbstraction>> abstractions,
    const GlobalController& gc, const CellSequence& seq, int samples,
    std::uint64_t seed, int max_rejections = 200000) {
  FeedbackCheckReport report;
  if (abstractions.empty()) return report;
  const ControlSystem& sys = abstractions[0]->evaluator().system();
  const double tau = abstractions[0]->evaluator().tau();
  const int steps = abstractions[0]->evaluator().steps();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step_dist(0, seq.horizon() - 1);
  int rejections = 0;
  while (report.samples < samples) {
    int k = step_dist(rng);
    Box cell = seq.box(k);
    std::vector<double> x(static_cast<std::size_t>(sys.state_dim));
    for (int i = 0; i < cell.size(); ++i) {
      std::uniform_real_distribution<double> d(cell.low(i), cell.high(i));
      x[static_cast<std::size_t>(i)] = d(rng);
    }
    auto lookup = gc.control(x, k);
    if (!lookup.ok()) {
      if (++rejections > max_rejections)
        throw std::runtime_error(
            "check_feedback_refinement: could not sample states in the "
            "controller domain");
      continue;
    }
    ++report.samples;
    DisturbanceSignal w = [&](int, std::span<double> wout) {
      for (int i = 0; i < sys.disturbance_dim; ++i) {
        const Box& wb = sys.disturbance_bounds;
        std::uniform_real_distribution<double> d(wb.low(i), wb.high(i));
        wout[static_cast<std::size_t>(i)] =
            wb.width(i) > 0 ? d(rng) : wb.low(i);
      }
    };
    std::vector<double> next = integrate(sys, x, lookup.u, w, tau, steps);

    bool violated = false;
    for (std::size_t i = 0; i < abstractions.size(); ++i) {
      const auto& abs = *abstractions[i];
      SymbolId cur = gc.decompose(i, x);
      auto u_local = project_point(lookup.u, abs.spec().control_inputs);
      auto reach = abs.constrained_reach(cur, u_local, k, seq);
      bool ok = false;
      if (reach) {
        try {
          SymbolId nxt = gc.decompose(i, next);
          Box nxt_box = abs.partition().symbol_box(nxt);
          ok = nxt_box.intersects(reach->project(abs.modeled_dims()));
        } catch (const OutOfDomain&) {
          ok = false;
        }
      }
      if (!ok) {
        violated = true;
        report.details.push_back(
            {k, abs.spec().id, x,
             "successor symbol is not an abstract successor"});
      }
    }
    try {
      if (seq.grid().locate_cell(next) != seq.cell(k + 1)) {
        violated = true;
        report.details.push_back({k, -1, x, "state missed the next cell"});
      }
    } catch (const OutOfDomain&) {
      violated = true;
      report.details.push_back({k, -1, x, "state left the domain"});
    }
    if (violated) ++report.violations;
  }
  return report;
}

struct NonBlockingReport {
  bool pass = true;
  std::size_t checked = 0;
  std::vector<TransitionViolation> failures;
};

/**
 * Non-blocking check over all synthesized valid symbols: every controller
 * entry must yield a nonempty constrained reach set with at least one
 * abstract successor.
 */
inline NonBlockingReport check_nonblocking(
    std::span<const std::shared_ptr<SubsystemAbstraction>> abstractions,
    std::span<const SubsystemSynthesis> syntheses, const CellSequence& seq) {
  NonBlockingReport report;
  for (std::size_t i = 0; i < abstractions.size(); ++i) {
    const auto& abs = *abstractions[i];
    const auto& synth = syntheses[i];
    for (int k = 0; k < seq.horizon(); ++k) {
      /* sorted for reproducible reports */
      std::vector<SymbolId> symbols(
          synth.valids.steps[static_cast<std::size_t>(k)].begin(),
          synth.valids.steps[static_cast<std::size_t>(k)].end());
      std::sort(symbols.begin(), symbols.end());
      for (const auto& s : symbols) {
        ++report.checked;
        const std::vector<double>* u = synth.controller.find(k, s);
        bool ok = false;
        std::string note;
        if (!u) {
          note = "valid symbol without controller entry";
        } else {
          auto succ = abs.successors(s, *u, k, seq);
          ok = !succ.empty();
          if (!ok) note = "controller entry has no abstract successor";
        }
        if (!ok) {
          report.pass = false;
          report.failures.push_back({k, abs.spec().id, {}, note});
        }
      }
    }
  }
  return report;
}

}  // namespace compref
