/*
 * engine.hpp
 *
 * Orchestration: run the per-subsystem refinements (in parallel), compose
 * the controllers, simulate the closed loop and run the verification
 * suite. All randomness is derived from explicit seeds; rerunning with
 * the same configuration reproduces identical results.
 */

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>

#include "compref/composition.hpp"
#include "compref/parallel.hpp"
#include "compref/scenario.hpp"

namespace compref {

/* splitmix64: cheap independent sub-seeds from one master seed */
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct SynthesisSettings {
  int max_depth = 6;
  int split_arity = 2;
  std::uint64_t seed = 1;
  int threads = 1;
  bool record_alternatives = false;
  std::function<void(const RefineEvent&)> observer;
};

struct SynthesisResult {
  bool realizable = false;
  std::vector<std::shared_ptr<SubsystemAbstraction>> abstractions;
  std::vector<SubsystemSynthesis> syntheses;  /* empty entry on failure */
  std::optional<Unrealizable> failure;
  std::uint64_t total_evaluations = 0;
  double wall_seconds = 0.0;
};

inline SynthesisResult synthesize(const Scenario& sc,
                                  const SynthesisSettings& settings = {}) {
  sc.validate();
  validate_monotone_signs(*sc.system, 100, derive_seed(settings.seed, 77));
  auto start = std::chrono::steady_clock::now();

  SynthesisResult result;
  const std::size_t m = sc.subsystems.size();
  result.abstractions.resize(m);
  result.syntheses.resize(m);
  std::vector<std::optional<Unrealizable>> failures(m);

  CellSequence seq = sc.sequence();
  parallel_for(m, settings.threads, [&](std::size_t i) {
    auto evaluator = std::make_shared<ReachEvaluator>(
        sc.system, sc.tau, sc.integrator_steps);
    result.abstractions[i] = std::make_shared<SubsystemAbstraction>(
        sc.subsystems[i], sc.grid, sc.control_sets[i], evaluator,
        settings.split_arity);
    RefineOptions opt;
    opt.max_depth = settings.max_depth;
    opt.record_alternatives = settings.record_alternatives;
    opt.observer = settings.observer;
    auto outcome = refine_subsystem(*result.abstractions[i], seq, opt);
    if (auto* synth = std::get_if<SubsystemSynthesis>(&outcome))
      result.syntheses[i] = std::move(*synth);
    else
      failures[i] = std::get<Unrealizable>(outcome);
  });

  result.realizable = true;
  for (std::size_t i = 0; i < m; ++i) {
    result.total_evaluations += result.abstractions[i]->evaluator().evaluations();
    if (failures[i] && !result.failure) {
      result.failure = failures[i];
      result.realizable = false;
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

inline GlobalController make_global_controller(const Scenario& sc,
                                               const SynthesisResult& result) {
  if (!result.realizable)
    throw std::logic_error("make_global_controller: synthesis failed");
  std::vector<GlobalController::Member> members;
  for (std::size_t i = 0; i < result.abstractions.size(); ++i) {
    auto abs = result.abstractions[i];
    members.push_back({abs->spec(),
                       std::shared_ptr<const RefinedPartition>(
                           abs, &abs->partition()),
                       result.syntheses[i].controller});
  }
  return GlobalController(std::move(members), sc.system->state_dim,
                          sc.system->control_dim);
}

struct Trial {
  bool satisfied = false;
  int failed_step = -1;  /* first step whose cell was missed, -1 if none */
  std::string note;
  std::vector<std::vector<double>> states;    /* r+1 points */
  std::vector<std::vector<double>> controls;  /* r points */
};

struct SimulationReport {
  int trials = 0;
  int satisfied = 0;
  std::vector<Trial> runs;
};

/**
 * Closed-loop trials: initial states are drawn uniformly from the first
 * cell and accepted when the composed controller is defined there; each
 * step applies the controller and a fresh piecewise-constant random
 * disturbance. Per-trial seeds make the report independent of the thread
 * count.
 */
inline SimulationReport simulate(const Scenario& sc, const GlobalController& gc,
                                 int trials, std::uint64_t seed,
                                 int threads = 1) {
  CellSequence seq = sc.sequence();
  const ControlSystem& sys = *sc.system;
  SimulationReport report;
  report.trials = trials;
  report.runs.resize(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    Trial& trial = report.runs[t];
    std::mt19937_64 rng(derive_seed(seed, t));
    Box first = seq.box(0);
    std::vector<double> x(static_cast<std::size_t>(sys.state_dim));
    bool found = false;
    for (int attempt = 0; attempt < 100000 && !found; ++attempt) {
      for (int i = 0; i < first.size(); ++i) {
        std::uniform_real_distribution<double> d(first.low(i), first.high(i));
        x[static_cast<std::size_t>(i)] = d(rng);
      }
      found = gc.control(x, 0).ok();
    }
    if (!found) {
      trial.note = "no controllable initial state found in the first cell";
      return;
    }
    trial.states.push_back(x);
    for (int k = 0; k < seq.horizon(); ++k) {
      auto lookup = gc.control(x, k);
      if (!lookup.ok()) {
        trial.note = "controller undefined at step " + std::to_string(k) +
                     " (subsystem " + std::to_string(lookup.missing_subsystem) +
                     ")";
        trial.failed_step = k;
        return;
      }
      DisturbanceSignal w = [&](int, std::span<double> out) {
        for (int i = 0; i < sys.disturbance_dim; ++i) {
          const Box& wb = sys.disturbance_bounds;
          std::uniform_real_distribution<double> d(wb.low(i), wb.high(i));
          out[static_cast<std::size_t>(i)] =
              wb.width(i) > 0 ? d(rng) : wb.low(i);
        }
      };
      x = integrate(sys, x, lookup.u, w, sc.tau, sc.integrator_steps);
      trial.controls.push_back(lookup.u);
      trial.states.push_back(x);
    }
    trial.satisfied = seq.check_trace(trial.states);
    if (!trial.satisfied) {
      for (int k = 0; k <= seq.horizon(); ++k) {
        try {
          if (seq.grid().locate_cell(trial.states[static_cast<std::size_t>(k)]) !=
              seq.cell(k)) {
            trial.failed_step = k;
            break;
          }
        } catch (const OutOfDomain&) {
          trial.failed_step = k;
          break;
        }
      }
      trial.note = "trajectory missed the cell of step " +
                   std::to_string(trial.failed_step);
    }
  });

  for (const auto& t : report.runs) report.satisfied += t.satisfied;
  return report;
}

struct PartitionLawCheck {
  int first = 0, second = 0;       /* subsystem ids */
  bool evaluated = false;          /* skipped when the product is too large */
  std::size_t cells = 0;
  double volume_gap = 0.0;
  bool interior_disjoint = true;
  bool maximal = true;
};

struct VerifyReport {
  FeedbackCheckReport feedback;
  NonBlockingReport nonblocking;
  std::vector<PartitionLawCheck> partition_laws;
  int controller_audit_failures = 0;
  bool pass = false;
};

inline VerifyReport verify(const Scenario& sc, const SynthesisResult& synth,
                           const GlobalController& gc, int samples,
                           std::uint64_t seed) {
  if (!synth.realizable)
    throw std::logic_error("verify: synthesis artifacts are incomplete");
  CellSequence seq = sc.sequence();
  VerifyReport report;
  report.feedback = check_feedback_refinement(synth.abstractions, gc, seq,
                                              samples, derive_seed(seed, 1));
  report.nonblocking =
      check_nonblocking(synth.abstractions, synth.syntheses, seq);

  for (std::size_t i = 0; i < synth.abstractions.size(); ++i)
    report.controller_audit_failures +=
        audit_controller(*synth.abstractions[i], seq,
                         synth.syntheses[i].valids,
                         synth.syntheses[i].controller);

  /* pairwise composed-partition laws, desk scale only */
  std::vector<BoxPartition> materialized;
  for (const auto& abs : synth.abstractions)
    materialized.push_back(materialize(abs->partition()));
  constexpr std::size_t kPairBudget = 250000;
  constexpr std::size_t kQuadraticBudget = 3000;
  std::mt19937_64 rng(derive_seed(seed, 2));
  for (std::size_t i = 0; i < materialized.size(); ++i) {
    for (std::size_t j = i + 1; j < materialized.size(); ++j) {
      PartitionLawCheck law;
      law.first = synth.abstractions[i]->spec().id;
      law.second = synth.abstractions[j]->spec().id;
      if (materialized[i].cells.size() * materialized[j].cells.size() >
          kPairBudget) {
        report.partition_laws.push_back(law);
        continue;
      }
      BoxPartition c = compose(materialized[i], materialized[j]);
      law.evaluated = true;
      law.cells = c.cells.size();
      law.volume_gap = covering_volume_gap(c);
      if (c.cells.size() <= kQuadraticBudget) {
        law.interior_disjoint = !any_interior_overlap(c);
        law.maximal = !any_strict_containment(c);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, c.cells.size() - 1);
        for (int t = 0; t < 50000; ++t) {
          std::size_t a = pick(rng), b = pick(rng);
          if (a == b) continue;
          if (c.cells[a].interior_intersects(c.cells[b]))
            law.interior_disjoint = false;
          if (c.cells[a].contains(c.cells[b]) && !(c.cells[a] == c.cells[b]))
            law.maximal = false;
        }
      }
      report.partition_laws.push_back(law);
    }
  }

  report.pass = report.feedback.violations == 0 && report.nonblocking.pass &&
                report.controller_audit_failures == 0;
  for (const auto& law : report.partition_laws)
    if (law.evaluated)
      report.pass = report.pass && law.volume_gap < 1e-9 &&
                    law.interior_disjoint && law.maximal;
  return report;
}

/* per-subsystem synthesis summary used by the stats report */
struct SubsystemStats {
  int id = 0;
  std::uint64_t evaluations = 0;
  std::size_t refinements = 0;
  int deepest_cell = 0;
  std::size_t leaves = 0;
  std::size_t controller_entries = 0;
};

inline std::vector<SubsystemStats> collect_stats(const SynthesisResult& r) {
  std::vector<SubsystemStats> out;
  for (std::size_t i = 0; i < r.abstractions.size(); ++i) {
    SubsystemStats s;
    s.id = r.abstractions[i]->spec().id;
    s.evaluations = r.abstractions[i]->evaluator().evaluations();
    s.refinements = r.syntheses[i].trace.size();
    const auto& part = r.abstractions[i]->partition();
    for (std::size_t cell = 0; cell < part.base().cell_count(); ++cell)
      s.deepest_cell = std::max(s.deepest_cell, part.cell_depth(cell));
    s.leaves = part.leaf_count();
    s.controller_entries = r.syntheses[i].controller.size();
    out.push_back(s);
  }
  return out;
}

}  // namespace compref
