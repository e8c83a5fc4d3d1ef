/*
 * refinement.hpp
 *
 * Specification-guided refinement of one subsystem's abstraction.
 * Proceeds backward over the cell sequence computing, per step, the set
 * of valid symbols (those some control drives into the next step's valid
 * region); when a step has none, the coarsest stale cell is split and the
 * affected steps are recomputed. Terminates with a local controller or an
 * unrealizability verdict once every candidate cell is at maximum depth.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "compref/decomposition.hpp"

namespace compref {

/* valid symbols per specification step (index 0..r) */
struct ValidTable {
  std::vector<SymbolSet> steps;

  bool contains(int k, const SymbolId& s) const {
    return steps.at(static_cast<std::size_t>(k)).count(s) > 0;
  }
  std::size_t size(int k) const {
    return steps.at(static_cast<std::size_t>(k)).size();
  }
};

/**
 * Deterministic local controller: (step, symbol) -> control point over the
 * subsystem's modeled input dims. Keyed by the step index so that a cell
 * visited twice by the specification gets distinct entries aiming at the
 * respective next steps.
 */
class LocalController {
 public:
  using Key = std::pair<int, SymbolId>;
  using Map = std::map<Key, std::vector<double>>;

  void set(int k, const SymbolId& s, std::vector<double> u) {
    entries_[{k, s}] = std::move(u);
  }
  void erase_step(int k) {
    auto it = entries_.lower_bound({k, SymbolId{}});
    while (it != entries_.end() && it->first.first == k)
      it = entries_.erase(it);
  }
  const std::vector<double>* find(int k, const SymbolId& s) const {
    auto it = entries_.find({k, s});
    return it == entries_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return entries_.size(); }
  Map::const_iterator begin() const { return entries_.begin(); }
  Map::const_iterator end() const { return entries_.end(); }

 private:
  Map entries_;
};

/**
 * Priority queue over the cells touched by the specification. A cell
 * appears once even when several steps visit it; refinement picks the
 * shallowest cell, breaking ties by the oldest last-refined stamp, so the
 * coarsest candidates are always refined first and peers at equal depth
 * rotate fairly.
 */
class RefineQueue {
 public:
  struct Entry {
    std::size_t cell = 0;   /* projected base-grid cell index */
    int entry_step = -1;    /* step at which the cell first entered */
    std::vector<int> steps; /* all steps known to visit this cell */
    int depth = 0;          /* number of times this cell was refined */
    std::uint64_t stamp = 0;
  };

  /* dedup by cell: a revisit only records the extra step */
  void add(std::size_t cell, int step) {
    for (auto& e : entries_) {
      if (e.cell == cell) {
        e.steps.push_back(step);
        return;
      }
    }
    Entry e;
    e.cell = cell;
    e.entry_step = step;
    e.steps.push_back(step);
    e.stamp = ++clock_;
    entries_.push_back(std::move(e));
  }

  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /* shallowest first, then oldest stamp; nullptr if all at max depth */
  const Entry* pick(int max_depth) const {
    const Entry* best = nullptr;
    for (const auto& e : entries_) {
      if (e.depth >= max_depth) continue;
      if (!best || e.depth < best->depth ||
          (e.depth == best->depth && e.stamp < best->stamp))
        best = &e;
    }
    return best;
  }

  void mark_refined(std::size_t cell) {
    for (auto& e : entries_) {
      if (e.cell == cell) {
        ++e.depth;
        e.stamp = ++clock_;
        return;
      }
    }
  }

 private:
  std::vector<Entry> entries_;
  std::uint64_t clock_ = 0;
};

struct RefineEvent {
  int subsystem = 0;
  int stuck_step = 0;        /* step whose valid set was empty */
  std::size_t refined_cell = 0;
  int new_depth = 0;
  std::size_t valid_count = 0;  /* |valid set| at stuck_step after update */
  std::uint64_t evaluations = 0;
};

struct RefineOptions {
  int max_depth = 6;
  /* when set, every satisfying control is recorded per symbol instead of
     stopping at the first; the deterministic controller still takes the
     first. Costs extra reach evaluations. */
  bool record_alternatives = false;
  std::function<void(const RefineEvent&)> observer;
};

struct SubsystemSynthesis {
  ValidTable valids;
  LocalController controller;
  /* all satisfying control indices per entry (record_alternatives only) */
  std::map<LocalController::Key, std::vector<int>> alternatives;
  std::vector<RefineEvent> trace;
  std::uint64_t evaluations = 0;
};

struct Unrealizable {
  int subsystem = 0;
  int step = 0;
  std::size_t cell = 0;
  int max_depth = 0;

  std::string describe() const {
    return "subsystem " + std::to_string(subsystem) + " unrealizable at step " +
           std::to_string(step) + " (cell " + std::to_string(cell) +
           "): every candidate cell is at the maximum depth " +
           std::to_string(max_depth);
  }
};

namespace detail {

struct StepComputation {
  SymbolSet valid;
  std::vector<std::pair<SymbolId, int>> chosen;  /* symbol -> control index */
  std::map<SymbolId, std::vector<int>> all_satisfying;
};

/**
 * One valid-set computation: a symbol of step k is valid when some
 * control (scanned in declaration order) yields a nonempty constrained
 * reach set whose projection is covered by the next step's valid region.
 * The first such control is the controller choice.
 */
inline StepComputation valid_step(const SubsystemAbstraction& abs,
                                  const CellSequence& seq, int k,
                                  const SymbolSet& next_valid,
                                  bool record_alternatives) {
  StepComputation out;
  const auto& part = abs.partition();
  auto region = [&](const SymbolId& s) { return next_valid.count(s) > 0; };
  for (const SymbolId& s : abs.cell_symbols(seq.cell(k))) {
    std::vector<int> hits;
    for (int ui = 0; ui < static_cast<int>(abs.controls().size()); ++ui) {
      auto reach = abs.constrained_reach(s, ui, k, seq);
      if (!reach) continue;
      Box proj = reach->project(abs.modeled_dims());
      if (part.covered_by(proj, region)) {
        hits.push_back(ui);
        if (!record_alternatives) break;
      }
    }
    if (!hits.empty()) {
      out.valid.insert(s);
      out.chosen.emplace_back(s, hits.front());
      if (record_alternatives) out.all_satisfying[s] = std::move(hits);
    }
  }
  return out;
}

}  // namespace detail

/**
 * Refinement loop for one subsystem. Returns the valid table, the local
 * controller and the refinement trace, or an Unrealizable verdict. The
 * abstraction's partition is refined in place.
 */
inline std::variant<SubsystemSynthesis, Unrealizable> refine_subsystem(
    SubsystemAbstraction& abs, const CellSequence& seq,
    const RefineOptions& opt = {}) {
  const int r = seq.horizon();
  SubsystemSynthesis synth;
  synth.valids.steps.resize(static_cast<std::size_t>(r) + 1);
  const std::uint64_t eval_base = abs.evaluator().evaluations();

  auto refresh_target = [&] {
    /* every leaf of the final cell is valid at step r */
    auto& target = synth.valids.steps[static_cast<std::size_t>(r)];
    target.clear();
    for (const auto& s : abs.cell_symbols(seq.cell(r))) target.insert(s);
  };
  refresh_target();

  auto run_step = [&](int k) {
    auto res = detail::valid_step(abs, seq, k,
                                  synth.valids.steps[static_cast<std::size_t>(k) + 1],
                                  opt.record_alternatives);
    synth.valids.steps[static_cast<std::size_t>(k)] = std::move(res.valid);
    synth.controller.erase_step(k);
    for (const auto& [s, ui] : res.chosen)
      synth.controller.set(k, s,
                           abs.controls()[static_cast<std::size_t>(ui)]);
    if (opt.record_alternatives)
      for (auto& [s, hits] : res.all_satisfying)
        synth.alternatives[{k, s}] = std::move(hits);
  };

  RefineQueue queue;
  const std::size_t target_cell = abs.project_cell(seq.cell(r));

  for (int k = r - 1; k >= 0; --k) {
    run_step(k);
    queue.add(abs.project_cell(seq.cell(k)), k);
    while (synth.valids.steps[static_cast<std::size_t>(k)].empty()) {
      const RefineQueue::Entry* entry = queue.pick(opt.max_depth);
      if (!entry) {
        Unrealizable fail;
        fail.subsystem = abs.spec().id;
        fail.step = k;
        fail.cell = abs.project_cell(seq.cell(k));
        fail.max_depth = opt.max_depth;
        return fail;
      }
      const std::size_t cell = entry->cell;

      /* A cell may be visited by several specification steps. Split the
         symbols invalid at the most downstream visited step (for the
         stuck step's own cell that is every leaf, since its valid set is
         empty), falling back to later steps, then to a uniform split when
         every visited step is already fully valid. Recomputation has to
         restart from the highest step visiting this cell: its valid set
         refers to leaves that may just have been split. */
      std::vector<int> steps = entry->steps;
      std::sort(steps.begin(), steps.end());
      const int rerun_from = steps.back();

      std::vector<SymbolId> to_split;
      auto invalid_at = [&](int step) {
        std::vector<SymbolId> out;
        for (const auto& s : abs.partition().cell_leaves(cell))
          if (!synth.valids.contains(step, s)) out.push_back(s);
        return out;
      };
      for (int step : steps) {
        to_split = invalid_at(step);
        if (!to_split.empty()) break;
      }
      if (to_split.empty()) to_split = abs.partition().cell_leaves(cell);

      for (const auto& s : to_split) abs.partition().split(s);
      queue.mark_refined(cell);
      if (cell == target_cell) refresh_target();

      for (int l = rerun_from; l >= k; --l) run_step(l);

      RefineEvent ev;
      ev.subsystem = abs.spec().id;
      ev.stuck_step = k;
      ev.refined_cell = cell;
      ev.new_depth = abs.partition().cell_depth(cell);
      ev.valid_count = synth.valids.size(k);
      ev.evaluations = abs.evaluator().evaluations() - eval_base;
      synth.trace.push_back(ev);
      if (opt.observer) opt.observer(ev);
    }
  }
  synth.evaluations = abs.evaluator().evaluations() - eval_base;
  return synth;
}

/**
 * Post-hoc audit of a synthesized controller: every entry must still pass
 * the membership condition it was selected with. Returns the number of
 * failing entries (0 for an untouched synthesis output).
 */
inline int audit_controller(const SubsystemAbstraction& abs,
                            const CellSequence& seq,
                            const ValidTable& valids,
                            const LocalController& ctrl) {
  int failures = 0;
  for (const auto& [key, u] : ctrl) {
    const auto& [k, s] = key;
    auto reach = abs.constrained_reach(s, u, k, seq);
    if (!reach) {
      ++failures;
      continue;
    }
    const auto& next = valids.steps[static_cast<std::size_t>(k) + 1];
    if (!abs.partition().covered_by(
            reach->project(abs.modeled_dims()),
            [&](const SymbolId& sym) { return next.count(sym) > 0; }))
      ++failures;
  }
  return failures;
}

}  // namespace compref
