#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "compref/decomposition.hpp"

using namespace compref;

namespace {

/* cooperative 2-d system, one disturbance, on [-5,5]^2 */
ControlSystem plant() {
  ControlSystem sys;
  sys.name = "plant2d";
  sys.state_dim = 2;
  sys.control_dim = 2;
  sys.disturbance_dim = 1;
  sys.state_bounds = Box::cube(2, -5.0, 5.0);
  sys.control_bounds = Box::cube(2, -1.0, 1.0);
  sys.disturbance_bounds = Box({0}, {-0.1}, {0.1});
  sys.state_signs = {1, 1};
  sys.control_signs = {1, 1};
  sys.disturbance_signs = {1};
  sys.field = [](std::span<const double> x, std::span<const double> u,
                 std::span<const double> w, std::span<double> out) {
    out[0] = -0.8 * x[0] + 0.3 * x[1] + 2.0 * u[0] + w[0];
    out[1] = 0.2 * x[0] - 0.8 * x[1] + 2.0 * u[1];
  };
  return sys;
}

struct Fixture {
  std::shared_ptr<const ControlSystem> sys;
  GridPartition grid;
  CellSequence seq;
  std::shared_ptr<ReachEvaluator> evaluator;

  Fixture()
      : sys(std::make_shared<const ControlSystem>(plant())),
        grid(GridPartition::uniform(sys->state_bounds, std::vector<int>{5, 5})),
        seq(grid,
            {grid.index_of(std::vector<int>{3, 3}),
             grid.index_of(std::vector<int>{2, 2}),
             grid.index_of(std::vector<int>{1, 1})}),
        evaluator(std::make_shared<ReachEvaluator>(sys, 0.5, 30)) {}

  SubsystemAbstraction observer_abstraction() const {
    /* controls dim 0, observes dim 1 */
    return SubsystemAbstraction({1, {0}, {1}, {0}}, grid,
                                {{-1.0}, {-0.5}, {0.0}, {0.5}, {1.0}},
                                evaluator);
  }

  SubsystemAbstraction centralized_abstraction() const {
    return SubsystemAbstraction({1, {0, 1}, {}, {0, 1}}, grid,
                                {{0.0, 0.0}, {-1.0, -1.0}}, evaluator);
  }
};

}  // namespace

TEST_CASE("decomposition validation reports overlaps and gaps") {
  std::vector<SubsystemSpec> ok{{1, {0, 2}, {}, {0, 2}},
                                {2, {3, 5}, {}, {3, 5}},
                                {3, {6, 7}, {}, {6, 7}},
                                {4, {1}, {3}, {1}},
                                {5, {4}, {5}, {4}}};
  CHECK(validate_decomposition(ok, 8, 8).empty());

  std::vector<SubsystemSpec> overlap{{1, {0, 1}, {}, {0}}, {2, {1}, {}, {1}}};
  auto issues = validate_decomposition(overlap, 2, 2);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].fault == DecompositionFault::StateOverlap);
  CHECK(issues[0].index == 1);

  std::vector<SubsystemSpec> uncovered{{1, {0}, {}, {0, 1}}};
  issues = validate_decomposition(uncovered, 2, 2);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].fault == DecompositionFault::StateUncovered);
  CHECK(issues[0].index == 1);

  std::vector<SubsystemSpec> clash{{1, {0, 1}, {1}, {0, 1}}};
  issues = validate_decomposition(clash, 2, 2);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].fault == DecompositionFault::ObservedControlledClash);
}

TEST_CASE("index-set algebra derives hidden and external sets") {
  SubsystemSpec sub{4, {1}, {3}, {1}};
  CHECK(sub.modeled() == std::vector<int>{1, 3});
  CHECK(sub.hidden(8) == std::vector<int>{0, 2, 4, 5, 6, 7});
  CHECK(sub.external_inputs(8) == std::vector<int>{0, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("with all dims modeled the restricted reach is the plain reach") {
  Fixture fx;
  auto abs = fx.centralized_abstraction();
  SymbolId s;
  s.cell = abs.project_cell(fx.seq.cell(0));
  Box direct = fx.evaluator->over_reach(
      abs.partition().symbol_box(s),
      Box::point({0, 1}, std::vector<double>{0.0, 0.0}));
  CHECK(abs.assumed_reach(s, 0, 0, fx.seq) == direct);
  /* no observed dims: the constrained reach equals the assumed reach */
  auto constrained = abs.constrained_reach(s, 0, 0, fx.seq);
  REQUIRE(constrained.has_value());
  CHECK(*constrained == abs.assumed_reach(s, 0, 0, fx.seq));
}

TEST_CASE("zero dynamics reach exactly the start set") {
  Fixture fx;
  auto frozen = plant();
  frozen.field = [](std::span<const double>, std::span<const double>,
                    std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  auto ev = std::make_shared<ReachEvaluator>(
      std::make_shared<const ControlSystem>(frozen), 0.5, 10);
  SubsystemAbstraction abs({1, {0}, {1}, {0}}, fx.grid,
                           {{0.0}}, ev);
  SymbolId s;
  s.cell = abs.project_cell(fx.seq.cell(0));
  Box reach = abs.assumed_reach(s, 0, 0, fx.seq);
  CHECK(reach == fx.seq.box(0));  /* cell with modeled dims replaced by s */
}

TEST_CASE("a symbol outside the step cell is rejected") {
  Fixture fx;
  auto abs = fx.observer_abstraction();
  SymbolId wrong;
  wrong.cell = abs.project_cell(fx.seq.cell(2));  /* not the step-0 cell */
  CHECK_THROWS_AS(abs.assumed_reach(wrong, 0, 0, fx.seq), SymbolOutsideCell);
}

TEST_CASE("the observed-dim trim never widens and can empty the reach") {
  Fixture fx;
  auto abs = fx.observer_abstraction();
  SymbolId s;
  s.cell = abs.project_cell(fx.seq.cell(1));

  for (int ui = 0; ui < 5; ++ui) {
    Box assumed = abs.assumed_reach(s, ui, 1, fx.seq);
    auto constrained = abs.constrained_reach(s, ui, 1, fx.seq);
    if (constrained) {
      CHECK(assumed.contains(*constrained));
      /* trim affects only observed dims */
      CHECK(constrained->project(std::vector<int>{0}) ==
            assumed.project(std::vector<int>{0}));
      /* by construction the observed slice sits inside the next cell */
      CHECK(fx.seq.box(2)
                .project(std::vector<int>{1})
                .contains(constrained->project(std::vector<int>{1})));
    }
  }

  /* an artificial sequence whose next cell is far away on the observed dim
     empties the trim */
  CellSequence far(fx.grid, {fx.grid.index_of(std::vector<int>{3, 3}),
                             fx.grid.index_of(std::vector<int>{3, 0})});
  SymbolId top;
  top.cell = abs.project_cell(far.cell(0));
  CHECK_FALSE(abs.constrained_reach(top, 4, 0, far).has_value());
}

TEST_CASE("successors are the leaves touching the projected reach") {
  Fixture fx;
  auto abs = fx.observer_abstraction();
  SymbolId s;
  s.cell = abs.project_cell(fx.seq.cell(0));

  auto succ = abs.successors(s, 2, 0, fx.seq);
  CHECK_FALSE(succ.empty());
  auto reach = abs.constrained_reach(s, 2, 0, fx.seq);
  REQUIRE(reach.has_value());
  Box proj = reach->project(abs.modeled_dims());
  for (const auto& t : succ)
    CHECK(abs.partition().symbol_box(t).intersects(proj));

  /* empty pair: no successors */
  CellSequence far(fx.grid, {fx.grid.index_of(std::vector<int>{3, 3}),
                             fx.grid.index_of(std::vector<int>{3, 0})});
  SymbolId top;
  top.cell = abs.project_cell(far.cell(0));
  CHECK(abs.successors(top, 4, 0, far).empty());
}

TEST_CASE("sampled transitions respect the restricted reach sets") {
  Fixture fx;
  auto abs = fx.observer_abstraction();
  const int k = 0;
  SymbolId s;
  s.cell = abs.project_cell(fx.seq.cell(k));
  Box cell = fx.seq.box(k);
  Box next = fx.seq.box(k + 1);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int in_next_on_observed = 0;
  for (int ui = 0; ui < 5; ++ui) {
    Box assumed = abs.assumed_reach(s, ui, k, fx.seq);
    auto constrained = abs.constrained_reach(s, ui, k, fx.seq);
    double u0 = abs.controls()[static_cast<std::size_t>(ui)][0];
    for (int t = 0; t < 200; ++t) {
      std::vector<double> x0{cell.low(0) + unit(rng) * cell.width(0),
                             cell.low(1) + unit(rng) * cell.width(1)};
      /* modeled input pinned, external input free in its range */
      std::vector<double> u{u0, -1.0 + 2.0 * unit(rng)};
      DisturbanceSignal w = [&](int, std::span<double> out) {
        out[0] = -0.1 + 0.2 * unit(rng);
      };
      auto endpoint = integrate(*fx.sys, x0, u, w, fx.evaluator->tau(),
                                fx.evaluator->steps());
      REQUIRE(assumed.contains_point(endpoint));
      bool observed_ok =
          next.project(std::vector<int>{1})
              .contains_point(std::vector<double>{endpoint[1]});
      if (observed_ok) {
        ++in_next_on_observed;
        REQUIRE(constrained.has_value());
        REQUIRE(constrained->contains_point(endpoint));
      }
    }
  }
  CHECK(in_next_on_observed > 0);  /* the conditional branch was exercised */
}

TEST_CASE("each restricted reach evaluation counts once") {
  Fixture fx;
  auto abs = fx.observer_abstraction();
  SymbolId s;
  s.cell = abs.project_cell(fx.seq.cell(0));
  std::uint64_t before = fx.evaluator->evaluations();
  abs.assumed_reach(s, 0, 0, fx.seq);
  CHECK(fx.evaluator->evaluations() == before + 1);
  abs.constrained_reach(s, 1, 0, fx.seq);
  CHECK(fx.evaluator->evaluations() == before + 2);
}
