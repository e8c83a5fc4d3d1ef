#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "compref/engine.hpp"
#include "compref/ufad.hpp"

using namespace compref;

TEST_CASE("radiation magnitude is comparable to the other heat transfers") {
  UfadParams params;
  double body_k = params.body_heat_celsius + 273.15;
  double magnitude = params.radiation_coeff * std::pow(body_k, 4.0);
  CHECK_THAT(magnitude, Catch::Matchers::WithinRel(9.3e-5, 0.02));
}

TEST_CASE("equal temperatures leave only the radiation term") {
  ControlSystem sys = ufad_field();
  std::vector<double> u(8, 0.0);
  for (double t : {25.0, 30.0, 37.0}) {
    std::vector<double> x(8, t);
    std::vector<double> w(3, t);  /* pin every boundary node to t */
    std::vector<double> rate(8);
    sys.field(x, u, w, rate);
    double tk = t + 273.15;
    double expected = sys.discrete ? 0.0 : 0.0;
    (void)expected;
    double radiation =
        1e-14 * (std::pow(37.0 + 273.15, 4.0) - std::pow(tk, 4.0));
    for (double r : rate) CHECK_THAT(r, Catch::Matchers::WithinAbs(radiation, 1e-15));
  }
  /* at the body-heat temperature the field vanishes entirely and a short
     flow stays put */
  std::vector<double> x(8, 37.0), w(3, 37.0);
  auto end = rk4_flow(sys.field, x, u, constant_disturbance(w), 3, 60.0, 10);
  for (int i = 0; i < 8; ++i)
    CHECK_THAT(end[static_cast<std::size_t>(i)],
               Catch::Matchers::WithinAbs(37.0, 1e-12));
}

TEST_CASE("the helper fan has a positive effect on the shared room") {
  ControlSystem sys = ufad_field();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> temp(20.0, 30.0), power(-1.0, 0.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(8), u(8), w{15.5, 27.0, 29.0};
    for (auto& v : x) v = temp(rng);
    for (auto& v : u) v = power(rng);
    double h = 1e-6;
    std::vector<double> lo(8), hi(8);
    u[7] += h;
    sys.field(x, u, w, hi);
    u[7] -= 2 * h;
    sys.field(x, u, w, lo);
    double slope = (hi[5] - lo[5]) / (2 * h);
    double expected = 0.25 * 2e-4 * (x[5] - w[0]);
    CHECK(slope > 0.0);
    CHECK_THAT(slope, Catch::Matchers::WithinRel(expected, 1e-4));
  }
}

TEST_CASE("the benchmark model is cooperative on its operating range") {
  ControlSystem sys = ufad_field();
  CHECK_NOTHROW(validate_monotone_signs(sys, 1000, 404));

  /* letting the state range dip into the plenum temperatures breaks the
     sign of the fan effect */
  UfadParams cold;
  cold.state_low = 14.0;
  ControlSystem bad = ufad_field(cold);
  CHECK_THROWS_AS(validate_monotone_signs(bad, 1000, 404), MonotonicityError);
}

TEST_CASE("benchmark scenario facts") {
  Scenario sc = ufad_scenario();
  CHECK(sc.grid.cell_count() == 390625);
  CHECK(sc.tau == 1800.0);
  CHECK(sc.spec_cells.size() == 5);
  CHECK(validate_decomposition(sc.subsystems, 8, 8).empty());
  CHECK_NOTHROW(sc.validate());

  CellSequence seq = sc.sequence();
  CHECK(seq.box(0) == Box::cube(8, 28.0, 30.0));
  CHECK(seq.projected_step(3, std::vector<int>{2, 3}) ==
        Box({2, 3}, {26.0, 26.0}, {28.0, 28.0}));
  CHECK(seq.projected_step(4, std::vector<int>{6, 7}) ==
        Box({6, 7}, {20.0, 20.0}, {22.0, 22.0}));

  /* the first subsystem sees the same projected cell at steps 0..2 */
  std::vector<int> first{0, 2};
  CHECK(seq.projected_step(0, first) == seq.projected_step(1, first));
  CHECK(seq.projected_step(1, first) == seq.projected_step(2, first));
  CHECK(seq.projected_step(0, first) ==
        Box({0, 2}, {28.0, 28.0}, {30.0, 30.0}));

  REQUIRE(sc.control_sets.size() == 5);
  CHECK(sc.control_sets[0].size() == 25);
  CHECK(sc.control_sets[1].size() == 25);
  CHECK(sc.control_sets[2].size() == 25);
  CHECK(sc.control_sets[3].size() == 5);
  CHECK(sc.control_sets[4].size() == 5);
  CHECK(sc.control_sets[0].front() == std::vector<double>{-1.0, -1.0});
  CHECK(sc.control_sets[0].back() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("sampled benchmark flows respect the restricted reach sets") {
  Scenario sc = ufad_scenario();
  CellSequence seq = sc.sequence();
  auto ev = std::make_shared<ReachEvaluator>(sc.system, sc.tau,
                                             sc.integrator_steps);
  /* subsystem 3 : rooms 7 and 8, fully controlled */
  SubsystemAbstraction abs(sc.subsystems[2], sc.grid, sc.control_sets[2], ev);
  const int k = 3;
  SymbolId s;
  s.cell = abs.project_cell(seq.cell(k));
  Box cell = seq.box(k);
  const int ui = 0;  /* strongest cooling */
  Box assumed = abs.assumed_reach(s, ui, k, seq);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& u_pin = sc.control_sets[2][ui];
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x0(8);
    for (int i = 0; i < 8; ++i)
      x0[static_cast<std::size_t>(i)] =
          cell.low(i) + unit(rng) * cell.width(i);
    std::vector<double> u(8);
    for (int i = 0; i < 8; ++i)
      u[static_cast<std::size_t>(i)] = -unit(rng);
    u[6] = u_pin[0];
    u[7] = u_pin[1];
    DisturbanceSignal w = [&](int, std::span<double> out) {
      out[0] = 15.0 + unit(rng);
      out[1] = 26.0 + 2.0 * unit(rng);
      out[2] = 28.0 + 2.0 * unit(rng);
    };
    auto endpoint = integrate(*sc.system, x0, u, w, sc.tau,
                              sc.integrator_steps);
    REQUIRE(assumed.contains_point(endpoint));
  }
}

TEST_CASE("analytic evaluation counts reproduce the published table") {
  Scenario sc = ufad_scenario();
  AnalyticCounts counts = analytic_counts(sc, 4);
  CHECK(counts.split_factor == 16);
  CHECK_THAT(counts.compositional_norefinement,
             Catch::Matchers::WithinRel(5.44e5, 1e-6));
  CHECK_THAT(counts.centralized_norefinement,
             Catch::Matchers::WithinRel(6.5536e20, 1e-6));
  CHECK_THAT(counts.centralized_refinement_bound,
             Catch::Matchers::WithinRel(6.74e15, 5e-3));
}

TEST_CASE("benchmark synthesis terminates and controls the plant") {
  Scenario sc = ufad_scenario();
  SynthesisSettings settings;
  settings.max_depth = 6;
  settings.threads = 2;
  SynthesisResult result = synthesize(sc, settings);
  if (!result.realizable)
    WARN("unrealizable: " + result.failure->describe());
  REQUIRE(result.realizable);
  CHECK(result.total_evaluations > 0);

  GlobalController gc = make_global_controller(sc, result);
  SimulationReport sim = simulate(sc, gc, 25, 2024, 2);
  CHECK(sim.satisfied == sim.trials);
}
