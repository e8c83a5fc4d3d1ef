/*
 * ufad.hpp
 *
 * Eight-room underfloor-air-distribution benchmark: each room is cooled
 * by a controllable fan blowing plenum air, exchanges heat with adjacent
 * rooms through walls and open doors, with the ceiling plenum and the
 * outside through walls, and receives radiated body heat. Room layout
 * (two rows of four, odd room numbers on top):
 *
 *      1 | 3 | 5 | 7
 *      --+---+---+--
 *      2 | 4 | 6 | 8
 *
 * Rooms are state dims 0..7 in this order. The default door set connects
 * the room pairs grouped by the benchmark decomposition; any symmetric
 * pair list can be configured instead.
 */

#pragma once

#include <utility>

#include "compref/scenario.hpp"

namespace compref {

struct UfadParams {
  double wall_coeff = 1e-5;        /* 1/s, conduction through a wall */
  double door_coeff = 3e-5;        /* 1/s, transfer through an open door */
  double vent_coeff = 2e-4;        /* 1/s, fan mass-flow coefficient */
  double radiation_coeff = 1e-14;  /* 1/(s K^3), body-heat radiation */
  double body_heat_celsius = 37.0;

  double underfloor_low = 15.0, underfloor_high = 16.0;  /* deg C */
  double ceiling_low = 26.0, ceiling_high = 28.0;
  double outside_low = 28.0, outside_high = 30.0;

  double state_low = 20.0, state_high = 30.0;

  /* room 6 (dim 5) is ventilated 75% by its own fan and 25% by room 8's */
  double shared_room = 5;
  double shared_own_fraction = 0.75;
  int shared_helper_input = 7;

  /* symmetric adjacency, 0-based room indices; doors connect the room
     pairs grouped by the benchmark decomposition */
  std::vector<std::pair<int, int>> doors = {{0, 2}, {3, 5}, {6, 7}, {1, 3}};
  std::vector<std::pair<int, int>> walls = {
      {2, 4}, {4, 6}, {5, 7}, {0, 1}, {2, 3}, {4, 5}};
};

inline ControlSystem ufad_field(const UfadParams& params = {}) {
  constexpr int rooms = 8;
  /* room-to-room coefficient matrix */
  std::vector<std::vector<double>> couple(rooms, std::vector<double>(rooms, 0.0));
  auto add = [&](const std::pair<int, int>& p, double coeff) {
    if (p.first < 0 || p.first >= rooms || p.second < 0 || p.second >= rooms ||
        p.first == p.second)
      throw std::invalid_argument("ufad_field: bad adjacency pair");
    couple[static_cast<std::size_t>(p.first)][static_cast<std::size_t>(
        p.second)] += coeff;
    couple[static_cast<std::size_t>(p.second)][static_cast<std::size_t>(
        p.first)] += coeff;
  };
  for (const auto& p : params.doors) add(p, params.door_coeff);
  for (const auto& p : params.walls) add(p, params.wall_coeff);

  const double ambient = params.wall_coeff;  /* underfloor/ceiling/outside */
  const double body_k4 = std::pow(params.body_heat_celsius + 273.15, 4.0);
  const double rad = params.radiation_coeff;
  const double vent = params.vent_coeff;
  const int shared = static_cast<int>(params.shared_room);
  const double own = params.shared_own_fraction;
  const int helper = params.shared_helper_input;

  ControlSystem sys;
  sys.name = "ufad8";
  sys.state_dim = rooms;
  sys.control_dim = rooms;
  sys.disturbance_dim = 3;
  sys.state_bounds = Box::cube(rooms, params.state_low, params.state_high);
  sys.control_bounds = Box::cube(rooms, -1.0, 0.0);
  sys.disturbance_bounds =
      Box({0, 1, 2},
          {params.underfloor_low, params.ceiling_low, params.outside_low},
          {params.underfloor_high, params.ceiling_high, params.outside_high});
  sys.state_signs.assign(rooms, 1);
  sys.control_signs.assign(rooms, 1);
  sys.disturbance_signs.assign(3, 1);
  sys.field = [couple, ambient, body_k4, rad, vent, shared, own, helper](
                  std::span<const double> x, std::span<const double> u,
                  std::span<const double> w, std::span<double> out) {
    const double t_under = w[0], t_ceiling = w[1], t_outside = w[2];
    for (int i = 0; i < rooms; ++i) {
      auto idx = static_cast<std::size_t>(i);
      double ti = x[idx];
      double rate = 0.0;
      for (int j = 0; j < rooms; ++j)
        if (double a = couple[idx][static_cast<std::size_t>(j)]; a != 0.0)
          rate += a * (x[static_cast<std::size_t>(j)] - ti);
      rate += ambient * (t_under - ti);
      rate += ambient * (t_ceiling - ti);
      rate += ambient * (t_outside - ti);
      double power = (i == shared)
                         ? own * u[idx] +
                               (1.0 - own) * u[static_cast<std::size_t>(helper)]
                         : u[idx];
      rate += power * vent * (ti - t_under);
      double tk = ti + 273.15;
      rate += rad * (body_k4 - tk * tk * tk * tk);
      out[idx] = rate;
    }
  };
  return sys;
}

/**
 * The benchmark instance: state space [20,30]^8 degrees C partitioned
 * five cells per dimension, sampling period 30 minutes, per-room fan
 * powers discretized to {-1,-0.75,-0.5,-0.25,0}, and the left-to-right
 * temperature-gradient cell sequence reached over four steps. Five
 * subsystems: three two-room pairs controlling both their rooms, and two
 * single-room subsystems that additionally observe a neighbor room.
 */
inline Scenario ufad_scenario(const UfadParams& params = {}) {
  auto system = std::make_shared<ControlSystem>(ufad_field(params));
  std::vector<int> five(8, 5);
  Scenario sc{.name = "ufad8",
              .system = system,
              .grid = GridPartition::uniform(system->state_bounds, five)};

  const std::vector<std::vector<int>> step_coords = {
      {4, 4, 4, 4, 4, 4, 4, 4},
      {4, 4, 4, 4, 4, 4, 3, 3},
      {4, 4, 4, 4, 3, 3, 2, 2},
      {4, 4, 3, 3, 2, 2, 1, 1},
      {3, 3, 2, 2, 1, 1, 0, 0},
  };
  for (const auto& coords : step_coords)
    sc.spec_cells.push_back(sc.grid.index_of(coords));

  sc.subsystems = {
      {1, {0, 2}, {}, {0, 2}},
      {2, {3, 5}, {}, {3, 5}},
      {3, {6, 7}, {}, {6, 7}},
      {4, {1}, {3}, {1}},
      {5, {4}, {5}, {4}},
  };

  const std::vector<double> fan_levels = {-1.0, -0.75, -0.5, -0.25, 0.0};
  for (const auto& sub : sc.subsystems) {
    std::vector<std::vector<double>> per_dim(sub.control_inputs.size(),
                                             fan_levels);
    sc.control_sets.push_back(control_grid(per_dim));
  }

  sc.tau = 1800.0;
  sc.integrator_steps = 60;
  return sc;
}

}  // namespace compref
