/*
 * system.hpp
 *
 * Continuous control systems xdot = f(x,u,w) with box-bounded state,
 * control and disturbance, declared per-coordinate monotonicity signs,
 * fixed-step RK4 integration, plus a thin discrete-time map variant.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "compref/errors.hpp"
#include "compref/geometry.hpp"

namespace compref {

/* writes xdot (or the successor state for discrete maps) into out */
using VectorField = std::function<void(
    std::span<const double> x, std::span<const double> u,
    std::span<const double> w, std::span<double> out)>;

/* fills the disturbance held constant over integrator step k */
using DisturbanceSignal = std::function<void(int step, std::span<double> w)>;

inline DisturbanceSignal constant_disturbance(std::vector<double> w) {
  return [w = std::move(w)](int, std::span<double> out) {
    std::copy(w.begin(), w.end(), out.begin());
  };
}

struct ControlSystem {
  int state_dim = 0;        /* n */
  int control_dim = 0;      /* p */
  int disturbance_dim = 0;  /* q */
  VectorField field;
  Box state_bounds;        /* over dims 0..n-1 */
  Box control_bounds;      /* over dims 0..p-1 */
  Box disturbance_bounds;  /* over dims 0..q-1; zero-dim box when q == 0 */
  /* +1 / -1 per coordinate: orientation of the order the flow preserves */
  std::vector<int> state_signs;
  std::vector<int> control_signs;
  std::vector<int> disturbance_signs;
  /* discrete-time map x+ = field(x,u,w); tau and step counts are ignored */
  bool discrete = false;
  /* trajectories leaving state_bounds scaled by this factor are rejected */
  double guard_factor = 2.0;
  std::string name = "system";
};

/* one RK4 step of size h with frozen u, w */
inline void rk4_step(const VectorField& f, std::span<double> x,
                     std::span<const double> u, std::span<const double> w,
                     double h, std::span<double> k1, std::span<double> k2,
                     std::span<double> k3, std::span<double> k4,
                     std::span<double> tmp) {
  const std::size_t n = x.size();
  f(x, u, w, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  f(tmp, u, w, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  f(tmp, u, w, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  f(tmp, u, w, k4);
  for (std::size_t i = 0; i < n; ++i)
    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

/**
 * Fixed-step RK4 flow over [0, tau] with constant control and a
 * step-indexed disturbance signal. No guard checks; see integrate() for
 * the guarded system-level variant.
 */
inline std::vector<double> rk4_flow(const VectorField& f,
                                    std::span<const double> x0,
                                    std::span<const double> u,
                                    const DisturbanceSignal& w, int w_dim,
                                    double tau, int steps) {
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> wbuf(static_cast<std::size_t>(w_dim));
  std::vector<double> k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()),
      tmp(x.size());
  double h = tau / steps;
  for (int s = 0; s < steps; ++s) {
    w(s, wbuf);
    rk4_step(f, x, u, wbuf, h, k1, k2, k3, k4, tmp);
  }
  return x;
}

/**
 * Flow of the sampled system over one period. Discrete maps apply the
 * field once; continuous systems integrate with RK4. Throws
 * DivergedTrajectory if the state leaves the guard box (state bounds
 * scaled by guard_factor) at any integrator step.
 */
inline std::vector<double> integrate(const ControlSystem& sys,
                                     std::span<const double> x0,
                                     std::span<const double> u,
                                     const DisturbanceSignal& w, double tau,
                                     int steps) {
  if (sys.discrete) {
    std::vector<double> wbuf(static_cast<std::size_t>(sys.disturbance_dim));
    w(0, wbuf);
    std::vector<double> out(static_cast<std::size_t>(sys.state_dim));
    sys.field(x0, u, wbuf, out);
    return out;
  }
  Box guard = sys.state_bounds.scaled(sys.guard_factor);
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> wbuf(static_cast<std::size_t>(sys.disturbance_dim));
  std::vector<double> k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()),
      tmp(x.size());
  double h = tau / steps;
  for (int s = 0; s < steps; ++s) {
    w(s, wbuf);
    rk4_step(sys.field, x, u, wbuf, h, k1, k2, k3, k4, tmp);
    if (!guard.contains_point(x))
      throw DivergedTrajectory(sys.name + ": trajectory left the guard box at step " +
                               std::to_string(s + 1));
  }
  return x;
}

inline std::vector<double> integrate(const ControlSystem& sys,
                                     std::span<const double> x0,
                                     std::span<const double> u,
                                     std::span<const double> w, double tau,
                                     int steps) {
  return integrate(sys, x0, u,
                   constant_disturbance(std::vector<double>(w.begin(), w.end())),
                   tau, steps);
}

/**
 * Finite-difference check of the declared monotonicity signs at random
 * points of X x U x W. For every pair (output i, input coordinate j != i)
 * the product sign_i * sign_j * df_i/dz_j must be nonnegative; a coordinate
 * whose sampled partial changes sign across points is rejected as well.
 * Throws MonotonicityError on the first offending pair.
 */
inline void validate_monotone_signs(const ControlSystem& sys,
                                    int samples = 100,
                                    std::uint64_t seed = 20240901ull) {
  const int n = sys.state_dim, p = sys.control_dim, q = sys.disturbance_dim;
  if (static_cast<int>(sys.state_signs.size()) != n ||
      static_cast<int>(sys.control_signs.size()) != p ||
      static_cast<int>(sys.disturbance_signs.size()) != q)
    throw MonotonicityError(sys.name + ": sign vector sizes do not match dims");
  for (int s : sys.state_signs)
    if (s != 1 && s != -1) throw MonotonicityError("signs must be +1 or -1");
  for (int s : sys.control_signs)
    if (s != 1 && s != -1) throw MonotonicityError("signs must be +1 or -1");
  for (int s : sys.disturbance_signs)
    if (s != 1 && s != -1) throw MonotonicityError("signs must be +1 or -1");

  std::mt19937_64 rng(seed);
  auto uniform = [&](const Box& b, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(b.size()));
    for (int i = 0; i < b.size(); ++i) {
      std::uniform_real_distribution<double> dist(b.low(i), b.high(i));
      out[static_cast<std::size_t>(i)] = b.width(i) > 0 ? dist(rng) : b.low(i);
    }
  };

  /* argument blocks: 0 = state, 1 = control, 2 = disturbance */
  struct Block {
    int count;
    const Box* bounds;
    const std::vector<int>* signs;
    const char* label;
  };
  Block blocks[3] = {{n, &sys.state_bounds, &sys.state_signs, "state"},
                     {p, &sys.control_bounds, &sys.control_signs, "control"},
                     {q, &sys.disturbance_bounds, &sys.disturbance_signs,
                      "disturbance"}};

  std::vector<double> x, u, w, lo(static_cast<std::size_t>(n)),
      hi(static_cast<std::size_t>(n));
  /* diffs[block][j][i] collects df_i/dz_j over the sample points */
  for (int blk = 0; blk < 3; ++blk) {
    for (int j = 0; j < blocks[blk].count; ++j) {
      std::vector<int> seen_pos(static_cast<std::size_t>(n), 0),
          seen_neg(static_cast<std::size_t>(n), 0);
      std::vector<double> max_mag(static_cast<std::size_t>(n), 0.0);
      std::vector<std::vector<double>> all(static_cast<std::size_t>(n));
      for (int s = 0; s < samples; ++s) {
        uniform(sys.state_bounds, x);
        uniform(sys.control_bounds, u);
        uniform(sys.disturbance_bounds, w);
        double* z = blk == 0 ? &x[static_cast<std::size_t>(j)]
                   : blk == 1 ? &u[static_cast<std::size_t>(j)]
                              : &w[static_cast<std::size_t>(j)];
        const Box& b = *blocks[blk].bounds;
        double h = std::max(1e-6 * std::max(b.width(j), 1.0), 1e-9);
        double z0 = *z;
        *z = z0 + h;
        sys.field(x, u, w, hi);
        *z = z0 - h;
        sys.field(x, u, w, lo);
        *z = z0;
        for (int i = 0; i < n; ++i) {
          if (blk == 0 && i == j) continue;  /* diagonal unconstrained */
          double df = (hi[static_cast<std::size_t>(i)] -
                       lo[static_cast<std::size_t>(i)]) /
                      (2.0 * h);
          all[static_cast<std::size_t>(i)].push_back(df);
          max_mag[static_cast<std::size_t>(i)] =
              std::max(max_mag[static_cast<std::size_t>(i)], std::abs(df));
        }
      }
      for (int i = 0; i < n; ++i) {
        if (blk == 0 && i == j) continue;
        double thr = 1e-12 + 1e-7 * max_mag[static_cast<std::size_t>(i)];
        for (double df : all[static_cast<std::size_t>(i)]) {
          if (df > thr) seen_pos[static_cast<std::size_t>(i)] = 1;
          if (df < -thr) seen_neg[static_cast<std::size_t>(i)] = 1;
        }
        if (seen_pos[static_cast<std::size_t>(i)] &&
            seen_neg[static_cast<std::size_t>(i)])
          throw MonotonicityError(
              sys.name + ": partial of f" + std::to_string(i) + " w.r.t. " +
              blocks[blk].label + " " + std::to_string(j) +
              " changes sign over the sampled domain");
        int observed = seen_pos[static_cast<std::size_t>(i)]
                           ? 1
                           : (seen_neg[static_cast<std::size_t>(i)] ? -1 : 0);
        int declared = sys.state_signs[static_cast<std::size_t>(i)] *
                       (*blocks[blk].signs)[static_cast<std::size_t>(j)];
        if (observed != 0 && observed != declared)
          throw MonotonicityError(
              sys.name + ": declared sign for (f" + std::to_string(i) + ", " +
              blocks[blk].label + " " + std::to_string(j) +
              ") contradicts the sampled partial derivative");
      }
    }
  }
}

}  // namespace compref
