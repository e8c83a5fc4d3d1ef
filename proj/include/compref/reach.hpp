/*
 * reach.hpp
 *
 * Reachable-set over-approximation for monotone systems via two corner
 * flows, plus a sampled reachability oracle used to test soundness. The
 * evaluator counts over-approximation calls; that tally is the complexity
 * measure reported by the stats command.
 */

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "compref/system.hpp"

namespace compref {

class ReachEvaluator {
 public:
  ReachEvaluator(std::shared_ptr<const ControlSystem> sys, double tau,
                 int steps_per_period = 60)
      : sys_(std::move(sys)), tau_(tau), steps_(steps_per_period) {
    if (!sys_) throw std::invalid_argument("ReachEvaluator: null system");
    if (steps_ < 1) throw std::invalid_argument("ReachEvaluator: steps < 1");
  }

  const ControlSystem& system() const { return *sys_; }
  std::shared_ptr<const ControlSystem> system_ptr() const { return sys_; }
  double tau() const { return tau_; }
  int steps() const { return steps_; }

  std::uint64_t evaluations() const {
    return count_.load(std::memory_order_relaxed);
  }
  void reset_evaluations() { count_.store(0, std::memory_order_relaxed); }

  /**
   * Over-approximation of the reachable set at time tau from initial box
   * x0 under constant controls in u_sub (full-dimensional boxes; pins are
   * expressed as zero-width dims) and any disturbance in W. Integrates
   * the two extreme corners of the order declared by the sign vectors;
   * for a truly monotone field the true reachable set is contained in the
   * returned box. Increments the evaluation counter exactly once.
   */
  Box over_reach(const Box& x0, const Box& u_sub) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    const ControlSystem& sys = *sys_;
    auto xmin = order_corner(x0, sys.state_signs, /*max_corner=*/false);
    auto xmax = order_corner(x0, sys.state_signs, /*max_corner=*/true);
    auto umin = order_corner(u_sub, sys.control_signs, false);
    auto umax = order_corner(u_sub, sys.control_signs, true);
    auto wmin = order_corner(sys.disturbance_bounds, sys.disturbance_signs, false);
    auto wmax = order_corner(sys.disturbance_bounds, sys.disturbance_signs, true);
    auto flo = integrate(sys, xmin, umin, constant_disturbance(wmin), tau_, steps_);
    auto fhi = integrate(sys, xmax, umax, constant_disturbance(wmax), tau_, steps_);
    std::vector<double> lo(flo.size()), hi(flo.size());
    for (std::size_t i = 0; i < flo.size(); ++i) {
      double a = sys.state_signs[i] > 0 ? flo[i] : fhi[i];
      double b = sys.state_signs[i] > 0 ? fhi[i] : flo[i];
      lo[i] = std::min(a, b);
      hi[i] = std::max(a, b);
    }
    return Box(x0.dims(), std::move(lo), std::move(hi));
  }

  /**
   * Sampled under-approximation of the same reachable set: N flow
   * endpoints from uniform random initial states in x0, constant controls
   * in u_sub and piecewise-constant disturbances redrawn every integrator
   * step. Every returned point must lie in over_reach(x0, u_sub).
   */
  std::vector<std::vector<double>> sample_reach(const Box& x0, const Box& u_sub,
                                                int count,
                                                std::uint64_t seed) const {
    const ControlSystem& sys = *sys_;
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<double> x(static_cast<std::size_t>(sys.state_dim));
    std::vector<double> u(static_cast<std::size_t>(sys.control_dim));
    for (int t = 0; t < count; ++t) {
      sample_box(x0, rng, x);
      sample_box(u_sub, rng, u);
      DisturbanceSignal w = [&](int, std::span<double> wout) {
        for (int i = 0; i < sys.disturbance_dim; ++i) {
          const Box& wb = sys.disturbance_bounds;
          std::uniform_real_distribution<double> dist(wb.low(i), wb.high(i));
          wout[static_cast<std::size_t>(i)] =
              wb.width(i) > 0 ? dist(rng) : wb.low(i);
        }
      };
      out.push_back(integrate(sys, x, u, w, tau_, steps_));
    }
    return out;
  }

 private:
  static std::vector<double> order_corner(const Box& b,
                                          const std::vector<int>& signs,
                                          bool max_corner) {
    std::vector<double> v(static_cast<std::size_t>(b.size()));
    for (int i = 0; i < b.size(); ++i) {
      bool take_high = (signs[static_cast<std::size_t>(i)] > 0) == max_corner;
      v[static_cast<std::size_t>(i)] = take_high ? b.high(i) : b.low(i);
    }
    return v;
  }

  static void sample_box(const Box& b, std::mt19937_64& rng,
                         std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(b.size()));
    for (int i = 0; i < b.size(); ++i) {
      std::uniform_real_distribution<double> dist(b.low(i), b.high(i));
      out[static_cast<std::size_t>(i)] = b.width(i) > 0 ? dist(rng) : b.low(i);
    }
  }

  std::shared_ptr<const ControlSystem> sys_;
  double tau_;
  int steps_;
  mutable std::atomic<std::uint64_t> count_{0};
};

}  // namespace compref
