#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "physid/ode_bank.hpp"
#include "physid/synth.hpp"
#include "physid/trajectory.hpp"

namespace physid::test {

struct Sample {
  std::string label;
  OdeFamily family;
  std::vector<double> params;
  StateVector state;
};

// One representative point per family with a right-hand side.
inline std::vector<Sample> rhs_samples() {
  using F = FamilyTag;
  return {
      {"sol", OdeFamily::single(F::SecondOrderLinear), {1.3, 0.2}, {{0.4}, {-0.3}}},
      {"decay", OdeFamily::single(F::FirstOrderDecay), {2.3}, {{0.7}, {}}},
      {"torricelli", OdeFamily::single(F::Torricelli), {0.016}, {{0.8}, {}}},
      {"accel", OdeFamily::single(F::ConstantAccel), {-9.81}, {{0.5}, {1.0}}},
      {"pendulum", OdeFamily::single(F::NonlinearPendulum), {19.62, 0.02}, {{0.6}, {0.1}}},
      {"coupled2", OdeFamily::coupled(F::CoupledPendulum, 2), {19.62, 15.0, 0.02, 0.03, 4.0},
       {{0.5, -0.2}, {0.1, 0.3}}},
      {"coupled3", OdeFamily::coupled(F::CoupledPendulum, 3),
       {19.62, 15.0, 12.0, 0.02, 0.03, 0.01, 4.0, 2.0, 1.0},
       {{0.5, -0.2, 0.1}, {0.1, 0.3, -0.4}}},
      {"contact", OdeFamily::coupled(F::CoupledContact, 2), {100.0, 0.1}, {{0.02, -0.01}, {0.3, 0.0}}},
  };
}

// Noise-free, jitter-free clip with exact parameters.
inline ClipSpec clean_spec(const OdeFamily& family, std::vector<double> params, StateVector initial,
                           double dt, double duration) {
  ClipSpec s;
  s.phenomenon = "test";
  s.setting = "s";
  s.family = family;
  s.true_params = ParamVector::make(family, std::move(params));
  s.initial = std::move(initial);
  s.dt = dt;
  s.duration = duration;
  s.noise_std = 0.0;
  s.jitter = 0.0;
  s.trial_count = 1;
  s.split_ratio = SplitRatio{1, 0, 0, 0};
  return s;
}

inline Trajectory clean_traj(const OdeFamily& family, std::vector<double> params,
                             StateVector initial, double dt, double duration) {
  auto s = clean_spec(family, std::move(params), std::move(initial), dt, duration);
  return simulate(s, s.true_params);
}

inline Trajectory sampled(double dt, std::size_t n, double (*f)(double)) {
  Trajectory t;
  t.dt = dt;
  for (std::size_t i = 0; i < n; ++i) t.positions.push_back(f(static_cast<double>(i) * dt));
  return t;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace physid::test
