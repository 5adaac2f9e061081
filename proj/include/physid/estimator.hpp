#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "physid/integrators.hpp"
#include "physid/ode_bank.hpp"
#include "physid/trajectory.hpp"

namespace physid {

enum class LossKind { OneStep, MultiStep };

std::string_view to_cli_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

// w_k = 0.5^floor((k-1)/2): [1, 1, 0.5, 0.5, 0.25] for K = 5.
std::vector<double> default_weights(int horizon);

// Default starting point: (0.5, 0.05) for two-parameter families, 0.5 for
// one-parameter families. Coupled pendulums start each g/L_i and kappa_ij at
// 0.5 and each zeta_i at 0.05.
std::vector<double> default_init(const OdeFamily& family);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;
  bool diverged = false;
};

// Windows start at t = 1 for second-order families (t = 0 for first-order)
// and end at T - 1 - K, so every horizon averages over the same windows.
// Velocities come from reconstruct_velocities with velocity_scheme_for(kind).
LossResult one_step_loss(const OdeFamily& family, std::span<const double> params,
                         const Trajectory& traj, IntegratorKind kind);

// sum_k w_k * mean_t |z_hat_{t+k} - z_{t+k}|^2 with the gradient carried
// through the unrolled steps. On divergence the loss is kDivergenceBound and
// the gradient is zero.
LossResult multi_step_loss(const OdeFamily& family, std::span<const double> params,
                           const Trajectory& traj, IntegratorKind kind, int horizon,
                           std::span<const double> weights);

// Mean squared closed-form misfit; used for falling_ball_radius.
LossResult closed_form_loss(const OdeFamily& family, std::span<const double> params,
                            const Trajectory& traj);

// Mean squared one-step position error over the loss windows. Algebraic
// families use the closed-form misfit.
double ode_residual(const Trajectory& traj, const OdeFamily& family,
                    std::span<const double> params, IntegratorKind kind = IntegratorKind::RK4);

struct FitConfig {
  LossKind loss = LossKind::OneStep;
  int horizon = 1;
  std::vector<double> weights;  // empty: default_weights(horizon)
  IntegratorKind integrator = IntegratorKind::EulerCorrected;
  int epochs = 500;
  double lr_params = 1e-2;
  std::uint64_t seed = 42;
  std::vector<double> init_params;  // empty: default_init(family)
  // Replace the g/L entries of the start point with values derived from the
  // observed period and amplitude.
  bool init_from_period = false;
  std::vector<std::size_t> frozen;

  std::vector<double> resolved_weights() const;
};

struct ClipId {
  std::string phenomenon;
  std::string setting;
  int trial = 0;
  std::uint64_t seed = 42;

  bool operator==(const ClipId&) const = default;
};

struct FitResult {
  ParamVector final_params;
  std::vector<double> loss_curve;
  std::vector<double> grad_norm_curve;
  double ode_residual = 0.0;
  bool diverged = false;
  ClipId clip_id;

  bool operator==(const FitResult&) const = default;
};

// Adam over the parameters from the resolved start point. Each epoch
// evaluates the loss at the current parameters, records it, then steps.
// First-order families treat euler-buggy as euler.
FitResult fit_clip(const OdeFamily& family, const Trajectory& traj, const FitConfig& config,
                   const ClipId& id = {});

std::vector<double> resolve_init(const OdeFamily& family, const Trajectory& traj,
                                 const FitConfig& config);

struct DirectFitOptions {
  // Known camera distance for falling_ball_radius.
  double h0 = 1.0;
};

// Least squares on second-order central differences, endpoints excluded.
// Every family with a right-hand side is linear in its parameters, so the
// regressors are the rows of d(rhs)/d(params). falling_ball_radius uses a
// linearised solve for (g, r0f) at known h0 followed by Levenberg-Marquardt.
ParamVector direct_ls_fit(const OdeFamily& family, const Trajectory& traj,
                          const DirectFitOptions& options = {});

// Mean spacing of upward zero crossings of the mean-subtracted signal.
double extract_period(const Trajectory& traj, int body = 0);

// Largest |z - mean| over the first period: an amplitude estimate.
double extract_amplitude(const Trajectory& traj, int body = 0);

}  // namespace physid
