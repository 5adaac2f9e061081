#include "physid/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "physid/error.hpp"
#include "physid/gt_fit.hpp"
#include "physid/least_squares.hpp"

namespace physid {

namespace {

void check_body_count(const OdeFamily& family, const Trajectory& traj) {
  if (traj.body_count != family.body_count)
    throw ArityError("trajectory has " + std::to_string(traj.body_count) + " bodies, " +
                     std::string(to_string(family.tag)) + " expects " +
                     std::to_string(family.body_count));
}

bool sign_constrained(FamilyTag tag) {
  return tag == FamilyTag::FirstOrderDecay || tag == FamilyTag::Torricelli;
}

LossResult guard_result(std::size_t arity) {
  return {kDivergenceBound, std::vector<double>(arity, 0.0), true};
}

// Shared body of the one-step, multi-step and residual computations.
LossResult unrolled_loss(const OdeFamily& family, std::span<const double> params,
                         const Trajectory& traj, IntegratorKind kind, int horizon,
                         std::span<const double> weights, bool with_grad) {
  family.validate();
  check_arity(family, params);
  check_body_count(family, traj);
  if (!has_rhs(family.tag))
    throw UnsupportedError(std::string(to_string(family.tag)) + " has no step; use the closed-form loss");
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  if (weights.size() != static_cast<std::size_t>(horizon))
    throw DomainError("expected " + std::to_string(horizon) + " weights");

  const std::size_t T = traj.size();
  const auto K = static_cast<std::size_t>(horizon);
  if (T < 3 || T < K + 2)
    throw DomainError("trajectory has " + std::to_string(T) + " samples, horizon " +
                      std::to_string(K) + " needs at least " + std::to_string(std::max<std::size_t>(3, K + 2)));

  const bool first_order = is_first_order(family.tag);
  const std::size_t start = first_order ? 0 : 1;
  const std::size_t last = T - 1 - K;
  if (last < start) throw DomainError("no valid loss windows");
  const auto windows = static_cast<double>(last - start + 1);

  const auto nb = static_cast<std::size_t>(family.body_count);
  const auto n = static_cast<Eigen::Index>(family.state_size());
  const auto p = static_cast<Eigen::Index>(params.size());
  std::vector<double> vel;
  if (!first_order) vel = reconstruct_velocities(traj, velocity_scheme_for(kind));

  Stepper stepper(kind, family, params, traj.dt);
  Eigen::VectorXd x(n);
  Eigen::MatrixXd S(n, p);
  double loss = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd err(static_cast<Eigen::Index>(nb));

  for (std::size_t t = start; t <= last; ++t) {
    for (std::size_t b = 0; b < nb; ++b) {
      x[static_cast<Eigen::Index>(b)] = traj.positions[t * nb + b];
      if (!first_order) x[static_cast<Eigen::Index>(nb + b)] = vel[t * nb + b];
    }
    if (with_grad) S.setZero();
    for (std::size_t k = 1; k <= K; ++k) {
      if (with_grad)
        stepper.advance(x, S);
      else
        stepper.advance(x);
      if (!within_divergence_bound(x)) return guard_result(params.size());
      for (std::size_t b = 0; b < nb; ++b)
        err[static_cast<Eigen::Index>(b)] =
            x[static_cast<Eigen::Index>(b)] - traj.positions[(t + k) * nb + b];
      const double w = weights[k - 1];
      loss += w * err.squaredNorm();
      if (with_grad) grad.noalias() += (2.0 * w) * (S.topRows(static_cast<Eigen::Index>(nb)).transpose() * err);
    }
  }
  LossResult out;
  out.loss = loss / windows;
  if (!std::isfinite(out.loss)) return guard_result(params.size());
  out.grad.resize(params.size());
  for (Eigen::Index i = 0; i < p; ++i) out.grad[static_cast<std::size_t>(i)] = grad[i] / windows;
  return out;
}

double adam_guarded_norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::string_view to_cli_string(LossKind kind) {
  return kind == LossKind::OneStep ? "one-step" : "multi-step";
}

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "one-step") return LossKind::OneStep;
  if (name == "multi-step") return LossKind::MultiStep;
  throw ParseError("unknown loss '" + std::string(name) + "'");
}

std::vector<double> default_weights(int horizon) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  std::vector<double> w;
  for (int k = 1; k <= horizon; ++k) w.push_back(std::ldexp(1.0, -((k - 1) / 2)));
  return w;
}

std::vector<double> default_init(const OdeFamily& family) {
  family.validate();
  switch (family.tag) {
    case FamilyTag::SecondOrderLinear:
    case FamilyTag::NonlinearPendulum:
    case FamilyTag::CoupledContact: return {0.5, 0.05};
    case FamilyTag::FirstOrderDecay:
    case FamilyTag::Torricelli:
    case FamilyTag::ConstantAccel: return {0.5};
    case FamilyTag::FallingBallRadius: return {0.5, 0.5, 1.0};
    case FamilyTag::CoupledPendulum: {
      const auto n = static_cast<std::size_t>(family.body_count);
      std::vector<double> v(family.arity(), 0.5);
      for (std::size_t i = n; i < 2 * n; ++i) v[i] = 0.05;
      return v;
    }
  }
  return {};
}

LossResult one_step_loss(const OdeFamily& family, std::span<const double> params,
                         const Trajectory& traj, IntegratorKind kind) {
  const double w[1] = {1.0};
  return unrolled_loss(family, params, traj, kind, 1, w, true);
}

LossResult multi_step_loss(const OdeFamily& family, std::span<const double> params,
                           const Trajectory& traj, IntegratorKind kind, int horizon,
                           std::span<const double> weights) {
  return unrolled_loss(family, params, traj, kind, horizon, weights, true);
}

LossResult closed_form_loss(const OdeFamily& family, std::span<const double> params,
                            const Trajectory& traj) {
  family.validate();
  check_arity(family, params);
  check_body_count(family, traj);
  if (family.tag != FamilyTag::FallingBallRadius)
    throw UnsupportedError("closed-form loss is only used for falling_ball_radius");
  const std::size_t T = traj.size();
  if (T < 3) throw DomainError("trajectory needs at least 3 samples");
  const double g = params[0], c = params[1], h0 = params[2];
  double loss = 0.0, dg = 0.0, dc = 0.0, dh = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double tt = traj.time(t);
    const double d = h0 + 0.5 * g * tt * tt;
    if (!(d > 0.0)) return guard_result(params.size());
    const double r = c / d;
    const double e = r - traj.positions[t];
    loss += e * e;
    dg += 2.0 * e * (-r / d * 0.5 * tt * tt);
    dc += 2.0 * e / d;
    dh += 2.0 * e * (-r / d);
  }
  const auto n = static_cast<double>(T);
  LossResult out{loss / n, {dg / n, dc / n, dh / n}, false};
  if (!std::isfinite(out.loss)) return guard_result(params.size());
  return out;
}

double ode_residual(const Trajectory& traj, const OdeFamily& family,
                    std::span<const double> params, IntegratorKind kind) {
  if (traj.size() < 2) throw DomainError("residual needs at least 2 samples");
  if (!has_rhs(family.tag)) return closed_form_loss(family, params, traj).loss;
  if (kind == IntegratorKind::EulerUncorrected && is_first_order(family.tag))
    kind = IntegratorKind::EulerCorrected;
  const double w[1] = {1.0};
  return unrolled_loss(family, params, traj, kind, 1, w, false).loss;
}

std::vector<double> FitConfig::resolved_weights() const {
  if (loss == LossKind::OneStep) return {1.0};
  if (weights.empty()) return default_weights(horizon);
  if (weights.size() != static_cast<std::size_t>(horizon))
    throw DomainError("weights length must equal the horizon");
  return weights;
}

std::vector<double> resolve_init(const OdeFamily& family, const Trajectory& traj,
                                 const FitConfig& config) {
  std::vector<double> init = config.init_params.empty() ? default_init(family) : config.init_params;
  check_arity(family, init);
  // The scale r0 f starts from the first observed radius at the initial h0.
  if (family.tag == FamilyTag::FallingBallRadius && traj.size() > 0)
    init[1] = traj.positions[0] * (init[2] + 0.5 * init[0] * traj.t0 * traj.t0);
  if (!config.init_from_period) return init;

  auto omega_sq = [&](int body) {
    const double T = extract_period(traj, body);
    const double amp = std::min(extract_amplitude(traj, body), 3.0);
    const double q = 4.0 * elliptic_k(std::sin(0.5 * amp)) / T;
    return q * q;
  };
  if (family.tag == FamilyTag::NonlinearPendulum) {
    try {
      init[0] = omega_sq(0);
    } catch (const Error&) {
    }
  } else if (family.tag == FamilyTag::CoupledPendulum) {
    // Bodies that barely move (a struck pendulum at rest) give no usable
    // period; they inherit the estimate of the most active body.
    const auto nb = static_cast<std::size_t>(family.body_count);
    std::vector<double> amp(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto s = traj.body(static_cast<int>(b)).positions;
      const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
      amp[b] = 0.5 * (*hi - *lo);
    }
    const auto ref = static_cast<std::size_t>(std::max_element(amp.begin(), amp.end()) - amp.begin());
    double ref_value = -1.0;
    try {
      ref_value = omega_sq(static_cast<int>(ref));
    } catch (const Error&) {
    }
    for (std::size_t b = 0; b < nb; ++b) {
      double value = ref_value;
      if (b != ref && amp[b] >= 0.25 * amp[ref]) {
        try {
          value = omega_sq(static_cast<int>(b));
        } catch (const Error&) {
        }
      }
      if (value > 0.0) init[b] = value;
    }
  }
  return init;
}

FitResult fit_clip(const OdeFamily& family, const Trajectory& traj, const FitConfig& config,
                   const ClipId& id) {
  family.validate();
  check_body_count(family, traj);
  if (config.epochs < 0) throw DomainError("epochs must be non-negative");
  if (!(config.lr_params > 0.0)) throw DomainError("learning rate must be positive");
  const auto weights = config.resolved_weights();
  const int horizon = config.loss == LossKind::OneStep ? 1 : config.horizon;
  const bool algebraic = !has_rhs(family.tag);
  // No velocity state: the uncorrected and corrected schemes coincide.
  const IntegratorKind kind = config.integrator == IntegratorKind::EulerUncorrected && is_first_order(family.tag)
                                  ? IntegratorKind::EulerCorrected
                                  : config.integrator;

  std::vector<double> params = resolve_init(family, traj, config);
  const std::size_t P = params.size();
  std::vector<bool> frozen(P, false);
  for (auto i : config.frozen) {
    if (i >= P) throw DomainError("frozen index out of range");
    frozen[i] = true;
  }

  auto evaluate = [&](const std::vector<double>& p) {
    return algebraic ? closed_form_loss(family, p, traj)
                     : unrolled_loss(family, p, traj, kind, horizon, weights, true);
  };

  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  std::vector<double> m(P, 0.0), v(P, 0.0);
  double b1t = 1.0, b2t = 1.0;

  FitResult result;
  result.clip_id = id;
  result.loss_curve.reserve(static_cast<std::size_t>(config.epochs));
  result.grad_norm_curve.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    LossResult r = evaluate(params);
    for (std::size_t i = 0; i < P; ++i)
      if (frozen[i]) r.grad[i] = 0.0;
    result.loss_curve.push_back(r.loss);
    result.grad_norm_curve.push_back(adam_guarded_norm(r.grad));
    if (r.diverged) {
      result.diverged = true;
      break;
    }
    b1t *= b1;
    b2t *= b2;
    bool finite = true;
    for (std::size_t i = 0; i < P; ++i) {
      if (frozen[i]) continue;
      const double g = r.grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double mhat = m[i] / (1.0 - b1t);
      const double vhat = v[i] / (1.0 - b2t);
      params[i] -= config.lr_params * mhat / (std::sqrt(vhat) + eps);
      if (!std::isfinite(params[i]) || std::abs(params[i]) > kDivergenceBound) finite = false;
    }
    if (sign_constrained(family.tag)) params[0] = std::max(params[0], 0.0);
    if (!finite) {
      result.diverged = true;
      break;
    }
  }

  result.final_params = ParamVector{family, params};
  if (result.diverged) {
    result.ode_residual = kDivergenceBound;
  } else {
    result.ode_residual = ode_residual(traj, family, params, config.integrator);
    if (!std::isfinite(result.ode_residual)) result.ode_residual = kDivergenceBound;
  }
  return result;
}

ParamVector direct_ls_fit(const OdeFamily& family, const Trajectory& traj,
                          const DirectFitOptions& options) {
  family.validate();
  check_body_count(family, traj);
  const std::size_t T = traj.size();
  if (T < 5) throw DomainError("direct fit needs at least 5 samples");
  const double dt = traj.dt;

  if (family.tag == FamilyTag::FallingBallRadius) {
    const double h0 = options.h0;
    if (!(h0 > 0.0)) throw DomainError("known h0 must be positive");
    const auto m = static_cast<Eigen::Index>(T);
    Eigen::MatrixXd X(m, 2);
    Eigen::VectorXd y(m), ts(m), rs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = traj.time(static_cast<std::size_t>(i));
      const double r = traj.positions[static_cast<std::size_t>(i)];
      if (!(r > 0.0)) throw IllPosedError("apparent radius must be positive");
      X(i, 0) = 1.0;
      X(i, 1) = t * t;
      y[i] = 1.0 / r;
      ts[i] = t;
      rs[i] = r;
    }
    const Eigen::VectorXd b = solve_least_squares(X, y);
    if (!(b[0] > 0.0)) throw IllPosedError("linearised falling-ball fit has no positive scale");
    const double c0 = h0 / b[0];
    const ResidualFunction residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                                          Eigen::MatrixXd& J) {
      r.resize(m);
      J.resize(m, 2);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double d = h0 + 0.5 * p[0] * ts[i] * ts[i];
        r[i] = p[1] / d - rs[i];
        J(i, 0) = -p[1] / (d * d) * 0.5 * ts[i] * ts[i];
        J(i, 1) = 1.0 / d;
      }
    };
    const LmResult lm = levenberg_marquardt(residual, Eigen::Vector2d(2.0 * b[1] * c0, c0));
    return ParamVector::make(family, {lm.params[0], lm.params[1], h0});
  }

  const bool first_order = is_first_order(family.tag);
  const auto nb = static_cast<std::size_t>(family.body_count);
  const std::size_t P = family.arity();
  const std::vector<double> ones(P, 1.0);
  const auto rows = static_cast<Eigen::Index>((T - 2) * nb);
  Eigen::MatrixXd X(rows, static_cast<Eigen::Index>(P));
  Eigen::VectorXd y(rows);
  Eigen::VectorXd x(static_cast<Eigen::Index>(family.state_size()));
  Eigen::MatrixXd A(x.size(), x.size()), B(x.size(), static_cast<Eigen::Index>(P));

  Eigen::Index row = 0;
  for (std::size_t t = 1; t + 1 < T; ++t) {
    for (std::size_t b = 0; b < nb; ++b) {
      const double zm = traj.positions[(t - 1) * nb + b];
      const double z0 = traj.positions[t * nb + b];
      const double zp = traj.positions[(t + 1) * nb + b];
      x[static_cast<Eigen::Index>(b)] = z0;
      if (!first_order) x[static_cast<Eigen::Index>(nb + b)] = (zp - zm) / (2.0 * dt);
    }
    detail::rhs_jacobians_flat(family, ones, x, A, B);
    for (std::size_t b = 0; b < nb; ++b) {
      const double zm = traj.positions[(t - 1) * nb + b];
      const double z0 = traj.positions[t * nb + b];
      const double zp = traj.positions[(t + 1) * nb + b];
      const auto src = static_cast<Eigen::Index>(first_order ? b : nb + b);
      X.row(row) = B.row(src);
      y[row] = first_order ? (zp - zm) / (2.0 * dt) : (zp - 2.0 * z0 + zm) / (dt * dt);
      ++row;
    }
  }
  const Eigen::VectorXd sol = solve_least_squares(X, y);
  std::vector<double> values(sol.data(), sol.data() + sol.size());
  if (sign_constrained(family.tag)) values[0] = std::max(values[0], 0.0);
  return ParamVector::make(family, std::move(values));
}

namespace {

std::vector<double> centred(const Trajectory& traj, int body) {
  const Trajectory one = traj.body_count == 1 ? traj : traj.body(body);
  std::vector<double> s = one.positions;
  if (s.empty()) throw DomainError("empty trajectory");
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  for (double& v : s) v -= mean;
  return s;
}

}  // namespace

double extract_period(const Trajectory& traj, int body) {
  const auto s = centred(traj, body);
  std::vector<double> crossings;
  for (std::size_t t = 0; t + 1 < s.size(); ++t)
    if (s[t] < 0.0 && s[t + 1] >= 0.0)
      crossings.push_back(static_cast<double>(t) + s[t] / (s[t] - s[t + 1]));
  if (crossings.size() < 2)
    throw DomainError("period extraction found fewer than 2 upward zero crossings");
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1) *
         traj.dt;
}

double extract_amplitude(const Trajectory& traj, int body) {
  const auto s = centred(traj, body);
  const double period = extract_period(traj, body);
  const auto span = std::min(s.size(), static_cast<std::size_t>(std::ceil(period / traj.dt)) + 1);
  double amp = 0.0;
  for (std::size_t t = 0; t < span; ++t) amp = std::max(amp, std::abs(s[t]));
  return amp;
}

}  // namespace physid
