#include "physid/integrators.hpp"

#include <cmath>
#include <string>

#include "physid/error.hpp"

namespace physid {

std::string_view to_cli_string(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::EulerUncorrected: return "euler-buggy";
    case IntegratorKind::EulerCorrected: return "euler";
    case IntegratorKind::StormerVerlet: return "verlet";
    case IntegratorKind::RK4: return "rk4";
  }
  return "unknown";
}

IntegratorKind integrator_from_string(std::string_view name) {
  for (auto k : {IntegratorKind::EulerUncorrected, IntegratorKind::EulerCorrected,
                 IntegratorKind::StormerVerlet, IntegratorKind::RK4})
    if (to_cli_string(k) == name) return k;
  throw ParseError("unknown integrator '" + std::string(name) + "'");
}

VelocityScheme velocity_scheme_for(IntegratorKind kind) {
  return (kind == IntegratorKind::EulerUncorrected || kind == IntegratorKind::EulerCorrected)
             ? VelocityScheme::Backward
             : VelocityScheme::Central;
}

bool within_divergence_bound(const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || std::abs(x[i]) > kDivergenceBound) return false;
  return true;
}

Stepper::Stepper(IntegratorKind kind, const OdeFamily& family, std::span<const double> params,
                 double dt)
    : kind_(kind), family_(family), params_(params.begin(), params.end()), dt_(dt) {
  family_.validate();
  check_arity(family_, params);
  if (!has_rhs(family_.tag))
    throw UnsupportedError(std::string(to_string(family_.tag)) + " cannot be stepped");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (kind == IntegratorKind::EulerUncorrected && is_first_order(family_.tag))
    throw UnsupportedError("euler-buggy is only defined for second-order families");
  n_ = family_.state_size();
  const auto n = static_cast<Eigen::Index>(n_);
  const auto p = static_cast<Eigen::Index>(params_.size());
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(n);
  for (auto* m : {&dk1_, &dk2_, &dk3_, &dk4_, &dtmp_}) m->resize(n, p);
  jac_x_.resize(n, n);
  jac_p_.resize(n, p);
}

template <bool Tangent>
void Stepper::eval(const Eigen::VectorXd& x, const Eigen::MatrixXd* sens, Eigen::VectorXd& f,
                   Eigen::MatrixXd* df) {
  detail::rhs_flat(family_, params_, x, f);
  if constexpr (Tangent) {
    detail::rhs_jacobians_flat(family_, params_, x, jac_x_, jac_p_);
    df->noalias() = jac_x_ * (*sens);
    *df += jac_p_;
  }
}

template <bool Tangent>
void Stepper::advance_impl(Eigen::VectorXd& x, Eigen::MatrixXd* S) {
  const double h = dt_;
  const auto nb = static_cast<Eigen::Index>(family_.body_count);
  const bool first_order = is_first_order(family_.tag);

  if (kind_ == IntegratorKind::RK4) {
    eval<Tangent>(x, S, k1_, &dk1_);
    tmp_ = x + 0.5 * h * k1_;
    if constexpr (Tangent) dtmp_ = *S + 0.5 * h * dk1_;
    eval<Tangent>(tmp_, &dtmp_, k2_, &dk2_);
    tmp_ = x + 0.5 * h * k2_;
    if constexpr (Tangent) dtmp_ = *S + 0.5 * h * dk2_;
    eval<Tangent>(tmp_, &dtmp_, k3_, &dk3_);
    tmp_ = x + h * k3_;
    if constexpr (Tangent) dtmp_ = *S + h * dk3_;
    eval<Tangent>(tmp_, &dtmp_, k4_, &dk4_);
    x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    if constexpr (Tangent) *S += (h / 6.0) * (dk1_ + 2.0 * dk2_ + 2.0 * dk3_ + dk4_);
    return;
  }

  if (first_order) {
    eval<Tangent>(x, S, k1_, &dk1_);
    x += h * k1_;
    if constexpr (Tangent) *S += h * dk1_;
    return;
  }

  switch (kind_) {
    case IntegratorKind::EulerUncorrected:
      eval<Tangent>(x, S, k1_, &dk1_);
      x += h * k1_;
      if constexpr (Tangent) *S += h * dk1_;
      return;
    case IntegratorKind::EulerCorrected:
      eval<Tangent>(x, S, k1_, &dk1_);
      x += h * k1_;
      x.head(nb) += (h * h) * k1_.tail(nb);
      if constexpr (Tangent) {
        *S += h * dk1_;
        S->topRows(nb) += (h * h) * dk1_.bottomRows(nb);
      }
      return;
    case IntegratorKind::StormerVerlet:
      // kick, drift, kick
      eval<Tangent>(x, S, k1_, &dk1_);
      x.tail(nb) += (0.5 * h) * k1_.tail(nb);
      if constexpr (Tangent) S->bottomRows(nb) += (0.5 * h) * dk1_.bottomRows(nb);
      x.head(nb) += h * x.tail(nb);
      if constexpr (Tangent) S->topRows(nb) += h * S->bottomRows(nb);
      eval<Tangent>(x, S, k2_, &dk2_);
      x.tail(nb) += (0.5 * h) * k2_.tail(nb);
      if constexpr (Tangent) S->bottomRows(nb) += (0.5 * h) * dk2_.bottomRows(nb);
      return;
    case IntegratorKind::RK4:
      break;
  }
}

void Stepper::advance(Eigen::VectorXd& x) { advance_impl<false>(x, nullptr); }

void Stepper::advance(Eigen::VectorXd& x, Eigen::MatrixXd& sens) { advance_impl<true>(x, &sens); }

StateVector step(IntegratorKind kind, const OdeFamily& family, std::span<const double> params,
                 const StateVector& state, double dt) {
  Stepper stepper(kind, family, params, dt);
  check_state(family, state);
  Eigen::VectorXd x = flatten(state);
  stepper.advance(x);
  return unflatten(family, x);
}

Rollout rollout(IntegratorKind kind, const OdeFamily& family, std::span<const double> params,
                const StateVector& initial, double dt, std::size_t steps, double t0) {
  if (steps < 1) throw DomainError("rollout needs at least one step");
  Stepper stepper(kind, family, params, dt);
  check_state(family, initial);
  Rollout out;
  out.dt = dt;
  out.t0 = t0;
  out.states.reserve(steps + 1);
  out.states.push_back(initial);
  Eigen::VectorXd x = flatten(initial);
  for (std::size_t i = 1; i <= steps; ++i) {
    stepper.advance(x);
    if (!within_divergence_bound(x)) throw DivergenceError(i, "state left the divergence bound");
    out.states.push_back(unflatten(family, x));
  }
  return out;
}

}  // namespace physid
