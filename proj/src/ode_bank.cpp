#include "physid/ode_bank.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "physid/error.hpp"

namespace physid {

namespace {

constexpr std::array<std::pair<FamilyTag, std::string_view>, 8> kTagNames{{
    {FamilyTag::SecondOrderLinear, "second_order_linear"},
    {FamilyTag::FirstOrderDecay, "first_order_decay"},
    {FamilyTag::Torricelli, "torricelli"},
    {FamilyTag::ConstantAccel, "constant_accel"},
    {FamilyTag::NonlinearPendulum, "nonlinear_pendulum"},
    {FamilyTag::CoupledPendulum, "coupled_pendulum"},
    {FamilyTag::CoupledContact, "coupled_contact"},
    {FamilyTag::FallingBallRadius, "falling_ball_radius"},
}};

bool gate_open(const OdeFamily& family, double zi, double zj) {
  return !family.contact_threshold || std::abs(zi - zj) < *family.contact_threshold;
}

}  // namespace

std::string_view to_string(FamilyTag tag) {
  for (const auto& [t, name] : kTagNames)
    if (t == tag) return name;
  return "unknown";
}

FamilyTag family_tag_from_string(std::string_view name) {
  for (const auto& [t, n] : kTagNames)
    if (n == name) return t;
  throw ParseError("unknown family tag '" + std::string(name) + "'");
}

bool is_coupled(FamilyTag tag) {
  return tag == FamilyTag::CoupledPendulum || tag == FamilyTag::CoupledContact;
}

bool is_first_order(FamilyTag tag) {
  return tag == FamilyTag::FirstOrderDecay || tag == FamilyTag::Torricelli ||
         tag == FamilyTag::FallingBallRadius;
}

bool has_rhs(FamilyTag tag) { return tag != FamilyTag::FallingBallRadius; }

OdeFamily OdeFamily::single(FamilyTag tag) {
  if (is_coupled(tag)) throw ArityError("coupled family needs an explicit body count");
  return OdeFamily{tag, 1, std::nullopt};
}

OdeFamily OdeFamily::coupled(FamilyTag tag, int bodies, std::optional<double> contact_threshold) {
  OdeFamily f{tag, bodies, contact_threshold};
  f.validate();
  return f;
}

void OdeFamily::validate() const {
  if (is_coupled(tag)) {
    if (body_count < 2)
      throw ArityError(std::string(to_string(tag)) + " needs body_count >= 2");
    if (contact_threshold && !(*contact_threshold > 0.0))
      throw DomainError("contact threshold must be positive");
  } else if (body_count != 1) {
    throw ArityError(std::string(to_string(tag)) + " is single-body");
  }
}

std::size_t OdeFamily::arity() const {
  const auto n = static_cast<std::size_t>(body_count);
  switch (tag) {
    case FamilyTag::SecondOrderLinear: return 2;
    case FamilyTag::FirstOrderDecay: return 1;
    case FamilyTag::Torricelli: return 1;
    case FamilyTag::ConstantAccel: return 1;
    case FamilyTag::NonlinearPendulum: return 2;
    case FamilyTag::CoupledPendulum: return 2 * n + n * (n - 1) / 2;
    case FamilyTag::CoupledContact: return 2;
    case FamilyTag::FallingBallRadius: return 3;
  }
  return 0;
}

std::size_t OdeFamily::state_size() const {
  const auto n = static_cast<std::size_t>(body_count);
  return is_first_order(tag) ? n : 2 * n;
}

std::vector<std::string> OdeFamily::param_names() const {
  switch (tag) {
    case FamilyTag::SecondOrderLinear: return {"alpha", "beta"};
    case FamilyTag::FirstOrderDecay: return {"lambda"};
    case FamilyTag::Torricelli: return {"k"};
    case FamilyTag::ConstantAccel: return {"a"};
    case FamilyTag::NonlinearPendulum: return {"g_over_L", "zeta"};
    case FamilyTag::CoupledContact: return {"kappa", "zeta"};
    case FamilyTag::FallingBallRadius: return {"g", "r0f", "h0"};
    case FamilyTag::CoupledPendulum: {
      std::vector<std::string> names;
      for (int i = 0; i < body_count; ++i) names.push_back("g_over_L_" + std::to_string(i));
      for (int i = 0; i < body_count; ++i) names.push_back("zeta_" + std::to_string(i));
      for (int i = 0; i < body_count; ++i)
        for (int j = i + 1; j < body_count; ++j)
          names.push_back("kappa_" + std::to_string(i) + std::to_string(j));
      return names;
    }
  }
  return {};
}

int OdeFamily::time_order(std::size_t index) const {
  const auto n = static_cast<std::size_t>(body_count);
  switch (tag) {
    case FamilyTag::SecondOrderLinear:
    case FamilyTag::NonlinearPendulum:
    case FamilyTag::CoupledContact: return index == 0 ? 2 : 1;
    case FamilyTag::FirstOrderDecay:
    case FamilyTag::Torricelli: return 1;
    case FamilyTag::ConstantAccel: return 2;
    case FamilyTag::FallingBallRadius: return index == 0 ? 2 : 0;
    case FamilyTag::CoupledPendulum: return (index >= n && index < 2 * n) ? 1 : 2;
  }
  return 0;
}

std::size_t pair_index(int i, int j, int bodies) {
  if (i > j) std::swap(i, j);
  const auto ii = static_cast<std::size_t>(i);
  const auto n = static_cast<std::size_t>(bodies);
  return ii * n - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

ParamVector ParamVector::make(const OdeFamily& family, std::vector<double> values) {
  family.validate();
  check_arity(family, values);
  if ((family.tag == FamilyTag::Torricelli || family.tag == FamilyTag::FirstOrderDecay) &&
      values[0] < 0.0)
    throw DomainError(std::string(to_string(family.tag)) + " rate must be non-negative");
  return ParamVector{family, std::move(values)};
}

void check_arity(const OdeFamily& family, std::span<const double> params) {
  if (params.size() != family.arity())
    throw ArityError(std::string(to_string(family.tag)) + " expects " +
                     std::to_string(family.arity()) + " parameters, got " +
                     std::to_string(params.size()));
}

void check_state(const OdeFamily& family, const StateVector& state) {
  const auto n = static_cast<std::size_t>(family.body_count);
  const std::size_t nv = is_first_order(family.tag) ? 0 : n;
  if (state.positions.size() != n || state.velocities.size() != nv)
    throw ArityError("state shape does not match " + std::string(to_string(family.tag)) +
                     " with " + std::to_string(n) + " bodies");
}

Eigen::VectorXd flatten(const StateVector& state) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(state.positions.size() + state.velocities.size()));
  Eigen::Index k = 0;
  for (double p : state.positions) x[k++] = p;
  for (double v : state.velocities) x[k++] = v;
  return x;
}

StateVector unflatten(const OdeFamily& family, const Eigen::VectorXd& x) {
  const auto n = static_cast<Eigen::Index>(family.body_count);
  StateVector s;
  s.positions.assign(x.data(), x.data() + n);
  if (!is_first_order(family.tag)) s.velocities.assign(x.data() + n, x.data() + 2 * n);
  return s;
}

namespace detail {

void rhs_flat(const OdeFamily& family, std::span<const double> p, const Eigen::VectorXd& x,
              Eigen::VectorXd& out) {
  const int n = family.body_count;
  switch (family.tag) {
    case FamilyTag::SecondOrderLinear:
      out[0] = x[1];
      out[1] = -p[1] * x[1] - p[0] * x[0];
      return;
    case FamilyTag::FirstOrderDecay:
      out[0] = -p[0] * x[0];
      return;
    case FamilyTag::Torricelli:
      out[0] = -p[0] * std::sqrt(std::max(x[0], 0.0));
      return;
    case FamilyTag::ConstantAccel:
      out[0] = x[1];
      out[1] = p[0];
      return;
    case FamilyTag::NonlinearPendulum:
      out[0] = x[1];
      out[1] = -p[1] * x[1] - p[0] * std::sin(x[0]);
      return;
    case FamilyTag::CoupledPendulum:
      for (int i = 0; i < n; ++i) {
        const double th = x[i], w = x[n + i];
        double a = -p[static_cast<std::size_t>(n + i)] * w - p[static_cast<std::size_t>(i)] * std::sin(th);
        for (int j = 0; j < n; ++j) {
          if (j == i || !gate_open(family, th, x[j])) continue;
          a -= p[static_cast<std::size_t>(2 * n) + pair_index(i, j, n)] * (th - x[j]);
        }
        out[i] = w;
        out[n + i] = a;
      }
      return;
    case FamilyTag::CoupledContact:
      for (int i = 0; i < n; ++i) {
        double spring = 0.0;
        for (int j = 0; j < n; ++j)
          if (j != i && gate_open(family, x[i], x[j])) spring += x[i] - x[j];
        out[i] = x[n + i];
        out[n + i] = -p[1] * x[n + i] - p[0] * spring;
      }
      return;
    case FamilyTag::FallingBallRadius:
      break;
  }
  throw UnsupportedError(std::string(to_string(family.tag)) + " has no right-hand side");
}

void rhs_jacobians_flat(const OdeFamily& family, std::span<const double> p,
                        const Eigen::VectorXd& x, Eigen::MatrixXd& A, Eigen::MatrixXd& B) {
  A.setZero();
  B.setZero();
  const int n = family.body_count;
  switch (family.tag) {
    case FamilyTag::SecondOrderLinear:
      A(0, 1) = 1.0;
      A(1, 0) = -p[0];
      A(1, 1) = -p[1];
      B(1, 0) = -x[0];
      B(1, 1) = -x[1];
      return;
    case FamilyTag::FirstOrderDecay:
      A(0, 0) = -p[0];
      B(0, 0) = -x[0];
      return;
    case FamilyTag::Torricelli:
      if (x[0] > 0.0) {
        const double r = std::sqrt(x[0]);
        A(0, 0) = -p[0] / (2.0 * r);
        B(0, 0) = -r;
      }
      return;
    case FamilyTag::ConstantAccel:
      A(0, 1) = 1.0;
      B(1, 0) = 1.0;
      return;
    case FamilyTag::NonlinearPendulum:
      A(0, 1) = 1.0;
      A(1, 0) = -p[0] * std::cos(x[0]);
      A(1, 1) = -p[1];
      B(1, 0) = -std::sin(x[0]);
      B(1, 1) = -x[1];
      return;
    case FamilyTag::CoupledPendulum:
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        A(i, n + i) = 1.0;
        A(n + i, i) = -p[ui] * std::cos(x[i]);
        A(n + i, n + i) = -p[static_cast<std::size_t>(n) + ui];
        B(n + i, i) = -std::sin(x[i]);
        B(n + i, n + i) = -x[n + i];
        for (int j = 0; j < n; ++j) {
          if (j == i || !gate_open(family, x[i], x[j])) continue;
          const std::size_t k = static_cast<std::size_t>(2 * n) + pair_index(i, j, n);
          A(n + i, i) -= p[k];
          A(n + i, j) += p[k];
          B(n + i, static_cast<Eigen::Index>(k)) = -(x[i] - x[j]);
        }
      }
      return;
    case FamilyTag::CoupledContact:
      for (int i = 0; i < n; ++i) {
        A(i, n + i) = 1.0;
        A(n + i, n + i) = -p[1];
        double spring = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == i || !gate_open(family, x[i], x[j])) continue;
          spring += x[i] - x[j];
          A(n + i, i) -= p[0];
          A(n + i, j) += p[0];
        }
        B(n + i, 0) = -spring;
        B(n + i, 1) = -x[n + i];
      }
      return;
    case FamilyTag::FallingBallRadius:
      break;
  }
  throw UnsupportedError(std::string(to_string(family.tag)) + " has no right-hand side");
}

}  // namespace detail

StateVector rhs(const OdeFamily& family, std::span<const double> params, const StateVector& state) {
  family.validate();
  check_arity(family, params);
  check_state(family, state);
  const Eigen::VectorXd x = flatten(state);
  Eigen::VectorXd f(x.size());
  detail::rhs_flat(family, params, x, f);
  return unflatten(family, f);
}

RhsJacobians rhs_jacobians(const OdeFamily& family, std::span<const double> params,
                           const StateVector& state) {
  family.validate();
  check_arity(family, params);
  check_state(family, state);
  const Eigen::VectorXd x = flatten(state);
  RhsJacobians j{Eigen::MatrixXd(x.size(), x.size()),
                 Eigen::MatrixXd(x.size(), static_cast<Eigen::Index>(params.size()))};
  detail::rhs_jacobians_flat(family, params, x, j.d_state, j.d_params);
  return j;
}

StateVector closed_form(const OdeFamily& family, std::span<const double> p,
                        const StateVector& initial, double t) {
  family.validate();
  check_arity(family, p);
  switch (family.tag) {
    case FamilyTag::FirstOrderDecay:
      check_state(family, initial);
      return {{initial.positions[0] * std::exp(-p[0] * t)}, {}};
    case FamilyTag::Torricelli: {
      check_state(family, initial);
      const double root = std::sqrt(std::max(initial.positions[0], 0.0)) - 0.5 * p[0] * t;
      return {{root > 0.0 ? root * root : 0.0}, {}};
    }
    case FamilyTag::ConstantAccel: {
      check_state(family, initial);
      const double x0 = initial.positions[0], v0 = initial.velocities[0];
      return {{x0 + v0 * t + 0.5 * p[0] * t * t}, {v0 + p[0] * t}};
    }
    case FamilyTag::SecondOrderLinear: {
      check_state(family, initial);
      if (p[1] != 0.0)
        throw UnsupportedError("closed form only covers undamped second_order_linear (beta = 0)");
      const double z0 = initial.positions[0], v0 = initial.velocities[0], alpha = p[0];
      if (alpha > 0.0) {
        const double w = std::sqrt(alpha);
        return {{z0 * std::cos(w * t) + v0 / w * std::sin(w * t)},
                {-z0 * w * std::sin(w * t) + v0 * std::cos(w * t)}};
      }
      if (alpha < 0.0) {
        const double w = std::sqrt(-alpha);
        return {{z0 * std::cosh(w * t) + v0 / w * std::sinh(w * t)},
                {z0 * w * std::sinh(w * t) + v0 * std::cosh(w * t)}};
      }
      return {{z0 + v0 * t}, {v0}};
    }
    case FamilyTag::FallingBallRadius: {
      const double denom = p[2] + 0.5 * p[0] * t * t;
      if (!(denom > 0.0)) throw DomainError("falling_ball_radius: non-positive distance");
      return {{p[1] / denom}, {}};
    }
    default:
      break;
  }
  throw UnsupportedError(std::string(to_string(family.tag)) + " has no closed form");
}

}  // namespace physid
