#pragma once

// Candidate governing-equation families.
//
// Canonical parameter order (all serialization uses it):
//   second_order_linear   z'' = -beta z' - alpha z           (alpha, beta)
//   first_order_decay     z'  = -lambda z                    (lambda)
//   torricelli            z'  = -k sqrt(max(z, 0))           (k)
//   constant_accel        x'' = a                            (a)
//   nonlinear_pendulum    th'' = -zeta th' - (g/L) sin th    (g_over_L, zeta)
//   coupled_pendulum      th_i'' = -zeta_i th_i' - (g/L_i) sin th_i
//                                  - sum_j kappa_ij (th_i - th_j)
//                         (g_over_L_0..N-1, zeta_0..N-1, kappa_ij for i<j row-major)
//   coupled_contact       z_i'' = -zeta z_i' - kappa sum_j (z_i - z_j)   (kappa, zeta)
//   falling_ball_radius   r(t) = (r0 f) / (h0 + g t^2 / 2)  (g, r0f, h0)
//
// falling_ball_radius is algebraic: it has a closed form but no right-hand side.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace physid {

enum class FamilyTag {
  SecondOrderLinear,
  FirstOrderDecay,
  Torricelli,
  ConstantAccel,
  NonlinearPendulum,
  CoupledPendulum,
  CoupledContact,
  FallingBallRadius,
};

std::string_view to_string(FamilyTag tag);
FamilyTag family_tag_from_string(std::string_view name);

bool is_coupled(FamilyTag tag);
// First-order families carry no velocity state.
bool is_first_order(FamilyTag tag);
bool has_rhs(FamilyTag tag);

struct OdeFamily {
  FamilyTag tag = FamilyTag::SecondOrderLinear;
  int body_count = 1;
  // Coupled families only: when set, a pair interacts only while
  // |z_i - z_j| < contact_threshold. Unset means continuously active.
  std::optional<double> contact_threshold;

  static OdeFamily single(FamilyTag tag);
  static OdeFamily coupled(FamilyTag tag, int bodies, std::optional<double> contact_threshold = {});

  // Throws ArityError if body_count is inconsistent with the tag.
  void validate() const;
  std::size_t arity() const;
  std::size_t state_size() const;
  std::vector<std::string> param_names() const;
  // Power of inverse seconds carried by parameter `index` (alpha ~ 1/s^2 -> 2,
  // beta ~ 1/s -> 1, lengths -> 0).
  int time_order(std::size_t index) const;

  bool operator==(const OdeFamily&) const = default;
};

std::size_t pair_index(int i, int j, int bodies);

struct ParamVector {
  OdeFamily family;
  std::vector<double> values;

  // Validates arity and sign constraints (k >= 0, lambda >= 0).
  static ParamVector make(const OdeFamily& family, std::vector<double> values);
  bool operator==(const ParamVector&) const = default;
};

struct StateVector {
  std::vector<double> positions;
  std::vector<double> velocities;  // empty for first-order families

  bool operator==(const StateVector&) const = default;
};

void check_arity(const OdeFamily& family, std::span<const double> params);
void check_state(const OdeFamily& family, const StateVector& state);

// Flat layout [positions; velocities].
Eigen::VectorXd flatten(const StateVector& state);
StateVector unflatten(const OdeFamily& family, const Eigen::VectorXd& x);

// Time derivative, returned as (dz/dt, dv/dt) per body in a StateVector.
StateVector rhs(const OdeFamily& family, std::span<const double> params, const StateVector& state);

struct RhsJacobians {
  Eigen::MatrixXd d_state;   // state_size x state_size
  Eigen::MatrixXd d_params;  // state_size x arity
};
RhsJacobians rhs_jacobians(const OdeFamily& family, std::span<const double> params,
                           const StateVector& state);

// Exact solution at time t for first_order_decay, torricelli, constant_accel,
// undamped second_order_linear and falling_ball_radius.
StateVector closed_form(const OdeFamily& family, std::span<const double> params,
                        const StateVector& initial, double t);

namespace detail {
// Flat-state kernels used by the integrators. `out` must be sized by caller.
void rhs_flat(const OdeFamily& family, std::span<const double> params, const Eigen::VectorXd& x,
              Eigen::VectorXd& out);
// Overwrites d_state and d_params (both pre-sized).
void rhs_jacobians_flat(const OdeFamily& family, std::span<const double> params,
                        const Eigen::VectorXd& x, Eigen::MatrixXd& d_state,
                        Eigen::MatrixXd& d_params);
}  // namespace detail

}  // namespace physid
