#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "physid/ode_bank.hpp"
#include "physid/trajectory.hpp"

namespace physid {

// EulerUncorrected reproduces the historical baseline: the position update
// omits the acceleration term, so one step's position carries no dependence
// on the parameters. EulerCorrected adds dt^2 * a to the position, which is
// the same map as semi-implicit (Euler-Cromer) z' = z + dt v'.
enum class IntegratorKind { EulerUncorrected, EulerCorrected, StormerVerlet, RK4 };

// CLI spellings: euler-buggy, euler, verlet, rk4.
std::string_view to_cli_string(IntegratorKind kind);
IntegratorKind integrator_from_string(std::string_view name);

// Velocity reconstruction matching what the stepper carries as its velocity.
VelocityScheme velocity_scheme_for(IntegratorKind kind);

inline constexpr double kDivergenceBound = 1e12;

bool within_divergence_bound(const Eigen::VectorXd& x);

// Reusable single-step kernel. Holds scratch buffers, so one instance must not
// be shared across threads.
class Stepper {
 public:
  Stepper(IntegratorKind kind, const OdeFamily& family, std::span<const double> params, double dt);

  void advance(Eigen::VectorXd& x);
  // Advances x and its sensitivity S = dx/dparams (state_size x arity).
  void advance(Eigen::VectorXd& x, Eigen::MatrixXd& sens);

  const OdeFamily& family() const { return family_; }
  std::size_t state_size() const { return n_; }
  std::size_t arity() const { return params_.size(); }

 private:
  template <bool Tangent>
  void advance_impl(Eigen::VectorXd& x, Eigen::MatrixXd* sens);
  template <bool Tangent>
  void eval(const Eigen::VectorXd& x, const Eigen::MatrixXd* sens, Eigen::VectorXd& f,
            Eigen::MatrixXd* df);

  IntegratorKind kind_;
  OdeFamily family_;
  std::vector<double> params_;
  double dt_;
  std::size_t n_;
  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
  Eigen::MatrixXd dk1_, dk2_, dk3_, dk4_, dtmp_, jac_x_, jac_p_;
};

StateVector step(IntegratorKind kind, const OdeFamily& family, std::span<const double> params,
                 const StateVector& state, double dt);

struct Rollout {
  std::vector<StateVector> states;
  double dt = 0.0;
  double t0 = 0.0;
};

// steps + 1 states including the initial one. Throws DivergenceError when a
// state leaves the divergence bound or becomes non-finite.
Rollout rollout(IntegratorKind kind, const OdeFamily& family, std::span<const double> params,
                const StateVector& initial, double dt, std::size_t steps, double t0 = 0.0);

}  // namespace physid
