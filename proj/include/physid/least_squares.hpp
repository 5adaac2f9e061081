#pragma once

#include <Eigen/Dense>

#include <functional>

namespace physid {

// Ordinary least squares min |X b - y|. Columns are normalised before the
// rank test; throws IllPosedError when a column is zero or the scaled design
// has sigma_min / sigma_max below rcond.
Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double rcond = 1e-9);

struct LmSettings {
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 10.0;
  int max_iterations = 200;
  double gradient_tolerance = 1e-10;
};

struct LmResult {
  Eigen::VectorXd params;
  double cost = 0.0;  // 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
};

// Fills residuals r and Jacobian J = dr/dp at p.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J)>;

LmResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd p0,
                             const LmSettings& settings = {});

}  // namespace physid
