#include "physid/least_squares.hpp"

#include <cmath>

#include "physid/error.hpp"

namespace physid {

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    double rcond) {
  if (X.rows() < X.cols()) throw IllPosedError("fewer equations than unknowns");
  Eigen::VectorXd scale(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    scale[j] = X.col(j).norm();
    if (!(scale[j] > 0.0) || !std::isfinite(scale[j]))
      throw IllPosedError("regressor column " + std::to_string(j) + " is zero");
  }
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s[s.size() - 1] < rcond * s[0]) throw IllPosedError("regressors are collinear");
  return svd.solve(y).cwiseQuotient(scale);
}

LmResult levenberg_marquardt(const ResidualFunction& fn, Eigen::VectorXd p, const LmSettings& st) {
  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd J, J_try;
  fn(p, r, J);
  double cost = 0.5 * r.squaredNorm();
  double lambda = st.lambda0;
  LmResult out;
  for (int it = 0; it < st.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < st.gradient_tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd H = J.transpose() * J;
    bool accepted = false;
    // Retry with heavier damping until the cost drops or lambda saturates.
    while (lambda < 1e16) {
      Eigen::MatrixXd A = H;
      for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, i) += lambda * (H(i, i) + 1e-12);
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      const Eigen::VectorXd p_try = p + delta;
      fn(p_try, r_try, J_try);
      const double c_try = 0.5 * r_try.squaredNorm();
      if (std::isfinite(c_try) && c_try < cost) {
        const bool tiny = delta.norm() <= 1e-15 * (p.norm() + 1e-15);
        p = p_try;
        r.swap(r_try);
        J.swap(J_try);
        cost = c_try;
        lambda /= st.lambda_down;
        accepted = true;
        if (tiny) out.converged = true;
        break;
      }
      lambda *= st.lambda_up;
    }
    if (!accepted || out.converged) {
      // No descent direction left at working precision.
      out.converged = true;
      break;
    }
  }
  out.params = p;
  out.cost = cost;
  return out;
}

}  // namespace physid
