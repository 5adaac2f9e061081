#include <cmath>

#include "doctest.h"
#include "physid/error.hpp"
#include "physid/least_squares.hpp"

using namespace physid;

TEST_CASE("exact linear fit") {
  Eigen::MatrixXd X(5, 2);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    y(i) = 3.0 + 2.0 * i;
  }
  const auto b = solve_least_squares(X, y);
  CHECK(b(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rank deficiency is ill-posed") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(4, 2);
  X.col(0).setOnes();
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(solve_least_squares(X, y), IllPosedError);
  X.col(1) = 2.0 * X.col(0);
  CHECK_THROWS_AS(solve_least_squares(X, y), IllPosedError);
}

TEST_CASE("levenberg-marquardt fits an exponential") {
  const int n = 40;
  const auto fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& J) {
    r.resize(n);
    J.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      const double t = 0.1 * i;
      const double e = std::exp(-p(1) * t);
      r(i) = p(0) * e - 2.0 * std::exp(-0.7 * t);
      J(i, 0) = e;
      J(i, 1) = -p(0) * t * e;
    }
  };
  const auto res = levenberg_marquardt(fn, Eigen::Vector2d(1.0, 0.1));
  CHECK(res.converged);
  CHECK(res.params(0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(res.params(1) == doctest::Approx(0.7).epsilon(1e-8));
}
