#include "physid/gt_fit.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include "physid/error.hpp"
#include "physid/estimator.hpp"
#include "physid/least_squares.hpp"

namespace physid {

namespace {

constexpr double kPi = std::numbers::pi;

struct Peak {
  double t = 0.0;
  double value = 0.0;
  std::size_t index = 0;
};

std::vector<Peak> detect_peaks(const std::vector<double>& s, double dt, double min_sep) {
  std::vector<Peak> peaks;
  for (std::size_t t = 1; t + 1 < s.size(); ++t) {
    if (!(s[t] >= s[t - 1] && s[t] > s[t + 1])) continue;
    const double ym = s[t - 1], y0 = s[t], yp = s[t + 1];
    const double denom = ym - 2.0 * y0 + yp;
    double delta = 0.0, value = y0;
    if (denom < 0.0) {
      delta = 0.5 * (ym - yp) / denom;
      value = y0 - 0.25 * (ym - yp) * delta;
    }
    Peak p{(static_cast<double>(t) + delta) * dt, value, t};
    if (!peaks.empty() && p.t - peaks.back().t < min_sep) {
      if (p.value > peaks.back().value) peaks.back() = p;
      continue;
    }
    peaks.push_back(p);
  }
  return peaks;
}

}  // namespace

EnvelopeFit fit_envelope(const Trajectory& traj, int body) {
  const Trajectory one = traj.body_count == 1 ? traj : traj.body(body);
  const std::size_t n = one.size();
  const double mean = std::accumulate(one.positions.begin(), one.positions.end(), 0.0) /
                      static_cast<double>(n);
  std::vector<double> s(n);
  for (std::size_t t = 0; t < n; ++t) s[t] = std::abs(one.positions[t] - mean);

  const double period = extract_period(one);
  const auto peaks = detect_peaks(s, one.dt, 0.4 * period);
  if (peaks.size() < 3)
    throw DomainError("envelope fit needs at least 3 peaks, found " + std::to_string(peaks.size()));

  const auto m = static_cast<Eigen::Index>(peaks.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m), tp(m), Ap(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = peaks[static_cast<std::size_t>(i)];
    if (!(p.value > 0.0)) throw DomainError("envelope fit found a zero-amplitude peak");
    tp[i] = one.t0 + p.t;
    Ap[i] = p.value;
    X(i, 0) = 1.0;
    X(i, 1) = -0.5 * tp[i];
    y[i] = std::log(p.value);
  }
  const Eigen::VectorXd lin = solve_least_squares(X, y);

  const ResidualFunction residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                                        Eigen::MatrixXd& J) {
    r.resize(m);
    J.resize(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double e = std::exp(-0.5 * p[1] * tp[i]);
      r[i] = p[0] * e - Ap[i];
      J(i, 0) = e;
      J(i, 1) = -0.5 * tp[i] * p[0] * e;
    }
  };
  const LmResult lm = levenberg_marquardt(residual, Eigen::Vector2d(std::exp(lin[0]), lin[1]));

  EnvelopeFit fit;
  fit.A0 = lm.params[0];
  fit.zeta = lm.params[1];
  fit.peaks_used = static_cast<int>(m);
  fit.non_decaying = fit.zeta < 0.0;
  return fit;
}

TrialSpread spread(std::span<const double> values) {
  if (values.empty()) throw DomainError("spread of an empty list");
  TrialSpread s;
  s.n = static_cast<int>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (s.n > 1 && *lo != *hi) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (s.n - 1));
    const boost::math::students_t dist(s.n - 1);
    s.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * s.std /
             std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

EnvelopeFit aggregate_envelopes(std::span<const EnvelopeFit> fits) {
  if (fits.empty()) throw DomainError("no envelope fits to aggregate");
  std::vector<double> zetas, amps;
  EnvelopeFit out;
  out.peaks_used = fits.front().peaks_used;
  for (const auto& f : fits) {
    zetas.push_back(f.zeta);
    amps.push_back(f.A0);
    out.peaks_used = std::min(out.peaks_used, f.peaks_used);
  }
  const auto z = spread(zetas);
  out.zeta = z.mean;
  out.ci95 = z.ci95;
  out.A0 = spread(amps).mean;
  out.non_decaying = out.zeta < 0.0;
  return out;
}

double friction_from_accel(double alpha_deg, double a_measured, double g) {
  if (!(alpha_deg > 0.0 && alpha_deg < 90.0))
    throw DomainError("incline angle must lie in (0, 90) degrees");
  if (!(g > 0.0)) throw DomainError("g must be positive");
  const double a = alpha_deg * kPi / 180.0;
  return std::tan(a) - a_measured / (g * std::cos(a));
}

double poly_accel_fit(const Trajectory& traj, int body) {
  const std::size_t n = traj.size();
  if (n < 5) throw DomainError("polynomial fit needs at least 5 samples");
  if (!(traj.dt > 0.0)) throw IllPosedError("degenerate time column");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = traj.time(static_cast<std::size_t>(i));
    X(i, 0) = 1.0;
    X(i, 1) = t;
    X(i, 2) = t * t;
    y[i] = traj.at(static_cast<std::size_t>(i), body);
  }
  return 2.0 * solve_least_squares(X, y)[2];
}

double elliptic_k(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("elliptic modulus must lie in [0, 1)");
  double a = 1.0, b = std::sqrt(1.0 - k * k);
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-15 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

double small_angle_period(double L, double g) {
  if (!(L > 0.0) || !(g > 0.0)) throw DomainError("L and g must be positive");
  return 2.0 * kPi * std::sqrt(L / g);
}

double exact_period(double L, double g, double theta0) {
  if (!(L > 0.0) || !(g > 0.0)) throw DomainError("L and g must be positive");
  if (!(theta0 >= 0.0 && theta0 < kPi)) throw DomainError("theta0 must lie in [0, pi)");
  return 4.0 * std::sqrt(L / g) * elliptic_k(std::sin(0.5 * theta0));
}

LengthEstimate corrected_length(double T_measured, double theta0, double g) {
  if (!(T_measured > 0.0)) throw DomainError("measured period must be positive");
  if (!(theta0 >= 0.0 && theta0 < kPi)) throw DomainError("theta0 must lie in [0, pi)");
  const double small = T_measured / (2.0 * kPi);
  const double exact = T_measured / (4.0 * elliptic_k(std::sin(0.5 * theta0)));
  return {g * small * small, g * exact * exact};
}

}  // namespace physid
