#pragma once

#include <span>
#include <vector>

#include "physid/trajectory.hpp"

namespace physid {

struct EnvelopeFit {
  double A0 = 0.0;
  double zeta = 0.0;
  // Filled by aggregate_envelopes; zero for a single-trial fit.
  double ci95 = 0.0;
  int peaks_used = 0;
  // Set when the fitted envelope grows (zeta < 0).
  bool non_decaying = false;
};

// Envelope A(t) = A0 exp(-zeta t / 2) through the peaks of |z - mean|.
EnvelopeFit fit_envelope(const Trajectory& traj, int body = 0);

struct TrialSpread {
  double mean = 0.0;
  double std = 0.0;    // sample standard deviation
  double ci95 = 0.0;   // Student-t half-width
  int n = 0;
};

TrialSpread spread(std::span<const double> values);

// Mean zeta over trials with its 95% half-width.
EnvelopeFit aggregate_envelopes(std::span<const EnvelopeFit> fits);

// mu = tan(alpha) - a / (g cos(alpha)); alpha in degrees on (0, 90).
double friction_from_accel(double alpha_deg, double a_measured, double g = 9.81);

// a = 2 c2 from x(t) = c0 + c1 t + c2 t^2.
double poly_accel_fit(const Trajectory& traj, int body = 0);

// Complete elliptic integral of the first kind, modulus k in [0, 1).
double elliptic_k(double k);

double small_angle_period(double L, double g);
double exact_period(double L, double g, double theta0);

struct LengthEstimate {
  double small_angle = 0.0;
  double corrected = 0.0;
};

LengthEstimate corrected_length(double T_measured, double theta0, double g = 9.81);

}  // namespace physid
