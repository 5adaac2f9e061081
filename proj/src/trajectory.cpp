#include "physid/trajectory.hpp"

#include "physid/error.hpp"

namespace physid {

Trajectory Trajectory::head(std::size_t count) const {
  if (count > size()) throw DomainError("head: trajectory has only " + std::to_string(size()) + " samples");
  Trajectory out = *this;
  out.positions.resize(count * static_cast<std::size_t>(body_count));
  return out;
}

Trajectory Trajectory::body(int index) const {
  if (index < 0 || index >= body_count) throw DomainError("body index out of range");
  Trajectory out;
  out.dt = dt;
  out.t0 = t0;
  out.body_count = 1;
  out.units = units;
  out.positions.reserve(size());
  for (std::size_t t = 0; t < size(); ++t) out.positions.push_back(at(t, index));
  return out;
}

std::vector<double> reconstruct_velocities(const Trajectory& traj, VelocityScheme scheme) {
  const std::size_t n = traj.size();
  const auto bodies = static_cast<std::size_t>(traj.body_count);
  if (n < 3) throw DomainError("velocity reconstruction needs at least 3 samples");
  if (!(traj.dt > 0.0)) throw DomainError("trajectory dt must be positive");

  std::vector<double> vel(n * bodies);
  const double dt = traj.dt;
  for (std::size_t b = 0; b < bodies; ++b) {
    auto z = [&](std::size_t t) { return traj.positions[t * bodies + b]; };
    auto v = [&](std::size_t t) -> double& { return vel[t * bodies + b]; };
    if (scheme == VelocityScheme::Backward) {
      v(0) = (z(1) - z(0)) / dt;
      for (std::size_t t = 1; t < n; ++t) v(t) = (z(t) - z(t - 1)) / dt;
    } else {
      v(0) = (-3.0 * z(0) + 4.0 * z(1) - z(2)) / (2.0 * dt);
      for (std::size_t t = 1; t + 1 < n; ++t) v(t) = (z(t + 1) - z(t - 1)) / (2.0 * dt);
      v(n - 1) = (3.0 * z(n - 1) - 4.0 * z(n - 2) + z(n - 3)) / (2.0 * dt);
    }
  }
  return vel;
}

}  // namespace physid
