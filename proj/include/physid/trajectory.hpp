#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace physid {

// Uniformly sampled positions of one or more bodies.
struct Trajectory {
  double dt = 0.0;
  double t0 = 0.0;
  int body_count = 1;
  // Sample-major: positions[t * body_count + body].
  std::vector<double> positions;
  std::string units;

  std::size_t size() const {
    return body_count > 0 ? positions.size() / static_cast<std::size_t>(body_count) : 0;
  }
  double at(std::size_t t, int body = 0) const {
    return positions[t * static_cast<std::size_t>(body_count) + static_cast<std::size_t>(body)];
  }
  double time(std::size_t t) const { return t0 + static_cast<double>(t) * dt; }

  // First `count` samples.
  Trajectory head(std::size_t count) const;
  // Single body as a one-body trajectory.
  Trajectory body(int index) const;

  bool operator==(const Trajectory&) const = default;
};

// Derivative schemes used to turn observed positions into velocities.
//   Backward: v_t = (z_t - z_{t-1}) / dt, the velocity an Euler-Cromer step
//             carries; forward difference at t = 0.
//   Central:  v_t = (z_{t+1} - z_{t-1}) / (2 dt); second-order one-sided
//             stencils at both ends.
enum class VelocityScheme { Backward, Central };

// Returns velocities in the same sample-major layout as positions.
std::vector<double> reconstruct_velocities(const Trajectory& traj, VelocityScheme scheme);

}  // namespace physid
