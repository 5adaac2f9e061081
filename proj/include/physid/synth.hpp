#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "physid/ground_truth.hpp"
#include "physid/ode_bank.hpp"
#include "physid/trajectory.hpp"

namespace physid {

enum class SplitLabel { Train, Val, Test, Leaderboard };

std::string_view to_string(SplitLabel label);
SplitLabel split_label_from_string(std::string_view name);

struct SplitRatio {
  int train = 7;
  int val = 1;
  int test = 2;
  int leaderboard = 0;

  int total() const { return train + val + test + leaderboard; }
};

// Shuffled assignment keyed only on (phenomenon, setting, seed). Ten trials
// default to 7/1/2; any other count needs an explicit ratio.
std::vector<SplitLabel> assign_splits(const std::string& phenomenon, const std::string& setting,
                                      std::uint64_t seed, int trial_count,
                                      std::optional<SplitRatio> ratio = {});

struct ClipSpec {
  std::string phenomenon;
  std::string setting;
  OdeFamily family;
  ParamVector true_params;
  StateVector initial;
  double dt = 1.0 / 60.0;
  double duration = 1.0;
  double noise_std = 0.0;
  int trial_count = 10;
  // Relative std of the per-trial Gaussian parameter jitter; 0 disables it.
  double jitter = 0.01;
  // Internal RK4 steps per output sample.
  int substeps = 100;
  std::optional<SplitRatio> split_ratio;
  std::string units = "m";

  // Estimation-side metadata carried with presets.
  std::optional<OdeFamily> fit_family;
  std::vector<double> init_params;
  bool init_from_period = false;
  std::vector<std::size_t> frozen;
  std::optional<double> theta0;       // rad
  std::optional<double> incline_deg;  // sliding presets
  std::vector<GroundTruthParam> ground_truth;

  std::size_t sample_count() const;
  const OdeFamily& estimation_family() const { return fit_family ? *fit_family : family; }
  GroundTruthRecord ground_truth_record() const;
  void validate() const;
};

struct Clip {
  int trial = 0;
  Trajectory trajectory;
  ParamVector params;  // jittered parameters used for this trial
  SplitLabel split = SplitLabel::Train;

  bool operator==(const Clip&) const = default;
};

struct ClipSet {
  ClipSpec spec;
  std::uint64_t seed = 42;
  std::vector<Clip> clips;

  std::vector<SplitLabel> split() const;
};

// Noise-free trajectory for one parameter set, RK4 at dt / substeps.
Trajectory simulate(const ClipSpec& spec, const ParamVector& params);

// Throws DivergenceError naming the trial on a blown-up simulation.
ClipSet generate(const ClipSpec& spec, std::uint64_t seed);
Clip generate_trial(const ClipSpec& spec, std::uint64_t seed, int trial);

enum class PresetSuite { Iris, Delfys75 };

std::vector<std::string> preset_names(PresetSuite suite);
std::vector<std::string> all_preset_names();
ClipSpec preset(const std::string& name);

}  // namespace physid
