#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "physid/calibration.hpp"
#include "physid/dataio.hpp"
#include "physid/estimator.hpp"
#include "physid/eval_metrics.hpp"
#include "physid/synth.hpp"

namespace physid {

// One estimation configuration of the comparison grid.
struct RunConfig {
  IntegratorKind integrator = IntegratorKind::EulerCorrected;
  LossKind loss = LossKind::OneStep;
  int horizon = 1;
  int epochs = 500;
  double lr_params = 1e-2;
  std::vector<double> weights;

  ConfigKey key() const;
};

// baseline: euler-buggy one-step; corrected: euler one-step;
// multistep: euler multi-step with K = 5.
RunConfig named_config(std::string_view name);
std::vector<std::string> named_config_names();

FitConfig fit_config_for(const ClipSpec& spec, const RunConfig& run, std::uint64_t seed);

// Period, release angle, incline and the directly measured ground-truth
// values of the preset.
CalibrationAux calibration_aux(const ClipSpec& spec, const Trajectory& traj);

struct ClipOutcome {
  FitResult fit;
  std::vector<ResultsRow> rows;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<ExtrapolationRow> extrapolation;
};

// Raw rows are named "ode:<param>" and compared with the trial's generating
// parameters; SI rows come from the calibration table and are compared with
// the preset ground truth.
ClipOutcome run_clip(const ClipSpec& spec, const Clip& clip, std::uint64_t seed,
                     const RunConfig& run, const CalibrationTable& table);

// Epochs kept in the diagnostics output, plus the last one.
std::vector<int> diagnostic_epochs(int epochs);

struct PipelineOutput {
  std::vector<ResultsRow> rows;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<ExtrapolationRow> extrapolation;
  std::vector<ManifestEntry> manifest;
  std::vector<GroundTruthRecord> ground_truth;
};

void append(PipelineOutput& out, ClipOutcome&& outcome);

// max_samples > 0 truncates every clip to its first max_samples frames.
PipelineOutput run_presets(const std::vector<std::string>& presets, std::uint64_t seed,
                           const std::vector<RunConfig>& runs, const CalibrationTable& table,
                           std::size_t max_samples = 0);

}  // namespace physid
