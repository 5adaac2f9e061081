#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "physid/estimator.hpp"
#include "physid/integrators.hpp"
#include "physid/ode_bank.hpp"
#include "physid/trajectory.hpp"

namespace physid {

struct MaeResult {
  double mae = 0.0;
  double sigma = 0.0;  // sample std of the estimates, 0 for a single value
  int n = 0;
};

MaeResult mae(std::span<const double> estimates, double gt);

struct ExtrapolationPoint {
  int k = 0;
  double error = 0.0;
};

// Unrolls from the observed state at frame t_train; E_k is the squared
// position error k frames later.
std::vector<ExtrapolationPoint> extrapolation_error(const Trajectory& traj, const OdeFamily& family,
                                                    std::span<const double> params,
                                                    IntegratorKind kind,
                                                    std::size_t t_train = 100,
                                                    std::vector<int> ks = {10, 25, 50});

struct SelectionOptions {
  DirectFitOptions direct;
  int fallback_epochs = 50;
  IntegratorKind scoring = IntegratorKind::RK4;
};

struct SelectionResult {
  std::size_t chosen_index = 0;
  OdeFamily chosen;
  // +inf for candidates that could not be fitted.
  std::vector<double> scores;
};

// Fits each candidate (direct least squares, or a short Adam run when the
// direct fit is unsupported) and picks the lowest ODE residual. Scores within
// 1e-9 of the larger score or of the mean squared position are ties; ties go
// to fewer parameters, then to the smaller state, then to earlier candidates.
// A lone candidate is always chosen.
SelectionResult select_family(const Trajectory& traj, std::span<const OdeFamily> candidates,
                              const SelectionOptions& options = {});

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long>> counts;  // rows = ground truth, columns = predicted

  long total() const;
  long correct() const;
  double accuracy() const;
  // NaN for classes without ground-truth samples.
  std::vector<double> per_class_accuracy() const;
};

ConfusionMatrix confusion(std::span<const std::string> gt_labels,
                          std::span<const std::string> predicted,
                          std::vector<std::string> labels = {});

// One (clip, parameter) outcome.
struct ResultsRow {
  std::string phenomenon;
  std::string setting;
  int clip = 0;
  std::uint64_t seed = 42;
  std::string family;
  std::string integrator;
  std::string loss_kind;
  int horizon = 1;
  std::string param_name;
  std::optional<double> gt;
  double estimate = 0.0;
  std::optional<double> abs_error;
  double ode_residual = 0.0;
  bool diverged = false;

  bool operator==(const ResultsRow&) const = default;
};

struct ConfigKey {
  std::string integrator;
  std::string loss_kind;
  int horizon = 1;

  auto operator<=>(const ConfigKey&) const = default;
};

struct SettingKey {
  std::string phenomenon;
  std::string setting;
  ConfigKey config;

  auto operator<=>(const SettingKey&) const = default;
};

struct ReportRow {
  SettingKey key;
  std::string param_name;
  double gt = 0.0;
  double mae = 0.0;      // over the evaluation split
  double sigma = 0.0;
  int n_clips = 0;
  double trial_mean = 0.0;  // over every trial
  double trial_std = 0.0;
  int trial_n = 0;
  int diverged = 0;

  bool operator==(const ReportRow&) const = default;
};

struct GradSnapshot {
  int epoch = 0;
  double mean = 0.0;
};

struct ExtrapolationSummary {
  int k = 0;
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::map<SettingKey, double> residual_by_setting;
  std::map<SettingKey, std::vector<GradSnapshot>> grad_norm_snapshots;
  std::map<SettingKey, std::vector<ExtrapolationSummary>> extrapolation;
};

// Clip identity used to pick the evaluation split.
using ClipKey = std::tuple<std::string, std::string, int>;

// Pure fold over the results rows. Rows of clips in `eval_clips` feed the
// MAE columns; every row feeds the trial columns. An empty set uses all rows.
EvalReport aggregate(std::span<const ResultsRow> rows,
                     const std::vector<ClipKey>& eval_clips = {});

struct DiagnosticsRow {
  std::string phenomenon;
  std::string setting;
  int clip = 0;
  ConfigKey config;
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double grad_norm = 0.0;
};

void add_grad_snapshots(EvalReport& report, std::span<const DiagnosticsRow> diagnostics,
                        std::vector<int> epochs = {1, 50, 200});

struct ExtrapolationRow {
  SettingKey key;
  int clip = 0;
  int k = 0;
  double error = 0.0;
};

void add_extrapolation(EvalReport& report, std::span<const ExtrapolationRow> rows);

struct SweepEstimate {
  std::string phenomenon;
  std::string setting;
  std::string param_name;
  std::string integrator;
  int horizon = 1;
  std::uint64_t seed = 42;
  double estimate = 0.0;
};

struct SweepSpread {
  std::string phenomenon;
  std::string setting;
  std::string param_name;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  int n = 0;
};

// Spread of estimates across the design-choice grid, one entry per
// (phenomenon, setting, parameter), sorted.
std::vector<SweepSpread> sweep_spread(std::span<const SweepEstimate> estimates);

}  // namespace physid
