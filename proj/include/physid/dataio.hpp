#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "physid/eval_metrics.hpp"
#include "physid/ground_truth.hpp"
#include "physid/synth.hpp"
#include "physid/trajectory.hpp"

namespace physid {

// 9 significant digits, the default for every emitted float.
std::string format_double(double v);
// Shortest text that parses back to the same double.
std::string format_roundtrip(double v);
double parse_double(std::string_view text, std::string_view what = "number");

// Writes to a sibling temporary and renames it over `path`; creates parent
// directories.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

// parameters.json: an array of {phenomenon, setting, params: [...]}.
std::vector<GroundTruthRecord> parse_parameters_json(std::string_view text);
std::vector<GroundTruthRecord> load_parameters_json(const std::string& path);
std::string parameters_json_text(const std::vector<GroundTruthRecord>& records);
void save_parameters_json(const std::string& path, const std::vector<GroundTruthRecord>& records);
void validate(const GroundTruthRecord& record);

// Trajectory CSV: optional "# units: <u>" line, header t,body,pos, rows
// sorted by (t, body). Values use the round-trip format.
std::string trajectory_csv_text(const Trajectory& traj);
Trajectory parse_trajectory_csv(std::string_view text);
Trajectory load_trajectory_csv(const std::string& path);
void save_trajectory_csv(const std::string& path, const Trajectory& traj);

std::string results_header();
std::string results_csv_text(std::vector<ResultsRow> rows);
std::vector<ResultsRow> parse_results_csv(std::string_view text);
std::vector<ResultsRow> load_results_csv(const std::string& path);
// Canonical order: identifier tuple, parameter order preserved within a clip.
void sort_results(std::vector<ResultsRow>& rows);

struct ManifestEntry {
  std::string phenomenon;
  std::string setting;
  int trial = 0;
  SplitLabel split = SplitLabel::Train;

  bool operator==(const ManifestEntry&) const = default;
};

struct ManifestSetting {
  std::string phenomenon;
  std::string setting;
  int trial_count = 10;
  std::optional<SplitRatio> ratio;
};

std::vector<ManifestEntry> split_manifest(const std::vector<ManifestSetting>& settings,
                                          std::uint64_t seed);
std::string manifest_csv_text(const std::vector<ManifestEntry>& manifest);
std::vector<ManifestEntry> parse_manifest_csv(std::string_view text);

std::string diagnostics_csv_text(const std::vector<DiagnosticsRow>& rows);
std::vector<DiagnosticsRow> parse_diagnostics_csv(std::string_view text);

std::string extrapolation_csv_text(const std::vector<ExtrapolationRow>& rows);
std::vector<ExtrapolationRow> parse_extrapolation_csv(std::string_view text);

// Report as machine JSON; every number is a fold over results rows.
std::string report_json_text(const EvalReport& report);
EvalReport parse_report_json(std::string_view text);
// Plain-text tables rendered from a report.
std::string summary_text(const EvalReport& report);
std::string config_label(const ConfigKey& key);

}  // namespace physid
