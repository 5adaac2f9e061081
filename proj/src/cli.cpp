#include "physid/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "physid/calibration.hpp"
#include "physid/dataio.hpp"
#include "physid/error.hpp"
#include "physid/eval_metrics.hpp"
#include "physid/pipeline.hpp"
#include "physid/synth.hpp"

namespace physid {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PHYSID_SEED"); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParseError("PHYSID_SEED is not an unsigned integer: '" + std::string(s) + "'");
    return v;
  }
  return 42;
}

std::vector<std::string> expand_presets(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  auto add = [&](const std::string& n) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& p : all_preset_names()) add(p);
    } else if (n == "iris") {
      for (const auto& p : preset_names(PresetSuite::Iris)) add(p);
    } else if (n == "delfys75") {
      for (const auto& p : preset_names(PresetSuite::Delfys75)) add(p);
    } else {
      preset(n);  // validates the name
      add(n);
    }
  }
  return out;
}

void print_config(std::ostream& out, const std::string& command, const ojson& cfg) {
  ojson j = ojson::object();
  j["command"] = command;
  for (const auto& [k, v] : cfg.items()) j[k] = v;
  out << "resolved config: " << j.dump() << "\n";
}

ojson run_config_json(const RunConfig& r) {
  FitConfig f;
  f.loss = r.loss;
  f.horizon = r.horizon;
  f.weights = r.weights;
  return {{"integrator", std::string(to_cli_string(r.integrator))},
          {"loss", std::string(to_cli_string(r.loss))},
          {"horizon", r.horizon},
          {"weights", f.resolved_weights()},
          {"epochs", r.epochs},
          {"lr", r.lr_params}};
}

std::string trial_file(const ClipSpec& spec, int trial) {
  return spec.phenomenon + "/" + spec.setting + "/trial_" + std::to_string(trial) + ".csv";
}

// One clip on disk plus the preset that produced it.
struct StoredClip {
  std::string preset_name;
  ClipSpec spec;
  Clip clip;
};

std::vector<StoredClip> load_dataset(const std::string& dir) {
  const auto records = load_parameters_json((fs::path(dir) / "parameters.json").string());
  std::vector<StoredClip> out;
  for (const auto& rec : records) {
    const std::string where = rec.phenomenon + "/" + rec.setting;
    if (!rec.extra.contains("preset") || !rec.extra.contains("trials"))
      throw ParseError(where + ": record lacks the 'preset' and 'trials' fields written by simulate");
    const auto name = rec.extra["preset"].get<std::string>();
    ClipSpec spec = preset(name);
    spec.ground_truth = rec.params;
    for (const auto& jt : rec.extra["trials"]) {
      StoredClip sc;
      sc.preset_name = name;
      sc.spec = spec;
      sc.clip.trial = jt.at("trial").get<int>();
      sc.clip.split = split_label_from_string(jt.at("split").get<std::string>());
      sc.clip.trajectory = load_trajectory_csv((fs::path(dir) / jt.at("file").get<std::string>()).string());
      sc.clip.params.family = spec.family;
      if (jt.contains("ode_params"))
        for (const auto& n : spec.family.param_names())
          sc.clip.params.values.push_back(jt["ode_params"].at(n).get<double>());
      out.push_back(std::move(sc));
    }
  }
  return out;
}

// Ad hoc spec for a trajectory that did not come from a preset.
ClipSpec custom_spec(const std::string& phenomenon, const std::string& setting,
                     const std::string& family_name, const Trajectory& traj) {
  ClipSpec spec;
  spec.phenomenon = phenomenon;
  spec.setting = setting;
  const FamilyTag tag = family_tag_from_string(family_name);
  spec.family = is_coupled(tag) ? OdeFamily::coupled(tag, traj.body_count) : OdeFamily::single(tag);
  spec.family.validate();
  spec.dt = traj.dt;
  return spec;
}

struct FitFlags {
  std::string data;
  std::vector<std::string> traj_files;
  std::string family;
  std::string phenomenon = "custom";
  std::string setting = "default";
  std::vector<std::string> configs;
  std::string integrator;
  std::string loss;
  int horizon = 0;
  std::vector<double> weights;
  int epochs = 500;
  double lr = 1e-2;
  std::string out;
  std::string diagnostics;
  std::string extrapolation;
  std::string calibration;
};

std::vector<RunConfig> resolve_runs(const FitFlags& f) {
  std::vector<RunConfig> runs;
  const auto names = f.configs.empty() ? std::vector<std::string>{"corrected"} : f.configs;
  for (const auto& n : names) {
    RunConfig r = named_config(n);
    if (!f.integrator.empty()) r.integrator = integrator_from_string(f.integrator);
    if (!f.loss.empty()) r.loss = loss_kind_from_string(f.loss);
    if (f.horizon > 0) r.horizon = f.horizon;
    if (r.loss == LossKind::OneStep && f.horizon <= 0) r.horizon = 1;
    if (r.loss == LossKind::OneStep && r.horizon != 1)
      throw ParseError("one-step loss needs horizon 1");
    r.weights = f.weights;
    if (!r.weights.empty() && static_cast<int>(r.weights.size()) != r.horizon)
      throw ParseError("--weights needs one value per horizon step");
    r.epochs = f.epochs;
    r.lr_params = f.lr;
    runs.push_back(r);
  }
  return runs;
}

CalibrationTable load_table(const std::string& path) {
  return path.empty() ? CalibrationTable::defaults() : CalibrationTable::load(path);
}

int cmd_simulate(const std::vector<std::string>& presets_in, std::uint64_t seed,
                 const std::string& out_dir, std::size_t max_samples, std::ostream& out) {
  const auto presets = expand_presets(presets_in);
  print_config(out, "simulate",
               {{"presets", presets}, {"seed", seed}, {"out", out_dir}, {"max_samples", max_samples}});
  std::vector<GroundTruthRecord> records;
  std::vector<ManifestSetting> settings;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& name : presets) {
    const ClipSpec spec = preset(name);
    if (!seen.insert({spec.phenomenon, spec.setting}).second)
      throw DomainError("presets collide on " + spec.phenomenon + "/" + spec.setting);
    const ClipSet set = generate(spec, seed);
    GroundTruthRecord rec = spec.ground_truth_record();
    rec.extra["preset"] = name;
    rec.extra["family"] = std::string(to_string(spec.family.tag));
    rec.extra["dt"] = spec.dt;
    ojson trials = ojson::array();
    for (const auto& clip : set.clips) {
      Trajectory traj = clip.trajectory;
      if (max_samples > 0 && traj.size() > max_samples) traj = traj.head(max_samples);
      const auto file = trial_file(spec, clip.trial);
      save_trajectory_csv((fs::path(out_dir) / file).string(), traj);
      ojson jt = {{"trial", clip.trial}, {"split", std::string(to_string(clip.split))}, {"file", file}};
      if (spec.family == spec.estimation_family()) {
        ojson p = ojson::object();
        const auto names = spec.family.param_names();
        for (std::size_t i = 0; i < names.size(); ++i)
          p[names[i]] = std::stod(format_double(clip.params.values[i]));
        jt["ode_params"] = std::move(p);
      }
      trials.push_back(std::move(jt));
    }
    rec.extra["trials"] = std::move(trials);
    records.push_back(std::move(rec));
    settings.push_back({spec.phenomenon, spec.setting, spec.trial_count, spec.split_ratio});
    out << "  " << name << ": " << set.clips.size() << " clips\n";
  }
  save_parameters_json((fs::path(out_dir) / "parameters.json").string(), records);
  write_file_atomic((fs::path(out_dir) / "splits.csv").string(),
                    manifest_csv_text(split_manifest(settings, seed)));
  out << "wrote " << records.size() << " settings to " << out_dir << "\n";
  return 0;
}

int cmd_fit(const FitFlags& f, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (f.data.empty() == f.traj_files.empty()) throw ParseError("fit needs exactly one of --data or --traj");
  if (!f.traj_files.empty() && f.family.empty()) throw ParseError("--traj needs --family");
  const auto runs = resolve_runs(f);
  ojson cfg = {{"seed", seed}, {"out", f.out}};
  if (!f.data.empty()) cfg["data"] = f.data;
  if (!f.traj_files.empty()) {
    cfg["traj"] = f.traj_files;
    cfg["family"] = f.family;
  }
  cfg["runs"] = ojson::array();
  for (const auto& r : runs) cfg["runs"].push_back(run_config_json(r));
  cfg["diagnostics"] = f.diagnostics.empty() ? ojson(nullptr) : ojson(f.diagnostics);
  print_config(out, "fit", cfg);

  const CalibrationTable table = load_table(f.calibration);
  std::vector<StoredClip> clips;
  if (!f.data.empty()) {
    clips = load_dataset(f.data);
  } else {
    for (std::size_t i = 0; i < f.traj_files.size(); ++i) {
      StoredClip sc;
      sc.clip.trial = static_cast<int>(i);
      sc.clip.trajectory = load_trajectory_csv(f.traj_files[i]);
      sc.spec = custom_spec(f.phenomenon, f.setting, f.family, sc.clip.trajectory);
      clips.push_back(std::move(sc));
    }
  }

  PipelineOutput result;
  int failures = 0;
  for (const auto& run : runs)
    for (const auto& sc : clips) {
      try {
        append(result, run_clip(sc.spec, sc.clip, seed, run, table));
      } catch (const Error& e) {
        ++failures;
        err << "clip " << sc.spec.phenomenon << "/" << sc.spec.setting << "/" << sc.clip.trial
            << " (" << config_label(run.key()) << ") failed: " << e.what() << "\n";
      }
    }
  write_file_atomic(f.out, results_csv_text(result.rows));
  if (!f.diagnostics.empty()) write_file_atomic(f.diagnostics, diagnostics_csv_text(result.diagnostics));
  if (!f.extrapolation.empty())
    write_file_atomic(f.extrapolation, extrapolation_csv_text(result.extrapolation));
  out << "fitted " << clips.size() * runs.size() - static_cast<std::size_t>(failures) << " of "
      << clips.size() * runs.size() << " clip runs; wrote " << result.rows.size() << " rows to "
      << f.out << "\n";
  return failures ? 1 : 0;
}

int cmd_eval(const std::string& results, const std::string& manifest, const std::string& gt,
             const std::string& diagnostics, const std::string& extrapolation,
             const std::string& out_path, std::ostream& out) {
  print_config(out, "eval",
               {{"results", results},
                {"manifest", manifest.empty() ? ojson(nullptr) : ojson(manifest)},
                {"gt", gt.empty() ? ojson(nullptr) : ojson(gt)},
                {"diagnostics", diagnostics.empty() ? ojson(nullptr) : ojson(diagnostics)},
                {"extrapolation", extrapolation.empty() ? ojson(nullptr) : ojson(extrapolation)},
                {"eval_split", manifest.empty() ? "all" : "test"},
                {"out", out_path}});
  auto rows = load_results_csv(results);
  if (!gt.empty()) {
    const auto records = load_parameters_json(gt);
    for (auto& r : rows) {
      if (r.gt) continue;
      for (const auto& rec : records)
        if (rec.phenomenon == r.phenomenon && rec.setting == r.setting)
          if (const auto* p = rec.find(r.param_name)) {
            r.gt = p->value;
            r.abs_error = std::abs(r.estimate - p->value);
          }
    }
  }
  std::vector<ClipKey> eval_clips;
  if (!manifest.empty()) {
    for (const auto& e : parse_manifest_csv(read_file(manifest)))
      if (e.split == SplitLabel::Test) eval_clips.emplace_back(e.phenomenon, e.setting, e.trial);
    if (eval_clips.empty()) throw DomainError("manifest has no test clips");
  }
  EvalReport report = aggregate(rows, eval_clips);
  if (!diagnostics.empty()) {
    const auto d = parse_diagnostics_csv(read_file(diagnostics));
    add_grad_snapshots(report, d);
  }
  if (!extrapolation.empty()) {
    const auto x = parse_extrapolation_csv(read_file(extrapolation));
    add_extrapolation(report, x);
  }
  write_file_atomic(out_path, report_json_text(report));
  out << "aggregated " << rows.size() << " rows into " << report.rows.size() << " report rows; wrote "
      << out_path << "\n";
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& out_path, std::ostream& out) {
  print_config(out, "report",
               {{"report", report_path}, {"out", out_path.empty() ? ojson(nullptr) : ojson(out_path)}});
  const auto text = summary_text(parse_report_json(read_file(report_path)));
  if (!out_path.empty()) write_file_atomic(out_path, text);
  out << text;
  return 0;
}

const std::vector<std::string> kSingleBodyFamilies = {"second_order_linear", "first_order_decay",
                                                      "constant_accel", "nonlinear_pendulum",
                                                      "torricelli"};

int cmd_select(const std::string& data, const std::vector<std::string>& candidate_names,
               const std::string& out_path, const std::string& confusion_path, std::ostream& out,
               std::ostream& err) {
  print_config(out, "select",
               {{"data", data},
                {"candidates", candidate_names},
                {"out", out_path},
                {"confusion", confusion_path.empty() ? ojson(nullptr) : ojson(confusion_path)}});
  std::vector<OdeFamily> candidates;
  for (const auto& n : candidate_names) {
    const FamilyTag tag = family_tag_from_string(n);
    if (is_coupled(tag)) throw ParseError("selection candidates must be single-body families");
    candidates.push_back(OdeFamily::single(tag));
  }
  const auto clips = load_dataset(data);
  std::string csv = "phenomenon,setting,trial,true_family,predicted_family,ode_residual\n";
  std::vector<std::string> truth, predicted;
  int skipped = 0, failures = 0;
  for (const auto& sc : clips) {
    if (sc.clip.trajectory.body_count != 1) {
      ++skipped;
      continue;
    }
    const std::string true_name(to_string(sc.spec.family.tag));
    try {
      const auto sel = select_family(sc.clip.trajectory, candidates);
      const std::string pred(to_string(sel.chosen.tag));
      truth.push_back(true_name);
      predicted.push_back(pred);
      csv += sc.spec.phenomenon + ',' + sc.spec.setting + ',' + std::to_string(sc.clip.trial) + ',' +
             true_name + ',' + pred + ',' + format_double(sel.scores[sel.chosen_index]) + '\n';
    } catch (const Error& e) {
      ++failures;
      err << "clip " << sc.spec.phenomenon << "/" << sc.spec.setting << "/" << sc.clip.trial
          << " failed: " << e.what() << "\n";
    }
  }
  write_file_atomic(out_path, csv);

  std::vector<std::string> labels = candidate_names;
  for (const auto& t : truth)
    if (std::find(labels.begin(), labels.end(), t) == labels.end()) labels.push_back(t);
  const auto m = confusion(truth, predicted, labels);
  std::string table = "true\\predicted";
  for (const auto& l : m.labels) table += ',' + l;
  table += '\n';
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    table += m.labels[i];
    for (long c : m.counts[i]) table += ',' + std::to_string(c);
    table += '\n';
  }
  if (!confusion_path.empty()) write_file_atomic(confusion_path, table);
  out << table << "accuracy " << format_double(m.accuracy()) << " over " << m.total()
      << " clips (" << skipped << " multi-body clips skipped)\n";
  return failures ? 1 : 0;
}

int cmd_sweep(const std::vector<std::string>& presets_in, const std::vector<std::uint64_t>& seeds,
              const std::vector<std::string>& integrators, const std::vector<int>& horizons, int epochs,
              std::size_t max_samples, int trials, const std::string& out_path,
              const std::string& spread_path, std::ostream& out, std::ostream& err) {
  const auto presets = expand_presets(presets_in);
  print_config(out, "sweep",
               {{"presets", presets},
                {"seeds", seeds},
                {"integrators", integrators},
                {"horizons", horizons},
                {"epochs", epochs},
                {"max_samples", max_samples},
                {"trials", trials},
                {"out", out_path}});
  std::vector<RunConfig> runs;
  for (const auto& i : integrators)
    for (int k : horizons) {
      if (k < 1) throw ParseError("horizons must be positive");
      RunConfig r;
      r.integrator = integrator_from_string(i);
      r.loss = k == 1 ? LossKind::OneStep : LossKind::MultiStep;
      r.horizon = k;
      r.epochs = epochs;
      runs.push_back(r);
    }
  const auto& table = CalibrationTable::defaults();
  std::vector<SweepEstimate> estimates;
  std::string csv = "phenomenon,setting,clip,seed,integrator,horizon,param_name,estimate\n";
  int failures = 0;
  for (const auto& name : presets) {
    const ClipSpec spec = preset(name);
    for (auto seed : seeds) {
      ClipSet set = generate(spec, seed);
      for (auto& clip : set.clips) {
        if (trials > 0 && clip.trial >= trials) continue;
        if (max_samples > 0 && clip.trajectory.size() > max_samples)
          clip.trajectory = clip.trajectory.head(max_samples);
        for (const auto& run : runs) {
          try {
            const auto o = run_clip(spec, clip, seed, run, table);
            for (const auto& r : o.rows) {
              estimates.push_back({r.phenomenon, r.setting, r.param_name, r.integrator, r.horizon,
                                   seed, r.estimate});
              csv += r.phenomenon + ',' + r.setting + ',' + std::to_string(r.clip) + ',' +
                     std::to_string(seed) + ',' + r.integrator + ',' + std::to_string(r.horizon) +
                     ',' + r.param_name + ',' + format_double(r.estimate) + '\n';
            }
          } catch (const Error& e) {
            ++failures;
            err << "clip " << spec.phenomenon << "/" << spec.setting << "/" << clip.trial << " ("
                << config_label(run.key()) << ") failed: " << e.what() << "\n";
          }
        }
      }
    }
  }
  write_file_atomic(out_path, csv);
  std::string spread = "phenomenon,setting,param_name,mean,std,min,max,n\n";
  for (const auto& s : sweep_spread(estimates))
    spread += s.phenomenon + ',' + s.setting + ',' + s.param_name + ',' + format_double(s.mean) + ',' +
              format_double(s.std) + ',' + format_double(s.min) + ',' + format_double(s.max) + ',' +
              std::to_string(s.n) + '\n';
  if (!spread_path.empty()) write_file_atomic(spread_path, spread);
  out << spread;
  return failures ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physical parameter identification from trajectories", "physid"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  auto* sim = app.add_subcommand("simulate", "Generate preset clips, parameters.json and splits");
  std::vector<std::string> sim_presets;
  std::string sim_out;
  std::size_t max_samples = 600;
  sim->add_option("--preset", sim_presets, "Preset names, or all / iris / delfys75")->required();
  sim->add_option("--seed", seed, "Random seed (default 42 or $PHYSID_SEED)");
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--max-samples", max_samples, "Keep the first N frames of each clip; 0 keeps all");

  auto* fit = app.add_subcommand("fit", "Fit clips and write the results CSV");
  FitFlags ff;
  fit->add_option("--data", ff.data, "Directory written by simulate");
  fit->add_option("--traj", ff.traj_files, "Trajectory CSV files");
  fit->add_option("--family", ff.family, "ODE family for --traj");
  fit->add_option("--phenomenon", ff.phenomenon, "Phenomenon label for --traj");
  fit->add_option("--setting", ff.setting, "Setting label for --traj");
  fit->add_option("--config", ff.configs, "baseline, corrected or multistep (repeatable)")
      ->check(CLI::IsMember({"baseline", "corrected", "multistep"}));
  fit->add_option("--integrator", ff.integrator, "euler-buggy, euler, verlet or rk4")
      ->check(CLI::IsMember({"euler-buggy", "euler", "verlet", "rk4"}));
  fit->add_option("--loss", ff.loss, "one-step or multi-step")->check(CLI::IsMember({"one-step", "multi-step"}));
  fit->add_option("--horizon", ff.horizon, "Rollout horizon K")->check(CLI::PositiveNumber);
  fit->add_option("--weights", ff.weights, "Per-step loss weights");
  fit->add_option("--epochs", ff.epochs, "Adam epochs")->check(CLI::NonNegativeNumber);
  fit->add_option("--lr", ff.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  fit->add_option("--seed", seed, "Random seed (default 42 or $PHYSID_SEED)");
  fit->add_option("--out", ff.out, "Results CSV")->required();
  fit->add_option("--diagnostics", ff.diagnostics, "Diagnostics CSV (epoch, loss, grad_norm)");
  fit->add_option("--extrapolation", ff.extrapolation, "Extrapolation error CSV");
  fit->add_option("--calibration", ff.calibration, "Calibration table file");

  auto* ev = app.add_subcommand("eval", "Aggregate a results CSV into a report");
  std::string ev_results, ev_manifest, ev_gt, ev_diag, ev_extrap, ev_out;
  ev->add_option("--results", ev_results, "Results CSV")->required();
  ev->add_option("--manifest", ev_manifest, "Split manifest; MAE uses its test clips");
  ev->add_option("--gt", ev_gt, "parameters.json filling rows without ground truth");
  ev->add_option("--diagnostics", ev_diag, "Diagnostics CSV for gradient-norm snapshots");
  ev->add_option("--extrapolation", ev_extrap, "Extrapolation CSV");
  ev->add_option("--out", ev_out, "Report JSON")->required();

  auto* rep = app.add_subcommand("report", "Render a report JSON as plain-text tables");
  std::string rep_in, rep_out;
  rep->add_option("--report", rep_in, "Report JSON")->required();
  rep->add_option("--out", rep_out, "Summary text file");

  auto* sel = app.add_subcommand("select", "Pick the best-fitting ODE family per clip");
  std::string sel_data, sel_out, sel_conf;
  std::vector<std::string> sel_candidates = kSingleBodyFamilies;
  sel->add_option("--data", sel_data, "Directory written by simulate")->required();
  sel->add_option("--candidates", sel_candidates, "Candidate single-body families");
  sel->add_option("--out", sel_out, "Predictions CSV")->required();
  sel->add_option("--confusion", sel_conf, "Confusion matrix CSV");

  auto* sw = app.add_subcommand("sweep", "Estimate spread across integrators, horizons and seeds");
  std::vector<std::string> sw_presets;
  std::vector<std::uint64_t> sw_seeds;
  std::vector<std::string> sw_integrators = {"euler", "verlet", "rk4"};
  std::vector<int> sw_horizons = {1, 5};
  int sw_epochs = 500, sw_trials = 0;
  std::size_t sw_max = 600;
  std::string sw_out, sw_spread;
  sw->add_option("--preset", sw_presets, "Preset names, or all / iris / delfys75")->required();
  sw->add_option("--seeds", sw_seeds, "Seeds (default: the resolved seed)");
  sw->add_option("--integrators", sw_integrators, "Integrators")
      ->check(CLI::IsMember({"euler-buggy", "euler", "verlet", "rk4"}));
  sw->add_option("--horizons", sw_horizons, "Horizons; 1 uses the one-step loss");
  sw->add_option("--epochs", sw_epochs, "Adam epochs")->check(CLI::NonNegativeNumber);
  sw->add_option("--trials", sw_trials, "Use only the first N trials; 0 uses all");
  sw->add_option("--max-samples", sw_max, "Keep the first N frames of each clip; 0 keeps all");
  sw->add_option("--seed", seed, "Random seed (default 42 or $PHYSID_SEED)");
  sw->add_option("--out", sw_out, "Per-estimate CSV")->required();
  sw->add_option("--spread", sw_spread, "Spread CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_presets, seed, sim_out, max_samples, out);
    if (fit->parsed()) return cmd_fit(ff, seed, out, err);
    if (ev->parsed()) return cmd_eval(ev_results, ev_manifest, ev_gt, ev_diag, ev_extrap, ev_out, out);
    if (rep->parsed()) return cmd_report(rep_in, rep_out, out);
    if (sel->parsed()) return cmd_select(sel_data, sel_candidates, sel_out, sel_conf, out, err);
    if (sw->parsed()) {
      if (sw_seeds.empty()) sw_seeds = {seed};
      return cmd_sweep(sw_presets, sw_seeds, sw_integrators, sw_horizons, sw_epochs, sw_max, sw_trials,
                       sw_out, sw_spread, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace physid
