#include "physid/pipeline.hpp"

#include <cmath>
#include <numbers>

#include "physid/error.hpp"

namespace physid {

ConfigKey RunConfig::key() const {
  return {std::string(to_cli_string(integrator)), std::string(to_cli_string(loss)), horizon};
}

RunConfig named_config(std::string_view name) {
  RunConfig r;
  if (name == "baseline") {
    r.integrator = IntegratorKind::EulerUncorrected;
  } else if (name == "corrected") {
    r.integrator = IntegratorKind::EulerCorrected;
  } else if (name == "multistep") {
    r.integrator = IntegratorKind::EulerCorrected;
    r.loss = LossKind::MultiStep;
    r.horizon = 5;
  } else {
    throw ParseError("unknown config '" + std::string(name) + "' (baseline, corrected, multistep)");
  }
  return r;
}

std::vector<std::string> named_config_names() { return {"baseline", "corrected", "multistep"}; }

FitConfig fit_config_for(const ClipSpec& spec, const RunConfig& run, std::uint64_t seed) {
  FitConfig cfg;
  cfg.loss = run.loss;
  cfg.horizon = run.horizon;
  cfg.weights = run.weights;
  cfg.integrator = run.integrator;
  cfg.epochs = run.epochs;
  cfg.lr_params = run.lr_params;
  cfg.seed = seed;
  cfg.init_params = spec.init_params;
  cfg.init_from_period = spec.init_from_period;
  cfg.frozen = spec.frozen;
  return cfg;
}

CalibrationAux calibration_aux(const ClipSpec& spec, const Trajectory& traj) {
  CalibrationAux aux;
  aux.theta0 = spec.theta0;
  aux.incline_deg = spec.incline_deg;
  for (const auto& p : spec.ground_truth)
    if (p.measurement_type == MeasurementType::Direct) aux.metadata[p.name] = p.value;
  if (spec.estimation_family().tag == FamilyTag::NonlinearPendulum) {
    try {
      aux.period = extract_period(traj);
    } catch (const Error&) {
    }
  }
  return aux;
}

std::vector<int> diagnostic_epochs(int epochs) {
  std::vector<int> out;
  for (int e : {1, 50, 200})
    if (e <= epochs) out.push_back(e);
  if (epochs > 0 && (out.empty() || out.back() != epochs)) out.push_back(epochs);
  return out;
}

ClipOutcome run_clip(const ClipSpec& spec, const Clip& clip, std::uint64_t seed,
                     const RunConfig& run, const CalibrationTable& table) {
  const OdeFamily& family = spec.estimation_family();
  const ClipId id{spec.phenomenon, spec.setting, clip.trial, seed};
  ClipOutcome out;
  out.fit = fit_clip(family, clip.trajectory, fit_config_for(spec, run, seed), id);
  const auto& est = out.fit.final_params.values;
  const ConfigKey key = run.key();

  ResultsRow base;
  base.phenomenon = spec.phenomenon;
  base.setting = spec.setting;
  base.clip = clip.trial;
  base.seed = seed;
  base.family = std::string(to_string(family.tag));
  base.integrator = key.integrator;
  base.loss_kind = key.loss_kind;
  base.horizon = key.horizon;
  base.ode_residual = out.fit.ode_residual;
  base.diverged = out.fit.diverged;

  const auto names = family.param_names();
  const bool same_family =
      clip.params.family == family && clip.params.values.size() == names.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    ResultsRow r = base;
    r.param_name = "ode:" + names[i];
    r.estimate = est[i];
    if (same_family) {
      r.gt = clip.params.values[i];
      r.abs_error = std::abs(r.estimate - *r.gt);
    }
    out.rows.push_back(std::move(r));
  }

  if (table.contains(spec.phenomenon)) {
    const auto& rule = table.rule(spec.phenomenon);
    if (rule.family == family.tag) {
      std::vector<SiValue> si;
      try {
        si = latent_to_si(rule, out.fit.final_params, calibration_aux(spec, clip.trajectory));
      } catch (const CalibrationError&) {
        // non-physical fit: raw rows only
      }
      for (const auto& v : si) {
        ResultsRow r = base;
        r.param_name = v.name;
        r.estimate = v.value;
        for (const auto& g : spec.ground_truth)
          if (g.name == v.name) {
            r.gt = g.value;
            r.abs_error = std::abs(r.estimate - g.value);
          }
        out.rows.push_back(std::move(r));
      }
    }
  }

  for (int e : diagnostic_epochs(static_cast<int>(out.fit.loss_curve.size()))) {
    const auto i = static_cast<std::size_t>(e - 1);
    out.diagnostics.push_back({spec.phenomenon, spec.setting, clip.trial, key, e,
                               out.fit.loss_curve[i], out.fit.grad_norm_curve[i]});
  }

  constexpr std::size_t t_train = 100;
  const std::vector<int> ks = {10, 25, 50};
  if (has_rhs(family.tag) && clip.trajectory.size() > t_train + 50 && !out.fit.diverged) {
    for (const auto& p :
         extrapolation_error(clip.trajectory, family, est, run.integrator, t_train, ks))
      out.extrapolation.push_back({{spec.phenomenon, spec.setting, key}, clip.trial, p.k, p.error});
  }
  return out;
}

void append(PipelineOutput& out, ClipOutcome&& outcome) {
  for (auto& r : outcome.rows) out.rows.push_back(std::move(r));
  for (auto& d : outcome.diagnostics) out.diagnostics.push_back(std::move(d));
  for (auto& e : outcome.extrapolation) out.extrapolation.push_back(std::move(e));
}

PipelineOutput run_presets(const std::vector<std::string>& presets, std::uint64_t seed,
                           const std::vector<RunConfig>& runs, const CalibrationTable& table,
                           std::size_t max_samples) {
  PipelineOutput out;
  std::vector<ManifestSetting> settings;
  for (const auto& name : presets) {
    const ClipSpec spec = preset(name);
    ClipSet set = generate(spec, seed);
    if (max_samples > 0)
      for (auto& clip : set.clips)
        if (clip.trajectory.size() > max_samples) clip.trajectory = clip.trajectory.head(max_samples);
    for (const auto& run : runs)
      for (const auto& clip : set.clips) append(out, run_clip(spec, clip, seed, run, table));
    settings.push_back({spec.phenomenon, spec.setting, spec.trial_count, spec.split_ratio});
    out.ground_truth.push_back(spec.ground_truth_record());
  }
  out.manifest = split_manifest(settings, seed);
  sort_results(out.rows);
  return out;
}

}  // namespace physid
