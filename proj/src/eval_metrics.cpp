#include "physid/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "physid/error.hpp"
#include "physid/gt_fit.hpp"

namespace physid {

MaeResult mae(std::span<const double> estimates, double gt) {
  if (estimates.empty()) throw DomainError("mae of an empty list");
  MaeResult r;
  r.n = static_cast<int>(estimates.size());
  double sum = 0.0;
  for (double e : estimates) sum += std::abs(e - gt);
  r.mae = sum / r.n;
  r.sigma = spread(estimates).std;
  return r;
}

std::vector<ExtrapolationPoint> extrapolation_error(const Trajectory& traj, const OdeFamily& family,
                                                    std::span<const double> params,
                                                    IntegratorKind kind, std::size_t t_train,
                                                    std::vector<int> ks) {
  family.validate();
  check_arity(family, params);
  if (traj.body_count != family.body_count) throw ArityError("trajectory body count mismatch");
  if (ks.empty()) throw DomainError("no extrapolation offsets");
  std::sort(ks.begin(), ks.end());
  if (ks.front() < 1) throw DomainError("extrapolation offsets must be positive");
  const auto k_max = static_cast<std::size_t>(ks.back());
  if (traj.size() <= t_train + k_max)
    throw DomainError("trajectory of " + std::to_string(traj.size()) + " samples is too short for t_train " +
                      std::to_string(t_train) + " + " + std::to_string(k_max));

  const auto nb = static_cast<std::size_t>(family.body_count);
  std::vector<ExtrapolationPoint> out;

  if (!has_rhs(family.tag)) {
    // Algebraic model: the prediction is the closed form itself.
    for (int k : ks) {
      const std::size_t t = t_train + static_cast<std::size_t>(k);
      const double r = closed_form(family, params, {}, traj.time(t)).positions[0];
      const double e = r - traj.positions[t];
      out.push_back({k, e * e});
    }
    return out;
  }

  if (kind == IntegratorKind::EulerUncorrected && is_first_order(family.tag))
    kind = IntegratorKind::EulerCorrected;
  const bool first_order = is_first_order(family.tag);
  Eigen::VectorXd x(static_cast<Eigen::Index>(family.state_size()));
  std::vector<double> vel;
  if (!first_order) vel = reconstruct_velocities(traj, velocity_scheme_for(kind));
  for (std::size_t b = 0; b < nb; ++b) {
    x[static_cast<Eigen::Index>(b)] = traj.positions[t_train * nb + b];
    if (!first_order) x[static_cast<Eigen::Index>(nb + b)] = vel[t_train * nb + b];
  }
  Stepper stepper(kind, family, params, traj.dt);
  std::size_t next = 0;
  bool diverged = false;
  for (std::size_t k = 1; k <= k_max && next < ks.size(); ++k) {
    if (!diverged) {
      stepper.advance(x);
      diverged = !within_divergence_bound(x);
    }
    while (next < ks.size() && static_cast<std::size_t>(ks[next]) == k) {
      double e2 = 0.0;
      if (diverged) {
        e2 = kDivergenceBound;
      } else {
        for (std::size_t b = 0; b < nb; ++b) {
          const double e = x[static_cast<Eigen::Index>(b)] - traj.positions[(t_train + k) * nb + b];
          e2 += e * e;
        }
      }
      out.push_back({ks[next], e2});
      ++next;
    }
  }
  return out;
}

SelectionResult select_family(const Trajectory& traj, std::span<const OdeFamily> candidates,
                              const SelectionOptions& options) {
  if (candidates.empty()) throw DomainError("no candidate families");
  SelectionResult result;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& family : candidates) {
    double score = inf;
    if (family.body_count == traj.body_count) {
      try {
        ParamVector fitted;
        try {
          fitted = direct_ls_fit(family, traj, options.direct);
        } catch (const UnsupportedError&) {
          FitConfig cfg;
          cfg.epochs = options.fallback_epochs;
          cfg.integrator = IntegratorKind::EulerCorrected;
          fitted = fit_clip(family, traj, cfg).final_params;
        }
        score = ode_residual(traj, family, fitted.values, options.scoring);
        if (!std::isfinite(score)) score = inf;
      } catch (const IllPosedError&) {
      } catch (const DomainError&) {
      }
    }
    result.scores.push_back(score);
  }

  double msq = 0.0;
  for (double z : traj.positions) msq += z * z;
  msq /= static_cast<double>(std::max<std::size_t>(traj.positions.size(), 1));
  // Fewer parameters first, then the smaller state (first-order families).
  auto simpler = [&](std::size_t i, std::size_t j) {
    const auto& a = candidates[i];
    const auto& b = candidates[j];
    if (a.arity() != b.arity()) return a.arity() < b.arity();
    return a.state_size() < b.state_size();
  };
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = result.scores[i];
    if (!std::isfinite(s)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double b = result.scores[*best];
    const double tol = 1e-9 * std::max({std::abs(b), std::abs(s), msq});
    if (s < b - tol) {
      best = i;
    } else if (std::abs(s - b) <= tol && simpler(i, *best)) {
      best = i;
    }
  }
  if (!best && candidates.size() == 1) best = 0;
  if (!best) throw IllPosedError("every candidate family is ill-posed on this trajectory");
  result.chosen_index = *best;
  result.chosen = candidates[*best];
  return result;
}

long ConfusionMatrix::total() const {
  long t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

long ConfusionMatrix::correct() const {
  long c = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) c += counts[i][i];
  return c;
}

double ConfusionMatrix::accuracy() const {
  const long t = total();
  return t > 0 ? static_cast<double>(correct()) / static_cast<double>(t) : 0.0;
}

std::vector<double> ConfusionMatrix::per_class_accuracy() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const long row = std::accumulate(counts[i].begin(), counts[i].end(), 0L);
    out.push_back(row > 0 ? static_cast<double>(counts[i][i]) / static_cast<double>(row)
                          : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

ConfusionMatrix confusion(std::span<const std::string> gt_labels,
                          std::span<const std::string> predicted, std::vector<std::string> labels) {
  if (gt_labels.size() != predicted.size())
    throw DomainError("label lists differ in length (" + std::to_string(gt_labels.size()) + " vs " +
                      std::to_string(predicted.size()) + ")");
  const bool fixed = !labels.empty();
  auto index_of = [&](const std::string& l) -> std::size_t {
    const auto it = std::find(labels.begin(), labels.end(), l);
    if (it != labels.end()) return static_cast<std::size_t>(it - labels.begin());
    if (fixed) throw DomainError("unknown label '" + l + "'");
    labels.push_back(l);
    return labels.size() - 1;
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < gt_labels.size(); ++i) {
    const std::size_t g = index_of(gt_labels[i]);
    const std::size_t p = index_of(predicted[i]);
    pairs.emplace_back(g, p);
  }
  ConfusionMatrix m;
  m.labels = labels;
  m.counts.assign(labels.size(), std::vector<long>(labels.size(), 0));
  for (const auto& [g, p] : pairs) ++m.counts[g][p];
  return m;
}

EvalReport aggregate(std::span<const ResultsRow> rows, const std::vector<ClipKey>& eval_clips) {
  const std::set<ClipKey> selected(eval_clips.begin(), eval_clips.end());
  struct Acc {
    std::vector<double> gt, eval_err, eval, all;
    int diverged = 0;
  };
  std::map<std::pair<SettingKey, std::string>, Acc> groups;
  std::map<SettingKey, std::map<int, double>> residuals;

  for (const auto& r : rows) {
    const SettingKey key{r.phenomenon, r.setting, {r.integrator, r.loss_kind, r.horizon}};
    residuals[key][r.clip] = r.ode_residual;
    if (!r.gt) continue;
    auto& acc = groups[{key, r.param_name}];
    acc.gt.push_back(*r.gt);
    acc.all.push_back(r.estimate);
    if (r.diverged) ++acc.diverged;
    if (selected.empty() || selected.count(ClipKey{r.phenomenon, r.setting, r.clip})) {
      acc.eval.push_back(r.estimate);
      acc.eval_err.push_back(r.abs_error ? *r.abs_error : std::abs(r.estimate - *r.gt));
    }
  }

  EvalReport report;
  for (const auto& [k, acc] : groups) {
    ReportRow row;
    row.key = k.first;
    row.param_name = k.second;
    row.gt = spread(acc.gt).mean;
    if (!acc.eval.empty()) {
      row.mae = spread(acc.eval_err).mean;
      row.sigma = spread(acc.eval).std;
      row.n_clips = static_cast<int>(acc.eval.size());
    }
    const auto s = spread(acc.all);
    row.trial_mean = s.mean;
    row.trial_std = s.std;
    row.trial_n = s.n;
    row.diverged = acc.diverged;
    report.rows.push_back(row);
  }
  for (const auto& [key, by_clip] : residuals) {
    double sum = 0.0;
    for (const auto& [clip, v] : by_clip) sum += v;
    report.residual_by_setting[key] = sum / static_cast<double>(by_clip.size());
  }
  return report;
}

void add_grad_snapshots(EvalReport& report, std::span<const DiagnosticsRow> diagnostics,
                        std::vector<int> epochs) {
  std::map<SettingKey, std::map<int, std::vector<double>>> acc;
  for (const auto& d : diagnostics)
    if (std::find(epochs.begin(), epochs.end(), d.epoch) != epochs.end())
      acc[{d.phenomenon, d.setting, d.config}][d.epoch].push_back(d.grad_norm);
  for (const auto& [key, per_epoch] : acc) {
    auto& out = report.grad_norm_snapshots[key];
    out.clear();
    for (int e : epochs) {
      const auto it = per_epoch.find(e);
      if (it == per_epoch.end()) continue;
      out.push_back({e, spread(it->second).mean});
    }
  }
}

void add_extrapolation(EvalReport& report, std::span<const ExtrapolationRow> rows) {
  std::map<SettingKey, std::map<int, std::vector<double>>> acc;
  for (const auto& r : rows) acc[r.key][r.k].push_back(r.error);
  for (const auto& [key, per_k] : acc) {
    auto& out = report.extrapolation[key];
    out.clear();
    for (const auto& [k, errors] : per_k) {
      const auto s = spread(errors);
      out.push_back({k, s.mean, s.std, s.n});
    }
  }
}

std::vector<SweepSpread> sweep_spread(std::span<const SweepEstimate> estimates) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> groups;
  for (const auto& e : estimates) groups[{e.phenomenon, e.setting, e.param_name}].push_back(e.estimate);
  std::vector<SweepSpread> out;
  for (const auto& [key, values] : groups) {
    const auto s = spread(values);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), s.mean, s.std, *lo, *hi, s.n});
  }
  return out;
}

}  // namespace physid
