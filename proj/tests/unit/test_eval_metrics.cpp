#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "physid/error.hpp"
#include "physid/estimator.hpp"
#include "physid/eval_metrics.hpp"

using namespace physid;

namespace {

const OdeFamily kSol = OdeFamily::single(FamilyTag::SecondOrderLinear);

Trajectory stepped(IntegratorKind kind, const OdeFamily& fam, std::vector<double> p,
                   StateVector x0, double dt, std::size_t steps) {
  const auto r = rollout(kind, fam, p, x0, dt, steps);
  Trajectory t;
  t.dt = dt;
  t.body_count = fam.body_count;
  for (const auto& s : r.states)
    for (double z : s.positions) t.positions.push_back(z);
  return t;
}

// Rows are ground truth, columns predicted, in the order
// dropped_ball, free_fall, led, pendulum, sliding_block, torricelli.
const std::vector<std::string> kLabels{"dropped_ball", "free_fall",     "led",
                                       "pendulum",     "sliding_block", "torricelli"};
const long kVlm[6][6] = {{10, 5, 0, 0, 0, 0},  {0, 0, 0, 10, 5, 0}, {0, 0, 15, 0, 0, 0},
                         {2, 2, 0, 11, 0, 0},  {0, 0, 0, 0, 15, 0}, {0, 0, 0, 0, 0, 15}};

ResultsRow row(std::string setting, int clip, double gt, double est, std::string integrator = "euler") {
  ResultsRow r;
  r.phenomenon = "p";
  r.setting = std::move(setting);
  r.clip = clip;
  r.family = "second_order_linear";
  r.integrator = std::move(integrator);
  r.loss_kind = "one-step";
  r.param_name = "alpha";
  r.gt = gt;
  r.estimate = est;
  r.abs_error = std::abs(est - gt);
  r.ode_residual = 0.1 * clip;
  return r;
}

}  // namespace

TEST_CASE("mae examples") {
  CHECK(mae(std::vector<double>{9.81}, 9.81).mae == 0.0);
  const auto one = mae(std::vector<double>{8.77}, 9.81);
  CHECK(one.mae == doctest::Approx(1.04).epsilon(1e-12));
  CHECK(one.sigma == 0.0);
  const auto three = mae(std::vector<double>{1, 2, 3}, 2);
  CHECK(three.mae == doctest::Approx(2.0 / 3.0));
  CHECK(three.sigma == doctest::Approx(1.0));
  CHECK(three.n == 3);
  CHECK_THROWS_AS(mae(std::vector<double>{}, 1.0), DomainError);
}

TEST_CASE("ode residual") {
  const auto tr = stepped(IntegratorKind::EulerCorrected, kSol, {3.0, 0.1}, {{1.0}, {0.0}}, 0.02, 300);
  CHECK(ode_residual(tr, kSol, std::vector<double>{3.0, 0.1}, IntegratorKind::EulerCorrected) <= 1e-20);
  CHECK(ode_residual(tr, kSol, std::vector<double>{3.3, 0.1}, IntegratorKind::EulerCorrected) > 1e-10);

  Trajectory flat;
  flat.dt = 0.1;
  flat.positions.assign(30, 0.4);
  CHECK(ode_residual(flat, kSol, std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("residual of fitted single-body and coupled clips") {
  const auto pend = OdeFamily::single(FamilyTag::NonlinearPendulum);
  const auto single = test::clean_traj(pend, {19.62, 0.02}, {{0.8}, {0.0}}, 1.0 / 60.0, 10.0);
  FitConfig cfg;
  cfg.init_from_period = true;
  const double r1 = fit_clip(pend, single, cfg).ode_residual;
  CHECK(r1 <= 1e-3);

  const auto two = OdeFamily::coupled(FamilyTag::CoupledPendulum, 2);
  const auto coupled = test::clean_traj(two, {19.62, 19.62, 0.02, 0.02, 50.0},
                                        {{0.8, -0.8}, {0.0, 0.0}}, 1.0 / 60.0, 10.0);
  const double r2 = fit_clip(two, coupled, cfg).ode_residual;
  CHECK(r2 >= 5 * r1);
}

TEST_CASE("extrapolation at exact parameters") {
  const auto tr = stepped(IntegratorKind::EulerCorrected, kSol, {3.0, 0.1}, {{1.0}, {0.0}}, 0.02, 300);
  const auto e = extrapolation_error(tr, kSol, std::vector<double>{3.0, 0.1}, IntegratorKind::EulerCorrected);
  REQUIRE(e.size() == 3);
  for (const auto& p : e) CHECK(p.error < 1e-24);
  CHECK(e[0].k == 10);
  CHECK(e[2].k == 50);

  const auto off = extrapolation_error(tr, kSol, std::vector<double>{3.3, 0.1}, IntegratorKind::EulerCorrected);
  CHECK(off[0].error < off[1].error);
  CHECK(off[1].error < off[2].error);
  CHECK_THROWS_AS(extrapolation_error(tr.head(120), kSol, std::vector<double>{3.0, 0.1},
                                      IntegratorKind::EulerCorrected),
                  DomainError);
}

TEST_CASE("large swings extrapolate worse") {
  auto e50 = [](const char* name) {
    auto spec = preset(name);
    spec.noise_std = 0.001;
    double mean = 0.0;
    for (int trial = 0; trial < spec.trial_count; ++trial) {
      const auto tr = generate_trial(spec, 42, trial).trajectory.head(600);
      FitConfig cfg;
      cfg.init_from_period = true;
      const auto fit = fit_clip(spec.family, tr, cfg);
      mean += extrapolation_error(tr, spec.family, fit.final_params.values,
                                  IntegratorKind::EulerCorrected)
                  .back()
                  .error /
              spec.trial_count;
    }
    return mean;
  };
  CHECK(e50("pend_90") / e50("pend_20") > 3.0);
}

TEST_CASE("family selection") {
  const auto decay = OdeFamily::single(FamilyTag::FirstOrderDecay);
  const auto accel = OdeFamily::single(FamilyTag::ConstantAccel);
  const std::vector<OdeFamily> three{decay, kSol, accel};

  const auto exp_tr = test::clean_traj(decay, {2.3}, {{1.0}, {}}, 1.0 / 60.0, 2.0);
  auto r = select_family(exp_tr, three);
  CHECK(r.chosen == decay);
  CHECK(r.scores.size() == 3);

  const std::vector<OdeFamily> only{kSol};
  CHECK(select_family(exp_tr, only).chosen == kSol);

  const auto para = test::clean_traj(accel, {-9.81}, {{1.0}, {0.0}}, 1.0 / 60.0, 0.4);
  const std::vector<OdeFamily> pair{decay, accel};
  r = select_family(para, pair);
  CHECK(r.chosen == accel);
  CHECK(r.scores[1] < r.scores[0]);
}

TEST_CASE("confusion matrix") {
  std::vector<std::string> gt, pred;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (long n = 0; n < kVlm[i][j]; ++n) {
        gt.push_back(kLabels[i]);
        pred.push_back(kLabels[j]);
      }
  const auto m = confusion(gt, pred, kLabels);
  CHECK(m.total() == 90);
  CHECK(m.correct() == 66);
  CHECK(m.accuracy() == doctest::Approx(0.733).epsilon(1e-3));
  for (std::size_t i = 0; i < 6; ++i) {
    long sum = 0;
    for (long c : m.counts[i]) sum += c;
    CHECK(sum == 15);
  }
  CHECK(m.per_class_accuracy()[1] == 0.0);

  const auto perfect = confusion(gt, gt, kLabels);
  CHECK(perfect.accuracy() == 1.0);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK((perfect.counts[i][j] == 0) == (i != j));

  const std::vector<std::string> collapsed(gt.size(), "pendulum");
  CHECK(confusion(gt, collapsed, kLabels).accuracy() == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(confusion(gt, std::vector<std::string>{"x"}), DomainError);
}

TEST_CASE("aggregate matches brute-force recomputation") {
  std::vector<ResultsRow> rows;
  const double ests[] = {1.1, 0.8, 1.3, 0.95, 1.02, 0.7};
  for (int c = 0; c < 6; ++c) rows.push_back(row("a", c, 1.0, ests[c]));
  rows.push_back(row("b", 0, 2.0, 2.5));
  rows.push_back(row("a", 0, 1.0, 3.0, "rk4"));

  const std::vector<ClipKey> eval{{"p", "a", 4}, {"p", "a", 5}, {"p", "b", 0}};
  const auto rep = aggregate(rows, eval);
  REQUIRE(rep.rows.size() == 3);
  const ReportRow* a = nullptr;
  for (const auto& r : rep.rows)
    if (r.key.setting == "a" && r.key.config.integrator == "euler") a = &r;
  REQUIRE(a != nullptr);
  CHECK(a->n_clips == 2);
  CHECK(a->mae == doctest::Approx((0.02 + 0.3) / 2));
  CHECK(a->sigma == doctest::Approx(std::abs(1.02 - 0.7) / std::sqrt(2.0)));
  CHECK(a->trial_n == 6);
  double mean = 0.0;
  for (double e : ests) mean += e / 6;
  CHECK(a->trial_mean == doctest::Approx(mean));
  CHECK(a->gt == 1.0);
  CHECK(a->mae >= 0.0);

  const SettingKey key{"p", "a", {"euler", "one-step", 1}};
  CHECK(rep.residual_by_setting.at(key) == doctest::Approx(0.25));
  CHECK(aggregate(rows, eval).rows == rep.rows);
}

TEST_CASE("grad snapshots and extrapolation summaries") {
  EvalReport rep;
  std::vector<DiagnosticsRow> diag;
  for (int clip = 0; clip < 2; ++clip)
    for (int epoch : {1, 50, 200, 500})
      diag.push_back({"p", "a", clip, {"euler", "one-step", 1}, epoch, 1.0, epoch * (clip + 1.0)});
  add_grad_snapshots(rep, diag);
  const SettingKey key{"p", "a", {"euler", "one-step", 1}};
  const auto& g = rep.grad_norm_snapshots.at(key);
  REQUIRE(g.size() == 3);
  CHECK(g[1].epoch == 50);
  CHECK(g[1].mean == 75.0);

  std::vector<ExtrapolationRow> ex{{key, 0, 10, 1.0}, {key, 1, 10, 3.0}, {key, 0, 25, 4.0}};
  add_extrapolation(rep, ex);
  const auto& e = rep.extrapolation.at(key);
  REQUIRE(e.size() == 2);
  CHECK(e[0].k == 10);
  CHECK(e[0].mean == 2.0);
  CHECK(e[0].std == doctest::Approx(std::sqrt(2.0)));
  CHECK(e[1].n == 1);
}

TEST_CASE("sweep spread") {
  std::vector<SweepEstimate> est{{"p", "a", "alpha", "euler", 1, 42, 1.0},
                                 {"p", "a", "alpha", "rk4", 1, 42, 3.0},
                                 {"p", "a", "alpha", "euler", 5, 43, 2.0}};
  const auto s = sweep_spread(est);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean == 2.0);
  CHECK(s[0].std == doctest::Approx(1.0));
  CHECK(s[0].min == 1.0);
  CHECK(s[0].max == 3.0);
  CHECK(s[0].n == 3);
}
