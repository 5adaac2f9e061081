#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "physid/calibration.hpp"
#include "physid/error.hpp"
#include "physid/estimator.hpp"

using namespace physid;

namespace {

const CalibrationTable& table() { return CalibrationTable::defaults(); }

double si(const std::vector<SiValue>& v, const std::string& name) {
  for (const auto& s : v)
    if (s.name == name) return s.value;
  FAIL("missing SI value " << name);
  return 0.0;
}

bool has(const std::vector<SiValue>& v, const std::string& name) {
  for (const auto& s : v)
    if (s.name == name) return true;
  return false;
}

const OdeFamily kPend = OdeFamily::single(FamilyTag::NonlinearPendulum);

}  // namespace

TEST_CASE("pendulum length from g/L") {
  const auto out =
      latent_to_si(table().rule("pendulum"), ParamVector::make(kPend, {19.62, 0.02}));
  CHECK(si(out, "L") == doctest::Approx(0.50).epsilon(1e-15));
  CHECK(si(out, "zeta") == 0.02);
  CHECK_FALSE(has(out, "L_period"));
  CHECK_THROWS_AS(latent_to_si(table().rule("pendulum"), ParamVector::make(kPend, {0.0, 0.02})),
                  CalibrationError);
  CHECK_THROWS_AS(latent_to_si(table().rule("pendulum"), ParamVector::make(kPend, {-3.0, 0.02})),
                  CalibrationError);
}

TEST_CASE("led rate is the identity") {
  const auto out = latent_to_si(table().rule("led"),
                                ParamVector::make(OdeFamily::single(FamilyTag::FirstOrderDecay), {2.30}));
  CHECK(si(out, "gamma") == 2.30);
}

TEST_CASE("length from the observed period") {
  CalibrationAux aux;
  aux.period = 1.4185;
  const auto out =
      latent_to_si(table().rule("pendulum"), ParamVector::make(kPend, {19.62, 0.02}), aux);
  CHECK(si(out, "L_period") == doctest::Approx(9.81 * std::pow(1.4185 / (2 * std::numbers::pi), 2)));
  CHECK(si(out, "L_period") == doctest::Approx(0.50).epsilon(1e-3));
  CHECK_FALSE(has(out, "L_corrected"));
  aux.theta0 = std::numbers::pi / 4;
  CHECK(si(latent_to_si(table().rule("pendulum"), ParamVector::make(kPend, {19.62, 0.02}), aux),
           "L_corrected") < 0.50);
}

TEST_CASE("metadata and friction mappings") {
  const auto accel = OdeFamily::single(FamilyTag::ConstantAccel);
  CalibrationAux aux;
  aux.incline_deg = 45.0;
  aux.metadata["alpha_deg"] = 45.0;
  const double a = 9.81 * (std::sin(std::numbers::pi / 4) - 0.2 * std::cos(std::numbers::pi / 4));
  const auto out = latent_to_si(table().rule("sliding_cone"), ParamVector::make(accel, {a}), aux);
  CHECK(si(out, "mu") == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(si(out, "alpha_deg") == 45.0);
  CHECK_FALSE(has(out, "hypotenuse"));

  const auto drop = latent_to_si(table().rule("dropping_ball"), ParamVector::make(accel, {-9.81}));
  CHECK(si(drop, "g") == 9.81);
}

TEST_CASE("invertible rules round trip") {
  for (double L = 0.1; L < 3.0; L += 0.173) {
    const double x = 9.81 / L;
    const auto out = latent_to_si(table().rule("pendulum"), ParamVector::make(kPend, {x, 0.0}));
    CHECK(std::abs(9.81 / si(out, "L") - x) <= 1e-12 * x);
  }
  const auto accel = OdeFamily::single(FamilyTag::ConstantAccel);
  for (double alpha : {10.0, 30.0, 45.0, 60.0, 80.0})
    for (double a : {-2.0, 0.0, 1.5, 4.0}) {
      CalibrationAux aux;
      aux.incline_deg = alpha;
      const double r = alpha * std::numbers::pi / 180.0;
      const double mu = si(latent_to_si(table().rule("sliding_block"), ParamVector::make(accel, {a}), aux), "mu");
      CHECK(std::abs(9.81 * (std::sin(r) - mu * std::cos(r)) - a) < 1e-12);
    }
}

TEST_CASE("every preset parameter has exactly one rule") {
  for (const auto& name : all_preset_names()) {
    const auto spec = preset(name);
    CAPTURE(name);
    REQUIRE(table().contains(spec.phenomenon));
    const auto& rule = table().rule(spec.phenomenon);
    CHECK(rule.family == spec.estimation_family().tag);
    for (const auto& p : spec.ground_truth) {
      int n = 0;
      for (const auto& m : rule.mapping) n += m.name == p.name;
      CAPTURE(p.name);
      CHECK(n == 1);
    }
  }
}

TEST_CASE("table parsing") {
  const auto t = CalibrationTable::parse(
      "# comment\n"
      "led first_order_decay gamma 1/s identity lambda\n"
      "\n"
      "pendulum nonlinear_pendulum L m inverse g_over_L 9.81  # trailing\n");
  CHECK(t.rules().size() == 2);
  CHECK(t.rule("pendulum").mapping[0].constant == 9.81);
  CHECK_THROWS_AS(CalibrationTable::parse("led first_order_decay gamma 1/s\n"), ParseError);
  CHECK_THROWS_AS(CalibrationTable::parse("led first_order_decay gamma 1/s cube lambda\n"), ParseError);
  CHECK_THROWS_AS(CalibrationTable::parse("led quartic gamma 1/s identity lambda\n"), ParseError);
  CHECK_THROWS_AS(t.rule("nope"), CalibrationError);
  CHECK(CalibrationTable::parse(default_calibration_text()).rules() == table().rules());
}

TEST_CASE("timestep sensitivity") {
  const auto sol = OdeFamily::single(FamilyTag::SecondOrderLinear);
  const auto p = ParamVector::make(sol, {4.0, 0.2});
  CHECK(timestep_sensitivity(p, 0.1, 0.1) == p);
  const auto twice = timestep_sensitivity(p, 0.2, 0.1);
  CHECK(twice.values[0] == doctest::Approx(16.0));
  CHECK(twice.values[1] == doctest::Approx(0.4));
}

TEST_CASE("mislabeled frame rate is undone by rescaling") {
  const auto sol = OdeFamily::single(FamilyTag::SecondOrderLinear);
  auto tr = test::clean_traj(sol, {1.5, 0.1}, {{1.0}, {0.0}}, 1.0 / 60.0, 10.0);
  FitConfig cfg;
  const auto right = fit_clip(sol, tr, cfg).final_params;
  tr.dt = 1.0 / 30.0;
  const auto wrong = fit_clip(sol, tr, cfg).final_params;
  const auto fixed = timestep_sensitivity(wrong, 1.0 / 30.0, 1.0 / 60.0);
  CHECK(test::rel_err(fixed.values[0], right.values[0]) < 0.02);
}

TEST_CASE("pendulum length end to end") {
  const auto tr = test::clean_traj(kPend, {9.81 / 0.5, 0.0}, {{std::numbers::pi / 4}, {0.0}},
                                   1.0 / 60.0, 10.0);
  FitConfig cfg;
  cfg.init_from_period = true;
  const auto fit = fit_clip(kPend, tr, cfg);
  const auto out = latent_to_si(table().rule("pendulum"), fit.final_params);
  CHECK(si(out, "L") == doctest::Approx(0.5).epsilon(0.05));
}
