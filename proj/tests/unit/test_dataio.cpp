#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "physid/dataio.hpp"
#include "physid/error.hpp"
#include "tmpdir.hpp"

using namespace physid;

namespace {

const char* kParams = R"([
  {
    "phenomenon": "pendulum",
    "setting": "pend_45",
    "camera": "side",
    "params": [
      {"name": "L", "value": 0.5, "std": 0.0, "units": "m", "measurement_type": "direct"},
      {"name": "zeta", "value": 0.02, "std": 0.001, "min": 0.0, "max": 0.1, "units": "1/s",
       "measurement_type": "fitted", "note": "envelope"}
    ]
  }
])";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333");
  CHECK(format_double(9.81) == "9.81");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23})
    CHECK(parse_double(format_roundtrip(v)) == v);
  CHECK_THROWS_AS(parse_double("1.5x"), ParseError);
}

TEST_CASE("parameters.json") {
  const auto recs = parse_parameters_json(kParams);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].params.size() == 2);
  CHECK(recs[0].find("zeta")->measurement_type == MeasurementType::Fitted);
  CHECK(recs[0].find("zeta")->max == 0.1);
  CHECK(recs[0].extra.at("camera") == "side");
  CHECK(recs[0].find("zeta")->extra.at("note") == "envelope");

  const auto again = parse_parameters_json(parameters_json_text(recs));
  CHECK(again == recs);

  test::TempDir dir;
  save_parameters_json(dir / "p.json", recs);
  CHECK(load_parameters_json(dir / "p.json") == recs);
}

TEST_CASE("parameters.json errors") {
  std::string text = kParams;
  text.replace(text.find(R"(, "measurement_type": "direct")"), 30, "");
  try {
    parse_parameters_json(text);
    FAIL("expected rejection");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("measurement_type") != std::string::npos);
  }
  try {
    parse_parameters_json("[\n  {\"phenomenon\": }\n]");
    FAIL("expected rejection");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::string neg = kParams;
  neg.replace(neg.find("\"std\": 0.001"), 12, "\"std\": -1.0");
  CHECK_THROWS(parse_parameters_json(neg));
  std::string out_of_range = kParams;
  out_of_range.replace(out_of_range.find("\"value\": 0.02"), 13, "\"value\": 0.5");
  CHECK_THROWS(parse_parameters_json(out_of_range));
}

TEST_CASE("trajectory csv") {
  const auto two = parse_trajectory_csv(
      "# units: rad\n"
      "t,body,pos\n"
      "0,0,0.1\n0,1,-0.1\n0.5,0,0.2\n0.5,1,-0.2\n1,0,0.3\n1,1,-0.3\n");
  CHECK(two.body_count == 2);
  CHECK(two.size() == 3);
  CHECK(two.dt == 0.5);
  CHECK(two.units == "rad");
  CHECK(two.at(2, 1) == -0.3);

  CHECK_THROWS_AS(parse_trajectory_csv("t,body,pos\n0,0,1\n0.5,0,1\n1.2,0,1\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory_csv("t,body,pos\n0,0,1\n0,2,1\n"), ParseError);
  CHECK_THROWS_AS(parse_trajectory_csv("time,pos\n0,1\n"), ParseError);

  const auto spec = preset("two_pend_45");
  const auto tr = generate_trial(spec, 42, 3).trajectory.head(200);
  test::TempDir dir;
  save_trajectory_csv(dir / "sub/trial_3.csv", tr);
  const auto back = load_trajectory_csv(dir / "sub/trial_3.csv");
  CHECK(back.positions == tr.positions);
  CHECK(back.dt == tr.dt);
  CHECK(back.body_count == 2);
}

TEST_CASE("atomic writes leave no temporaries") {
  test::TempDir dir;
  write_file_atomic(dir / "a/b.txt", "hello");
  write_file_atomic(dir / "a/b.txt", "again");
  CHECK(read_file(dir / "a/b.txt") == "again");
  int n = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path() / "a")) ++n;
  CHECK(n == 1);
}

TEST_CASE("split manifest") {
  const std::vector<ManifestSetting> settings{{"pendulum", "pend_20", 10, {}},
                                              {"led", "d75_led", 5, SplitRatio{3, 1, 1, 0}}};
  const auto m = split_manifest(settings, 42);
  CHECK(m.size() == 15);
  int train = 0, val = 0, test_n = 0;
  for (const auto& e : m) {
    if (e.phenomenon != "pendulum") continue;
    train += e.split == SplitLabel::Train;
    val += e.split == SplitLabel::Val;
    test_n += e.split == SplitLabel::Test;
  }
  CHECK(train == 7);
  CHECK(val == 1);
  CHECK(test_n == 2);
  const auto text = manifest_csv_text(m);
  CHECK(manifest_csv_text(split_manifest(settings, 42)) == text);
  CHECK(parse_manifest_csv(text) == m);
  CHECK(text.rfind("phenomenon,setting,trial,split\n", 0) == 0);
}

TEST_CASE("results csv") {
  ResultsRow a;
  a.phenomenon = "pendulum";
  a.setting = "pend_45";
  a.clip = 3;
  a.family = "nonlinear_pendulum";
  a.integrator = "euler";
  a.loss_kind = "one-step";
  a.param_name = "L";
  a.gt = 0.5;
  a.estimate = 0.4987654321;
  a.abs_error = std::abs(a.estimate - 0.5);
  a.ode_residual = 1.25e-7;
  ResultsRow b = a;
  b.clip = 1;
  b.param_name = "zeta";
  b.gt.reset();
  b.abs_error.reset();
  b.diverged = true;

  const auto text = results_csv_text({a, b});
  CHECK(text.rfind(results_header(), 0) == 0);
  const auto rows = parse_results_csv(text);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].clip == 1);
  CHECK_FALSE(rows[0].gt.has_value());
  CHECK(rows[0].diverged);
  CHECK(rows[1].estimate == doctest::Approx(0.498765432).epsilon(1e-12));
  CHECK(results_csv_text(rows) == text);
}

TEST_CASE("report json round trip") {
  std::vector<ResultsRow> rows;
  for (int c = 0; c < 3; ++c) {
    ResultsRow r;
    r.phenomenon = "led";
    r.setting = "d75_led";
    r.clip = c;
    r.family = "first_order_decay";
    r.integrator = "euler";
    r.loss_kind = "one-step";
    r.param_name = "gamma";
    r.gt = 2.3;
    r.estimate = 2.1 + 0.05 * c;
    r.abs_error = std::abs(r.estimate - 2.3);
    rows.push_back(r);
  }
  const auto rep = aggregate(rows);
  const auto text = report_json_text(rep);
  CHECK(report_json_text(parse_report_json(text)) == text);
  const auto summary = summary_text(rep);
  CHECK(summary.find("gamma") != std::string::npos);
  CHECK(config_label({"euler", "multi-step", 5}) == "euler/multi-step/K=5");
}
