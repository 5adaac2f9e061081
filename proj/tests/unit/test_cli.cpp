#include <sstream>

#include "doctest.h"
#include "physid/cli.hpp"
#include "physid/dataio.hpp"
#include "tmpdir.hpp"

using namespace physid;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "physid");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("simulate is deterministic") {
  test::TempDir a, b;
  REQUIRE(cli({"simulate", "--preset", "pend_45", "--seed", "42", "--out", a.path().string()}).code == 0);
  REQUIRE(cli({"simulate", "--preset", "pend_45", "--seed", "42", "--out", b.path().string()}).code == 0);
  for (const auto* f : {"parameters.json", "splits.csv", "pendulum/pend_45/trial_0.csv",
                        "pendulum/pend_45/trial_9.csv"})
    CHECK(read_file(a / f) == read_file(b / f));
  CHECK(load_trajectory_csv(a / "pendulum/pend_45/trial_0.csv").size() == 600);
}

TEST_CASE("multi-step weights are echoed") {
  test::TempDir d;
  REQUIRE(cli({"simulate", "--preset", "rot_slow", "--out", d.path().string(), "--max-samples", "120"}).code == 0);
  const auto r = cli({"fit", "--data", d.path().string(), "--loss", "multi-step", "--horizon", "5",
                      "--epochs", "5", "--out", d / "results.csv"});
  CHECK(r.code == 0);
  CHECK(r.out.find("resolved config") != std::string::npos);
  CHECK(r.out.find("[1.0,1.0,0.5,0.5,0.25]") != std::string::npos);
}

TEST_CASE("euler-buggy leaves estimates at their init") {
  test::TempDir d;
  REQUIRE(cli({"simulate", "--preset", "rot_mid", "--out", d.path().string(), "--max-samples", "120"}).code == 0);
  REQUIRE(cli({"fit", "--data", d.path().string(), "--integrator", "euler-buggy", "--epochs", "50",
               "--out", d / "results.csv"}).code == 0);
  const auto rows = load_results_csv(d / "results.csv");
  int raw = 0;
  for (const auto& r : rows) {
    if (r.param_name == "ode:alpha") {
      CHECK(r.estimate == 0.5);
      ++raw;
    }
    if (r.param_name == "ode:beta") CHECK(r.estimate == 0.05);
  }
  CHECK(raw == 10);
}

TEST_CASE("bad arguments fail") {
  CHECK(cli({"fit", "--bogus"}).code != 0);
  CHECK(cli({"simulate", "--preset", "nope", "--out", "/tmp/x"}).code != 0);
  CHECK(cli({}).code != 0);
  CHECK(cli({"fit", "--data", "/nonexistent", "--out", "/tmp/r.csv"}).code != 0);
}

TEST_CASE("seed comes from the environment") {
  test::TempDir d;
  ::setenv("PHYSID_SEED", "7", 1);
  const auto r = cli({"simulate", "--preset", "d75_led_2s", "--out", d.path().string()});
  ::unsetenv("PHYSID_SEED");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"seed\":7") != std::string::npos);
}
