#include "physid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "physid/error.hpp"
#include "physid/integrators.hpp"

namespace physid {

namespace {

constexpr double kG = 9.81;
constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (auto p : parts) {
    words.push_back(static_cast<std::uint32_t>(p & 0xffffffffULL));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Box-Muller on raw engine output so draws do not depend on the standard
// library's distribution implementation.
class Gaussian {
 public:
  explicit Gaussian(std::mt19937_64& eng) : eng_(eng) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64& eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

GroundTruthParam gt(std::string name, double value, std::string units,
                    MeasurementType type = MeasurementType::Direct) {
  GroundTruthParam p;
  p.name = std::move(name);
  p.value = value;
  p.units = std::move(units);
  p.measurement_type = type;
  return p;
}

constexpr auto kFitted = MeasurementType::Fitted;

ClipSpec base(std::string phenomenon, std::string setting, OdeFamily family,
              std::vector<double> params, StateVector initial, double duration) {
  ClipSpec s{};
  s.phenomenon = std::move(phenomenon);
  s.setting = std::move(setting);
  s.family = family;
  s.true_params = ParamVector::make(family, std::move(params));
  s.initial = std::move(initial);
  s.duration = duration;
  return s;
}

ClipSpec drop_preset(const std::string& setting, double h0) {
  const double t_ground = std::sqrt(2.0 * h0 / kG);
  auto s = base("dropping_ball", setting, OdeFamily::single(FamilyTag::ConstantAccel), {-kG},
                {{h0}, {0.0}}, std::min(5.0, t_ground));
  s.init_params = {-10.0};
  s.ground_truth = {gt("g", kG, "m/s^2"), gt("h0", h0, "m"), gt("d_cam", 1.94, "m")};
  return s;
}

ClipSpec falling_preset(const std::string& setting, double r0) {
  const double f = 1.0, h0 = 1.0;
  auto s = base("falling_ball", setting, OdeFamily::single(FamilyTag::FallingBallRadius),
                {kG, r0 * f, h0}, {{r0 * f / h0}, {}}, 1.0);
  s.init_params = {10.0, 0.5, h0};
  s.frozen = {2};
  s.ground_truth = {gt("g", kG, "m/s^2"), gt("r0", r0, "m"), gt("f", f, "1"), gt("h0", h0, "m")};
  return s;
}

ClipSpec cone_preset(const std::string& setting, double alpha_deg, double hyp) {
  const double mu = 0.2;
  const double a = kG * (std::sin(deg(alpha_deg)) - mu * std::cos(deg(alpha_deg)));
  auto s = base("sliding_cone", setting, OdeFamily::single(FamilyTag::ConstantAccel), {a},
                {{0.0}, {0.0}}, std::min(5.0, std::sqrt(2.0 * hyp / a)));
  s.init_params = {kG * std::sin(deg(alpha_deg))};
  s.incline_deg = alpha_deg;
  s.ground_truth = {gt("alpha_deg", alpha_deg, "deg"), gt("hypotenuse", hyp, "m"),
                    gt("mu", mu, "1", kFitted)};
  return s;
}

ClipSpec pendulum_preset(std::string phenomenon, const std::string& setting, double length,
                         double theta0_deg, double duration) {
  const double zeta = 0.02;
  auto s = base(std::move(phenomenon), setting, OdeFamily::single(FamilyTag::NonlinearPendulum),
                {kG / length, zeta}, {{deg(theta0_deg)}, {0.0}}, duration);
  s.units = "rad";
  s.init_from_period = true;
  s.theta0 = deg(theta0_deg);
  s.ground_truth = {gt("L", length, "m"), gt("theta0_deg", theta0_deg, "deg"),
                    gt("zeta", zeta, "1/s", kFitted), gt("g", kG, "m/s^2")};
  return s;
}

ClipSpec rotation_preset(const std::string& setting, double beta, double phi0) {
  auto s = base("rotating_cone", setting, OdeFamily::single(FamilyTag::SecondOrderLinear),
                {0.10, beta}, {{phi0}, {0.0}}, 8.0);
  s.units = "rad";
  s.ground_truth = {gt("alpha", 0.10, "1/s^2"), gt("beta", beta, "1/s", kFitted)};
  return s;
}

ClipSpec hitting_cones_preset() {
  const int bodies = 16;
  const double kappa = 0.5, zeta = 0.02;
  StateVector init;
  init.positions.push_back(-2.0);
  init.velocities.push_back(2.0);
  for (int j = 1; j < bodies; ++j) {
    init.positions.push_back(0.1 * (j - 1));
    init.velocities.push_back(0.0);
  }
  auto s = base("hitting_cones", "default", OdeFamily::coupled(FamilyTag::CoupledContact, bodies),
                {kappa, zeta}, std::move(init), 5.0);
  s.ground_truth = {gt("kappa", kappa, "1/s^2", kFitted), gt("zeta", zeta, "1/s", kFitted),
                    gt("d_ball_cones", 2.0, "m"), gt("d_cam", 2.2, "m")};
  return s;
}

// Two pendulums of equal length. Generation gates the coupling to a contact
// window; the fit uses the continuously active form.
ClipSpec two_pendulum_preset(std::string phenomenon, const std::string& setting,
                             double theta0_deg, std::vector<double> start, double duration) {
  const double length = 0.5, zeta = 0.02, kappa = 2000.0, window = 0.05;
  const double w = kG / length;
  auto s = base(std::move(phenomenon), setting,
                OdeFamily::coupled(FamilyTag::CoupledPendulum, 2, window),
                {w, w, zeta, zeta, kappa}, {std::move(start), {0.0, 0.0}}, duration);
  s.fit_family = OdeFamily::coupled(FamilyTag::CoupledPendulum, 2);
  s.units = "rad";
  s.init_from_period = true;
  s.theta0 = deg(theta0_deg);
  s.ground_truth = {gt("L_0", length, "m"),
                    gt("L_1", length, "m"),
                    gt("theta0_deg", theta0_deg, "deg"),
                    gt("zeta_0", zeta, "1/s", kFitted),
                    gt("zeta_1", zeta, "1/s", kFitted),
                    gt("kappa_01", kappa, "1/s^2", kFitted)};
  return s;
}

ClipSpec delfys(ClipSpec s) {
  s.dt = 0.05;
  s.trial_count = 5;
  s.split_ratio = SplitRatio{3, 1, 1, 0};
  return s;
}

using Factory = std::function<ClipSpec()>;

const std::vector<std::pair<std::string, Factory>>& iris_table() {
  static const std::vector<std::pair<std::string, Factory>> table = {
      {"drop_50", [] { return drop_preset("drop_50", 0.50); }},
      {"drop_100", [] { return drop_preset("drop_100", 1.00); }},
      {"drop_150", [] { return drop_preset("drop_150", 1.50); }},
      {"falling_big", [] { return falling_preset("big", 0.11); }},
      {"falling_mid", [] { return falling_preset("mid", 0.07); }},
      {"falling_small", [] { return falling_preset("small", 0.04); }},
      {"cone_45", [] { return cone_preset("cone_45", 45.0, 0.77); }},
      {"cone_60", [] { return cone_preset("cone_60", 60.0, 0.84); }},
      {"cone_80", [] { return cone_preset("cone_80", 80.0, 0.80); }},
      {"pend_20", [] { return pendulum_preset("pendulum", "pend_20", 0.5, 20.0, 150.0); }},
      {"pend_45", [] { return pendulum_preset("pendulum", "pend_45", 0.5, 45.0, 150.0); }},
      {"pend_90", [] { return pendulum_preset("pendulum", "pend_90", 0.5, 90.0, 150.0); }},
      {"rot_slow", [] { return rotation_preset("slow", 0.03, kPi); }},
      {"rot_mid", [] { return rotation_preset("mid", 0.05, 2.0 * kPi); }},
      {"rot_fast", [] { return rotation_preset("fast", 0.08, 4.0 * kPi); }},
      {"hitting_cones", [] { return hitting_cones_preset(); }},
      {"two_pend_20",
       [] { return two_pendulum_preset("two_moving_pendulums", "pend_20", 20.0, {deg(20), -deg(20)}, 6.0); }},
      {"two_pend_45",
       [] { return two_pendulum_preset("two_moving_pendulums", "pend_45", 45.0, {deg(45), -deg(45)}, 6.0); }},
      {"two_pend_90",
       [] { return two_pendulum_preset("two_moving_pendulums", "pend_90", 90.0, {deg(90), -deg(90)}, 6.0); }},
      {"static_pend_20",
       [] { return two_pendulum_preset("one_static_pendulum", "pend_20", 20.0, {-deg(20), 0.0}, 20.0); }},
      {"static_pend_45",
       [] { return two_pendulum_preset("one_static_pendulum", "pend_45", 45.0, {-deg(45), 0.0}, 20.0); }},
      {"static_pend_90",
       [] { return two_pendulum_preset("one_static_pendulum", "pend_90", 90.0, {-deg(90), 0.0}, 20.0); }},
  };
  return table;
}

const std::vector<std::pair<std::string, Factory>>& delfys_table() {
  static const std::vector<std::pair<std::string, Factory>> table = {
      {"d75_dropped_ball_large",
       [] {
         auto s = drop_preset("large", 2.0);
         s.phenomenon = "dropped_ball";
         s.ground_truth = {gt("g", kG, "m/s^2"), gt("h0", 2.0, "m")};
         return delfys(s);
       }},
      {"d75_free_fall_mousepad",
       [] {
         auto s = falling_preset("mousepad", 0.05);
         s.phenomenon = "free_fall";
         return delfys(s);
       }},
      {"d75_led_2s",
       [] {
         auto s = base("led", "led_2s", OdeFamily::single(FamilyTag::FirstOrderDecay), {2.30},
                       {{1.0}, {}}, 2.0);
         s.units = "1";
         s.ground_truth = {gt("gamma", 2.30, "1/s")};
         return delfys(s);
       }},
      {"d75_pendulum_45", [] { return delfys(pendulum_preset("pendulum", "pendulum_45", 0.45, 20.0, 10.0)); }},
      {"d75_pendulum_90", [] { return delfys(pendulum_preset("pendulum", "pendulum_90", 0.90, 20.0, 10.0)); }},
      {"d75_pendulum_150", [] { return delfys(pendulum_preset("pendulum", "pendulum_150", 1.50, 20.0, 10.0)); }},
      {"d75_sliding_mid",
       [] {
         const double angle = 30.0, mu = 0.21, hyp = 1.0;
         const double a = kG * (std::sin(deg(angle)) - mu * std::cos(deg(angle)));
         auto s = base("sliding_block", "mid", OdeFamily::single(FamilyTag::ConstantAccel), {a},
                       {{0.0}, {0.0}}, std::sqrt(2.0 * hyp / a));
         s.init_params = {kG * std::sin(deg(angle))};
         s.incline_deg = angle;
         s.ground_truth = {gt("mu", mu, "1"), gt("alpha_deg", angle, "deg")};
         return delfys(s);
       }},
      {"d75_torricelli_large",
       [] {
         auto s = base("torricelli", "large", OdeFamily::single(FamilyTag::Torricelli), {0.016},
                       {{0.30}, {}}, 30.0);
         s.ground_truth = {gt("k", 0.016, "m^0.5/s")};
         return delfys(s);
       }},
      {"d75_torricelli_small",
       [] {
         auto s = base("torricelli", "small", OdeFamily::single(FamilyTag::Torricelli), {0.010},
                       {{0.30}, {}}, 30.0);
         s.ground_truth = {gt("k", 0.010, "m^0.5/s")};
         return delfys(s);
       }},
  };
  return table;
}

}  // namespace

const GroundTruthParam* GroundTruthRecord::find(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

std::string_view to_string(SplitLabel label) {
  switch (label) {
    case SplitLabel::Train: return "train";
    case SplitLabel::Val: return "val";
    case SplitLabel::Test: return "test";
    case SplitLabel::Leaderboard: return "leaderboard";
  }
  return "unknown";
}

SplitLabel split_label_from_string(std::string_view name) {
  for (auto l : {SplitLabel::Train, SplitLabel::Val, SplitLabel::Test, SplitLabel::Leaderboard})
    if (to_string(l) == name) return l;
  throw ParseError("unknown split label '" + std::string(name) + "'");
}

std::vector<SplitLabel> assign_splits(const std::string& phenomenon, const std::string& setting,
                                      std::uint64_t seed, int trial_count,
                                      std::optional<SplitRatio> ratio) {
  if (trial_count < 1) throw DomainError("trial count must be positive");
  if (!ratio) {
    if (trial_count != 10)
      throw DomainError("trial count " + std::to_string(trial_count) +
                        " needs an explicit split ratio");
    ratio = SplitRatio{};
  }
  if (ratio->train < 0 || ratio->val < 0 || ratio->test < 0 || ratio->leaderboard < 0 ||
      ratio->total() != trial_count)
    throw DomainError("split ratio does not sum to the trial count");

  std::vector<SplitLabel> labels;
  labels.insert(labels.end(), static_cast<std::size_t>(ratio->train), SplitLabel::Train);
  labels.insert(labels.end(), static_cast<std::size_t>(ratio->val), SplitLabel::Val);
  labels.insert(labels.end(), static_cast<std::size_t>(ratio->test), SplitLabel::Test);
  labels.insert(labels.end(), static_cast<std::size_t>(ratio->leaderboard),
                SplitLabel::Leaderboard);

  const std::uint64_t key = fnv1a(setting, fnv1a("/", fnv1a(phenomenon)));
  auto eng = make_engine({key, seed});
  for (std::size_t i = labels.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(eng() % i);
    std::swap(labels[i - 1], labels[j]);
  }
  return labels;
}

std::size_t ClipSpec::sample_count() const {
  if (!(dt > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

void ClipSpec::validate() const {
  family.validate();
  if (true_params.family != family) throw ArityError("true_params family does not match spec");
  check_arity(family, true_params.values);
  if (family.tag != FamilyTag::FallingBallRadius) check_state(family, initial);
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (sample_count() < 10) throw DomainError(setting + ": duration/dt gives fewer than 10 samples");
  if (noise_std < 0.0) throw DomainError("noise_std must be non-negative");
  if (trial_count < 1) throw DomainError("trial_count must be positive");
  if (jitter < 0.0) throw DomainError("jitter must be non-negative");
  if (substeps < 1) throw DomainError("substeps must be positive");
  if (fit_family && fit_family->tag != family.tag)
    throw DomainError("fit family must share the generating tag");
}

GroundTruthRecord ClipSpec::ground_truth_record() const {
  GroundTruthRecord r;
  r.phenomenon = phenomenon;
  r.setting = setting;
  r.params = ground_truth;
  return r;
}

Trajectory simulate(const ClipSpec& spec, const ParamVector& params) {
  const std::size_t n = spec.sample_count();
  const auto bodies = static_cast<std::size_t>(spec.family.body_count);
  Trajectory traj;
  traj.dt = spec.dt;
  traj.t0 = 0.0;
  traj.body_count = spec.family.body_count;
  traj.units = spec.units;
  traj.positions.resize(n * bodies);

  if (spec.family.tag == FamilyTag::FallingBallRadius) {
    for (std::size_t t = 0; t < n; ++t)
      traj.positions[t] =
          closed_form(spec.family, params.values, spec.initial, static_cast<double>(t) * spec.dt)
              .positions[0];
    return traj;
  }

  Stepper stepper(IntegratorKind::RK4, spec.family, params.values,
                  spec.dt / static_cast<double>(spec.substeps));
  Eigen::VectorXd x = flatten(spec.initial);
  for (std::size_t b = 0; b < bodies; ++b) traj.positions[b] = x[static_cast<Eigen::Index>(b)];
  for (std::size_t t = 1; t < n; ++t) {
    for (int s = 0; s < spec.substeps; ++s) stepper.advance(x);
    if (!within_divergence_bound(x)) throw DivergenceError(t, "simulation left the divergence bound");
    for (std::size_t b = 0; b < bodies; ++b)
      traj.positions[t * bodies + b] = x[static_cast<Eigen::Index>(b)];
  }
  return traj;
}

Clip generate_trial(const ClipSpec& spec, std::uint64_t seed, int trial) {
  const std::uint64_t key = fnv1a(spec.setting, fnv1a("/", fnv1a(spec.phenomenon)));
  auto eng = make_engine({seed, static_cast<std::uint64_t>(trial), key});
  Gaussian normal(eng);

  std::vector<double> values = spec.true_params.values;
  if (spec.jitter > 0.0)
    for (double& v : values) v *= 1.0 + spec.jitter * normal();
  if (spec.family.tag == FamilyTag::FirstOrderDecay || spec.family.tag == FamilyTag::Torricelli)
    values[0] = std::max(values[0], 0.0);

  Clip clip;
  clip.trial = trial;
  clip.split = assign_splits(spec.phenomenon, spec.setting, seed, spec.trial_count,
                             spec.split_ratio)[static_cast<std::size_t>(trial)];
  clip.params = ParamVector::make(spec.family, std::move(values));
  try {
    clip.trajectory = simulate(spec, clip.params);
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.step(), "trial " + std::to_string(trial) + " of " + spec.setting);
  }
  if (spec.noise_std > 0.0)
    for (double& p : clip.trajectory.positions) p += spec.noise_std * normal();
  return clip;
}

ClipSet generate(const ClipSpec& spec, std::uint64_t seed) {
  spec.validate();
  ClipSet set;
  set.spec = spec;
  set.seed = seed;
  const auto labels =
      assign_splits(spec.phenomenon, spec.setting, seed, spec.trial_count, spec.split_ratio);
  for (int trial = 0; trial < spec.trial_count; ++trial) {
    set.clips.push_back(generate_trial(spec, seed, trial));
    set.clips.back().split = labels[static_cast<std::size_t>(trial)];
  }
  return set;
}

std::vector<SplitLabel> ClipSet::split() const {
  std::vector<SplitLabel> out;
  for (const auto& c : clips) out.push_back(c.split);
  return out;
}

std::vector<std::string> preset_names(PresetSuite suite) {
  std::vector<std::string> names;
  for (const auto& [name, f] : suite == PresetSuite::Iris ? iris_table() : delfys_table())
    names.push_back(name);
  return names;
}

std::vector<std::string> all_preset_names() {
  auto names = preset_names(PresetSuite::Iris);
  for (auto& n : preset_names(PresetSuite::Delfys75)) names.push_back(std::move(n));
  return names;
}

ClipSpec preset(const std::string& name) {
  for (const auto* table : {&iris_table(), &delfys_table()})
    for (const auto& [n, factory] : *table)
      if (n == name) {
        ClipSpec s = factory();
        s.validate();
        return s;
      }
  throw DomainError("unknown preset '" + name + "'");
}

}  // namespace physid
