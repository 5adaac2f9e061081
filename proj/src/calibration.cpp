#include "physid/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "physid/error.hpp"
#include "physid/gt_fit.hpp"

namespace physid {

namespace {

constexpr std::string_view kDefaultText = R"(# phenomenon           family               name         units    formula           source      constant
dropping_ball          constant_accel       g            m/s^2    negate            a
dropping_ball          constant_accel       h0           m        metadata          h0
dropping_ball          constant_accel       d_cam        m        metadata          d_cam
dropped_ball           constant_accel       g            m/s^2    negate            a
dropped_ball           constant_accel       h0           m        metadata          h0
falling_ball           falling_ball_radius  g            m/s^2    identity          g
falling_ball           falling_ball_radius  r0           m        divide            r0f         1.0
falling_ball           falling_ball_radius  f            1        metadata          f
falling_ball           falling_ball_radius  h0           m        identity          h0
free_fall              falling_ball_radius  g            m/s^2    identity          g
free_fall              falling_ball_radius  r0           m        divide            r0f         1.0
free_fall              falling_ball_radius  f            1        metadata          f
free_fall              falling_ball_radius  h0           m        identity          h0
sliding_cone           constant_accel       mu           1        friction          a           9.81
sliding_cone           constant_accel       alpha_deg    deg      metadata          alpha_deg
sliding_cone           constant_accel       hypotenuse   m        metadata          hypotenuse
sliding_block          constant_accel       mu           1        friction          a           9.81
sliding_block          constant_accel       alpha_deg    deg      metadata          alpha_deg
pendulum               nonlinear_pendulum   L            m        inverse           g_over_L    9.81
pendulum               nonlinear_pendulum   zeta         1/s      identity          zeta
pendulum               nonlinear_pendulum   theta0_deg   deg      metadata          theta0_deg
pendulum               nonlinear_pendulum   g            m/s^2    metadata          g
pendulum               nonlinear_pendulum   L_period     m        period_length     -           9.81
pendulum               nonlinear_pendulum   L_corrected  m        corrected_length  -           9.81
rotating_cone          second_order_linear  alpha        1/s^2    identity          alpha
rotating_cone          second_order_linear  beta         1/s      identity          beta
led                    first_order_decay    gamma        1/s      identity          lambda
torricelli             torricelli           k            m^0.5/s  identity          k
hitting_cones          coupled_contact      kappa        1/s^2    identity          kappa
hitting_cones          coupled_contact      zeta         1/s      identity          zeta
hitting_cones          coupled_contact      d_ball_cones m        metadata          d_ball_cones
hitting_cones          coupled_contact      d_cam        m        metadata          d_cam
two_moving_pendulums   coupled_pendulum     L_0          m        inverse           g_over_L_0  9.81
two_moving_pendulums   coupled_pendulum     L_1          m        inverse           g_over_L_1  9.81
two_moving_pendulums   coupled_pendulum     zeta_0       1/s      identity          zeta_0
two_moving_pendulums   coupled_pendulum     zeta_1       1/s      identity          zeta_1
two_moving_pendulums   coupled_pendulum     kappa_01     1/s^2    identity          kappa_01
two_moving_pendulums   coupled_pendulum     theta0_deg   deg      metadata          theta0_deg
one_static_pendulum    coupled_pendulum     L_0          m        inverse           g_over_L_0  9.81
one_static_pendulum    coupled_pendulum     L_1          m        inverse           g_over_L_1  9.81
one_static_pendulum    coupled_pendulum     zeta_0       1/s      identity          zeta_0
one_static_pendulum    coupled_pendulum     zeta_1       1/s      identity          zeta_1
one_static_pendulum    coupled_pendulum     kappa_01     1/s^2    identity          kappa_01
one_static_pendulum    coupled_pendulum     theta0_deg   deg      metadata          theta0_deg
)";

const std::vector<std::string> kFormulas = {"identity", "negate",           "inverse",
                                            "divide",   "friction",         "period_length",
                                            "corrected_length", "metadata"};

bool needs_source_param(const std::string& formula) {
  return formula == "identity" || formula == "negate" || formula == "inverse" ||
         formula == "divide" || formula == "friction";
}

double param_value(const CalibrationRule& rule, const ParamVector& fitted,
                   const std::string& name) {
  const auto names = fitted.family.param_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return fitted.values[i];
  throw CalibrationError(rule.phenomenon + ": fitted parameters have no '" + name + "'");
}

}  // namespace

std::string_view default_calibration_text() { return kDefaultText; }

CalibrationTable CalibrationTable::parse(std::string_view text) {
  CalibrationTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string tok; fields >> tok;) f.push_back(tok);
    if (f.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw ParseError("calibration line " + std::to_string(line_no) + ": " + why);
    };
    if (f.size() < 6 || f.size() > 7) fail("expected 6 or 7 fields, got " + std::to_string(f.size()));

    FamilyTag tag{};
    try {
      tag = family_tag_from_string(f[1]);
    } catch (const ParseError& e) {
      fail(e.what());
    }
    CalibrationMapping m{f[2], f[3], f[4], f[5], 0.0};
    if (std::find(kFormulas.begin(), kFormulas.end(), m.formula) == kFormulas.end())
      fail("unknown formula '" + m.formula + "'");
    if (f.size() == 7) {
      std::size_t used = 0;
      try {
        m.constant = std::stod(f[6], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != f[6].size()) fail("bad constant '" + f[6] + "'");
    }
    const bool needs_constant = m.formula == "inverse" || m.formula == "divide" ||
                                m.formula == "friction" || m.formula == "period_length" ||
                                m.formula == "corrected_length";
    if (needs_constant && f.size() != 7) fail("formula '" + m.formula + "' needs a constant");
    if (needs_constant && !(m.constant > 0.0)) fail("constant must be positive");

    auto it = std::find_if(table.rules_.begin(), table.rules_.end(),
                           [&](const CalibrationRule& r) { return r.phenomenon == f[0]; });
    if (it == table.rules_.end()) {
      table.rules_.push_back(CalibrationRule{f[0], tag, {}});
      it = std::prev(table.rules_.end());
    } else if (it->family != tag) {
      fail("phenomenon '" + f[0] + "' already mapped to another family");
    }
    for (const auto& existing : it->mapping)
      if (existing.name == m.name) fail("duplicate rule for " + f[0] + "/" + m.name);
    it->mapping.push_back(std::move(m));
  }
  return table;
}

CalibrationTable CalibrationTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open calibration file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const CalibrationTable& CalibrationTable::defaults() {
  static const CalibrationTable table = parse(kDefaultText);
  return table;
}

bool CalibrationTable::contains(const std::string& phenomenon) const {
  return std::any_of(rules_.begin(), rules_.end(),
                     [&](const CalibrationRule& r) { return r.phenomenon == phenomenon; });
}

const CalibrationRule& CalibrationTable::rule(const std::string& phenomenon) const {
  for (const auto& r : rules_)
    if (r.phenomenon == phenomenon) return r;
  throw CalibrationError("no calibration rule for phenomenon '" + phenomenon + "'");
}

std::vector<SiValue> latent_to_si(const CalibrationRule& rule, const ParamVector& fitted,
                                  const CalibrationAux& aux) {
  if (fitted.family.tag != rule.family)
    throw CalibrationError(rule.phenomenon + ": rule expects " +
                           std::string(to_string(rule.family)) + ", got " +
                           std::string(to_string(fitted.family.tag)));
  check_arity(fitted.family, fitted.values);

  std::vector<SiValue> out;
  for (const auto& m : rule.mapping) {
    const double x = needs_source_param(m.formula) ? param_value(rule, fitted, m.source) : 0.0;
    double value = 0.0;
    if (m.formula == "identity") {
      value = x;
    } else if (m.formula == "negate") {
      value = -x;
    } else if (m.formula == "inverse") {
      if (!(x > 0.0))
        throw CalibrationError(rule.phenomenon + "/" + m.name + ": " + m.source +
                               " must be positive to invert");
      value = m.constant / x;
    } else if (m.formula == "divide") {
      value = x / m.constant;
    } else if (m.formula == "friction") {
      if (!aux.incline_deg) continue;
      value = friction_from_accel(*aux.incline_deg, x, m.constant);
    } else if (m.formula == "period_length") {
      if (!aux.period) continue;
      value = corrected_length(*aux.period, 0.0, m.constant).small_angle;
    } else if (m.formula == "corrected_length") {
      if (!aux.period || !aux.theta0) continue;
      value = corrected_length(*aux.period, *aux.theta0, m.constant).corrected;
    } else if (m.formula == "metadata") {
      const auto it = aux.metadata.find(m.source);
      if (it == aux.metadata.end()) continue;
      value = it->second;
    }
    out.push_back({m.name, value, m.units});
  }
  return out;
}

ParamVector timestep_sensitivity(const ParamVector& fitted, double dt_assumed, double dt_true) {
  if (!(dt_assumed > 0.0) || !(dt_true > 0.0)) throw DomainError("timesteps must be positive");
  check_arity(fitted.family, fitted.values);
  const double ratio = dt_assumed / dt_true;
  ParamVector out = fitted;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] *= std::pow(ratio, fitted.family.time_order(i));
  return out;
}

}  // namespace physid
