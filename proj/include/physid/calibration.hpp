#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "physid/ode_bank.hpp"

namespace physid {

// Formula tags understood by latent_to_si:
//   identity          x
//   negate            -x
//   inverse           c / x            (x <= 0 raises CalibrationError)
//   divide            x / c
//   friction          tan(alpha) - x / (c cos(alpha)), alpha from aux incline
//   period_length     c (T / 2 pi)^2,   needs aux period
//   corrected_length  amplitude-corrected period length, needs period and theta0
//   metadata          aux.metadata[source]
// Entries whose auxiliary input is missing are skipped.
struct CalibrationMapping {
  std::string name;
  std::string units;
  std::string formula;
  std::string source;  // ODE parameter name, metadata key, or "-"
  double constant = 0.0;

  bool operator==(const CalibrationMapping&) const = default;
};

struct CalibrationRule {
  std::string phenomenon;
  FamilyTag family = FamilyTag::SecondOrderLinear;
  std::vector<CalibrationMapping> mapping;

  bool operator==(const CalibrationRule&) const = default;
};

struct CalibrationAux {
  std::optional<double> period;       // s
  std::optional<double> theta0;       // rad
  std::optional<double> incline_deg;  // deg
  std::map<std::string, double> metadata;
};

struct SiValue {
  std::string name;
  double value = 0.0;
  std::string units;
};

class CalibrationTable {
 public:
  // Whitespace-separated lines:
  //   phenomenon family name units formula source [constant]
  // '#' starts a comment.
  static CalibrationTable parse(std::string_view text);
  static CalibrationTable load(const std::string& path);
  static const CalibrationTable& defaults();

  const CalibrationRule& rule(const std::string& phenomenon) const;
  bool contains(const std::string& phenomenon) const;
  const std::vector<CalibrationRule>& rules() const { return rules_; }

 private:
  std::vector<CalibrationRule> rules_;
};

// Text of the built-in table; data/calibration.conf ships the same content.
std::string_view default_calibration_text();

std::vector<SiValue> latent_to_si(const CalibrationRule& rule, const ParamVector& fitted,
                                  const CalibrationAux& aux = {});

// Rescales each coefficient by (dt_assumed / dt_true)^order where order is
// the parameter's power of inverse time.
ParamVector timestep_sensitivity(const ParamVector& fitted, double dt_assumed, double dt_true);

}  // namespace physid
