#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace physid {

enum class MeasurementType { Direct, Fitted };

struct GroundTruthParam {
  std::string name;
  double value = 0.0;
  double std = 0.0;
  std::optional<double> min;
  std::optional<double> max;
  std::string units;
  MeasurementType measurement_type = MeasurementType::Direct;
  // Fields not covered above, preserved verbatim on save.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool operator==(const GroundTruthParam&) const = default;
};

struct GroundTruthRecord {
  std::string phenomenon;
  std::string setting;
  std::vector<GroundTruthParam> params;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  const GroundTruthParam* find(const std::string& name) const;
  bool operator==(const GroundTruthRecord&) const = default;
};

}  // namespace physid
