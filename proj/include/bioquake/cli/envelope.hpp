#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bioquake/core.hpp"
#include "bioquake/empirical.hpp"
#include "bioquake/planner.hpp"

namespace bioquake::cli {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

/// Wrapper for every --json document and API payload family.
struct OutputEnvelope {
  std::string command;
  json inputs = json::object();
  json result = json::object();
  std::vector<std::string> warnings;

  [[nodiscard]] json to_json() const;
  /// Pretty JSON plus trailing newline.
  [[nodiscard]] std::string dump() const;
};

/// {"value": x, "display": ...}; undefined becomes {"value": null, "display": "inf"}.
json delta_json(std::optional<double> delta);

json uncertainty_json(const UncertaintyResult& r);
json plan_json(const PlanRequest& req, Count required);
json min_error_json(Count comparisons, double delta, double alpha, double value);
json curve_json(const std::vector<CurveRow>& rows);
json subsample_json(const SubsampleResult& r);
json coverage_json(const CoverageResult& r);

/// "1% rule", "6% rule" or "10% rule" when delta matches a preset.
std::optional<std::string> rule_name(double delta);

/// alpha = 1 - confidence, after checking confidence lies in (0, 1).
double alpha_from_confidence(double confidence);

}  // namespace bioquake::cli
