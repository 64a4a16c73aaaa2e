#include "bioquake/cli/envelope.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bioquake/audit.hpp"

namespace bioquake::cli {

json OutputEnvelope::to_json() const {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"inputs", inputs},
          {"result", result},
          {"warnings", warnings}};
}

std::string OutputEnvelope::dump() const { return to_json().dump(2) + "\n"; }

json delta_json(std::optional<double> delta) {
  return {{"value", delta ? json(*delta) : json(nullptr)}, {"display", display_delta(delta)}};
}

json uncertainty_json(const UncertaintyResult& r) {
  return {{"comparisons", r.comparisons},
          {"error_rate", r.rate},
          {"confidence", 1.0 - r.alpha},
          {"n_low", r.region.n_low},
          {"n_high", r.region.n_high},
          {"tail_low", r.region.tail_low},
          {"tail_high", r.region.tail_high},
          {"delta_abs", r.delta_abs},
          {"delta_rel", delta_json(r.delta_rel)},
          {"interval_low", r.interval_low},
          {"interval_high", r.interval_high},
          {"class", class_label(r.certainty_class)},
          {"class_name", class_name(r.certainty_class)},
          {"class_color", class_hex(r.certainty_class)}};
}

std::optional<std::string> rule_name(double delta) {
  if (std::fabs(delta - 0.01) < 1e-12) return "1% rule";
  if (std::fabs(delta - kSixPercentRule) < 1e-12) return "6% rule";
  if (std::fabs(delta - 0.1) < 1e-12) return "10% rule";
  return std::nullopt;
}

json plan_json(const PlanRequest& req, Count required) {
  const auto achieved = bioquake(ErrorObservation::from_rate(required, req.error_rate, req.alpha));
  const auto rule = rule_name(req.target_delta);
  return {{"required_comparisons", required},
          {"mode", req.mode == PlanMode::exact ? "exact" : "approx"},
          {"conservative", req.conservative},
          {"achieved_delta", delta_json(achieved.delta_rel)},
          {"rule_constant", rule_constant(req.target_delta, req.alpha)},
          {"rule", rule ? json(*rule) : json(nullptr)}};
}

json min_error_json(Count comparisons, double delta, double alpha, double value) {
  return {{"comparisons", comparisons},
          {"delta", delta},
          {"confidence", 1.0 - alpha},
          {"min_error", value},
          {"display", format_min_error(value)},
          {"display_ascii", format_min_error_ascii(value)}};
}

json curve_json(const std::vector<CurveRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"error_rate", r.error_rate},
                   {"delta", r.delta},
                   {"confidence", r.confidence},
                   {"required_comparisons", r.required_comparisons}});
  }
  return out;
}

json subsample_json(const SubsampleResult& r) {
  return {{"frac", r.frac},
          {"metric", to_string(r.metric)},
          {"threshold", r.threshold},
          {"subsample_size", r.subsample_size},
          {"mean_rate", r.mean_rate},
          {"empirical_margin", r.empirical_margin},
          {"theoretical_margin", r.theoretical_margin},
          {"repetitions", r.values}};
}

json coverage_json(const CoverageResult& r) {
  return {{"comparisons", r.comparisons}, {"p", r.p_true},       {"confidence", 1.0 - r.alpha},
          {"trials", r.trials},           {"covered", r.covered}, {"coverage", r.coverage}};
}

double alpha_from_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw DomainError(fmt::format("confidence must lie in (0, 1), got {}", confidence));
  }
  return 1.0 - confidence;
}

}  // namespace bioquake::cli
