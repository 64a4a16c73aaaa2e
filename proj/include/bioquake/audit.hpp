#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bioquake/core.hpp"
#include "bioquake/planner.hpp"
#include "bioquake/table_io.hpp"

namespace bioquake {

/// A relative uncertainty as printed in a published table: a number, or the
/// ">1" marker.
struct ReportedDelta {
  std::optional<double> value;
  bool exceeds_one = false;

  static ReportedDelta parse(std::string_view text);
  [[nodiscard]] bool above(double threshold) const;
  [[nodiscard]] std::string to_string() const;
};

/// One published result: dataset context, comparison counts and reported
/// error rates in percent. `reported_*` hold the publication's own delta
/// values when the table carries them.
struct DatasetRecord {
  std::string dataset;
  std::string modality;
  std::optional<std::string> sessions;
  std::optional<Count> ids;
  Count imp_comparisons = 0;
  Count gen_comparisons = 0;
  double fnmr_pct = 0.0;
  double fmr_pct = 0.0;
  std::optional<std::string> source;
  std::optional<ReportedDelta> reported_delta_fnmr;
  std::optional<ReportedDelta> reported_delta_fmr;

  void validate() const;
};

enum class TableFormat { csv, json, markdown, text };

TableFormat parse_table_format(std::string_view name);
std::string_view to_string(TableFormat format);

/// CSV or JSON only. CSV needs the header
/// `dataset,modality,sessions,ids,imp_comparisons,gen_comparisons,fnmr_pct,fmr_pct,source`
/// (extra known columns such as reported deltas or audit annotations are
/// accepted and ignored). JSON is an array of objects with the same keys, or
/// an audit report object carrying such an array under "rows".
std::vector<DatasetRecord> parse_dataset_table(std::string_view input, TableFormat format);

struct MetricAudit {
  Count comparisons = 0;
  double rate = 0.0;  // fraction, not percent
  UncertaintyResult uncertainty;
  double min_error = 0.0;
  std::string min_error_display;

  [[nodiscard]] std::optional<double> delta() const { return uncertainty.delta_rel; }
};

struct AuditResult {
  DatasetRecord record;
  MetricAudit fnmr;  // N = genuine comparisons
  MetricAudit fmr;   // N = impostor comparisons
};

AuditResult audit_record(const DatasetRecord& record, double alpha = 0.05,
                         double rule_delta = kSixPercentRule);

/// Row audits are independent; output order equals input order.
std::vector<AuditResult> audit_table(const std::vector<DatasetRecord>& records,
                                     double alpha = 0.05, double rule_delta = kSixPercentRule);

struct ExceedanceCounts {
  std::size_t fnmr_above_030 = 0;
  std::size_t fnmr_above_050 = 0;
  std::size_t fmr_above_030 = 0;
  std::size_t fmr_above_050 = 0;
};

struct AuditSummary {
  std::size_t rows = 0;
  ExceedanceCounts computed;
  /// Present when every row carries both reported deltas.
  std::optional<ExceedanceCounts> reported;
};

/// Undefined deltas (zero rate) count as exceeding every threshold.
AuditSummary summarize(const std::vector<AuditResult>& results);

/// ">1" above one, "inf" when undefined, otherwise 5 significant digits.
std::string display_delta(std::optional<double> delta);

std::string render_report(const std::vector<AuditResult>& results, TableFormat format);

}  // namespace bioquake
