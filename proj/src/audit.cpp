#include "bioquake/audit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace bioquake {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kRequiredColumns = {
    "dataset",         "modality", "sessions", "ids",   "imp_comparisons",
    "gen_comparisons", "fnmr_pct", "fmr_pct",  "source"};

constexpr std::array<std::string_view, 2> kReportedColumns = {"reported_delta_fnmr",
                                                              "reported_delta_fmr"};

// Columns added by render_report; accepted on input so reports re-parse.
constexpr std::array<std::string_view, 8> kAnnotationColumns = {
    "delta_fnmr",   "class_fnmr",   "delta_fmr",           "class_fmr",
    "min_err_fnmr", "min_err_fmr",  "min_err_fnmr_display", "min_err_fmr_display"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& names, std::string_view key) {
  return std::find(names.begin(), names.end(), key) != names.end();
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA"; }

[[noreturn]] void fail(std::size_t row, std::string_view field, std::string_view what) {
  throw ParseError(fmt::format("row {}, field {}: {}", row, field, what), row, std::string(field));
}

template <class Fn>
auto with_context(std::size_t row, std::string_view field, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    fail(row, field, e.what());
  }
}

Count required_count(std::size_t row, std::string_view field, std::string_view cell) {
  if (is_missing(cell)) fail(row, field, "missing count");
  const Count value = with_context(row, field, [&] { return parse_count(cell); });
  if (value < 1) fail(row, field, fmt::format("comparison count must be at least 1, got {}", value));
  return value;
}

double percent(std::size_t row, std::string_view field, std::string_view cell) {
  if (is_missing(cell)) fail(row, field, "missing rate");
  const double value = with_context(row, field, [&] { return parse_real(cell); });
  if (!(value >= 0.0 && value <= 100.0)) {
    fail(row, field, fmt::format("percentage must lie in [0, 100], got {}", value));
  }
  return value;
}

std::vector<DatasetRecord> parse_csv_table(std::string_view input) {
  const auto rows = read_csv(input);
  if (rows.empty()) throw ParseError("empty input");
  const auto& header = rows.front().cells;

  std::vector<std::size_t> index_of(kRequiredColumns.size(), header.size());
  std::array<std::size_t, 2> reported_index{header.size(), header.size()};
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (!seen.insert(name).second) throw ParseError(fmt::format("duplicate column '{}'", name), 0, name);
    if (const auto it = std::find(kRequiredColumns.begin(), kRequiredColumns.end(), name);
        it != kRequiredColumns.end()) {
      index_of[static_cast<std::size_t>(it - kRequiredColumns.begin())] = c;
    } else if (name == kReportedColumns[0]) {
      reported_index[0] = c;
    } else if (name == kReportedColumns[1]) {
      reported_index[1] = c;
    } else if (!contains(kAnnotationColumns, name)) {
      throw ParseError(fmt::format("unknown column '{}'", name), 0, name);
    }
  }
  for (std::size_t k = 0; k < kRequiredColumns.size(); ++k) {
    if (index_of[k] == header.size()) {
      throw ParseError(fmt::format("missing column '{}'", kRequiredColumns[k]), 0,
                       std::string(kRequiredColumns[k]));
    }
  }
  if (rows.size() == 1) throw ParseError("empty input: header without data rows");

  std::vector<DatasetRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r].cells;
    const std::size_t row = r;
    if (cells.size() != header.size()) {
      throw ParseError(fmt::format("row {}: expected {} fields, found {}", row, header.size(),
                                   cells.size()),
                       row);
    }
    const auto cell = [&](std::size_t k) -> const std::string& { return cells[index_of[k]]; };

    DatasetRecord rec;
    rec.dataset = cell(0);
    if (rec.dataset.empty()) fail(row, "dataset", "missing dataset label");
    rec.modality = cell(1);
    if (rec.modality.empty()) fail(row, "modality", "missing modality");
    if (!is_missing(cell(2))) rec.sessions = cell(2);
    if (!is_missing(cell(3))) rec.ids = with_context(row, "ids", [&] { return parse_count(cell(3)); });
    rec.imp_comparisons = required_count(row, "imp_comparisons", cell(4));
    rec.gen_comparisons = required_count(row, "gen_comparisons", cell(5));
    rec.fnmr_pct = percent(row, "fnmr_pct", cell(6));
    rec.fmr_pct = percent(row, "fmr_pct", cell(7));
    if (!is_missing(cell(8))) rec.source = cell(8);
    for (std::size_t k = 0; k < 2; ++k) {
      if (reported_index[k] == header.size() || is_missing(cells[reported_index[k]])) continue;
      auto reported = with_context(row, kReportedColumns[k],
                                   [&] { return ReportedDelta::parse(cells[reported_index[k]]); });
      (k == 0 ? rec.reported_delta_fnmr : rec.reported_delta_fmr) = reported;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::optional<std::string> optional_text(const json& obj, std::size_t row, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    return is_missing(s) ? std::nullopt : std::optional<std::string>(s);
  }
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  fail(row, key, "expected text");
}

std::string required_text(const json& obj, std::size_t row, std::string_view key) {
  auto value = optional_text(obj, row, key);
  if (!value || value->empty()) fail(row, key, "missing value");
  return *value;
}

std::optional<Count> json_count(const json& obj, std::size_t row, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return it->get<Count>();
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    if (is_missing(s)) return std::nullopt;
    return with_context(row, key, [&] { return parse_count(s); });
  }
  fail(row, key, "expected an integer count");
}

double json_percent(const json& obj, std::size_t row, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) fail(row, key, "missing rate");
  if (!it->is_number()) fail(row, key, "expected a number");
  const double value = it->get<double>();
  if (!(value >= 0.0 && value <= 100.0)) {
    fail(row, key, fmt::format("percentage must lie in [0, 100], got {}", value));
  }
  return value;
}

std::vector<DatasetRecord> parse_json_table(std::string_view input) {
  json doc;
  try {
    doc = json::parse(input);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("invalid JSON: {}", e.what()));
  }
  const json* rows = &doc;
  if (doc.is_object()) {
    const auto it = doc.find("rows");
    if (it == doc.end()) throw ParseError("JSON object input needs a \"rows\" array");
    rows = &*it;
  }
  if (!rows->is_array()) throw ParseError("JSON input must be an array of records");
  if (rows->empty()) throw ParseError("empty input");

  std::vector<DatasetRecord> records;
  std::size_t row = 0;
  for (const auto& obj : *rows) {
    ++row;
    if (!obj.is_object()) throw ParseError(fmt::format("row {}: expected an object", row), row);
    for (const auto& [key, _] : obj.items()) {
      if (!contains(kRequiredColumns, key) && !contains(kReportedColumns, key) &&
          !contains(kAnnotationColumns, key)) {
        fail(row, key, "unknown field");
      }
    }
    DatasetRecord rec;
    rec.dataset = required_text(obj, row, "dataset");
    rec.modality = required_text(obj, row, "modality");
    rec.sessions = optional_text(obj, row, "sessions");
    rec.ids = json_count(obj, row, "ids");
    const auto imp = json_count(obj, row, "imp_comparisons");
    const auto gen = json_count(obj, row, "gen_comparisons");
    if (!imp) fail(row, "imp_comparisons", "missing count");
    if (!gen) fail(row, "gen_comparisons", "missing count");
    if (*imp < 1) fail(row, "imp_comparisons", "comparison count must be at least 1");
    if (*gen < 1) fail(row, "gen_comparisons", "comparison count must be at least 1");
    rec.imp_comparisons = *imp;
    rec.gen_comparisons = *gen;
    rec.fnmr_pct = json_percent(obj, row, "fnmr_pct");
    rec.fmr_pct = json_percent(obj, row, "fmr_pct");
    rec.source = optional_text(obj, row, "source");
    for (std::size_t k = 0; k < 2; ++k) {
      const auto it = obj.find(std::string(kReportedColumns[k]));
      if (it == obj.end() || it->is_null()) continue;
      const std::string text = it->is_string() ? it->get<std::string>() : it->dump();
      auto reported = with_context(row, kReportedColumns[k], [&] { return ReportedDelta::parse(text); });
      (k == 0 ? rec.reported_delta_fnmr : rec.reported_delta_fmr) = reported;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

MetricAudit audit_metric(Count comparisons, double rate_pct, double alpha, double rule_delta) {
  MetricAudit m;
  m.comparisons = comparisons;
  m.rate = rate_pct / 100.0;
  m.uncertainty = bioquake(ErrorObservation::from_rate(comparisons, m.rate, alpha));
  m.min_error = min_reportable_error(comparisons, rule_delta, alpha);
  m.min_error_display = format_min_error(m.min_error);
  return m;
}

bool exceeds(std::optional<double> delta, double threshold) { return !delta || *delta > threshold; }

std::string compact_count(Count n) {
  const auto scaled = [&](double div, char suffix) {
    return fmt::format("{:.4g}{}", static_cast<double>(n) / div, suffix);
  };
  if (n >= 1'000'000'000) return scaled(1e9, 'B');
  if (n >= 1'000'000) return scaled(1e6, 'M');
  if (n >= 10'000) return scaled(1e3, 'K');
  return std::to_string(n);
}

json delta_json(std::optional<double> delta) {
  return {{"value", delta ? json(*delta) : json(nullptr)}, {"display", display_delta(delta)}};
}

json record_json(const DatasetRecord& r) {
  json obj;
  obj["dataset"] = r.dataset;
  obj["modality"] = r.modality;
  obj["sessions"] = r.sessions ? json(*r.sessions) : json(nullptr);
  obj["ids"] = r.ids ? json(*r.ids) : json(nullptr);
  obj["imp_comparisons"] = r.imp_comparisons;
  obj["gen_comparisons"] = r.gen_comparisons;
  obj["fnmr_pct"] = r.fnmr_pct;
  obj["fmr_pct"] = r.fmr_pct;
  obj["source"] = r.source ? json(*r.source) : json(nullptr);
  if (r.reported_delta_fnmr) obj["reported_delta_fnmr"] = r.reported_delta_fnmr->to_string();
  if (r.reported_delta_fmr) obj["reported_delta_fmr"] = r.reported_delta_fmr->to_string();
  return obj;
}

json counts_json(const ExceedanceCounts& c) {
  return {{"fnmr_delta_above_0.3", c.fnmr_above_030},
          {"fnmr_delta_above_0.5", c.fnmr_above_050},
          {"fmr_delta_above_0.3", c.fmr_above_030},
          {"fmr_delta_above_0.5", c.fmr_above_050}};
}

std::vector<std::string> summary_lines(const AuditSummary& s) {
  const auto line = [&](std::string_view metric, double threshold, std::size_t computed,
                        std::optional<std::size_t> reported) {
    std::string out = fmt::format("{} rows with delta > {}: {}/{} recomputed", metric, threshold,
                                  computed, s.rows);
    if (reported) out += fmt::format(", {}/{} as reported", *reported, s.rows);
    return out;
  };
  const auto rep = [&](auto member) -> std::optional<std::size_t> {
    if (!s.reported) return std::nullopt;
    return (*s.reported).*member;
  };
  return {line("FNMR", 0.3, s.computed.fnmr_above_030, rep(&ExceedanceCounts::fnmr_above_030)),
          line("FNMR", 0.5, s.computed.fnmr_above_050, rep(&ExceedanceCounts::fnmr_above_050)),
          line("FMR", 0.3, s.computed.fmr_above_030, rep(&ExceedanceCounts::fmr_above_030)),
          line("FMR", 0.5, s.computed.fmr_above_050, rep(&ExceedanceCounts::fmr_above_050))};
}

std::string class_cell(const MetricAudit& m) {
  const auto c = m.uncertainty.certainty_class;
  std::string out = fmt::format("{} ({})", class_label(c), class_name(c));
  if (!m.delta()) out += ", undefined";
  return out;
}

std::string legend_line() {
  std::string out = "Legend:";
  for (int i = 0; i <= static_cast<int>(CertaintyClass::F); ++i) {
    const auto c = static_cast<CertaintyClass>(i);
    out += fmt::format(" {}={} [{}]", class_label(c), class_name(c), class_color(c));
    if (c != CertaintyClass::F) out += ',';
  }
  return out;
}

std::vector<std::vector<std::string>> display_rows(const std::vector<AuditResult>& results) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Dataset", "Modality", "#S", "IDs", "Imp", "Gen", "FNMR [%]", "delta_FNMR",
                  "Class FNMR", "FMR [%]", "delta_FMR", "Class FMR", "Min err FNMR",
                  "Min err FMR"});
  for (const auto& r : results) {
    const auto& rec = r.record;
    rows.push_back({rec.dataset, rec.modality, rec.sessions.value_or("NA"),
                    rec.ids ? compact_count(*rec.ids) : "NA", compact_count(rec.imp_comparisons),
                    compact_count(rec.gen_comparisons), fmt::format("{:g}", rec.fnmr_pct),
                    display_delta(r.fnmr.delta()), class_cell(r.fnmr), fmt::format("{:g}", rec.fmr_pct),
                    display_delta(r.fmr.delta()), class_cell(r.fmr), r.fnmr.min_error_display,
                    r.fmr.min_error_display});
  }
  return rows;
}

std::string render_markdown(const std::vector<AuditResult>& results) {
  const auto rows = display_rows(results);
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += "|";
    for (const auto& cell : rows[i]) out += " " + cell + " |";
    out += "\n";
    if (i == 0) {
      out += "|";
      for (std::size_t c = 0; c < rows[i].size(); ++c) out += "---|";
      out += "\n";
    }
  }
  out += "\n" + legend_line() + "\n\n";
  for (const auto& line : summary_lines(summarize(results))) out += "- " + line + "\n";
  return out;
}

// Display width in code points, so "≥1" and "×10⁻²" align.
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::string render_text(const std::vector<AuditResult>& results) {
  const auto rows = display_rows(results);
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - display_width(row[c]) + 2, ' ');
    }
    out += line + "\n";
  }
  out += "\n" + legend_line() + "\n";
  for (const auto& line : summary_lines(summarize(results))) out += line + "\n";
  return out;
}

std::string render_csv(const std::vector<AuditResult>& results) {
  const bool with_reported = std::any_of(results.begin(), results.end(), [](const AuditResult& r) {
    return r.record.reported_delta_fnmr || r.record.reported_delta_fmr;
  });
  std::string out;
  for (std::size_t k = 0; k < kRequiredColumns.size(); ++k) {
    out += (k ? "," : "") + std::string(kRequiredColumns[k]);
  }
  if (with_reported) out += ",reported_delta_fnmr,reported_delta_fmr";
  out += ",delta_fnmr,class_fnmr,delta_fmr,class_fmr,min_err_fnmr,min_err_fmr\n";

  const auto delta_cell = [](std::optional<double> d) { return d ? format_real(*d) : std::string("inf"); };
  const auto reported_cell = [](const std::optional<ReportedDelta>& d) {
    return d ? d->to_string() : std::string("NA");
  };
  for (const auto& r : results) {
    const auto& rec = r.record;
    out += fmt::format("{},{},{},{},{},{},{},{},{}", csv_escape(rec.dataset), csv_escape(rec.modality),
                       csv_escape(rec.sessions.value_or("NA")),
                       rec.ids ? std::to_string(*rec.ids) : "NA", rec.imp_comparisons,
                       rec.gen_comparisons, format_real(rec.fnmr_pct), format_real(rec.fmr_pct),
                       csv_escape(rec.source.value_or("NA")));
    if (with_reported) {
      out += "," + reported_cell(rec.reported_delta_fnmr) + "," + reported_cell(rec.reported_delta_fmr);
    }
    out += fmt::format(",{},{},{},{},{},{}\n", delta_cell(r.fnmr.delta()),
                       class_label(r.fnmr.uncertainty.certainty_class), delta_cell(r.fmr.delta()),
                       class_label(r.fmr.uncertainty.certainty_class), format_real(r.fnmr.min_error),
                       format_real(r.fmr.min_error));
  }
  for (const auto& line : summary_lines(summarize(results))) out += "# " + line + "\n";
  return out;
}

std::string render_json(const std::vector<AuditResult>& results) {
  json rows = json::array();
  for (const auto& r : results) {
    json obj = record_json(r.record);
    obj["delta_fnmr"] = delta_json(r.fnmr.delta());
    obj["class_fnmr"] = class_label(r.fnmr.uncertainty.certainty_class);
    obj["delta_fmr"] = delta_json(r.fmr.delta());
    obj["class_fmr"] = class_label(r.fmr.uncertainty.certainty_class);
    obj["min_err_fnmr"] = r.fnmr.min_error;
    obj["min_err_fmr"] = r.fmr.min_error;
    obj["min_err_fnmr_display"] = r.fnmr.min_error_display;
    obj["min_err_fmr_display"] = r.fmr.min_error_display;
    rows.push_back(std::move(obj));
  }
  const auto s = summarize(results);
  json summary = {{"rows", s.rows}, {"recomputed", counts_json(s.computed)}};
  summary["reported"] = s.reported ? counts_json(*s.reported) : json(nullptr);
  json doc = {{"schema_version", "1"}, {"rows", std::move(rows)}, {"summary", std::move(summary)}};
  return doc.dump(2) + "\n";
}

}  // namespace

ReportedDelta ReportedDelta::parse(std::string_view text) {
  if (text == ">1" || text == "&gt;1") return {std::nullopt, true};
  const double value = parse_real(text);
  if (!(value >= 0.0)) throw ParseError(fmt::format("reported delta must be non-negative, got '{}'", text));
  return {value, false};
}

bool ReportedDelta::above(double threshold) const {
  return exceeds_one ? threshold < 1.0 : (value && *value > threshold);
}

std::string ReportedDelta::to_string() const { return exceeds_one ? ">1" : format_real(*value); }

void DatasetRecord::validate() const {
  if (imp_comparisons < 1) throw DomainError("imp_comparisons must be at least 1");
  if (gen_comparisons < 1) throw DomainError("gen_comparisons must be at least 1");
  if (!(fnmr_pct >= 0.0 && fnmr_pct <= 100.0)) throw DomainError("fnmr_pct must lie in [0, 100]");
  if (!(fmr_pct >= 0.0 && fmr_pct <= 100.0)) throw DomainError("fmr_pct must lie in [0, 100]");
}

TableFormat parse_table_format(std::string_view name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "json") return TableFormat::json;
  if (name == "markdown" || name == "md") return TableFormat::markdown;
  if (name == "text") return TableFormat::text;
  throw DomainError(fmt::format("unknown format '{}'", name));
}

std::string_view to_string(TableFormat format) {
  switch (format) {
    case TableFormat::csv:
      return "csv";
    case TableFormat::json:
      return "json";
    case TableFormat::markdown:
      return "markdown";
    case TableFormat::text:
      return "text";
  }
  return "unknown";
}

std::vector<DatasetRecord> parse_dataset_table(std::string_view input, TableFormat format) {
  if (input.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ParseError("empty input");
  switch (format) {
    case TableFormat::csv:
      return parse_csv_table(input);
    case TableFormat::json:
      return parse_json_table(input);
    default:
      throw DomainError(fmt::format("cannot parse dataset tables from {}", to_string(format)));
  }
}

AuditResult audit_record(const DatasetRecord& record, double alpha, double rule_delta) {
  record.validate();
  AuditResult result;
  result.record = record;
  result.fnmr = audit_metric(record.gen_comparisons, record.fnmr_pct, alpha, rule_delta);
  result.fmr = audit_metric(record.imp_comparisons, record.fmr_pct, alpha, rule_delta);
  return result;
}

std::vector<AuditResult> audit_table(const std::vector<DatasetRecord>& records, double alpha,
                                     double rule_delta) {
  std::vector<AuditResult> results;
  results.reserve(records.size());
  for (const auto& rec : records) results.push_back(audit_record(rec, alpha, rule_delta));
  return results;
}

AuditSummary summarize(const std::vector<AuditResult>& results) {
  AuditSummary s;
  s.rows = results.size();
  bool all_reported = !results.empty();
  ExceedanceCounts reported;
  for (const auto& r : results) {
    s.computed.fnmr_above_030 += exceeds(r.fnmr.delta(), 0.3);
    s.computed.fnmr_above_050 += exceeds(r.fnmr.delta(), 0.5);
    s.computed.fmr_above_030 += exceeds(r.fmr.delta(), 0.3);
    s.computed.fmr_above_050 += exceeds(r.fmr.delta(), 0.5);
    const auto& fnmr = r.record.reported_delta_fnmr;
    const auto& fmr = r.record.reported_delta_fmr;
    if (!fnmr || !fmr) {
      all_reported = false;
      continue;
    }
    reported.fnmr_above_030 += fnmr->above(0.3);
    reported.fnmr_above_050 += fnmr->above(0.5);
    reported.fmr_above_030 += fmr->above(0.3);
    reported.fmr_above_050 += fmr->above(0.5);
  }
  if (all_reported) s.reported = reported;
  return s;
}

std::string display_delta(std::optional<double> delta) {
  if (!delta) return "inf";
  if (*delta > 1.0) return ">1";
  return decimal_significant(*delta, 4);
}

std::string render_report(const std::vector<AuditResult>& results, TableFormat format) {
  if (results.empty()) throw DomainError("nothing to report: no audit results");
  switch (format) {
    case TableFormat::csv:
      return render_csv(results);
    case TableFormat::json:
      return render_json(results);
    case TableFormat::markdown:
      return render_markdown(results);
    case TableFormat::text:
      return render_text(results);
  }
  throw DomainError("unknown report format");
}

}  // namespace bioquake
