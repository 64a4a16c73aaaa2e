#include "bioquake/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bioquake/audit.hpp"
#include "bioquake/cli/envelope.hpp"
#include "bioquake/cli/server.hpp"
#include "bioquake/empirical.hpp"
#include "bioquake/table_io.hpp"

namespace bioquake::cli {

namespace {

void configure_logging() {
  static const bool done = [] {
    auto logger = spdlog::stderr_color_mt("bioquake");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("BIOQUAKE_LOG")) {
      const std::string level = env;
      if (level == "error" || level == "warn" || level == "info" || level == "debug") {
        spdlog::set_level(spdlog::level::from_str(level));
      } else {
        spdlog::warn("ignoring BIOQUAKE_LOG='{}'; use error, warn, info or debug", level);
      }
    }
    return true;
  }();
  (void)done;
}

Count parse_comparisons(const std::string& text, const char* flag) {
  try {
    return parse_count(text);
  } catch (const ParseError&) {
  }
  double v = 0.0;
  try {
    v = parse_real(text);
  } catch (const ParseError&) {
    throw DomainError(fmt::format("{}: '{}' is not a count", flag, text));
  }
  if (!(v >= 0.0 && v < 9.0e18) || v != std::floor(v)) {
    throw DomainError(fmt::format("{}: '{}' is not a whole count", flag, text));
  }
  return static_cast<Count>(v);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError(fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw DomainError(fmt::format("write to '{}' failed", path));
}

std::string num(double v) { return fmt::format("{:.6g}", v); }

std::vector<double> parse_real_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    try {
      out.push_back(parse_real(std::string_view(text).substr(start, end - start)));
    } catch (const ParseError& e) {
      throw DomainError(fmt::format("{}: {}", flag, e.what()));
    }
    start = end + 1;
  }
  return out;
}

// Options shared by every subcommand.
struct Common {
  bool json = false;
};

struct CalcArgs {
  std::string comparisons;
  std::optional<double> error_rate;
  std::optional<Count> errors;
  double confidence = 0.95;
};

struct PlanArgs {
  double error_rate = 0.0;
  double delta = 0.0;
  double confidence = 0.95;
  bool exact = false;
  bool approx = false;
  bool conservative = false;
};

struct MinErrorArgs {
  std::string comparisons;
  double delta = kSixPercentRule;
  double confidence = 0.95;
};

struct ClassifyArgs {
  std::string delta;
};

struct CurveArgs {
  std::string deltas = "0.01,0.061,0.1";
  double confidence = 0.95;
  std::string error_range = "0.0001:0.5";
  int points = 50;
  bool exact = false;
  std::string output;
};

struct AuditArgs {
  std::string input;
  std::string format = "text";
  std::string input_format;
  double confidence = 0.95;
  double rule_delta = kSixPercentRule;
};

struct ValidateArgs {
  std::string genuine;
  std::string impostor;
  std::optional<double> threshold;
  bool eer = false;
  std::optional<double> at_fmr;
  int grid = 0;
  std::string fracs = "0.1,0.01,0.001";
  Count reps = 10;
  double confidence = 0.95;
  std::uint64_t seed = 0;
  bool sem = false;
  bool lower_is_genuine = false;
  std::string csv;
};

struct SimulateArgs {
  SynthConfig cfg;
  std::string out_genuine;
  std::string out_impostor;
};

struct CoverageArgs {
  std::string comparisons;
  double p = 0.0;
  double confidence = 0.95;
  Count trials = 10000;
  std::uint64_t seed = 0;
};

struct ServeArgs {
  ServerOptions options;
  std::string static_dir;
};

int cmd_calc(const CalcArgs& a, const Common& c, std::ostream& out) {
  const double alpha = alpha_from_confidence(a.confidence);
  const Count n = parse_comparisons(a.comparisons, "--comparisons");
  if (!a.error_rate && !a.errors) throw CLI::RequiredError("--error-rate or --errors");
  const ErrorObservation obs =
      a.errors && a.error_rate ? ErrorObservation::from_counts_and_rate(n, *a.errors, *a.error_rate, alpha)
      : a.errors               ? ErrorObservation::from_counts(n, *a.errors, alpha)
                               : ErrorObservation::from_rate(n, *a.error_rate, alpha);
  const auto r = bioquake(obs);
  if (c.json) {
    OutputEnvelope env{"calc", {{"comparisons", n}, {"confidence", a.confidence}}, uncertainty_json(r), {}};
    if (a.error_rate) env.inputs["error_rate"] = *a.error_rate;
    if (a.errors) env.inputs["errors"] = *a.errors;
    if (!r.delta_defined()) env.warnings.push_back("error rate is 0: relative uncertainty is undefined");
    out << env.dump();
    return kOk;
  }
  out << fmt::format("comparisons        {}\n", r.comparisons);
  out << fmt::format("error rate         {}\n", num(r.rate));
  out << fmt::format("confidence         {}\n", num(1.0 - r.alpha));
  out << fmt::format("acceptance region  [{}, {}] errors\n", r.region.n_low, r.region.n_high);
  out << fmt::format("rate interval      [{}, {}]\n", num(r.interval_low), num(r.interval_high));
  out << fmt::format("Delta (absolute)   {}\n", num(r.delta_abs));
  out << fmt::format("delta (relative)   {}\n", r.delta_rel ? num(*r.delta_rel) : "undefined (rate is 0)");
  out << fmt::format("certainty class    {}\n", class_display(r.certainty_class));
  return kOk;
}

int cmd_plan(const PlanArgs& a, const Common& c, std::ostream& out) {
  PlanRequest req{a.error_rate, a.delta, alpha_from_confidence(a.confidence),
                  a.approx ? PlanMode::approx : PlanMode::exact, a.conservative};
  const Count n = required_comparisons(req);
  const json result = plan_json(req, n);
  if (c.json) {
    OutputEnvelope env{"plan",
                       {{"error_rate", a.error_rate},
                        {"delta", a.delta},
                        {"confidence", a.confidence},
                        {"mode", result["mode"]},
                        {"conservative", a.conservative}},
                       result,
                       {}};
    out << env.dump();
    return kOk;
  }
  out << fmt::format("required comparisons  {}\n", n);
  out << fmt::format("mode                  {}{}\n", result["mode"].get<std::string>(),
                     a.conservative ? " (conservative)" : "");
  out << fmt::format("achieved delta        {}\n", result["achieved_delta"]["display"].get<std::string>());
  out << fmt::format("rule constant         {}\n", num(result["rule_constant"].get<double>()));
  if (const auto rule = rule_name(a.delta)) out << fmt::format("rule of thumb         {}\n", *rule);
  return kOk;
}

int cmd_min_error(const MinErrorArgs& a, const Common& c, std::ostream& out) {
  const double alpha = alpha_from_confidence(a.confidence);
  const Count n = parse_comparisons(a.comparisons, "--comparisons");
  const double value = min_reportable_error(n, a.delta, alpha);
  if (c.json) {
    OutputEnvelope env{"min-error",
                       {{"comparisons", n}, {"delta", a.delta}, {"confidence", a.confidence}},
                       min_error_json(n, a.delta, alpha, value),
                       {}};
    out << env.dump();
    return kOk;
  }
  out << fmt::format("minimum reportable error  {} ({})\n", format_min_error(value), num(value));
  return kOk;
}

int cmd_classify(const ClassifyArgs& a, const Common& c, std::ostream& out) {
  std::optional<double> delta;
  if (a.delta != "undefined") {
    try {
      delta = parse_real(a.delta);
    } catch (const ParseError& e) {
      throw DomainError(fmt::format("--delta: {}", e.what()));
    }
  }
  const auto cls = classify(delta);
  if (c.json) {
    OutputEnvelope env{"classify",
                       {{"delta", delta ? json(*delta) : json(nullptr)}},
                       {{"class", class_label(cls)},
                        {"class_name", class_name(cls)},
                        {"class_color", class_hex(cls)},
                        {"display", class_display(cls)}},
                       {}};
    out << env.dump();
    return kOk;
  }
  out << class_display(cls) << "\n";
  return kOk;
}

int cmd_curve(const CurveArgs& a, const Common& c, std::ostream& out) {
  CurveSpec spec;
  spec.deltas = parse_real_list(a.deltas, "--deltas");
  spec.alpha = alpha_from_confidence(a.confidence);
  const auto colon = a.error_range.find(':');
  if (colon == std::string::npos) throw DomainError("--error-range must look like LO:HI");
  try {
    spec.error_low = parse_real(std::string_view(a.error_range).substr(0, colon));
    spec.error_high = parse_real(std::string_view(a.error_range).substr(colon + 1));
  } catch (const ParseError& e) {
    throw DomainError(fmt::format("--error-range: {}", e.what()));
  }
  spec.points = a.points;
  spec.mode = a.exact ? PlanMode::exact : PlanMode::approx;
  const auto rows = curve(spec);
  const std::string csv = curve_csv(rows);
  if (!a.output.empty()) write_output(a.output, csv);
  if (c.json) {
    OutputEnvelope env{"curve",
                       {{"deltas", spec.deltas},
                        {"confidence", a.confidence},
                        {"error_low", spec.error_low},
                        {"error_high", spec.error_high},
                        {"points", spec.points},
                        {"mode", a.exact ? "exact" : "approx"}},
                       {{"rows", curve_json(rows)}},
                       {}};
    if (!a.output.empty()) env.inputs["output"] = a.output;
    out << env.dump();
  } else if (a.output.empty()) {
    out << csv;
  } else {
    out << fmt::format("wrote {} rows to {}\n", rows.size(), a.output);
  }
  return kOk;
}

int cmd_audit(const AuditArgs& a, const Common& c, std::ostream& out) {
  const auto report_format = parse_table_format(a.format);
  std::string in_format = a.input_format;
  if (in_format.empty()) {
    const bool is_json = a.input.size() >= 5 && a.input.substr(a.input.size() - 5) == ".json";
    in_format = is_json ? "json" : "csv";
  }
  const auto input_format = parse_table_format(in_format);
  const auto records = parse_dataset_table(read_input(a.input), input_format);
  spdlog::info("parsed {} records from {}", records.size(), a.input);
  const auto results = audit_table(records, alpha_from_confidence(a.confidence), a.rule_delta);
  if (c.json) {
    OutputEnvelope env{"audit",
                       {{"input", a.input},
                        {"input_format", in_format},
                        {"confidence", a.confidence},
                        {"rule_delta", a.rule_delta}},
                       json::parse(render_report(results, TableFormat::json)),
                       {}};
    const auto s = summarize(results);
    const std::size_t undefined = static_cast<std::size_t>(std::count_if(
        results.begin(), results.end(), [](const AuditResult& r) { return !r.fnmr.delta() || !r.fmr.delta(); }));
    if (undefined) env.warnings.push_back(fmt::format("{} of {} rows report a zero rate", undefined, s.rows));
    out << env.dump();
    return kOk;
  }
  out << render_report(results, report_format);
  return kOk;
}

int cmd_validate(const ValidateArgs& a, const Common& c, std::ostream& out) {
  ScoreSet scores = load_scores(a.genuine, a.impostor);
  scores.higher_is_genuine = !a.lower_is_genuine;
  SubsampleConfig cfg;
  cfg.fracs = parse_real_list(a.fracs, "--fracs");
  cfg.repetitions = a.reps;
  cfg.alpha = alpha_from_confidence(a.confidence);
  cfg.seed = a.seed;
  cfg.divide_by_sqrt_reps = a.sem;

  std::vector<double> thresholds;
  std::string threshold_source;
  if (a.threshold) {
    thresholds = {*a.threshold};
    threshold_source = "fixed";
  } else if (a.at_fmr) {
    thresholds = {threshold_at_fmr(scores, *a.at_fmr).threshold};
    threshold_source = "at-fmr";
  } else if (a.grid > 0) {
    thresholds = threshold_grid(scores, a.grid);
    threshold_source = "grid";
  } else {
    thresholds = {eer_threshold(scores).threshold};
    threshold_source = "eer";
  }
  const auto results = sweep(scores, thresholds, cfg);

  std::vector<std::string> warnings;
  const auto corr = [&](std::optional<Metric> metric) -> std::optional<double> {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& r : results) {
      if (!metric || r.metric == *metric) pairs.emplace_back(r.empirical_margin, r.theoretical_margin);
    }
    try {
      return correlation(pairs);
    } catch (const DomainError& e) {
      warnings.push_back(fmt::format("{} correlation: {}", metric ? to_string(*metric) : "overall", e.what()));
      return std::nullopt;
    }
  };
  const auto r_all = corr(std::nullopt);
  const auto r_fmr = corr(Metric::fmr);
  const auto r_fnmr = corr(Metric::fnmr);

  if (!a.csv.empty()) {
    std::string csv = "threshold,frac,metric,subsample_size,mean_rate,empirical_margin,theoretical_margin\n";
    for (const auto& r : results) {
      csv += fmt::format("{},{},{},{},{},{},{}\n", format_real(r.threshold), format_real(r.frac),
                         to_string(r.metric), r.subsample_size, format_real(r.mean_rate),
                         format_real(r.empirical_margin), format_real(r.theoretical_margin));
    }
    write_output(a.csv, csv);
  }

  const auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  if (c.json) {
    json rows = json::array();
    for (const auto& r : results) rows.push_back(subsample_json(r));
    OutputEnvelope env{"validate",
                       {{"genuine", a.genuine},
                        {"impostor", a.impostor},
                        {"threshold_source", threshold_source},
                        {"thresholds", thresholds},
                        {"fracs", cfg.fracs},
                        {"reps", cfg.repetitions},
                        {"confidence", a.confidence},
                        {"seed", a.seed},
                        {"sem", a.sem}},
                       {{"genuine_count", scores.genuine.size()},
                        {"impostor_count", scores.impostor.size()},
                        {"results", rows},
                        {"correlation", {{"overall", opt(r_all)}, {"fmr", opt(r_fmr)}, {"fnmr", opt(r_fnmr)}}}},
                       warnings};
    out << env.dump();
    return kOk;
  }
  out << fmt::format("{} genuine, {} impostor scores; threshold source: {}\n", scores.genuine.size(),
                     scores.impostor.size(), threshold_source);
  out << fmt::format("{:>12}  {:>8}  {:>5}  {:>9}  {:>12}  {:>12}  {:>12}\n", "threshold", "frac", "metric",
                     "size", "mean rate", "empirical", "theoretical");
  for (const auto& r : results) {
    out << fmt::format("{:>12}  {:>8}  {:>5}  {:>9}  {:>12}  {:>12}  {:>12}\n", num(r.threshold), num(r.frac),
                       to_string(r.metric), r.subsample_size, num(r.mean_rate), num(r.empirical_margin),
                       num(r.theoretical_margin));
  }
  const auto show = [&](std::optional<double> v) { return v ? num(*v) : std::string("undefined"); };
  out << fmt::format("Pearson r: overall {}, FMR {}, FNMR {}\n", show(r_all), show(r_fmr), show(r_fnmr));
  for (const auto& w : warnings) spdlog::warn("{}", w);
  return kOk;
}

int cmd_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
  const ScoreSet scores = synthesize_scores(a.cfg);
  write_score_file(a.out_genuine, scores.genuine);
  write_score_file(a.out_impostor, scores.impostor);
  const auto op = eer_threshold(scores);
  if (c.json) {
    const auto& cfg = a.cfg;
    OutputEnvelope env{"simulate",
                       {{"subjects", cfg.subjects},
                        {"samples", cfg.samples_per_subject},
                        {"genuine_mean", cfg.genuine_mean},
                        {"genuine_std", cfg.genuine_std},
                        {"impostor_mean", cfg.impostor_mean},
                        {"impostor_std", cfg.impostor_std},
                        {"subject_effect_std", cfg.subject_effect_std},
                        {"seed", cfg.seed},
                        {"pair_cap", cfg.pair_cap},
                        {"sample_pairs", cfg.sample_pairs},
                        {"out_genuine", a.out_genuine},
                        {"out_impostor", a.out_impostor}},
                       {{"genuine_count", scores.genuine.size()},
                        {"impostor_count", scores.impostor.size()},
                        {"eer_threshold", op.threshold},
                        {"eer", op.eer}},
                       {}};
    out << env.dump();
    return kOk;
  }
  out << fmt::format("wrote {} genuine scores to {}\n", scores.genuine.size(), a.out_genuine);
  out << fmt::format("wrote {} impostor scores to {}\n", scores.impostor.size(), a.out_impostor);
  out << fmt::format("EER {} at threshold {}\n", num(op.eer), num(op.threshold));
  return kOk;
}

int cmd_coverage(const CoverageArgs& a, const Common& c, std::ostream& out) {
  const Count n = parse_comparisons(a.comparisons, "--comparisons");
  const auto r = coverage_experiment(n, a.p, alpha_from_confidence(a.confidence), a.trials, a.seed);
  if (c.json) {
    OutputEnvelope env{"coverage",
                       {{"comparisons", n},
                        {"p", a.p},
                        {"confidence", a.confidence},
                        {"trials", a.trials},
                        {"seed", a.seed}},
                       coverage_json(r),
                       {}};
    if (static_cast<double>(n) * a.p < 5.0) env.warnings.push_back("N*p < 5: coverage is erratic at small counts");
    out << env.dump();
    return kOk;
  }
  out << fmt::format("coverage {} ({} of {} trials, nominal {})\n", num(r.coverage), r.covered, r.trials,
                     num(a.confidence));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();

  CLI::App app{"Reliability of biometric error rates: exact binomial uncertainty, planning and audits",
               "bioquake"};
  app.set_version_flag("--version", BIOQUAKE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--json", common.json, "Emit one JSON envelope instead of human-readable text");

  CalcArgs calc;
  auto* calc_cmd = app.add_subcommand("calc", "Uncertainty and certainty class of a measured error rate");
  calc_cmd->add_option("--comparisons", calc.comparisons, "Number of comparisons N (45000, 45K, 4.2M)")->required();
  calc_cmd->add_option("--error-rate", calc.error_rate, "Observed error rate as a fraction");
  calc_cmd->add_option("--errors", calc.errors, "Observed error count");
  calc_cmd->add_option("--confidence", calc.confidence, "Confidence level")->capture_default_str();

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Comparisons needed to reach a target delta");
  plan_cmd->add_option("--error-rate", plan.error_rate, "Expected error rate as a fraction")->required();
  plan_cmd->add_option("--delta", plan.delta, "Target relative uncertainty")->required();
  plan_cmd->add_option("--confidence", plan.confidence, "Confidence level")->capture_default_str();
  auto* exact_flag = plan_cmd->add_flag("--exact", plan.exact, "Exact binomial search (default)");
  auto* approx_flag = plan_cmd->add_flag("--approx", plan.approx, "Closed-form normal approximation");
  exact_flag->excludes(approx_flag);
  plan_cmd->add_flag("--conservative", plan.conservative, "Smallest N after which every sampled N' <= 4N also meets the target")
      ->excludes(approx_flag);

  MinErrorArgs min_error;
  auto* min_cmd = app.add_subcommand("min-error", "Smallest error rate reportable with a given number of comparisons");
  min_cmd->add_option("--comparisons", min_error.comparisons, "Number of comparisons")->required();
  min_cmd->add_option("--delta", min_error.delta, "Target relative uncertainty")->capture_default_str();
  min_cmd->add_option("--confidence", min_error.confidence, "Confidence level")->capture_default_str();

  ClassifyArgs classify_args;
  auto* classify_cmd = app.add_subcommand("classify", "Certainty class of a relative uncertainty");
  classify_cmd->add_option("--delta", classify_args.delta, "Relative uncertainty, or 'undefined'")->required();

  CurveArgs curve_args;
  auto* curve_cmd = app.add_subcommand("curve", "Required comparisons over a log-spaced error-rate grid (CSV)");
  curve_cmd->add_option("--deltas", curve_args.deltas, "Comma-separated target deltas")->capture_default_str();
  curve_cmd->add_option("--confidence", curve_args.confidence, "Confidence level")->capture_default_str();
  curve_cmd->add_option("--error-range", curve_args.error_range, "LO:HI with 0 < LO < HI <= 0.5")->capture_default_str();
  curve_cmd->add_option("--points", curve_args.points, "Grid points per delta")->capture_default_str();
  curve_cmd->add_flag("--exact", curve_args.exact, "Exact binomial search instead of the closed form");
  curve_cmd->add_option("--output", curve_args.output, "Write the CSV here instead of stdout");

  AuditArgs audit_args;
  auto* audit_cmd = app.add_subcommand("audit", "Annotate a table of published results");
  audit_cmd->add_option("--input", audit_args.input, "CSV or JSON table ('-' for stdin)")->required();
  audit_cmd->add_option("--format", audit_args.format, "csv, json, markdown or text")->capture_default_str();
  audit_cmd->add_option("--input-format", audit_args.input_format, "csv or json (default: from extension)");
  audit_cmd->add_option("--confidence", audit_args.confidence, "Confidence level")->capture_default_str();
  audit_cmd->add_option("--rule-delta", audit_args.rule_delta, "Delta for the minimum-error column")
      ->capture_default_str();

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "Subsampling experiment: empirical vs theoretical margins");
  val_cmd->add_option("--genuine", val.genuine, "Genuine score file")->required();
  val_cmd->add_option("--impostor", val.impostor, "Impostor score file")->required();
  auto* t_opt = val_cmd->add_option("--threshold", val.threshold, "Fixed decision threshold");
  auto* eer_opt = val_cmd->add_flag("--eer", val.eer, "Threshold at the equal error rate (default)");
  auto* fmr_opt = val_cmd->add_option("--at-fmr", val.at_fmr, "Threshold with FMR at most this value");
  auto* grid_opt = val_cmd->add_option("--grid", val.grid, "Sweep this many thresholds between the score medians");
  t_opt->excludes(eer_opt)->excludes(fmr_opt)->excludes(grid_opt);
  eer_opt->excludes(fmr_opt)->excludes(grid_opt);
  fmr_opt->excludes(grid_opt);
  val_cmd->add_option("--fracs", val.fracs, "Comma-separated subsample fractions")->capture_default_str();
  val_cmd->add_option("--reps", val.reps, "Repetitions per fraction")->capture_default_str();
  val_cmd->add_option("--confidence", val.confidence, "Confidence level")->capture_default_str();
  val_cmd->add_option("--seed", val.seed, "Random seed")->capture_default_str();
  val_cmd->add_flag("--sem", val.sem, "Divide the empirical margin by sqrt(reps)");
  val_cmd->add_flag("--lower-is-genuine", val.lower_is_genuine, "Scores are distances: lower means match");
  val_cmd->add_option("--csv", val.csv, "Also write a flat CSV of the results");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize genuine and impostor score files");
  sim_cmd->add_option("--subjects", sim.cfg.subjects, "Number of subjects")->required();
  sim_cmd->add_option("--samples", sim.cfg.samples_per_subject, "Samples per subject")->required();
  sim_cmd->add_option("--genuine-mean", sim.cfg.genuine_mean)->capture_default_str();
  sim_cmd->add_option("--genuine-std", sim.cfg.genuine_std)->capture_default_str();
  sim_cmd->add_option("--impostor-mean", sim.cfg.impostor_mean)->capture_default_str();
  sim_cmd->add_option("--impostor-std", sim.cfg.impostor_std)->capture_default_str();
  sim_cmd->add_option("--subject-effect-std", sim.cfg.subject_effect_std, "Per-subject mean offset (0 = iid)")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.cfg.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--pair-cap", sim.cfg.pair_cap, "Maximum pairs per comparison type")->capture_default_str();
  sim_cmd->add_flag("--sample-pairs", sim.cfg.sample_pairs, "Sample pair-cap pairs when the cap is exceeded");
  sim_cmd->add_option("--out-genuine", sim.out_genuine, "Output file for genuine scores")->required();
  sim_cmd->add_option("--out-impostor", sim.out_impostor, "Output file for impostor scores")->required();

  CoverageArgs cov;
  auto* cov_cmd = app.add_subcommand("coverage", "Monte-Carlo coverage of the uncertainty interval");
  cov_cmd->add_option("--comparisons", cov.comparisons, "Number of comparisons N")->required();
  cov_cmd->add_option("--p", cov.p, "True error rate")->required();
  cov_cmd->add_option("--confidence", cov.confidence, "Confidence level")->capture_default_str();
  cov_cmd->add_option("--trials", cov.trials, "Number of trials")->capture_default_str();
  cov_cmd->add_option("--seed", cov.seed, "Random seed")->capture_default_str();

  ServeArgs srv;
  auto* serve_cmd = app.add_subcommand("serve", "JSON-over-HTTP API for the web calculator");
  serve_cmd->add_option("--port", srv.options.port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--bind", srv.options.bind, "Bind address")->capture_default_str();
  serve_cmd->add_option("--static-dir", srv.static_dir, "Directory served at /");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << BIOQUAKE_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsageError;
  }

  try {
    if (calc_cmd->parsed()) return cmd_calc(calc, common, out);
    if (plan_cmd->parsed()) return cmd_plan(plan, common, out);
    if (min_cmd->parsed()) return cmd_min_error(min_error, common, out);
    if (classify_cmd->parsed()) return cmd_classify(classify_args, common, out);
    if (curve_cmd->parsed()) return cmd_curve(curve_args, common, out);
    if (audit_cmd->parsed()) return cmd_audit(audit_args, common, out);
    if (val_cmd->parsed()) return cmd_validate(val, common, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, common, out);
    if (cov_cmd->parsed()) return cmd_coverage(cov, common, out);
    if (serve_cmd->parsed()) {
      if (!srv.static_dir.empty()) srv.options.static_dir = srv.static_dir;
      return serve(srv.options);
    }
  } catch (const CLI::RequiredError& e) {
    err << "error: " << e.what() << " is required\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  err << app.help();
  return kUsageError;
}

}  // namespace bioquake::cli
