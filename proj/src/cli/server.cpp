#include "bioquake/cli/server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <fmt/format.h>

#include "bioquake/table_io.hpp"

namespace bioquake::cli {

namespace {

constexpr int kMaxCurveRows = 20000;

struct FieldError {
  std::string message;
  std::optional<std::string> field;
};

ApiResponse bad_request(const FieldError& e) {
  return {400, {{"error", e.message}, {"field", e.field ? json(*e.field) : json(nullptr)}}};
}

json parse_body(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error&) {
    throw FieldError{"request body is not valid JSON", std::nullopt};
  }
  if (!doc.is_object()) throw FieldError{"request body must be a JSON object", std::nullopt};
  return doc;
}

double number_field(const json& doc, const char* key, std::optional<double> fallback = std::nullopt) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    if (fallback) return *fallback;
    throw FieldError{fmt::format("missing field '{}'", key), key};
  }
  if (!it->is_number()) throw FieldError{fmt::format("field '{}' must be a number", key), key};
  return it->get<double>();
}

Count count_field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) throw FieldError{fmt::format("missing field '{}'", key), key};
  Count n = 0;
  if (it->is_number_integer()) {
    n = it->get<Count>();
  } else if (it->is_string()) {
    try {
      n = parse_count(it->get<std::string>());
    } catch (const ParseError& e) {
      throw FieldError{e.what(), key};
    }
  } else {
    throw FieldError{fmt::format("field '{}' must be an integer", key), key};
  }
  if (n < 1) throw FieldError{fmt::format("field '{}' must be at least 1", key), key};
  return n;
}

double alpha_field(const json& doc) {
  const double c = number_field(doc, "confidence", 0.95);
  if (!(c > 0.0 && c < 1.0)) throw FieldError{"confidence must lie in (0, 1)", "confidence"};
  return 1.0 - c;
}

template <class Fn>
ApiResponse guarded(Fn&& fn) {
  try {
    return {200, fn()};
  } catch (const FieldError& e) {
    return bad_request(e);
  } catch (const std::exception& e) {
    return bad_request({e.what(), std::nullopt});
  }
}

std::string query_value(const std::multimap<std::string, std::string>& q, const char* key,
                        std::optional<std::string> fallback = std::nullopt) {
  const auto it = q.find(key);
  if (it != q.end()) return it->second;
  if (fallback) return *fallback;
  throw FieldError{fmt::format("missing parameter '{}'", key), key};
}

double query_real(const std::multimap<std::string, std::string>& q, const char* key,
                  std::optional<std::string> fallback = std::nullopt) {
  try {
    return parse_real(query_value(q, key, std::move(fallback)));
  } catch (const ParseError& e) {
    throw FieldError{e.what(), key};
  }
}

}  // namespace

ApiResponse api_uncertainty(const std::string& body) {
  return guarded([&] {
    const json doc = parse_body(body);
    const Count n = count_field(doc, "comparisons");
    const double alpha = alpha_field(doc);
    const bool has_errors = doc.contains("errors") && !doc["errors"].is_null();
    const bool has_rate = doc.contains("error_rate") && !doc["error_rate"].is_null();
    if (!has_errors && !has_rate) throw FieldError{"missing field 'error_rate'", "error_rate"};
    std::optional<Count> errors;
    if (has_errors) {
      if (!doc["errors"].is_number_integer() || doc["errors"].get<Count>() < 0) {
        throw FieldError{"field 'errors' must be a non-negative integer", "errors"};
      }
      errors = doc["errors"].get<Count>();
      if (*errors > n) throw FieldError{"errors cannot exceed comparisons", "errors"};
    }
    std::optional<double> rate;
    if (has_rate) {
      rate = number_field(doc, "error_rate");
      if (!(*rate >= 0.0 && *rate <= 1.0)) throw FieldError{"error_rate must lie in [0, 1]", "error_rate"};
    }
    ErrorObservation obs;
    try {
      obs = errors && rate ? ErrorObservation::from_counts_and_rate(n, *errors, *rate, alpha)
            : errors       ? ErrorObservation::from_counts(n, *errors, alpha)
                           : ErrorObservation::from_rate(n, *rate, alpha);
    } catch (const DomainError& e) {
      throw FieldError{e.what(), has_errors ? "errors" : "error_rate"};
    }
    return uncertainty_json(bioquake(obs));
  });
}

ApiResponse api_plan(const std::string& body) {
  return guarded([&] {
    const json doc = parse_body(body);
    PlanRequest req;
    req.error_rate = number_field(doc, "error_rate");
    if (!(req.error_rate > 0.0 && req.error_rate < 1.0)) {
      throw FieldError{"error_rate must lie in (0, 1)", "error_rate"};
    }
    req.target_delta = number_field(doc, "target_delta");
    if (!(req.target_delta > 0.0)) throw FieldError{"target_delta must be positive", "target_delta"};
    req.alpha = alpha_field(doc);
    const std::string mode = doc.value("mode", std::string("exact"));
    if (mode == "exact") {
      req.mode = PlanMode::exact;
    } else if (mode == "approx") {
      req.mode = PlanMode::approx;
    } else {
      throw FieldError{"mode must be 'exact' or 'approx'", "mode"};
    }
    req.conservative = doc.value("conservative", false);
    if (req.conservative && req.mode != PlanMode::exact) {
      throw FieldError{"conservative requires exact mode", "conservative"};
    }
    Count required = 0;
    try {
      required = required_comparisons(req);
    } catch (const DomainError& e) {
      throw FieldError{e.what(), "target_delta"};
    }
    return plan_json(req, required);
  });
}

ApiResponse api_min_error(const std::string& body) {
  return guarded([&] {
    const json doc = parse_body(body);
    const Count n = count_field(doc, "comparisons");
    const double delta = number_field(doc, "delta", kSixPercentRule);
    if (!(delta > 0.0)) throw FieldError{"delta must be positive", "delta"};
    const double alpha = alpha_field(doc);
    return min_error_json(n, delta, alpha, min_reportable_error(n, delta, alpha));
  });
}

ApiResponse api_curve(const std::multimap<std::string, std::string>& query) {
  return guarded([&] {
    CurveSpec spec;
    spec.deltas.clear();
    const std::string deltas = query_value(query, "deltas");
    std::size_t start = 0;
    while (start <= deltas.size()) {
      const auto end = std::min(deltas.find(',', start), deltas.size());
      try {
        spec.deltas.push_back(parse_real(std::string_view(deltas).substr(start, end - start)));
      } catch (const ParseError& e) {
        throw FieldError{e.what(), "deltas"};
      }
      start = end + 1;
    }
    for (const double d : spec.deltas) {
      if (!(d > 0.0)) throw FieldError{"deltas must be positive", "deltas"};
    }
    const double c = query_real(query, "confidence", "0.95");
    if (!(c > 0.0 && c < 1.0)) throw FieldError{"confidence must lie in (0, 1)", "confidence"};
    spec.alpha = 1.0 - c;
    spec.error_low = query_real(query, "lo");
    spec.error_high = query_real(query, "hi");
    if (!(spec.error_low > 0.0 && spec.error_low < spec.error_high && spec.error_high <= 0.5)) {
      throw FieldError{"need 0 < lo < hi <= 0.5", "lo"};
    }
    const double points = query_real(query, "points", "50");
    if (!(points >= 2 && points == std::floor(points))) {
      throw FieldError{"points must be an integer >= 2", "points"};
    }
    if (points * static_cast<double>(spec.deltas.size()) > kMaxCurveRows) {
      throw FieldError{fmt::format("at most {} curve rows per request", kMaxCurveRows), "points"};
    }
    spec.points = static_cast<int>(points);
    const std::string mode = query_value(query, "mode", "approx");
    if (mode != "approx" && mode != "exact") throw FieldError{"mode must be 'exact' or 'approx'", "mode"};
    spec.mode = mode == "exact" ? PlanMode::exact : PlanMode::approx;
    return curve_json(curve(spec));
  });
}

int serve(const ServerOptions& options) {
  httplib::Server server;
  const auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Post("/api/uncertainty", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, api_uncertainty(req.body));
  });
  server.Post("/api/plan", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, api_plan(req.body));
  });
  server.Post("/api/min-error", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, api_min_error(req.body));
  });
  server.Get("/api/curve", [&](const httplib::Request& req, httplib::Response& res) {
    std::multimap<std::string, std::string> query(req.params.begin(), req.params.end());
    reply(res, api_curve(query));
  });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
  if (options.static_dir && !server.set_mount_point("/", *options.static_dir)) {
    spdlog::error("static directory '{}' does not exist", *options.static_dir);
    return 1;
  }
  spdlog::info("listening on {}:{}", options.bind, options.port);
  if (!server.listen(options.bind, options.port)) {
    spdlog::error("cannot listen on {}:{}", options.bind, options.port);
    return 1;
  }
  return 0;
}

}  // namespace bioquake::cli
