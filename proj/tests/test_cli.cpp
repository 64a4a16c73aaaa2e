#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "bioquake/cli/commands.hpp"
#include "bioquake/cli/server.hpp"

using namespace bioquake::cli;
namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

json invoke_json(std::vector<std::string> args) {
  args.insert(args.begin(), "--json");
  const auto r = invoke(args);
  EXPECT_EQ(r.code, kOk) << r.err;
  return json::parse(r.out);
}

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("bioquake_cli_" + std::to_string(::getpid()) + "_" + name)).string();
}

}  // namespace

TEST(Cli, HelpListsEverySubcommand) {
  const auto r = invoke({"--help"});
  EXPECT_EQ(r.code, kOk);
  for (const char* sub : {"calc", "plan", "min-error", "classify", "curve", "audit", "validate", "simulate",
                          "coverage", "serve"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, Version) {
  const auto r = invoke({"--version"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out, std::string(BIOQUAKE_VERSION) + "\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kUsageError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsageError);
  EXPECT_EQ(invoke({"calc", "--error-rate", "0.1"}).code, kUsageError);
  EXPECT_EQ(invoke({"calc", "--comparisons", "100"}).code, kUsageError);
  EXPECT_EQ(invoke({"calc", "--comparisons", "0", "--error-rate", "0.1"}).code, kDomainError);
  EXPECT_EQ(invoke({"calc", "--comparisons", "100", "--error-rate", "1.5"}).code, kDomainError);
  EXPECT_EQ(invoke({"plan", "--error-rate", "0.01", "--delta", "0.1", "--approx", "--conservative"}).code,
            kUsageError);
  EXPECT_EQ(invoke({"audit", "--input", temp_path("absent.csv")}).code, kDomainError);
  const auto bad = invoke({"calc", "--comparisons", "100", "--error-rate", "2"});
  EXPECT_TRUE(bad.out.empty());
  EXPECT_NE(bad.err.find("error"), std::string::npos);
}

TEST(Cli, CalcHumanReadable) {
  const auto r = invoke({"calc", "--comparisons", "45000", "--error-rate", "0.02"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("[842, 959]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("B (Very Good)"), std::string::npos) << r.out;
}

TEST(Cli, CalcAcceptsSuffixedCounts) {
  const auto a = invoke_json({"calc", "--comparisons", "45K", "--error-rate", "0.02"});
  const auto b = invoke_json({"calc", "--comparisons", "45000", "--error-rate", "0.02"});
  EXPECT_EQ(a["result"], b["result"]);
  EXPECT_EQ(a["result"]["comparisons"], 45000);
}

TEST(Cli, CalcZeroRateWarns) {
  const auto j = invoke_json({"calc", "--comparisons", "1000", "--errors", "0"});
  EXPECT_EQ(j["result"]["class"], "F");
  EXPECT_TRUE(j["result"]["delta_rel"]["value"].is_null());
  EXPECT_EQ(j["warnings"].size(), 1u);
}

TEST(Cli, CalcJsonMatchesApi) {
  const auto cli = invoke_json({"calc", "--comparisons", "45000", "--error-rate", "0.02", "--confidence", "0.9"});
  const auto api = api_uncertainty(R"({"comparisons": 45000, "error_rate": 0.02, "confidence": 0.9})");
  ASSERT_EQ(api.status, 200);
  EXPECT_EQ(cli["command"], "calc");
  EXPECT_EQ(cli["result"], api.body);
}

TEST(Cli, PlanJsonMatchesApi) {
  for (const char* mode : {"exact", "approx"}) {
    std::vector<std::string> args{"plan", "--error-rate", "0.001", "--delta", "0.1"};
    if (std::string(mode) == "approx") args.push_back("--approx");
    const auto cli = invoke_json(args);
    const auto api = api_plan(fmt::format(R"({{"error_rate": 0.001, "target_delta": 0.1, "mode": "{}"}})", mode));
    ASSERT_EQ(api.status, 200);
    EXPECT_EQ(cli["result"], api.body) << mode;
  }
}

TEST(Cli, MinErrorJsonMatchesApi) {
  const auto cli = invoke_json({"min-error", "--comparisons", "11M"});
  const auto api = api_min_error(R"({"comparisons": "11M"})");
  ASSERT_EQ(api.status, 200);
  EXPECT_EQ(cli["result"], api.body);
}

TEST(Cli, CurveJsonMatchesApi) {
  const auto cli = invoke_json({"curve", "--deltas", "0.1,0.3", "--error-range", "0.001:0.1", "--points", "5"});
  const auto api = api_curve({{"deltas", "0.1,0.3"}, {"lo", "0.001"}, {"hi", "0.1"}, {"points", "5"}});
  ASSERT_EQ(api.status, 200);
  EXPECT_EQ(cli["result"]["rows"], api.body);
  EXPECT_EQ(cli["result"]["rows"].size(), 10u);
}

TEST(Cli, ClassifyUndefined) {
  const auto r = invoke({"classify", "--delta", "undefined"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_EQ(r.out.substr(0, 1), "F");
  EXPECT_EQ(invoke({"classify", "--delta", "abc"}).code, kDomainError);
}

TEST(Api, ValidationNamesTheField) {
  const auto check = [](const ApiResponse& r, const char* field) {
    EXPECT_EQ(r.status, 400);
    ASSERT_TRUE(r.body.contains("error"));
    EXPECT_EQ(r.body["field"], field) << r.body.dump();
  };
  check(api_uncertainty(R"({"error_rate": 0.1})"), "comparisons");
  check(api_uncertainty(R"({"comparisons": 0, "error_rate": 0.1})"), "comparisons");
  check(api_uncertainty(R"({"comparisons": 100, "error_rate": 1.5})"), "error_rate");
  check(api_uncertainty(R"({"comparisons": 100, "errors": 101})"), "errors");
  check(api_uncertainty(R"({"comparisons": 100, "error_rate": 0.1, "confidence": 1})"), "confidence");
  check(api_plan(R"({"error_rate": 0.1})"), "target_delta");
  check(api_plan(R"({"error_rate": 0.1, "target_delta": 0.1, "mode": "fast"})"), "mode");
  check(api_plan(R"({"error_rate": 0.1, "target_delta": 0.1, "mode": "approx", "conservative": true})"),
        "conservative");
  check(api_min_error(R"({"comparisons": "abc"})"), "comparisons");
  check(api_curve({{"deltas", "0.1"}, {"lo", "x"}, {"hi", "0.1"}}), "lo");
  check(api_curve({{"deltas", "-1"}, {"lo", "0.01"}, {"hi", "0.1"}}), "deltas");
  const auto malformed = api_uncertainty("{not json");
  EXPECT_EQ(malformed.status, 400);
  EXPECT_TRUE(malformed.body["field"].is_null());
}

TEST(Api, CurveRowLimit) {
  const auto r = api_curve({{"deltas", "0.1,0.2,0.3"}, {"lo", "0.001"}, {"hi", "0.1"}, {"points", "10000"}});
  EXPECT_EQ(r.status, 400);
}

TEST(Cli, SeededCommandsAreDeterministic) {
  const auto g = temp_path("g.txt");
  const auto i = temp_path("i.txt");
  const std::vector<std::string> sim{"--json",   "simulate",       "--subjects", "40", "--samples", "10",
                                     "--seed",   "3",              "--out-genuine", g, "--out-impostor", i};
  const auto s1 = invoke(sim);
  ASSERT_EQ(s1.code, kOk) << s1.err;
  std::ifstream f1(g);
  const std::string first((std::istreambuf_iterator<char>(f1)), {});
  const auto s2 = invoke(sim);
  std::ifstream f2(g);
  const std::string second((std::istreambuf_iterator<char>(f2)), {});
  EXPECT_EQ(s1.out, s2.out);
  EXPECT_EQ(first, second);

  const std::vector<std::string> val{"--json", "validate", "--genuine", g, "--impostor", i,
                                     "--fracs", "0.5,0.2",  "--seed",   "9"};
  const auto v1 = invoke(val);
  ASSERT_EQ(v1.code, kOk) << v1.err;
  EXPECT_EQ(v1.out, invoke(val).out);

  const std::vector<std::string> cov{"--json", "coverage", "--comparisons", "1000", "--p", "0.1", "--trials", "500",
                                     "--seed", "4"};
  const auto c1 = invoke(cov);
  ASSERT_EQ(c1.code, kOk) << c1.err;
  EXPECT_EQ(c1.out, invoke(cov).out);
  fs::remove(g);
  fs::remove(i);
}

TEST(Cli, AuditFormats) {
  const std::string input = std::string(BIOQUAKE_SOURCE_DIR) + "/data/published_results.csv";
  for (const char* format : {"csv", "json", "markdown", "text"}) {
    const auto r = invoke({"audit", "--input", input, "--format", format});
    EXPECT_EQ(r.code, kOk) << format << ": " << r.err;
    EXPECT_FALSE(r.out.empty());
  }
  const auto j = invoke_json({"audit", "--input", input});
  EXPECT_EQ(j["result"]["rows"].size(), 62u);
}
