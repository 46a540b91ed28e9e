#include "logbm/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace logbm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("logbm-test-" + name);
    fs::remove_all(p);
    return p;
}

InequalityReport fixture(Verdict v) {
    InequalityReport r;
    r.id = "f";
    r.verdict = v;
    return r;
}

const char* small_config = R"({
  "schema": 1,
  "seed": 3,
  "checks": [
    {"id": "eq", "kind": "log-bm", "bodies": ["ball", "ball"], "lambdas": [0.5], "samples": 500},
    {"id": "herm", "kind": "log-concavity",
     "family": {"family": "hermitian", "diag0": [1, 1, 1, 1], "diag1": [4, 4, 1, 1]},
     "lambdas": [0, 0.25, 0.5, 0.75, 1]},
    {"id": "none", "kind": "log-bm-2d", "bodies": ["sq", "sq"], "lambdas": []}
  ],
  "bodies": {"sq": {"kind": "cube", "dim": 2}}
})";

}  // namespace

TEST_CASE("json pointer lines") {
    const std::string text = "{\n  \"a\": 1,\n  \"b\": [\n    2,\n    {\"c\": 3}\n  ]\n}\n";
    const auto lines = json_pointer_lines(text);
    CHECK(lines.at("") == 1);
    CHECK(lines.at("/a") == 2);
    CHECK(lines.at("/b") == 3);
    CHECK(lines.at("/b/0") == 4);
    CHECK(lines.at("/b/1/c") == 5);
}

TEST_CASE("config validation") {
    SUBCASE("valid") {
        const ExperimentConfig c = parse_config(small_config);
        CHECK(c.checks.size() == 3);
        CHECK(c.seed == 3);
        // derived per-check seeds differ and do not depend on check order
        CHECK(c.checks[0].seed != c.checks[1].seed);
        CHECK(c.checks[0].volume.seed == c.checks[0].seed);
    }
    SUBCASE("missing seed is an error, not a default") {
        const std::string e = error_of(R"({"schema": 1, "checks": [{"id": "a", "kind": "santalo", "bodies": ["ball", "ball"]}]})");
        CHECK(e.find("cfg.json:1:") != std::string::npos);
        CHECK(e.find("seed") != std::string::npos);
    }
    SUBCASE("line-anchored diagnostics") {
        const std::string text =
            "{\n"
            "  \"schema\": 1,\n"
            "  \"seed\": 1,\n"
            "  \"checks\": [\n"
            "    {\"id\": \"a\", \"kind\": \"log-bm\",\n"
            "     \"bodies\": [\"ball\", \"nowhere\"],\n"
            "     \"lambdas\": [0.5,\n"
            "                 1.5]}\n"
            "  ]\n"
            "}\n";
        const std::string e = error_of(text);
        CHECK(e.find("cfg.json:6: /checks/0/bodies/1: unresolved body reference 'nowhere'") != std::string::npos);
        CHECK(e.find("cfg.json:8: /checks/0/lambdas/1") != std::string::npos);
    }
    SUBCASE("other schema problems") {
        CHECK(error_of(R"({"schema": 2, "seed": 1, "checks": []})").find("/schema") != std::string::npos);
        CHECK(error_of(R"({"schema": 1, "seed": 1, "checks": [{"id": "a", "kind": "magic"}]})").find("/checks/0/kind") !=
              std::string::npos);
        CHECK(error_of(R"({"schema": 1, "seed": 1, "checks": [{"id": "a", "kind": "santalo", "bodies": ["ball", "ball"]},
                                                              {"id": "a", "kind": "santalo", "bodies": ["ball", "ball"]}]})")
                  .find("duplicate") != std::string::npos);
        CHECK(error_of(R"({"schema": 1, "seed": 1, "checks": [{"id": "a b", "kind": "santalo", "bodies": ["ball", "ball"]}]})")
                  .find("/checks/0/id") != std::string::npos);
        CHECK(error_of(R"({"schema": 1, "seed": 1, "colour": 2, "checks": [{"id": "a", "kind": "santalo", "bodies": ["ball", "ball"]}]})")
                  .find("/colour: unknown field") != std::string::npos);
        CHECK(error_of("{\"schema\": 1,\n \"seed\": }").find("cfg.json:2:") != std::string::npos);
        CHECK(error_of(R"({"schema": 1, "seed": 1, "checks": [{"id": "a", "kind": "inclusion", "bodies": ["ball", "ball"], "lambdas": [0]}]})")
                  .find("strictly inside") != std::string::npos);
    }
}

TEST_CASE("exit codes from forced verdicts") {
    CHECK(exit_code({fixture(Verdict::holds), fixture(Verdict::holds_within_ci)}) == 0);
    CHECK(exit_code({fixture(Verdict::holds), fixture(Verdict::violated)}) == 2);
    CHECK(exit_code({fixture(Verdict::inconclusive), fixture(Verdict::holds)}) == 3);
    CHECK(exit_code({fixture(Verdict::inconclusive), fixture(Verdict::violated)}) == 2);
    CHECK(exit_code({}) == 0);
}

TEST_CASE("run and write outputs") {
    const ExperimentConfig cfg = parse_config(small_config);
    const auto reports = run_checks(cfg, 1);
    REQUIRE(reports.size() == 4);  // 1 log-bm, 3 log-concavity, none for the empty lambda list
    CHECK(reports[0].id == "eq/log-bm@0.5");
    CHECK(std::abs(reports[0].margin) <= reports[0].budget);
    CHECK(exit_code(reports) == 0);

    const fs::path dir = scratch("outputs");
    std::ostringstream warn;
    write_outputs(cfg, reports, dir.string(), &warn);
    CHECK(warn.str().find("none") != std::string::npos);
    CHECK(!fs::exists(dir / "check-none.csv"));
    CHECK(fs::exists(dir / "check-eq.csv"));
    CHECK(fs::exists(dir / "check-herm.csv"));

    // report.json round-trips
    const auto back = json::parse(slurp(dir / "report.json")).get<std::vector<InequalityReport>>();
    REQUIRE(back.size() == reports.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == reports[i]);

    // summary columns
    std::istringstream summary(slurp(dir / "summary.csv"));
    std::string header, first;
    std::getline(summary, header);
    std::getline(summary, first);
    CHECK(header == "check_id,lambda,lhs,rhs,margin,budget,verdict");
    CHECK(first.rfind("eq/log-bm@0.5,0.5,", 0) == 0);

    // the ellipsoid family's log-volume column is affine
    std::istringstream plot(slurp(dir / "check-herm.csv"));
    std::getline(plot, header);
    CHECK(header == "lambda,log_lhs,log_rhs");
    std::vector<double> l, v;
    for (std::string line; std::getline(plot, line);) {
        double a, b, c;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) == 3);
        l.push_back(a);
        v.push_back(b);
    }
    REQUIRE(l.size() == 5);
    double ml = 0, mv = 0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        ml += l[i] / 5;
        mv += v[i] / 5;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        sxy += (l[i] - ml) * (v[i] - mv);
        sxx += (l[i] - ml) * (l[i] - ml);
    }
    double dev = 0;
    for (std::size_t i = 0; i < l.size(); ++i) dev = std::max(dev, std::abs(v[i] - mv - sxy / sxx * (l[i] - ml)));
    CHECK(dev < 1e-9);
    fs::remove_all(dir);

    CHECK_THROWS(write_outputs(cfg, reports, "/proc/forbidden/out"));
}

TEST_CASE("parallel checks are deterministic") {
    const ExperimentConfig cfg = parse_config(small_config);
    CHECK(json(run_checks(cfg, 1)).dump() == json(run_checks(cfg, 3)).dump());
}

TEST_CASE("exploratory non-complex pair is labelled") {
    const ExperimentConfig cfg = parse_config(R"({"schema": 1, "seed": 1, "checks": [
        {"id": "cube", "kind": "log-bm", "bodies": ["cube", "ball"], "lambdas": [0.5], "samples": 500,
         "exploratory": true}]})");
    const auto reports = run_checks(cfg, 1);
    REQUIRE(reports.size() == 1);
    const auto& labels = reports[0].labels;
    CHECK(std::find(labels.begin(), labels.end(), outside_hypotheses) != labels.end());
    CHECK(std::find(labels.begin(), labels.end(), "exploratory") != labels.end());
}

TEST_CASE("failing check becomes inconclusive") {
    // a planar check on 4-dimensional bodies cannot run
    const ExperimentConfig cfg = parse_config(R"({"schema": 1, "seed": 1, "checks": [
        {"id": "wrong", "kind": "log-bm-2d", "bodies": ["ball", "ball"], "lambdas": [0.5]}]})");
    const auto reports = run_checks(cfg, 1);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].verdict == Verdict::inconclusive);
    CHECK(reports[0].details.contains("error"));
    CHECK(exit_code(reports) == 3);
}
