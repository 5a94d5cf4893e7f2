#include <algorithm>

#include "doctest.h"
#include "mag/catalog.hpp"
#include "mag/random_fields.hpp"
#include "mag/scenario.hpp"
#include "support.hpp"

using namespace mag;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::InvalidDimension;
}

}  // namespace

TEST_CASE("catalog registration contract") {
  const auto& list = catalog_list();
  for (const char* name : {"minkowski", "schwarzschild", "kaluza-reissner-nordstrom", "random-analytic"}) {
    CHECK(std::any_of(list.begin(), list.end(), [&](const CatalogEntry& e) { return e.name == name; }));
  }
  const auto it = std::find_if(list.begin(), list.end(), [](const CatalogEntry& e) { return e.name == "schwarzschild"; });
  REQUIRE(it != list.end());
  REQUIRE(it->parameters.size() == 1);
  CHECK(it->parameters[0].name == "M");
  CHECK(it->parameters[0].default_value == 1.0);
  CHECK(it->domain == "r > 2M+0.5");
}

TEST_CASE("random-analytic entries are deterministic in the seed") {
  const auto pts = unit_box_chart(4).sample_points(5, 1);
  const Spacetime a = build_spacetime("random-analytic", {{"seed", 3.0}});
  const Spacetime b = build_spacetime("random-analytic", {{"seed", 3.0}});
  const Spacetime c = build_spacetime("random-analytic", {{"seed", 4.0}});
  CHECK(testing::max_diff(a.connection.coefficients, b.connection.coefficients, pts) == 0.0);
  CHECK(testing::max_diff(a.metric.g(), b.metric.g(), pts) == 0.0);
  CHECK(testing::max_diff(a.connection.coefficients, c.connection.coefficients, pts) > 1e-3);
}

TEST_CASE("catalog lookups validate names and parameters") {
  try {
    build_spacetime("anti-de-sitter", {});
    FAIL("expected CatalogMiss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CatalogMiss);
  }
  try {
    build_spacetime("schwarzschild", {{"Q", 0.1}});
    FAIL("expected ConfigParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParseError);
  }
}

TEST_CASE("scenario parsing: defaults and overrides") {
  const Scenario s = parse_scenario(R"({"scenario": "x", "catalog": ["minkowski"], "checks": ["el-metric"]})");
  CHECK(s.name == "x");
  CHECK(s.points == 100);
  CHECK(s.seed == 0);
  CHECK(s.strategy.name() == "analytic");
  CHECK(s.controls.kappa_scale == 1.0);

  const Scenario t = parse_scenario(R"({
    "schema_version": 1, "scenario": "y",
    "catalog": [{"name": "schwarzschild", "params": {"M": 2}}],
    "checks": ["el-metric", "structure-eqs"], "strategy": "fd4", "seed": 9, "points": 7,
    "tolerances": {"el-metric": 1e-6}, "controls": {"divergence_sign": -1}})");
  CHECK(t.catalog[0].params.at("M") == 2.0);
  CHECK(t.strategy.name() == "fd4");
  CHECK(t.seed == 9);
  CHECK(t.points == 7);
  CHECK(t.tolerances.at("el-metric") == 1e-6);
  CHECK(t.controls.divergence_sign == -1.0);
  CHECK(default_tolerance("identity-2-11", Strategy::parse("fd2")) == 1e-5);
}

TEST_CASE("scenario parsing rejects invalid documents") {
  CHECK(parse_code("{") == ErrorCode::ConfigParseError);
  CHECK(parse_code(R"([1, 2])") == ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["minkowski"]})") == ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["minkowski"], "checks": ["no-such-check"]})") ==
        ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["nowhere"], "checks": ["el-metric"]})") ==
        ErrorCode::CatalogMiss);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["minkowski"], "checks": ["el-metric"], "colour": 1})") ==
        ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["minkowski"], "checks": ["el-metric"], "strategy": "fd3"})") ==
        ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["minkowski"], "checks": ["el-metric"], "seed": -1})") ==
        ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": ["minkowski"], "checks": ["einstein-maxwell"]})") ==
        ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"schema_version": 2, "scenario": "x", "catalog": ["minkowski"], "checks": ["el-metric"]})") ==
        ErrorCode::ConfigParseError);
  CHECK(parse_code(R"({"scenario": "x", "catalog": [{"name": "schwarzschild", "params": {"M": -1}}], "checks": ["el-metric"]})") ==
        ErrorCode::ConfigParseError);
}

TEST_CASE("reports: pass is the conjunction of per-check verdicts") {
  Scenario s = parse_scenario(R"({"scenario": "r", "catalog": ["minkowski", "random-analytic"],
                                  "checks": ["el-metric", "identity-2-11"], "points": 5})");
  const VerificationReport rep = run_scenario(s);
  REQUIRE(rep.records.size() == 4);
  for (const auto& r : rep.records) CHECK(r.pass == (r.max_abs_residual <= r.tolerance));
  CHECK(rep.records[0].max_abs_residual == 0.0);
  CHECK_FALSE(rep.records[2].pass);  // random connection is not an extremal
  CHECK_FALSE(rep.pass);
  CHECK(report_to_json(rep, false) == report_to_json(run_scenario(s), false));
  CHECK(report_summary(rep).find("overall: FAIL") != std::string::npos);
}

TEST_CASE("Kaluza checks skip non-Kaluza entries and honour controls") {
  Scenario s = parse_scenario(R"({"scenario": "k", "catalog": ["minkowski", "kaluza-reissner-nordstrom"],
                                  "checks": ["einstein-maxwell"], "points": 5})");
  VerificationReport rep = run_scenario(s);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].target == "kaluza-reissner-nordstrom");
  CHECK(rep.pass);
  s.controls.kappa_scale = 1.1;
  rep = run_scenario(s);
  CHECK_FALSE(rep.pass);
}
