#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "../test_support.hpp"

using namespace bfv;
using bfv::testing::make_table;

namespace {

std::string source_dir() { return BFV_SOURCE_DIR; }

std::string scenario_path(const std::string& name) {
  return source_dir() + "/scenarios/" + name + ".json";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

/// Run a scenario and render the report without the timing field.
std::string stable_report(const std::string& path, const RunConfig& config = {}) {
  ScenarioOutcome out = run_scenario(path, config);
  out.report.erase("timing_ms");
  return out.report.dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  return Scenario::from_json(Json::parse(text), "inline");
}

}  // namespace

TEST_CASE("golden scenario reports are byte-stable and match the checked-in files") {
  for (const std::string name : {"exA", "exB", "exC"}) {
    INFO(name);
    const std::string first = stable_report(scenario_path(name));
    const std::string second = stable_report(scenario_path(name));
    CHECK(first == second);
    CHECK(first == read_file(source_dir() + "/tests/golden/" + name + ".report.json"));
  }
}

TEST_CASE("exit codes distinguish success from witnesses") {
  CHECK(run_scenario(scenario_path("exA")).exit_code == 0);
  CHECK(run_scenario(scenario_path("exB")).exit_code == 0);
  CHECK(run_scenario(scenario_path("exC")).exit_code == 1);
}

TEST_CASE("schema violations are rejected before computation") {
  CHECK_THROWS_AS(parse_scenario(R"({"fiber_rank": 1, "poisson": [], "commands": []})"),
                  SchemaError);  // missing base_vars
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": [], "fiber_rank": 0,
                                      "poisson": [], "commands": []})"),
                  SchemaError);  // bad rank
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1,
                                      "poisson": [{"a": 1, "b": 5, "poly": "1"}],
                                      "commands": []})"),
                  SchemaError);  // index out of range
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1,
                                      "poisson": [{"a": 1, "b": 2, "poly": "q"}],
                                      "commands": []})"),
                  SchemaError);  // polynomial does not parse
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1,
                                      "poisson": [{"a": 1, "b": 2, "poly": "1"},
                                                   {"a": 2, "b": 1, "poly": "x"}],
                                      "commands": []})"),
                  SchemaError);  // duplicate unordered pair
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1, "poisson": [],
                                      "commands": ["coisotropy nope"]})"),
                  SchemaError);  // unknown section reference
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1, "poisson": [],
                                      "commands": ["frobnicate"]})"),
                  SchemaError);  // unknown command
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1, "poisson": [],
                                      "sections": {"s": ["y1"]}, "commands": []})"),
                  SchemaError);  // fiber-dependent section
  CHECK_THROWS_AS(parse_scenario(R"({"base_vars": ["x"], "fiber_rank": 1, "poisson": [],
                                      "commands": [], "extra": 1})"),
                  SchemaError);  // unknown key
  CHECK_THROWS_AS(Scenario::load("/nonexistent/file.json"), SchemaError);
}

TEST_CASE("module errors carry the command index and stop the run") {
  // mc-lift needs a charge; the Ex-C bivector has none.
  Scenario s = parse_scenario(R"({
    "base_vars": ["x1"], "fiber_rank": 2,
    "poisson": [{"a": 2, "b": 3, "poly": "x1"}],
    "sections": {"zero": ["0", "0"]},
    "commands": ["mc-lift zero", "validate"]
  })");
  ScenarioRunner runner(s, RunConfig{});
  Json report = runner.run();
  CHECK(report["status"] == "error");
  REQUIRE(report["commands"].size() == 1);  // the run stopped at the failure
  CHECK(report["commands"][0]["index"] == 0);
  CHECK(report["commands"][0]["status"] == "error");
}

TEST_CASE("mc-check accepts both stored names and inline elements") {
  Scenario s = parse_scenario(R"({
    "base_vars": ["x1"], "fiber_rank": 2,
    "poisson": [{"a": 2, "b": 3, "poly": "y1"}],
    "commands": ["mc-check x1*e{2}", "mc-check e{1}"]
  })");
  ScenarioRunner runner(s, RunConfig{});
  Json report = runner.run();
  CHECK(report["commands"][0]["status"] == "ok");
  CHECK(report["commands"][1]["status"] == "witness");
  CHECK(report["commands"][1]["maurer_cartan"] == false);
  CHECK(report["status"] == "witness");
}

TEST_CASE("explain_failure names the violated criterion") {
  auto t = make_table({"x1"}, {"y1", "y2"});
  const Poly x1 = poly_parse("x1", t);
  CHECK_THAT(explain_failure(FailureWitness{JacobiWitness{1, 2, 3, x1}}, *t),
             Catch::Matchers::ContainsSubstring("Jacobi") &&
                 Catch::Matchers::ContainsSubstring("(1,2,3)"));
  CHECK_THAT(explain_failure(FailureWitness{CoisotropyWitness{1, 2, x1}}, *t),
             Catch::Matchers::ContainsSubstring("coisotrope") &&
                 Catch::Matchers::ContainsSubstring("x1"));
  BFVElement ob = element_parse("x1*e{1,2}", t);
  CHECK_THAT(explain_failure(FailureWitness{ObstructionWitness{ob, ob, 1}}, *t),
             Catch::Matchers::ContainsSubstring("obstruction"));
  CHECK_THROWS_AS(explain_failure(std::nullopt, *t), std::invalid_argument);
}

TEST_CASE("element serialization round-trips through the parser on random data") {
  auto t = make_table({"x1"}, {"y1", "y2"});
  bfv::testing::Rng rng(71);
  for (int i = 0; i < 40; ++i) {
    BFVElement a = rng.element(t, 6);
    CHECK(element_parse(element_to_string(a), t) == a);
  }
}
