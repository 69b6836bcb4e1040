#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wfsim/analysis.hpp"
#include "wfsim/scenario_io.hpp"

using namespace wfsim;

namespace {

// A minimal but complete hand-written scenario: one lab, one friend
// measurement, one observer measurement of the record levels.
const char* kExplicitScenario = R"({
  "schema_version": 1,
  "scenario": {
    "id": "tiny",
    "register": [
      {"name": "q", "dimension": 2, "basis_labels": ["+", "-"]},
      {"name": "m", "dimension": 3, "basis_labels": ["m0", "m+", "m-"]},
      {"name": "e", "dimension": 3, "basis_labels": ["e0", "e+", "e-"]}
    ],
    "initial": {
      "labels": {"q": "+", "m": "m0", "e": "e0"},
      "amplitudes": {"q": [[0.6, 0.0], [0.8, 0.0]]}
    },
    "lab_x": 0.0,
    "events": [
      {"id": "F_meas", "t": 1.0, "x": 0.0,
       "op": {"type": "friend_measure", "spin": "q", "apparatus": "m",
              "environment": "e", "record_angle": 0.0}},
      {"id": "read", "t": 2.0, "x": 0.0,
       "op": {"type": "projective_measure", "actor": "W", "targets": ["e"],
              "basis": {"vectors": [
                {"label": "+", "components": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]},
                {"label": "-", "components": [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}
              ]},
              "remainder": "collect"}}
    ]
  },
  "run": {"beta": 0.0, "policy": "unitary-lab", "semantics": "fixed-unitary"}
})";

std::string temp_path(const char* name) {
  return std::string("/tmp/wfsim_io_test_") + name + ".json";
}

}  // namespace

TEST_SUITE("scenario_parsing") {

TEST_CASE("explicit scenarios parse, validate, and run") {
  ScenarioFile f = parse_scenario_file(kExplicitScenario);
  CHECK(f.schema_version == 1);
  CHECK(f.scenario.id == "tiny");
  REQUIRE(f.scenario.register_spec.size() == 3);
  CHECK(f.scenario.initial_amplitudes.count("q") == 1);
  CHECK(f.run.mode == RunMode::Enumerate);
  REQUIRE(f.run.betas.size() == 1);
  CHECK(f.run.betas[0] == 0.0);
  CHECK(validate(f.scenario).empty());

  RunReport r = run(f.scenario, FrameVelocity(0.0), f.run.policy, f.run.semantics);
  JointDistribution joint = joint_distribution(r, {{"read", "W"}});
  CHECK(joint[{"+"}] == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(joint[{"-"}] == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("builder scenarios parse with defaults") {
  ScenarioFile f = parse_scenario_file(
      R"({"schema_version": 1, "scenario": {"builder": "paper"}, "run": {}})");
  CHECK(f.scenario.id == "paper");
  CHECK(f.scenario.register_spec.size() == 6);  // n_qubits defaults to 2
  CHECK(f.run.policy == UpdatePolicy::UnitaryLab);
  CHECK(f.run.semantics == EmissionSemantics::RecordAdaptive);
  CHECK(f.run.n == 100000);
  CHECK(f.run.seed == 1);
}

TEST_CASE("schema violations are SchemaErrors with location hints") {
  auto expect_schema_error = [](const std::string& text, const char* needle) {
    try {
      parse_scenario_file(text);
      FAIL_CHECK("expected SchemaError for: " << needle);
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_schema_error("{not json", "invalid JSON");
  expect_schema_error(R"({"schema_version": 2, "scenario": {"builder": "paper"}, "run": {}})",
                      "schema_version");
  expect_schema_error(R"({"scenario": {"builder": "paper"}, "run": {}})",
                      "schema_version");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "warp"}, "run": {}})",
      "builder");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "paper"}, "run": {"beta": 1.0}})",
      "beta");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "paper"}, "run": {"mode": "guess"}})",
      "mode");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "paper"}, "run": {"n": 0}})",
      "n");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "paper"}, "run": {"policy": "magic"}})",
      "policy");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "paper"}, "run": {}, "bonus": 1})",
      "bonus");
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "signaling",
          "parameters": {"theta": 4.0}}, "run": {}})",
      "theta");
  // Unknown keys inside nested objects are rejected too.
  expect_schema_error(
      R"({"schema_version": 1, "scenario": {"builder": "paper",
          "parameters": {"n_qubits": 2, "hue": 3}}, "run": {}})",
      "hue");
}

TEST_CASE("builder parameter plumbing") {
  ScenarioFile f = parse_scenario_file(R"({
    "schema_version": 1,
    "scenario": {"builder": "bipartite",
                 "parameters": {"alpha": [1.0, 0.0], "beta": [0.0, 0.0],
                                "gamma": [0.0, 0.0], "u_angle": 0.3,
                                "v_angle": 0.9, "order": "B_first"}},
    "run": {"beta": [0.5, -0.5]}
  })");
  CHECK(f.scenario.id == "bipartite");
  REQUIRE(f.run.betas.size() == 2);
  CHECK(f.run.betas[1] == -0.5);
  const auto* b_meas = f.scenario.find_event("B_meas");
  REQUIRE(b_meas != nullptr);
  const auto* a_meas = f.scenario.find_event("A_meas");
  CHECK(b_meas->where.t < a_meas->where.t);
}

TEST_CASE("files round-trip through the canonical explicit form") {
  ScenarioFile f;
  f.scenario = build_paper_scenario(3);
  f.run.betas = {0.0, 0.2};
  f.run.variables = {{"A_meas", "A"}, {"W_z", "W"}};

  std::string text = serialize_scenario_file(f);
  ScenarioFile back = parse_scenario_file(text);
  CHECK(back.scenario.id == "paper");
  CHECK(back.scenario.register_spec == f.scenario.register_spec);
  CHECK(back.scenario.events.size() == f.scenario.events.size());
  CHECK(back.scenario.spacelike_pairs == f.scenario.spacelike_pairs);
  CHECK(back.run.variables == f.run.variables);
  CHECK(validate(back.scenario).empty());

  // Serialization is canonical: a second pass is byte-identical.
  CHECK(serialize_scenario_file(back) == text);

  // And the round-tripped scenario behaves identically.
  FrameComparison fc =
      compare_frames(back.scenario, 0.0, 0.2, UpdatePolicy::UnitaryLab,
                     EmissionSemantics::RecordAdaptive,
                     {{"A_meas", "A"}, {"W_z", "W"}, {"W_x", "W"}, {"W_x2", "W"}});
  CHECK(fc.tvd == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("load_scenario_file reports unreadable paths") {
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/nowhere.json"), SchemaError);

  std::string path = temp_path("roundtrip");
  {
    ScenarioFile f;
    f.scenario = build_basic_wfs(cxd(std::sqrt(0.5), 0.0), cxd(std::sqrt(0.5), 0.0));
    std::ofstream out(path);
    out << serialize_scenario_file(f);
  }
  ScenarioFile f = load_scenario_file(path);
  CHECK(f.scenario.id == "basic_wfs");
  std::remove(path.c_str());
}

}  // TEST_SUITE

TEST_SUITE("report_serialization") {

TEST_CASE("run reports are stable to the byte") {
  Scenario s = build_paper_scenario(2);
  RunReport r1 = run(s, FrameVelocity(0.2), UpdatePolicy::UnitaryLab,
                     EmissionSemantics::RecordAdaptive);
  RunReport r2 = run(s, FrameVelocity(0.2), UpdatePolicy::UnitaryLab,
                     EmissionSemantics::RecordAdaptive);
  CHECK(serialize_run_report(r1) == serialize_run_report(r2));
  CHECK(serialize_run_report(r1).find("\"beta\": 0.2") != std::string::npos);
  CHECK(serialize_run_report(r1).find("amplitudes") == std::string::npos);
  CHECK(serialize_run_report(r1, true).find("amplitudes") != std::string::npos);
}

TEST_CASE("sample and comparison reports carry their inputs") {
  Scenario s = build_paper_scenario(2);
  SampleReport sr = sample(s, FrameVelocity(0.0), UpdatePolicy::UnitaryLab,
                           EmissionSemantics::RecordAdaptive, 500, 77);
  std::string text = serialize_sample_report(sr);
  CHECK(text.find("\"seed\": 77") != std::string::npos);
  CHECK(text.find("\"n\": 500") != std::string::npos);

  FrameComparison fc = compare_frames(s, 0.0, 0.2, UpdatePolicy::UnitaryLab,
                                      EmissionSemantics::RecordAdaptive,
                                      {{"A_meas", "A"}, {"W_x", "W"}});
  std::string ctext = serialize_frame_comparison(fc);
  CHECK(ctext.find("\"tvd\"") != std::string::npos);
  CHECK(ctext.find("\"consistent\": false") != std::string::npos);
}

TEST_CASE("round12 pins the report number format") {
  CHECK(round12(1.0 / 3.0) == doctest::Approx(0.333333333333).epsilon(1e-15));
  CHECK(round12(0.1 + 0.2) == round12(0.3));
  CHECK(round12(1.0) == 1.0);
  CHECK(round12(0.0) == 0.0);
  // Rounding is idempotent.
  for (double v : {0.9800000000001, 1.0 / 7.0, 2.0412414523193152})
    CHECK(round12(round12(v)) == round12(v));
}

TEST_CASE("policy and semantics names round-trip") {
  CHECK(policy_name(parse_policy("unitary-lab")) == "unitary-lab");
  CHECK(policy_name(parse_policy("projective-all")) == "projective-all");
  CHECK(semantics_name(parse_semantics("fixed-unitary")) == "fixed-unitary");
  CHECK(semantics_name(parse_semantics("record-adaptive")) == "record-adaptive");
  CHECK_THROWS_AS(parse_policy("collapse"), SchemaError);
  CHECK_THROWS_AS(parse_semantics("telepathy"), SchemaError);
}

}  // TEST_SUITE
