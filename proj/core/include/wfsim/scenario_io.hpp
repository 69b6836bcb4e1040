#pragma once

#include <stdexcept>
#include <string>

#include "wfsim/analysis.hpp"

namespace wfsim {

/// Raised for malformed scenario files: unreadable input, bad JSON, missing
/// or unknown fields, out-of-range values.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { Enumerate, Sample };

/// The "run" block of a scenario file: which frames to execute and how.
struct RunConfig {
  std::vector<double> betas = {0.0};
  UpdatePolicy policy = UpdatePolicy::UnitaryLab;
  EmissionSemantics semantics = EmissionSemantics::RecordAdaptive;
  RunMode mode = RunMode::Enumerate;
  long long n = 100000;
  unsigned long long seed = 1;
  VariableList variables;  // empty means: derive from the scenario
};

struct ScenarioFile {
  int schema_version = 1;
  Scenario scenario;
  RunConfig run;
};

/// Parses either a builder reference ({"builder": "paper", "parameters":
/// {...}}) or an explicit scenario. Unknown fields are rejected.
ScenarioFile parse_scenario_file(const std::string& json_text);
ScenarioFile load_scenario_file(const std::string& path);

/// Canonical explicit serialization; parsing it reproduces the input
/// scenario exactly, and identical inputs give identical bytes.
std::string serialize_scenario_file(const ScenarioFile& f);

std::string serialize_run_report(const RunReport& r, bool include_states = false);
std::string serialize_sample_report(const SampleReport& r);
std::string serialize_frame_comparison(const FrameComparison& fc);

std::string policy_name(UpdatePolicy p);
std::string semantics_name(EmissionSemantics s);
UpdatePolicy parse_policy(const std::string& name);
EmissionSemantics parse_semantics(const std::string& name);

/// Rounds to 12 significant digits; every floating-point value in a report
/// or scenario file passes through this, keeping output byte-deterministic.
double round12(double v);

}  // namespace wfsim
