#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

// CLI11 stores into plain values; optional<> wrappers are filled afterwards
// only for flags the user actually passed.
struct RawFlags {
  std::vector<double> betas;
  std::string policy;
  std::string semantics;
  std::string mode;
  long long n = 0;
  unsigned long long seed = 0;
  std::string out_path;
  std::string format;
  bool include_states = false;
};

void add_common_flags(CLI::App* cmd, RawFlags& raw) {
  cmd->add_option("--beta", raw.betas,
                  "frame velocity in units of c (repeatable)")
      ->check(CLI::Range(-0.999999, 0.999999));
  cmd->add_option("--policy", raw.policy, "update policy inside the sealed lab")
      ->check(CLI::IsMember({"unitary-lab", "projective-all"}));
  cmd->add_option("--semantics", raw.semantics, "what the emission copies out")
      ->check(CLI::IsMember({"fixed-unitary", "record-adaptive"}));
  cmd->add_option("--out", raw.out_path, "write the JSON report to this file");
  cmd->add_option("--format", raw.format, "stdout format (default: both)")
      ->check(CLI::IsMember({"json", "table"}));
}

bool given(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

wfsim::cli::RunOverrides collect(const CLI::App* cmd, const RawFlags& raw) {
  wfsim::cli::RunOverrides o;
  o.betas = raw.betas;
  if (given(cmd, "--policy")) o.policy = raw.policy;
  if (given(cmd, "--semantics")) o.semantics = raw.semantics;
  if (given(cmd, "--mode")) o.mode = raw.mode;
  if (given(cmd, "--n")) o.n = raw.n;
  if (given(cmd, "--seed")) o.seed = raw.seed;
  if (given(cmd, "--out")) o.out_path = raw.out_path;
  if (given(cmd, "--format"))
    o.format = raw.format == "json" ? wfsim::cli::OutputFormat::Json
                                    : wfsim::cli::OutputFormat::Table;
  o.include_states = raw.include_states;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wfsim: relativistic Wigner-friend scenario simulator"};
  app.require_subcommand(1);

  RawFlags raw;
  std::string path;
  double theta = 0.0;
  double sig_beta = 0.0;
  int n_qubits = 2;

  CLI::App* run = app.add_subcommand("run", "enumerate or sample one scenario");
  run->add_option("file", path, "scenario JSON file")->required();
  add_common_flags(run, raw);
  run->add_option("--mode", raw.mode, "enumerate | sample")
      ->check(CLI::IsMember({"enumerate", "sample"}));
  run->add_option("--n", raw.n, "number of samples (sample mode)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", raw.seed, "RNG seed (sample mode)");
  run->add_flag("--states", raw.include_states,
                "include branch amplitudes in the JSON report");

  CLI::App* compare =
      app.add_subcommand("compare", "run one scenario in two frames and compare");
  compare->add_option("file", path, "scenario JSON file")->required();
  add_common_flags(compare, raw);

  CLI::App* signal = app.add_subcommand(
      "signal", "probe what the emitted record reveals about the remote angle");
  signal->add_option("--theta", theta, "remote measurement angle in [0, pi)")
      ->required();
  signal->add_option("--beta", sig_beta, "frame velocity in units of c")
      ->check(CLI::Range(-0.999999, 0.999999));
  signal->add_option("--n", n_qubits, "number of emitted qubits")
      ->check(CLI::Range(2, 12));
  signal->add_option("--out", raw.out_path, "write the JSON report to this file");
  signal->add_option("--format", raw.format, "stdout format (default: both)")
      ->check(CLI::IsMember({"json", "table"}));

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("file", path, "scenario JSON file")->required();

  app.add_subcommand("list-scenarios", "describe the built-in scenario families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a validation failure
  }

  if (run->parsed())
    return wfsim::cli::cmd_run(path, collect(run, raw), std::cout, std::cerr);
  if (compare->parsed())
    return wfsim::cli::cmd_compare(path, collect(compare, raw), std::cout, std::cerr);
  if (signal->parsed()) {
    wfsim::cli::RunOverrides o;
    if (signal->count("--out")) o.out_path = raw.out_path;
    if (signal->count("--format"))
      o.format = raw.format == "json" ? wfsim::cli::OutputFormat::Json
                                      : wfsim::cli::OutputFormat::Table;
    return wfsim::cli::cmd_signal(theta, sig_beta, n_qubits, o, std::cout,
                                  std::cerr);
  }
  if (validate->parsed())
    return wfsim::cli::cmd_validate(path, std::cout, std::cerr);
  return wfsim::cli::cmd_list_scenarios(std::cout);
}
