#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wfsim/scenario_io.hpp"

namespace wfsim::cli {

enum class OutputFormat { Both, Table, Json };

struct RunOverrides {
  std::vector<double> betas;  // empty: use the file's run block
  std::optional<std::string> policy;
  std::optional<std::string> semantics;
  std::optional<std::string> mode;
  std::optional<long long> n;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out_path;
  OutputFormat format = OutputFormat::Both;
  bool include_states = false;
};

// Exit codes: 0 success, 1 runtime error, 2 validation/usage failure,
// 3 frames compared and found physically inconsistent.

int cmd_run(const std::string& path, const RunOverrides& o, std::ostream& out,
            std::ostream& err);
int cmd_compare(const std::string& path, const RunOverrides& o, std::ostream& out,
                std::ostream& err);
int cmd_signal(double theta, double beta, int n_qubits, const RunOverrides& o,
               std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err);
int cmd_list_scenarios(std::ostream& out);

}  // namespace wfsim::cli
