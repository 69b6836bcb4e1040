#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wfsim/runner.hpp"

namespace wfsim {

// Two frames describe the same physics when their joint outcome
// distributions differ by at most this much in total variation.
inline constexpr double kConsistencyTvd = 1e-9;

/// A variable is an (event id, actor) pair naming one recorded outcome slot.
using Variable = std::pair<std::string, std::string>;
using VariableList = std::vector<Variable>;
using OutcomeKey = std::vector<std::string>;
using JointDistribution = std::map<OutcomeKey, double>;

/// Joint probability table over the given variables. Every variable must be
/// present in every branch.
JointDistribution joint_distribution(const RunReport& report, const VariableList& variables);

/// 1/2 sum over the union support of |p - q|.
double total_variation_distance(const JointDistribution& p, const JointDistribution& q);

/// Marginal of one variable (by position in the key) from a joint table.
std::map<std::string, double> marginal(const JointDistribution& joint, size_t index);

/// Probability that two outcome variables carry equal labels.
double agreement_probability(const RunReport& report, const Variable& a, const Variable& b);

/// All outcome-producing events of the scenario under the given policy, in
/// declaration order; the canonical variable set when none is configured.
VariableList default_variables(const Scenario& s, UpdatePolicy policy);

struct FrameComparison {
  std::string scenario_id;
  double beta1 = 0.0, beta2 = 0.0;
  UpdatePolicy policy = UpdatePolicy::UnitaryLab;
  EmissionSemantics semantics = EmissionSemantics::FixedUnitary;
  VariableList variables;
  JointDistribution joint1, joint2;
  std::vector<std::map<std::string, double>> marginals1, marginals2;  // per variable
  double tvd = 0.0;
  bool consistent = true;
};

/// Runs the scenario in two frames and compares the joint distributions.
FrameComparison compare_frames(const Scenario& s, double beta1, double beta2,
                               UpdatePolicy policy, EmissionSemantics semantics,
                               const VariableList& variables);

/// Probability that the repeated x-basis readouts all agree. Counts only
/// actors with at least two x-basis measurements in the report; throws
/// std::invalid_argument when no actor repeats one.
double x_agreement(const RunReport& report);

struct ThetaRecovery {
  struct BranchEstimate {
    std::string remote_outcome;  // the remote agent's label on this branch
    double theta_hat = 0.0;
    int sign = 1;
    double weight = 0.0;
  };
  std::vector<BranchEstimate> branches;
  // Largest |<lab_i|lab_j>| between conditional lab states of distinct branches.
  double max_lab_overlap = 0.0;
};

/// Reads the record angle the remote measurement imprinted on the lab
/// environment, per remote-outcome branch, just before emission. The remote
/// measurement must precede the emission in the executing frame and the
/// record must be definite; otherwise throws std::runtime_error.
ThetaRecovery recover_theta(const Scenario& s, FrameVelocity beta,
                            UpdatePolicy policy = UpdatePolicy::UnitaryLab);

}  // namespace wfsim
