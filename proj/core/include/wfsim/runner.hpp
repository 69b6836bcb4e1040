#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfsim/protocol.hpp"

namespace wfsim {

inline constexpr double kWeightTol = 1e-9;  // branch weights must sum to 1 within this

/// Pure-state record direction in the environment's record plane:
/// sign +: cos(theta/2)|eps+> + sin(theta/2)|eps->
/// sign -: -sin(theta/2)|eps+> + cos(theta/2)|eps->, theta in [0, pi).
struct RecordAngle {
  double theta = 0.0;
  int sign = 1;
  std::string label() const { return sign >= 0 ? "+" : "-"; }
};

struct Outcome {
  std::string event_id;
  std::string actor;
  std::string label;

  bool operator==(const Outcome&) const = default;
  auto operator<=>(const Outcome&) const = default;
};

struct Branch {
  QState state;
  double weight = 1.0;
  std::vector<Outcome> outcomes;
  double frame_time = 0.0;  // boosted time of the last applied event
  // Record read off at a record-adaptive emission, if one was definite.
  std::optional<RecordAngle> emit_record;
  // Record left in the environment after the final event, if pure.
  std::optional<RecordAngle> final_record;
};

struct MeasurementInfo {
  std::string actor;
  std::optional<double> basis_angle;  // set for single-qubit angle bases
  std::string basis_desc;
};

struct RunReport {
  std::string scenario_id;
  double beta = 0.0;
  UpdatePolicy policy = UpdatePolicy::UnitaryLab;
  EmissionSemantics semantics = EmissionSemantics::FixedUnitary;
  std::vector<std::string> event_order;
  std::vector<std::string> order_notes;
  // Metadata per outcome-producing event id (includes the synthetic
  // end-of-run record variable "F_record" when present).
  std::map<std::string, MeasurementInfo> measurements;
  std::vector<Branch> branches;
};

struct RunOptions {
  double prune_threshold = kOutcomeTol;
};

/// Enumerates all measurement branches of the scenario with events applied
/// in the time order of the frame moving at `beta`. Throws validation_error
/// if the scenario fails validate().
RunReport run(const Scenario& s, FrameVelocity beta, UpdatePolicy policy,
              EmissionSemantics semantics, const RunOptions& options = {});

/// Reads a definite record off an environment reduced state: requires purity
/// >= 1 - 1e-9, population outside the two record levels <= 1e-9, and a real
/// relative phase (within 1e-9) between the record components.
std::optional<RecordAngle> extract_record_angle(const DensityMatrix& rho_env,
                                                int plus_index = 1, int minus_index = 2);

struct SampleReport {
  std::string scenario_id;
  double beta = 0.0;
  UpdatePolicy policy = UpdatePolicy::UnitaryLab;
  EmissionSemantics semantics = EmissionSemantics::FixedUnitary;
  long long n = 0;
  unsigned long long seed = 0;
  // Distinct outcome paths with their observed counts; paths in enumeration
  // order, counts summing to n.
  std::vector<std::pair<std::vector<Outcome>, long long>> counts;
};

/// Draws n independent trajectories through the measurement tree with a
/// deterministic seeded generator. Identical seeds give identical counts.
SampleReport sample(const Scenario& s, FrameVelocity beta, UpdatePolicy policy,
                    EmissionSemantics semantics, long long n, unsigned long long seed);

}  // namespace wfsim
