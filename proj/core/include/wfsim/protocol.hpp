#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wfsim/qstate.hpp"
#include "wfsim/spacetime.hpp"

namespace wfsim {

/// How a sealed lab's internal measurement enters the global description:
/// as an entangling unitary only, or additionally as a collapse of the
/// environment record.
enum class UpdatePolicy { UnitaryLab, ProjectiveAll };

/// How emission reacts to the environment record: a fixed controlled
/// unitary, or qubits prepared in whatever pure record is actually present.
enum class EmissionSemantics { FixedUnitary, RecordAdaptive };

// Operation payloads. Apparatus and environment subsystems follow the label
// convention [idle, plus-record, minus-record] at indices [0, 1, 2].

struct PrepareEntangled {
  std::string first, second;      // two qubit subsystems
  Eigen::Vector4cd amplitudes;    // over |00>,|01>,|10>,|11> of (first, second)
};

struct FriendMeasure {
  std::string spin, apparatus, environment;
  QubitBasis record_basis;
};

struct ResetLab {
  std::string spin, apparatus, environment;
};

struct EmitQubits {
  std::string environment;
  std::vector<std::string> qubit_names;
  std::optional<EmissionSemantics> semantics_override;
};

struct ProjectiveMeasure {
  std::string actor;
  std::vector<std::string> targets;
  std::variant<QubitBasis, std::vector<LabeledVector>> basis;
  RemainderPolicy remainder = RemainderPolicy::Error;
};

using OperationSpec =
    std::variant<PrepareEntangled, FriendMeasure, ResetLab, EmitQubits, ProjectiveMeasure>;

struct ScenarioEvent {
  SpacetimeEvent where;
  OperationSpec op;
};

/// A complete experiment description: register layout, initial product
/// state, located events, and declared structural constraints.
struct Scenario {
  std::string id = "custom";
  std::vector<SubsystemSpec> register_spec;
  std::map<std::string, std::string> initial_labels;
  // Optional per-subsystem amplitude overrides for non-basis initial factors.
  std::map<std::string, Eigen::VectorXcd> initial_amplitudes;
  std::vector<ScenarioEvent> events;
  double lab_x = 0.0;
  // Event pairs that must stay spacelike separated (order sensitivity under test).
  std::vector<std::pair<std::string, std::string>> spacelike_pairs;
  // Builder parameter echo for reports; values rendered as strings.
  std::vector<std::pair<std::string, std::string>> parameters;

  const ScenarioEvent* find_event(const std::string& id) const;
  std::vector<SpacetimeEvent> event_locations() const;
};

struct validation_error : std::runtime_error {
  explicit validation_error(std::vector<std::string> v);
  std::vector<std::string> violations;
};

/// Structural checks: unique ids, known subsystem references, normalized
/// parameters, lab operations on the lab worldline, declared spacelike pairs
/// actually spacelike, emitted qubits measured only in the emission's
/// timelike future. Returns human-readable violations; empty means valid.
std::vector<std::string> validate(const Scenario& s);

enum class MeasurementOrder { AFirst, BFirst };

/// Friend + external observer + spacelike agent, with emitted qubits carrying
/// the lab record outward. n_qubits in [2, 12]; qubit k >= 3 gets an extra
/// x-basis measurement event W_x<k-1>.
Scenario build_paper_scenario(int n_qubits);

/// Single sealed lab prepared in alpha|+> + beta|->; the external observer
/// measures the whole lab in the {(|L+> +- |L->)/sqrt(2)} basis.
Scenario build_basic_wfs(cxd alpha, cxd beta);

/// Two-qubit state alpha|+u,-v> + beta|-u,+v> + gamma|-u,-v> measured at
/// spacelike separation; `order` swaps which measurement is earlier at rest.
Scenario build_bipartite(cxd alpha, cxd beta, cxd gamma, QubitBasis u_basis,
                         QubitBasis v_basis, MeasurementOrder order);

/// Paper scenario variant: the remote agent measures at angle theta before
/// emission even at rest, and the emission is record-adaptive.
Scenario build_signaling(double theta, int n_qubits);

}  // namespace wfsim
