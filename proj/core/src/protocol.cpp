#include "wfsim/protocol.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace wfsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "scenario validation failed:";
  for (const auto& s : v) os << "\n  - " << s;
  return os.str();
}

struct Checker {
  const Scenario& s;
  std::vector<std::string> violations;
  std::map<std::string, const SubsystemSpec*> by_name;

  explicit Checker(const Scenario& sc) : s(sc) {
    for (const auto& sub : s.register_spec) by_name[sub.name] = &sub;
  }

  void fail(const std::string& msg) { violations.push_back(msg); }

  const SubsystemSpec* need(const std::string& event_id, const std::string& role,
                            const std::string& name) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      fail(event_id + ": unknown " + role + " subsystem '" + name + "'");
      return nullptr;
    }
    return it->second;
  }

  void need_dim(const std::string& event_id, const std::string& role,
                const std::string& name, int dim) {
    if (const auto* sub = need(event_id, role, name); sub && sub->dimension != dim)
      fail(event_id + ": " + role + " subsystem '" + name + "' must have dimension " +
           std::to_string(dim));
  }

  void need_record_shape(const std::string& event_id, const std::string& role,
                         const std::string& name) {
    if (const auto* sub = need(event_id, role, name); sub && sub->dimension < 3)
      fail(event_id + ": " + role + " subsystem '" + name +
           "' needs at least 3 levels (idle plus two records)");
  }
};

}  // namespace

const ScenarioEvent* Scenario::find_event(const std::string& event_id) const {
  for (const auto& e : events)
    if (e.where.id == event_id) return &e;
  return nullptr;
}

std::vector<SpacetimeEvent> Scenario::event_locations() const {
  std::vector<SpacetimeEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.where);
  return out;
}

validation_error::validation_error(std::vector<std::string> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

std::vector<std::string> validate(const Scenario& s) {
  Checker ck(s);

  if (s.register_spec.empty()) ck.fail("register must not be empty");
  std::set<std::string> sub_names;
  for (const auto& sub : s.register_spec) {
    if (!sub_names.insert(sub.name).second)
      ck.fail("duplicate subsystem name '" + sub.name + "'");
    if (sub.dimension < 2) ck.fail("subsystem '" + sub.name + "' must have dimension >= 2");
    if (static_cast<int>(sub.basis_labels.size()) != sub.dimension)
      ck.fail("subsystem '" + sub.name + "' needs one label per basis state");
  }

  for (const auto& [name, label] : s.initial_labels) {
    auto it = ck.by_name.find(name);
    if (it == ck.by_name.end()) {
      ck.fail("initial label for unknown subsystem '" + name + "'");
    } else {
      const auto& labels = it->second->basis_labels;
      if (std::find(labels.begin(), labels.end(), label) == labels.end())
        ck.fail("initial label '" + label + "' unknown for subsystem '" + name + "'");
    }
  }
  for (const auto& sub : s.register_spec)
    if (!s.initial_labels.count(sub.name) && !s.initial_amplitudes.count(sub.name))
      ck.fail("no initial state for subsystem '" + sub.name + "'");
  for (const auto& [name, amps] : s.initial_amplitudes) {
    auto it = ck.by_name.find(name);
    if (it == ck.by_name.end()) {
      ck.fail("initial amplitudes for unknown subsystem '" + name + "'");
    } else if (amps.size() != it->second->dimension) {
      ck.fail("initial amplitudes for '" + name + "' have wrong dimension");
    } else if (std::abs(amps.squaredNorm() - 1.0) > kNormTol) {
      ck.fail("initial amplitudes for '" + name + "' are not normalized");
    }
  }

  std::set<std::string> event_ids;
  for (const auto& ev : s.events) {
    const std::string& id = ev.where.id;
    if (id.empty()) ck.fail("event with empty id");
    if (!event_ids.insert(id).second) ck.fail("duplicate event id '" + id + "'");
    if (!std::isfinite(ev.where.t) || !std::isfinite(ev.where.x))
      ck.fail(id + ": coordinates must be finite");

    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, PrepareEntangled>) {
            ck.need_dim(id, "first", op.first, 2);
            ck.need_dim(id, "second", op.second, 2);
            if (op.first == op.second) ck.fail(id + ": target pair must be distinct");
            if (std::abs(op.amplitudes.squaredNorm() - 1.0) > kNormTol)
              ck.fail(id + ": preparation amplitudes are not normalized");
          } else if constexpr (std::is_same_v<T, FriendMeasure>) {
            ck.need_dim(id, "spin", op.spin, 2);
            ck.need_record_shape(id, "apparatus", op.apparatus);
            ck.need_record_shape(id, "environment", op.environment);
            if (std::abs(ev.where.x - s.lab_x) > kIntervalTol)
              ck.fail(id + ": lab operation off the lab worldline x = " + std::to_string(s.lab_x));
          } else if constexpr (std::is_same_v<T, ResetLab>) {
            ck.need_dim(id, "spin", op.spin, 2);
            ck.need_record_shape(id, "apparatus", op.apparatus);
            ck.need_record_shape(id, "environment", op.environment);
            if (std::abs(ev.where.x - s.lab_x) > kIntervalTol)
              ck.fail(id + ": lab operation off the lab worldline x = " + std::to_string(s.lab_x));
          } else if constexpr (std::is_same_v<T, EmitQubits>) {
            ck.need_record_shape(id, "environment", op.environment);
            if (op.qubit_names.empty()) ck.fail(id + ": no qubits to emit");
            std::set<std::string> seen;
            for (const auto& q : op.qubit_names) {
              ck.need_dim(id, "emitted", q, 2);
              if (!seen.insert(q).second) ck.fail(id + ": duplicate emitted qubit '" + q + "'");
            }
            if (std::abs(ev.where.x - s.lab_x) > kIntervalTol)
              ck.fail(id + ": lab operation off the lab worldline x = " + std::to_string(s.lab_x));
          } else if constexpr (std::is_same_v<T, ProjectiveMeasure>) {
            if (op.actor.empty()) ck.fail(id + ": measurement actor must be named");
            if (op.targets.empty()) ck.fail(id + ": measurement needs targets");
            std::set<std::string> seen;
            long factor_dim = 1;
            bool ok = true;
            for (const auto& tname : op.targets) {
              const auto* sub = ck.need(id, "target", tname);
              if (!sub) { ok = false; continue; }
              if (!seen.insert(tname).second) ck.fail(id + ": duplicate target '" + tname + "'");
              factor_dim *= sub->dimension;
            }
            if (const auto* qb = std::get_if<QubitBasis>(&op.basis)) {
              if (ok && factor_dim != 2)
                ck.fail(id + ": qubit basis requires a single dimension-2 target");
              if (!std::isfinite(qb->angle)) ck.fail(id + ": basis angle must be finite");
            } else {
              const auto& vecs = std::get<std::vector<LabeledVector>>(op.basis);
              if (vecs.empty()) ck.fail(id + ": explicit basis must not be empty");
              for (const auto& lv : vecs) {
                if (ok && lv.vec.size() != factor_dim)
                  ck.fail(id + ": basis vector '" + lv.label + "' has wrong dimension");
                else if (std::abs(lv.vec.squaredNorm() - 1.0) > kNormTol)
                  ck.fail(id + ": basis vector '" + lv.label + "' is not normalized");
              }
              for (size_t i = 0; i < vecs.size(); ++i)
                for (size_t j = i + 1; j < vecs.size(); ++j)
                  if (vecs[i].vec.size() == vecs[j].vec.size() &&
                      std::abs(vecs[i].vec.dot(vecs[j].vec)) > kNormTol)
                    ck.fail(id + ": basis vectors '" + vecs[i].label + "' and '" +
                            vecs[j].label + "' are not orthogonal");
            }
          }
        },
        ev.op);
  }

  for (const auto& [a, b] : s.spacelike_pairs) {
    const auto* ea = s.find_event(a);
    const auto* eb = s.find_event(b);
    if (!ea || !eb) {
      ck.fail("spacelike pair references unknown event '" + (ea ? b : a) + "'");
      continue;
    }
    if (classify_interval(ea->where, eb->where) != IntervalKind::Spacelike)
      ck.fail(a + "/" + b + " not spacelike separated");
  }

  // Emitted qubits may only be measured strictly inside the emission's
  // future light cone; that keeps the order frame-independent.
  for (const auto& ev : s.events) {
    const auto* emit = std::get_if<EmitQubits>(&ev.op);
    if (!emit) continue;
    std::set<std::string> emitted(emit->qubit_names.begin(), emit->qubit_names.end());
    for (const auto& other : s.events) {
      const auto* pm = std::get_if<ProjectiveMeasure>(&other.op);
      if (!pm) continue;
      bool touches = false;
      for (const auto& tname : pm->targets) touches |= emitted.count(tname) > 0;
      if (!touches) continue;
      if (classify_interval(ev.where, other.where) != IntervalKind::Timelike ||
          other.where.t <= ev.where.t)
        ck.fail(other.where.id + ": measures emitted qubits outside the timelike future of " +
                ev.where.id);
    }
  }

  return ck.violations;
}

namespace {

void append_lab_register(Scenario& s) {
  s.register_spec.push_back({"m", 3, {"m0", "m+", "m-"}});
  s.register_spec.push_back({"eps", 3, {"eps0", "eps+", "eps-"}});
  s.initial_labels["m"] = "m0";
  s.initial_labels["eps"] = "eps0";
}

Scenario paper_like_scenario(int n_qubits, double a_meas_t, QubitBasis a_basis,
                             std::optional<EmissionSemantics> emit_override) {
  if (n_qubits < 2 || n_qubits > 12)
    throw std::invalid_argument("n_qubits must lie in [2, 12]");

  Scenario s;
  s.lab_x = 0.0;
  s.register_spec.push_back({"F_spin", 2, {"+", "-"}});
  s.register_spec.push_back({"A_spin", 2, {"+", "-"}});
  s.initial_labels["F_spin"] = "+";
  s.initial_labels["A_spin"] = "+";
  append_lab_register(s);

  std::vector<std::string> qubits;
  for (int k = 1; k <= n_qubits; ++k) {
    std::string name = "W" + std::to_string(k);
    s.register_spec.push_back({name, 2, {"+", "-"}});
    s.initial_labels[name] = "+";
    qubits.push_back(name);
  }

  Eigen::Vector4cd bell;
  bell << kInvSqrt2, 0.0, 0.0, kInvSqrt2;
  s.events.push_back({{"prep", 0.0, 0.0}, PrepareEntangled{"F_spin", "A_spin", bell}});
  s.events.push_back({{"F_meas", 1.0, 0.0}, FriendMeasure{"F_spin", "m", "eps", QubitBasis::z()}});
  s.events.push_back({{"reset", 1.2, 0.0}, ResetLab{"F_spin", "m", "eps"}});
  s.events.push_back({{"emit", 2.0, 0.0}, EmitQubits{"eps", qubits, emit_override}});
  s.events.push_back(
      {{"A_meas", a_meas_t, 10.0}, ProjectiveMeasure{"A", {"A_spin"}, a_basis}});
  s.events.push_back({{"W_z", 3.0, 0.0}, ProjectiveMeasure{"W", {"W1"}, QubitBasis::z()}});
  s.events.push_back({{"W_x", 3.1, 0.0}, ProjectiveMeasure{"W", {"W2"}, QubitBasis::x()}});
  for (int k = 3; k <= n_qubits; ++k)
    s.events.push_back({{"W_x" + std::to_string(k - 1), 3.1 + 0.1 * (k - 2), 0.0},
                        ProjectiveMeasure{"W", {qubits[k - 1]}, QubitBasis::x()}});

  s.spacelike_pairs.push_back({"emit", "A_meas"});
  return s;
}

std::string num_str(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string num_str(cxd v) { return num_str(v.real()) + "," + num_str(v.imag()); }

}  // namespace

Scenario build_paper_scenario(int n_qubits) {
  Scenario s = paper_like_scenario(n_qubits, 2.5, QubitBasis::x(), std::nullopt);
  s.id = "paper";
  s.parameters = {{"n_qubits", std::to_string(n_qubits)}};
  return s;
}

Scenario build_basic_wfs(cxd alpha, cxd beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTol)
    throw std::invalid_argument("|alpha|^2 + |beta|^2 must equal 1");

  Scenario s;
  s.id = "basic_wfs";
  s.lab_x = 0.0;
  s.register_spec.push_back({"F_spin", 2, {"+", "-"}});
  append_lab_register(s);
  Eigen::VectorXcd spin(2);
  spin << alpha, beta;
  s.initial_amplitudes["F_spin"] = spin;

  s.events.push_back({{"F_meas", 1.0, 0.0}, FriendMeasure{"F_spin", "m", "eps", QubitBasis::z()}});

  // |L+-> = |+->|m+->|eps+-> at flat indices 4 and 17 of the 18-dim lab factor.
  Eigen::VectorXcd lab_plus = Eigen::VectorXcd::Zero(18);
  Eigen::VectorXcd lab_minus = Eigen::VectorXcd::Zero(18);
  lab_plus[4] = kInvSqrt2;
  lab_plus[17] = kInvSqrt2;
  lab_minus[4] = kInvSqrt2;
  lab_minus[17] = -kInvSqrt2;
  s.events.push_back(
      {{"W_lab", 2.0, 0.0},
       ProjectiveMeasure{"W",
                         {"F_spin", "m", "eps"},
                         std::vector<LabeledVector>{{"+", lab_plus}, {"-", lab_minus}},
                         RemainderPolicy::Collect}});

  s.parameters = {{"alpha", num_str(alpha)}, {"beta", num_str(beta)}};
  return s;
}

Scenario build_bipartite(cxd alpha, cxd beta, cxd gamma, QubitBasis u_basis,
                         QubitBasis v_basis, MeasurementOrder order) {
  if (std::abs(std::norm(alpha) + std::norm(beta) + std::norm(gamma) - 1.0) > kNormTol)
    throw std::invalid_argument("|alpha|^2 + |beta|^2 + |gamma|^2 must equal 1");

  Scenario s;
  s.id = "bipartite";
  s.lab_x = 0.0;
  s.register_spec.push_back({"A_spin", 2, {"+", "-"}});
  s.register_spec.push_back({"B_spin", 2, {"+", "-"}});
  s.initial_labels["A_spin"] = "+";
  s.initial_labels["B_spin"] = "+";

  Eigen::Vector2cd up = u_basis.plus(), um = u_basis.minus();
  Eigen::Vector2cd vp = v_basis.plus(), vm = v_basis.minus();
  Eigen::Vector4cd amps = Eigen::Vector4cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      amps[i * 2 + j] = alpha * up[i] * vm[j] + beta * um[i] * vp[j] + gamma * um[i] * vm[j];

  // Preparation sits in the common timelike past of both measurements, so
  // every admissible frame runs it first.
  s.events.push_back({{"prep", 0.0, 5.0}, PrepareEntangled{"A_spin", "B_spin", amps}});
  double ta = order == MeasurementOrder::AFirst ? 20.0 : 20.5;
  double tb = order == MeasurementOrder::AFirst ? 20.5 : 20.0;
  s.events.push_back({{"A_meas", ta, 0.0}, ProjectiveMeasure{"A", {"A_spin"}, u_basis}});
  s.events.push_back({{"B_meas", tb, 10.0}, ProjectiveMeasure{"B", {"B_spin"}, v_basis}});
  s.spacelike_pairs.push_back({"A_meas", "B_meas"});

  s.parameters = {{"alpha", num_str(alpha)},
                  {"beta", num_str(beta)},
                  {"gamma", num_str(gamma)},
                  {"u_angle", num_str(u_basis.angle)},
                  {"v_angle", num_str(v_basis.angle)},
                  {"order", order == MeasurementOrder::AFirst ? "A_first" : "B_first"}};
  return s;
}

Scenario build_signaling(double theta, int n_qubits) {
  if (!(theta >= 0.0 && theta < std::acos(-1.0)))
    throw std::invalid_argument("theta must lie in [0, pi)");
  Scenario s = paper_like_scenario(n_qubits, 1.5, QubitBasis{theta},
                                   EmissionSemantics::RecordAdaptive);
  s.id = "signaling";
  s.parameters = {{"theta", num_str(theta)}, {"n_qubits", std::to_string(n_qubits)}};
  return s;
}

}  // namespace wfsim
