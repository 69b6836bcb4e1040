#include "wfsim/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wfsim {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt3 = 0.57735026918962576451;

[[noreturn]] void bad(const std::string& msg) { throw SchemaError(msg); }

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
}

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  expect_object(j, where);
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) ok |= item.key() == k;
    if (!ok) bad(where + ": unknown field '" + item.key() + "'");
  }
}

const json& require(const json& j, const std::string& where, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(where + ": missing field '" + key + "'");
  return j.at(key);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where + " must be an integer");
  return j.get<long long>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where + " must be a string");
  return j.get<std::string>();
}

cxd as_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad(where + " must be a [re, im] pair");
  return {as_number(j[0], where + "[0]"), as_number(j[1], where + "[1]")};
}

Eigen::VectorXcd as_complex_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where + " must be a non-empty array");
  Eigen::VectorXcd v(j.size());
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<long>(i)] = as_complex(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

json complex_json(cxd v) { return json::array({round12(v.real()), round12(v.imag())}); }

json vector_json(const Eigen::VectorXcd& v) {
  json arr = json::array();
  for (long i = 0; i < v.size(); ++i) arr.push_back(complex_json(v[i]));
  return arr;
}

std::string remainder_name(RemainderPolicy p) {
  return p == RemainderPolicy::Error ? "error" : "collect";
}

RemainderPolicy parse_remainder(const std::string& name) {
  if (name == "error") return RemainderPolicy::Error;
  if (name == "collect") return RemainderPolicy::Collect;
  bad("unknown remainder policy '" + name + "'");
}

OperationSpec parse_operation(const json& j, const std::string& where) {
  std::string type = as_string(require(j, where, "type"), where + ".type");
  if (type == "prepare_entangled") {
    expect_keys(j, where, {"type", "targets", "amplitudes"});
    const json& t = require(j, where, "targets");
    if (!t.is_array() || t.size() != 2) bad(where + ".targets must name two subsystems");
    const json& a = require(j, where, "amplitudes");
    if (!a.is_array() || a.size() != 4) bad(where + ".amplitudes must hold four entries");
    PrepareEntangled op;
    op.first = as_string(t[0], where + ".targets[0]");
    op.second = as_string(t[1], where + ".targets[1]");
    for (int i = 0; i < 4; ++i) op.amplitudes[i] = as_complex(a[i], where + ".amplitudes");
    return op;
  }
  if (type == "friend_measure") {
    expect_keys(j, where, {"type", "spin", "apparatus", "environment", "record_angle"});
    FriendMeasure op;
    op.spin = as_string(require(j, where, "spin"), where + ".spin");
    op.apparatus = as_string(require(j, where, "apparatus"), where + ".apparatus");
    op.environment = as_string(require(j, where, "environment"), where + ".environment");
    op.record_basis = {as_number(require(j, where, "record_angle"), where + ".record_angle")};
    return op;
  }
  if (type == "reset_lab") {
    expect_keys(j, where, {"type", "spin", "apparatus", "environment"});
    return ResetLab{as_string(require(j, where, "spin"), where + ".spin"),
                    as_string(require(j, where, "apparatus"), where + ".apparatus"),
                    as_string(require(j, where, "environment"), where + ".environment")};
  }
  if (type == "emit_qubits") {
    expect_keys(j, where, {"type", "environment", "qubits", "semantics_override"});
    EmitQubits op;
    op.environment = as_string(require(j, where, "environment"), where + ".environment");
    const json& q = require(j, where, "qubits");
    if (!q.is_array()) bad(where + ".qubits must be an array");
    for (const auto& name : q) op.qubit_names.push_back(as_string(name, where + ".qubits[]"));
    if (j.contains("semantics_override"))
      op.semantics_override =
          parse_semantics(as_string(j.at("semantics_override"), where + ".semantics_override"));
    return op;
  }
  if (type == "projective_measure") {
    expect_keys(j, where, {"type", "actor", "targets", "basis", "remainder"});
    ProjectiveMeasure op;
    op.actor = as_string(require(j, where, "actor"), where + ".actor");
    const json& t = require(j, where, "targets");
    if (!t.is_array() || t.empty()) bad(where + ".targets must be a non-empty array");
    for (const auto& name : t) op.targets.push_back(as_string(name, where + ".targets[]"));
    const json& b = require(j, where, "basis");
    if (b.is_object() && b.contains("angle")) {
      expect_keys(b, where + ".basis", {"angle"});
      op.basis = QubitBasis{as_number(b.at("angle"), where + ".basis.angle")};
    } else if (b.is_object() && b.contains("vectors")) {
      expect_keys(b, where + ".basis", {"vectors"});
      std::vector<LabeledVector> vecs;
      for (const auto& lv : b.at("vectors")) {
        expect_keys(lv, where + ".basis.vectors[]", {"label", "components"});
        vecs.push_back({as_string(require(lv, where, "label"), where + ".label"),
                        as_complex_vector(require(lv, where, "components"), where + ".components")});
      }
      op.basis = std::move(vecs);
    } else {
      bad(where + ".basis must carry either 'angle' or 'vectors'");
    }
    if (j.contains("remainder"))
      op.remainder = parse_remainder(as_string(j.at("remainder"), where + ".remainder"));
    return op;
  }
  bad(where + ": unknown operation type '" + type + "'");
}

json operation_json(const OperationSpec& op) {
  json j;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, PrepareEntangled>) {
          j["type"] = "prepare_entangled";
          j["targets"] = json::array({o.first, o.second});
          json amps = json::array();
          for (int i = 0; i < 4; ++i) amps.push_back(complex_json(o.amplitudes[i]));
          j["amplitudes"] = amps;
        } else if constexpr (std::is_same_v<T, FriendMeasure>) {
          j["type"] = "friend_measure";
          j["spin"] = o.spin;
          j["apparatus"] = o.apparatus;
          j["environment"] = o.environment;
          j["record_angle"] = round12(o.record_basis.angle);
        } else if constexpr (std::is_same_v<T, ResetLab>) {
          j["type"] = "reset_lab";
          j["spin"] = o.spin;
          j["apparatus"] = o.apparatus;
          j["environment"] = o.environment;
        } else if constexpr (std::is_same_v<T, EmitQubits>) {
          j["type"] = "emit_qubits";
          j["environment"] = o.environment;
          j["qubits"] = o.qubit_names;
          if (o.semantics_override)
            j["semantics_override"] = semantics_name(*o.semantics_override);
        } else if constexpr (std::is_same_v<T, ProjectiveMeasure>) {
          j["type"] = "projective_measure";
          j["actor"] = o.actor;
          j["targets"] = o.targets;
          if (const auto* qb = std::get_if<QubitBasis>(&o.basis)) {
            j["basis"] = json{{"angle", round12(qb->angle)}};
          } else {
            json vecs = json::array();
            for (const auto& lv : std::get<std::vector<LabeledVector>>(o.basis))
              vecs.push_back(json{{"label", lv.label}, {"components", vector_json(lv.vec)}});
            j["basis"] = json{{"vectors", vecs}};
          }
          j["remainder"] = remainder_name(o.remainder);
        }
      },
      op);
  return j;
}

Scenario parse_explicit_scenario(const json& j) {
  expect_keys(j, "scenario",
              {"id", "register", "initial", "lab_x", "events", "spacelike_pairs", "parameters"});
  Scenario s;
  if (j.contains("id")) s.id = as_string(j.at("id"), "scenario.id");

  const json& reg = require(j, "scenario", "register");
  if (!reg.is_array() || reg.empty()) bad("scenario.register must be a non-empty array");
  for (const auto& sub : reg) {
    expect_keys(sub, "scenario.register[]", {"name", "dimension", "basis_labels"});
    SubsystemSpec spec;
    spec.name = as_string(require(sub, "register[]", "name"), "register[].name");
    spec.dimension =
        static_cast<int>(as_integer(require(sub, "register[]", "dimension"), "register[].dimension"));
    for (const auto& l : require(sub, "register[]", "basis_labels"))
      spec.basis_labels.push_back(as_string(l, "register[].basis_labels[]"));
    s.register_spec.push_back(std::move(spec));
  }

  if (j.contains("initial")) {
    const json& init = j.at("initial");
    expect_keys(init, "scenario.initial", {"labels", "amplitudes"});
    if (init.contains("labels"))
      for (const auto& item : init.at("labels").items())
        s.initial_labels[item.key()] = as_string(item.value(), "initial.labels");
    if (init.contains("amplitudes"))
      for (const auto& item : init.at("amplitudes").items())
        s.initial_amplitudes[item.key()] =
            as_complex_vector(item.value(), "initial.amplitudes." + item.key());
  }

  if (j.contains("lab_x")) s.lab_x = as_number(j.at("lab_x"), "scenario.lab_x");

  const json& events = require(j, "scenario", "events");
  if (!events.is_array()) bad("scenario.events must be an array");
  for (const auto& ev : events) {
    expect_keys(ev, "scenario.events[]", {"id", "t", "x", "op"});
    ScenarioEvent se;
    se.where.id = as_string(require(ev, "events[]", "id"), "events[].id");
    se.where.t = as_number(require(ev, "events[]", "t"), "events[].t");
    se.where.x = as_number(require(ev, "events[]", "x"), "events[].x");
    se.op = parse_operation(require(ev, "events[]", "op"), "events[" + se.where.id + "].op");
    s.events.push_back(std::move(se));
  }

  if (j.contains("spacelike_pairs"))
    for (const auto& pair : j.at("spacelike_pairs")) {
      if (!pair.is_array() || pair.size() != 2) bad("spacelike_pairs entries must be [a, b]");
      s.spacelike_pairs.push_back(
          {as_string(pair[0], "spacelike_pairs"), as_string(pair[1], "spacelike_pairs")});
    }

  if (j.contains("parameters"))
    for (const auto& item : j.at("parameters").items())
      s.parameters.push_back({item.key(), as_string(item.value(), "scenario.parameters")});

  return s;
}

Scenario parse_builder_scenario(const json& j) {
  expect_keys(j, "scenario", {"builder", "parameters"});
  std::string builder = as_string(j.at("builder"), "scenario.builder");
  json params = j.contains("parameters") ? j.at("parameters") : json::object();
  expect_object(params, "scenario.parameters");

  auto complex_param = [&](const char* key, cxd fallback) {
    return params.contains(key) ? as_complex(params.at(key), std::string("parameters.") + key)
                                : fallback;
  };
  auto number_param = [&](const char* key, double fallback) {
    return params.contains(key) ? as_number(params.at(key), std::string("parameters.") + key)
                                : fallback;
  };
  auto int_param = [&](const char* key, long long fallback) {
    return params.contains(key) ? as_integer(params.at(key), std::string("parameters.") + key)
                                : fallback;
  };

  try {
    if (builder == "paper") {
      expect_keys(params, "scenario.parameters", {"n_qubits"});
      return build_paper_scenario(static_cast<int>(int_param("n_qubits", 2)));
    }
    if (builder == "basic_wfs") {
      expect_keys(params, "scenario.parameters", {"alpha", "beta"});
      return build_basic_wfs(complex_param("alpha", kInvSqrt2), complex_param("beta", kInvSqrt2));
    }
    if (builder == "bipartite") {
      expect_keys(params, "scenario.parameters",
                  {"alpha", "beta", "gamma", "u_angle", "v_angle", "order"});
      std::string order = params.contains("order")
                              ? as_string(params.at("order"), "parameters.order")
                              : "A_first";
      if (order != "A_first" && order != "B_first")
        bad("parameters.order must be 'A_first' or 'B_first'");
      return build_bipartite(complex_param("alpha", kInvSqrt3), complex_param("beta", kInvSqrt3),
                             complex_param("gamma", kInvSqrt3),
                             QubitBasis{number_param("u_angle", 0.0)},
                             QubitBasis{number_param("v_angle", 0.0)},
                             order == "A_first" ? MeasurementOrder::AFirst
                                                : MeasurementOrder::BFirst);
    }
    if (builder == "signaling") {
      expect_keys(params, "scenario.parameters", {"theta", "n_qubits"});
      return build_signaling(as_number(require(params, "parameters", "theta"), "parameters.theta"),
                             static_cast<int>(int_param("n_qubits", 2)));
    }
  } catch (const std::invalid_argument& e) {
    bad(std::string("builder '") + builder + "': " + e.what());
  }
  bad("unknown builder '" + builder + "'");
}

RunConfig parse_run_config(const json& j) {
  expect_keys(j, "run", {"beta", "policy", "semantics", "mode", "n", "seed", "variables"});
  RunConfig rc;
  if (j.contains("beta")) {
    rc.betas.clear();
    const json& b = j.at("beta");
    if (b.is_array())
      for (const auto& v : b) rc.betas.push_back(as_number(v, "run.beta[]"));
    else
      rc.betas.push_back(as_number(b, "run.beta"));
    if (rc.betas.empty()) bad("run.beta must name at least one frame");
  }
  for (double beta : rc.betas)
    if (!(std::abs(beta) < 1.0)) bad("run.beta values must satisfy |beta| < 1");
  if (j.contains("policy")) rc.policy = parse_policy(as_string(j.at("policy"), "run.policy"));
  if (j.contains("semantics"))
    rc.semantics = parse_semantics(as_string(j.at("semantics"), "run.semantics"));
  if (j.contains("mode")) {
    std::string mode = as_string(j.at("mode"), "run.mode");
    if (mode == "enumerate") rc.mode = RunMode::Enumerate;
    else if (mode == "sample") rc.mode = RunMode::Sample;
    else bad("run.mode must be 'enumerate' or 'sample'");
  }
  if (j.contains("n")) {
    rc.n = as_integer(j.at("n"), "run.n");
    if (rc.n < 1) bad("run.n must be positive");
  }
  if (j.contains("seed")) {
    long long seed = as_integer(j.at("seed"), "run.seed");
    if (seed < 0) bad("run.seed must be non-negative");
    rc.seed = static_cast<unsigned long long>(seed);
  }
  if (j.contains("variables"))
    for (const auto& v : j.at("variables")) {
      if (!v.is_array() || v.size() != 2) bad("run.variables entries must be [event, actor]");
      rc.variables.push_back(
          {as_string(v[0], "run.variables"), as_string(v[1], "run.variables")});
    }
  return rc;
}

json scenario_json(const Scenario& s) {
  json j;
  j["id"] = s.id;
  json reg = json::array();
  for (const auto& sub : s.register_spec)
    reg.push_back(json{
        {"name", sub.name}, {"dimension", sub.dimension}, {"basis_labels", sub.basis_labels}});
  j["register"] = reg;

  json labels = json::object();
  for (const auto& [name, label] : s.initial_labels) labels[name] = label;
  json initial = json{{"labels", labels}};
  if (!s.initial_amplitudes.empty()) {
    json amps = json::object();
    for (const auto& [name, v] : s.initial_amplitudes) amps[name] = vector_json(v);
    initial["amplitudes"] = amps;
  }
  j["initial"] = initial;
  j["lab_x"] = round12(s.lab_x);

  json events = json::array();
  for (const auto& ev : s.events)
    events.push_back(json{{"id", ev.where.id},
                          {"t", round12(ev.where.t)},
                          {"x", round12(ev.where.x)},
                          {"op", operation_json(ev.op)}});
  j["events"] = events;

  json pairs = json::array();
  for (const auto& [a, b] : s.spacelike_pairs) pairs.push_back(json::array({a, b}));
  j["spacelike_pairs"] = pairs;

  json params = json::object();
  for (const auto& [k, v] : s.parameters) params[k] = v;
  j["parameters"] = params;
  return j;
}

json run_config_json(const RunConfig& rc) {
  json betas = json::array();
  for (double b : rc.betas) betas.push_back(round12(b));
  json vars = json::array();
  for (const auto& [e, a] : rc.variables) vars.push_back(json::array({e, a}));
  return json{{"beta", betas},
              {"policy", policy_name(rc.policy)},
              {"semantics", semantics_name(rc.semantics)},
              {"mode", rc.mode == RunMode::Enumerate ? "enumerate" : "sample"},
              {"n", rc.n},
              {"seed", rc.seed},
              {"variables", vars}};
}

json outcomes_json(const std::vector<Outcome>& outcomes) {
  json arr = json::array();
  for (const auto& o : outcomes)
    arr.push_back(json{{"event", o.event_id}, {"actor", o.actor}, {"label", o.label}});
  return arr;
}

json record_json(const std::optional<RecordAngle>& rec) {
  if (!rec) return nullptr;
  return json{{"theta", round12(rec->theta)}, {"sign", rec->label()}};
}

}  // namespace

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string policy_name(UpdatePolicy p) {
  return p == UpdatePolicy::UnitaryLab ? "unitary-lab" : "projective-all";
}

std::string semantics_name(EmissionSemantics s) {
  return s == EmissionSemantics::FixedUnitary ? "fixed-unitary" : "record-adaptive";
}

UpdatePolicy parse_policy(const std::string& name) {
  if (name == "unitary-lab") return UpdatePolicy::UnitaryLab;
  if (name == "projective-all") return UpdatePolicy::ProjectiveAll;
  bad("unknown policy '" + name + "'");
}

EmissionSemantics parse_semantics(const std::string& name) {
  if (name == "fixed-unitary") return EmissionSemantics::FixedUnitary;
  if (name == "record-adaptive") return EmissionSemantics::RecordAdaptive;
  bad("unknown semantics '" + name + "'");
}

ScenarioFile parse_scenario_file(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  expect_keys(j, "file", {"schema_version", "scenario", "run"});

  ScenarioFile f;
  long long version = as_integer(require(j, "file", "schema_version"), "schema_version");
  if (version != 1) bad("unsupported schema_version " + std::to_string(version));
  f.schema_version = static_cast<int>(version);

  const json& sc = require(j, "file", "scenario");
  expect_object(sc, "scenario");
  f.scenario = sc.contains("builder") ? parse_builder_scenario(sc) : parse_explicit_scenario(sc);

  if (j.contains("run")) f.run = parse_run_config(j.at("run"));
  return f;
}

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_file(ss.str());
}

std::string serialize_scenario_file(const ScenarioFile& f) {
  json j;
  j["schema_version"] = f.schema_version;
  j["scenario"] = scenario_json(f.scenario);
  j["run"] = run_config_json(f.run);
  return j.dump(2) + "\n";
}

std::string serialize_run_report(const RunReport& r, bool include_states) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "run_report";
  j["scenario_id"] = r.scenario_id;
  j["beta"] = round12(r.beta);
  j["policy"] = policy_name(r.policy);
  j["semantics"] = semantics_name(r.semantics);
  j["event_order"] = r.event_order;
  j["order_notes"] = r.order_notes;

  json meas = json::object();
  for (const auto& [id, info] : r.measurements) {
    json m = json{{"actor", info.actor}, {"basis", info.basis_desc}};
    if (info.basis_angle) m["angle"] = round12(*info.basis_angle);
    meas[id] = m;
  }
  j["measurements"] = meas;

  json branches = json::array();
  for (const auto& b : r.branches) {
    json bj;
    bj["weight"] = round12(b.weight);
    bj["frame_time"] = round12(b.frame_time);
    bj["outcomes"] = outcomes_json(b.outcomes);
    bj["emit_record"] = record_json(b.emit_record);
    bj["final_record"] = record_json(b.final_record);
    if (include_states) {
      json amps = json::array();
      for (long i = 0; i < b.state.amplitudes().size(); ++i)
        amps.push_back(complex_json(b.state.amplitudes()[i]));
      bj["amplitudes"] = amps;
    }
    branches.push_back(bj);
  }
  j["branches"] = branches;
  return j.dump(2) + "\n";
}

std::string serialize_sample_report(const SampleReport& r) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "sample_report";
  j["scenario_id"] = r.scenario_id;
  j["beta"] = round12(r.beta);
  j["policy"] = policy_name(r.policy);
  j["semantics"] = semantics_name(r.semantics);
  j["n"] = r.n;
  j["seed"] = r.seed;
  json counts = json::array();
  for (const auto& [outcomes, count] : r.counts)
    counts.push_back(json{{"outcomes", outcomes_json(outcomes)}, {"count", count}});
  j["counts"] = counts;
  return j.dump(2) + "\n";
}

std::string serialize_frame_comparison(const FrameComparison& fc) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "frame_comparison";
  j["scenario_id"] = fc.scenario_id;
  j["policy"] = policy_name(fc.policy);
  j["semantics"] = semantics_name(fc.semantics);
  j["beta1"] = round12(fc.beta1);
  j["beta2"] = round12(fc.beta2);
  json vars = json::array();
  for (const auto& [e, a] : fc.variables) vars.push_back(json::array({e, a}));
  j["variables"] = vars;

  auto joint_json = [](const JointDistribution& joint) {
    json arr = json::array();
    for (const auto& [key, p] : joint)
      arr.push_back(json{{"outcomes", key}, {"p", round12(p)}});
    return arr;
  };
  j["joint1"] = joint_json(fc.joint1);
  j["joint2"] = joint_json(fc.joint2);

  auto marginals_json = [&](const std::vector<std::map<std::string, double>>& ms) {
    json arr = json::array();
    for (size_t i = 0; i < ms.size(); ++i) {
      json probs = json::object();
      for (const auto& [label, p] : ms[i]) probs[label] = round12(p);
      arr.push_back(json{{"variable", json::array({fc.variables[i].first, fc.variables[i].second})},
                         {"probabilities", probs}});
    }
    return arr;
  };
  j["marginals1"] = marginals_json(fc.marginals1);
  j["marginals2"] = marginals_json(fc.marginals2);

  j["tvd"] = round12(fc.tvd);
  j["consistent"] = fc.consistent;
  return j.dump(2) + "\n";
}

}  // namespace wfsim
