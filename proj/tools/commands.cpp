#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wfsim/analysis.hpp"
#include "wfsim/protocol.hpp"
#include "wfsim/runner.hpp"

namespace wfsim::cli {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

RunConfig merged_config(const ScenarioFile& f, const RunOverrides& o) {
  RunConfig rc = f.run;
  if (!o.betas.empty()) rc.betas = o.betas;
  if (o.policy) rc.policy = parse_policy(*o.policy);
  if (o.semantics) rc.semantics = parse_semantics(*o.semantics);
  if (o.mode) {
    if (*o.mode == "enumerate") rc.mode = RunMode::Enumerate;
    else if (*o.mode == "sample") rc.mode = RunMode::Sample;
    else throw SchemaError("mode must be 'enumerate' or 'sample', got '" + *o.mode + "'");
  }
  if (o.n) {
    if (*o.n < 1) throw SchemaError("n must be at least 1");
    rc.n = *o.n;
  }
  if (o.seed) rc.seed = *o.seed;
  for (double b : rc.betas)
    if (!(std::abs(b) < 1.0)) throw SchemaError("beta must satisfy |beta| < 1");
  return rc;
}

// Sends the JSON text to stdout and/or a file according to the requested
// format. The table, when wanted, always precedes the JSON.
void emit(const std::string& json_text, const std::string& table,
          const RunOverrides& o, std::ostream& out) {
  if (o.format != OutputFormat::Json) out << table;
  if (o.format != OutputFormat::Table) out << json_text;
  if (o.out_path) {
    std::ofstream f(*o.out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + *o.out_path + "' for writing");
    f << json_text;
    if (!f) throw std::runtime_error("write to '" + *o.out_path + "' failed");
  }
}

std::string outcome_str(const Outcome& oc) {
  return oc.event_id + "/" + oc.actor + "=" + oc.label;
}

std::string record_str(const RecordAngle& r) {
  return r.label() + " (theta " + fmt(r.theta) + ")";
}

void append_joint_table(std::ostringstream& os, const RunReport& rep,
                        const VariableList& vars) {
  if (vars.empty()) return;
  os << "joint over";
  for (const auto& v : vars) os << " " << v.first << "/" << v.second;
  os << ":\n";
  JointDistribution jd;
  try {
    jd = joint_distribution(rep, vars);
  } catch (const std::invalid_argument& e) {
    os << "  (unavailable: " << e.what() << ")\n";
    return;
  }
  for (const auto& [key, p] : jd) {
    os << " ";
    for (const auto& label : key) os << " " << std::setw(4) << label;
    os << "  " << fmt(p) << "\n";
  }
}

std::string run_table(const RunReport& rep, const VariableList& vars) {
  std::ostringstream os;
  os << "scenario " << rep.scenario_id << "  beta " << fmt(rep.beta) << "  policy "
     << policy_name(rep.policy) << "  semantics " << semantics_name(rep.semantics)
     << "\n";
  os << "event order:";
  for (const auto& id : rep.event_order) os << " " << id;
  os << "\n";
  for (const auto& note : rep.order_notes) os << "  note: " << note << "\n";
  os << "branches (" << rep.branches.size() << "):\n";
  int i = 0;
  for (const auto& b : rep.branches) {
    os << "  [" << ++i << "] weight " << fmt(b.weight) << " :";
    for (const auto& oc : b.outcomes) os << " " << outcome_str(oc);
    if (b.emit_record) os << "  emit_record " << record_str(*b.emit_record);
    if (b.final_record) os << "  final_record " << record_str(*b.final_record);
    os << "\n";
  }
  append_joint_table(os, rep, vars);
  return os.str();
}

std::string sample_table(const SampleReport& rep) {
  std::ostringstream os;
  os << "scenario " << rep.scenario_id << "  beta " << fmt(rep.beta) << "  policy "
     << policy_name(rep.policy) << "  semantics " << semantics_name(rep.semantics)
     << "  n " << rep.n << "  seed " << rep.seed << "\n";
  os << "counts:\n";
  for (const auto& [outcomes, count] : rep.counts) {
    os << "  " << std::setw(10) << count << " :";
    for (const auto& oc : outcomes) os << " " << outcome_str(oc);
    os << "\n";
  }
  return os.str();
}

std::string compare_table(const FrameComparison& fc) {
  std::ostringstream os;
  os << "scenario " << fc.scenario_id << "  beta " << fmt(fc.beta1) << " vs "
     << fmt(fc.beta2) << "  policy " << policy_name(fc.policy) << "  semantics "
     << semantics_name(fc.semantics) << "\n";
  os << "variables:";
  for (const auto& v : fc.variables) os << " " << v.first << "/" << v.second;
  os << "\n";
  for (int side = 0; side < 2; ++side) {
    const auto& joint = side == 0 ? fc.joint1 : fc.joint2;
    os << "joint at beta " << fmt(side == 0 ? fc.beta1 : fc.beta2) << ":\n";
    for (const auto& [key, p] : joint) {
      os << " ";
      for (const auto& label : key) os << " " << std::setw(4) << label;
      os << "  " << fmt(p) << "\n";
    }
  }
  for (std::size_t i = 0; i < fc.variables.size(); ++i) {
    os << "marginal " << fc.variables[i].first << "/" << fc.variables[i].second << ":";
    for (const auto& [label, p] : fc.marginals1[i])
      os << "  " << label << " " << fmt(p);
    os << "   | vs |";
    for (const auto& [label, p] : fc.marginals2[i])
      os << "  " << label << " " << fmt(p);
    os << "\n";
  }
  os << "total variation distance " << fmt(fc.tvd) << "\n";
  os << (fc.consistent ? "frames agree on the joint distribution\n"
                       : "frames DISAGREE: no single joint distribution fits both\n");
  return os.str();
}

}  // namespace

int cmd_run(const std::string& path, const RunOverrides& o, std::ostream& out,
            std::ostream& err) {
  try {
    ScenarioFile f = load_scenario_file(path);
    RunConfig rc = merged_config(f, o);
    auto violations = validate(f.scenario);
    if (!violations.empty()) {
      err << "scenario '" << f.scenario.id << "' failed validation:\n";
      for (const auto& v : violations) err << "  - " << v << "\n";
      return 2;
    }
    VariableList vars = rc.variables.empty()
                            ? default_variables(f.scenario, rc.policy)
                            : rc.variables;
    json docs = json::array();
    std::ostringstream table;
    for (double beta : rc.betas) {
      if (rc.mode == RunMode::Enumerate) {
        RunReport rep = run(f.scenario, FrameVelocity{beta}, rc.policy, rc.semantics);
        table << run_table(rep, vars);
        docs.push_back(json::parse(serialize_run_report(rep, o.include_states)));
      } else {
        SampleReport rep = sample(f.scenario, FrameVelocity{beta}, rc.policy,
                                  rc.semantics, rc.n, rc.seed);
        table << sample_table(rep);
        docs.push_back(json::parse(serialize_sample_report(rep)));
      }
      table << "\n";
    }
    std::string json_text =
        docs.size() == 1 ? docs[0].dump(2) + "\n" : docs.dump(2) + "\n";
    emit(json_text, table.str(), o, out);
    return 0;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const std::string& path, const RunOverrides& o, std::ostream& out,
                std::ostream& err) {
  try {
    ScenarioFile f = load_scenario_file(path);
    RunConfig rc = merged_config(f, o);
    if (rc.betas.size() != 2) {
      err << "error: compare needs exactly two frame velocities (got "
          << rc.betas.size() << "); pass --beta twice or set run.beta to a pair\n";
      return 2;
    }
    VariableList vars = rc.variables.empty()
                            ? default_variables(f.scenario, rc.policy)
                            : rc.variables;
    FrameComparison fc;
    try {
      fc = compare_frames(f.scenario, rc.betas[0], rc.betas[1], rc.policy,
                          rc.semantics, vars);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
    emit(serialize_frame_comparison(fc), compare_table(fc), o, out);
    return fc.consistent ? 0 : 3;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_signal(double theta, double beta, int n_qubits, const RunOverrides& o,
               std::ostream& out, std::ostream& err) {
  try {
    Scenario s = build_signaling(theta, n_qubits);
    json doc;
    doc["schema_version"] = 1;
    doc["type"] = "signal_report";
    doc["theta"] = round12(theta);
    doc["beta"] = round12(beta);
    doc["n_qubits"] = n_qubits;
    std::ostringstream table;
    table << "signaling probe: theta " << fmt(theta) << "  beta " << fmt(beta)
          << "  n_qubits " << n_qubits << "\n";
    try {
      ThetaRecovery rec = recover_theta(s, FrameVelocity{beta});
      doc["definite_emission_record"] = true;
      json branches = json::array();
      table << "emission-time record, conditioned on the remote outcome:\n";
      for (const auto& b : rec.branches) {
        table << "  A=" << b.remote_outcome << "  theta_hat " << fmt(b.theta_hat)
              << "  sign " << (b.sign > 0 ? "+" : "-") << "  weight "
              << fmt(b.weight) << "  |theta_hat - theta| "
              << fmt(std::abs(b.theta_hat - theta)) << "\n";
        json jb;
        jb["remote_outcome"] = b.remote_outcome;
        jb["theta_hat"] = round12(b.theta_hat);
        jb["sign"] = b.sign;
        jb["weight"] = round12(b.weight);
        branches.push_back(jb);
      }
      doc["branches"] = branches;
      doc["max_lab_overlap"] = round12(rec.max_lab_overlap);
      table << "max overlap between conditional lab states "
            << fmt(rec.max_lab_overlap) << "\n";
      table << "the conditional lab records are "
            << (rec.max_lab_overlap < 1e-6 ? "orthogonal" : "NOT orthogonal")
            << "; the angle is encoded in the record, not in any local marginal\n";
    } catch (const std::runtime_error& e) {
      // In this frame the emission happens before the remote measurement, so
      // the environment holds no definite record worth reading out.
      doc["definite_emission_record"] = false;
      doc["diagnostic"] = e.what();
      table << "no emission-time record in this frame: " << e.what() << "\n";
      RunReport rep = run(s, FrameVelocity{beta}, UpdatePolicy::UnitaryLab,
                          EmissionSemantics::RecordAdaptive);
      json finals = json::array();
      table << "end-of-run environment records per branch:\n";
      for (const auto& b : rep.branches) {
        json jb;
        jb["weight"] = round12(b.weight);
        table << "  weight " << fmt(b.weight);
        if (b.final_record) {
          jb["final_record_label"] = b.final_record->label();
          jb["final_record_theta"] = round12(b.final_record->theta);
          table << "  final_record " << record_str(*b.final_record);
        }
        table << "\n";
        finals.push_back(jb);
      }
      doc["final_records"] = finals;
    }
    emit(doc.dump(2) + "\n", table.str(), o, out);
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    ScenarioFile f = load_scenario_file(path);
    auto violations = validate(f.scenario);
    if (violations.empty()) {
      out << "scenario '" << f.scenario.id << "' is valid\n";
      return 0;
    }
    err << "scenario '" << f.scenario.id << "' failed validation:\n";
    for (const auto& v : violations) err << "  - " << v << "\n";
    return 2;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_list_scenarios(std::ostream& out) {
  out << "built-in scenario families (use as \"builder\" in a scenario file):\n"
      << "  paper      entangled friend/agent pair; the friend's sealed lab is\n"
      << "             measured, reset, and its record emitted as qubits that a\n"
      << "             distant observer reads in the z and x bases\n"
      << "             parameters: n_qubits (default 2)\n"
      << "  basic_wfs  one sealed lab; Wigner measures the whole lab in the\n"
      << "             superposition basis built from the two post-measurement\n"
      << "             lab states\n"
      << "             parameters: alpha, beta (amplitudes, default 1/sqrt(2))\n"
      << "  bipartite  two spacelike-separated measurements on an entangled\n"
      << "             pair; order of application must not matter\n"
      << "             parameters: alpha, beta, gamma, u_angle, v_angle, order\n"
      << "             (order: A_first | B_first)\n"
      << "  signaling  the remote agent measures at angle theta before the lab\n"
      << "             emission; the emitted record depends on theta\n"
      << "             parameters: theta (required, in [0, pi)), n_qubits\n";
  return 0;
}

}  // namespace wfsim::cli
