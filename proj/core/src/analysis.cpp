#include "wfsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace wfsim {

namespace {

const std::string& branch_label(const Branch& b, const Variable& v) {
  for (const auto& o : b.outcomes)
    if (o.event_id == v.first && o.actor == v.second) return o.label;
  throw std::invalid_argument("variable " + v.first + "/" + v.second +
                              " missing from a branch outcome list");
}

// Target-factor state vector of a branch whose targets are in a product with
// the rest of the register, read off the complement configuration carrying
// the most weight. Avoids the eigenvalue noise a density-matrix route adds.
Eigen::VectorXcd factor_slice(const QState& state,
                              const std::vector<std::string>& targets) {
  const Register& reg = state.reg();
  std::vector<int> tidx;
  for (const auto& n : targets) tidx.push_back(reg.index_of(n));
  long tdim = 1;
  for (int i : tidx) tdim *= reg.dim(i);

  std::vector<long> toff(tdim, 0);
  for (long k = 0; k < tdim; ++k) {
    long rem = k, off = 0;
    for (int j = static_cast<int>(tidx.size()) - 1; j >= 0; --j) {
      off += (rem % reg.dim(tidx[j])) * reg.stride(tidx[j]);
      rem /= reg.dim(tidx[j]);
    }
    toff[k] = off;
  }

  std::set<int> tset(tidx.begin(), tidx.end());
  std::vector<int> comp;
  for (int i = 0; i < reg.count(); ++i)
    if (!tset.count(i)) comp.push_back(i);
  long cdim = 1;
  for (int i : comp) cdim *= reg.dim(i);

  const Eigen::VectorXcd& x = state.amplitudes();
  Eigen::VectorXcd best = Eigen::VectorXcd::Zero(tdim);
  double best_norm = -1.0;
  Eigen::VectorXcd slice(tdim);
  for (long k = 0; k < cdim; ++k) {
    long rem = k, base = 0;
    for (int j = static_cast<int>(comp.size()) - 1; j >= 0; --j) {
      base += (rem % reg.dim(comp[j])) * reg.stride(comp[j]);
      rem /= reg.dim(comp[j]);
    }
    for (long r = 0; r < tdim; ++r) slice[r] = x[base + toff[r]];
    double n2 = slice.squaredNorm();
    if (n2 > best_norm) {
      best_norm = n2;
      best = slice;
    }
  }
  return best / best.norm();
}

}  // namespace

JointDistribution joint_distribution(const RunReport& report, const VariableList& variables) {
  if (variables.empty()) throw std::invalid_argument("no variables given");
  JointDistribution table;
  for (const auto& b : report.branches) {
    OutcomeKey key;
    key.reserve(variables.size());
    for (const auto& v : variables) key.push_back(branch_label(b, v));
    table[key] += b.weight;
  }
  return table;
}

double total_variation_distance(const JointDistribution& p, const JointDistribution& q) {
  double sum = 0.0;
  for (const auto& [key, pv] : p) {
    auto it = q.find(key);
    sum += std::abs(pv - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [key, qv] : q)
    if (!p.count(key)) sum += qv;
  return sum / 2.0;
}

std::map<std::string, double> marginal(const JointDistribution& joint, size_t index) {
  std::map<std::string, double> out;
  for (const auto& [key, p] : joint) {
    if (index >= key.size()) throw std::invalid_argument("marginal index out of range");
    out[key[index]] += p;
  }
  return out;
}

double agreement_probability(const RunReport& report, const Variable& a, const Variable& b) {
  double p = 0.0;
  for (const auto& br : report.branches)
    if (branch_label(br, a) == branch_label(br, b)) p += br.weight;
  return p;
}

VariableList default_variables(const Scenario& s, UpdatePolicy policy) {
  VariableList vars;
  for (const auto& ev : s.events) {
    if (const auto* pm = std::get_if<ProjectiveMeasure>(&ev.op))
      vars.push_back({ev.where.id, pm->actor});
    else if (std::holds_alternative<FriendMeasure>(ev.op) && policy == UpdatePolicy::ProjectiveAll)
      vars.push_back({ev.where.id, "F"});
  }
  return vars;
}

FrameComparison compare_frames(const Scenario& s, double beta1, double beta2,
                               UpdatePolicy policy, EmissionSemantics semantics,
                               const VariableList& variables) {
  if (variables.empty()) throw std::invalid_argument("no variables given");
  FrameComparison fc;
  fc.scenario_id = s.id;
  fc.beta1 = beta1;
  fc.beta2 = beta2;
  fc.policy = policy;
  fc.semantics = semantics;
  fc.variables = variables;

  RunReport r1 = run(s, FrameVelocity(beta1), policy, semantics);
  RunReport r2 = run(s, FrameVelocity(beta2), policy, semantics);
  fc.joint1 = joint_distribution(r1, variables);
  fc.joint2 = joint_distribution(r2, variables);
  for (size_t i = 0; i < variables.size(); ++i) {
    fc.marginals1.push_back(marginal(fc.joint1, i));
    fc.marginals2.push_back(marginal(fc.joint2, i));
  }
  fc.tvd = total_variation_distance(fc.joint1, fc.joint2);
  fc.consistent = fc.tvd <= kConsistencyTvd;
  return fc;
}

double x_agreement(const RunReport& report) {
  const double pi = std::acos(-1.0);
  // x measurements in executed order, identified by their basis angle. Only
  // observers who repeat the x readout count; an agent measuring one qubit
  // once is characterizing their own system, not cross-checking a record.
  std::vector<Variable> all_x;
  std::map<std::string, int> per_actor;
  for (const auto& id : report.event_order) {
    auto it = report.measurements.find(id);
    if (it == report.measurements.end() || !it->second.basis_angle) continue;
    if (std::abs(*it->second.basis_angle - pi / 2) <= 1e-9) {
      all_x.push_back({id, it->second.actor});
      ++per_actor[it->second.actor];
    }
  }
  std::vector<Variable> xs;
  for (const auto& v : all_x)
    if (per_actor[v.second] >= 2) xs.push_back(v);
  if (xs.size() < 2)
    throw std::invalid_argument(
        "need an observer with at least two x-basis measurements");

  double p = 0.0;
  for (const auto& b : report.branches) {
    const std::string& first = branch_label(b, xs[0]);
    bool all_equal = true;
    for (size_t i = 1; i < xs.size() && all_equal; ++i)
      all_equal = branch_label(b, xs[i]) == first;
    if (all_equal) p += b.weight;
  }
  return p;
}

ThetaRecovery recover_theta(const Scenario& s, FrameVelocity beta, UpdatePolicy policy) {
  EventOrder order = order_events_detailed(s.event_locations(), beta);

  std::string emit_id;
  const EmitQubits* emit = nullptr;
  for (const auto& id : order.ids) {
    const ScenarioEvent* ev = s.find_event(id);
    if ((emit = std::get_if<EmitQubits>(&ev->op))) {
      emit_id = id;
      break;
    }
  }
  if (!emit) throw std::invalid_argument("scenario has no emission event");

  const FriendMeasure* fm = nullptr;
  for (const auto& ev : s.events)
    if ((fm = std::get_if<FriendMeasure>(&ev.op))) break;
  if (!fm) throw std::invalid_argument("scenario has no lab premeasurement");

  // The remote agent's measurement must already have collapsed the lab when
  // the emission fires in this frame.
  Variable remote;
  bool remote_before_emit = false;
  for (const auto& id : order.ids) {
    if (id == emit_id) break;
    const ScenarioEvent* ev = s.find_event(id);
    if (const auto* pm = std::get_if<ProjectiveMeasure>(&ev->op)) {
      remote = {id, pm->actor};
      remote_before_emit = true;
      break;
    }
  }
  if (!remote_before_emit)
    throw std::runtime_error("no remote measurement precedes the emission in this frame; "
                             "the emission sees no definite record");

  // Replay only the pre-emission history of this frame.
  Scenario pre = s;
  std::set<std::string> kept;
  for (const auto& id : order.ids) {
    if (id == emit_id) break;
    kept.insert(id);
  }
  std::erase_if(pre.events, [&](const ScenarioEvent& ev) { return !kept.count(ev.where.id); });
  std::erase_if(pre.spacelike_pairs, [&](const auto& pair) {
    return !kept.count(pair.first) || !kept.count(pair.second);
  });

  RunReport rep = run(pre, beta, policy, EmissionSemantics::RecordAdaptive);

  ThetaRecovery out;
  std::vector<std::string> lab = {fm->spin, fm->apparatus, fm->environment};
  std::vector<Eigen::VectorXcd> lab_vecs;
  for (const auto& b : rep.branches) {
    auto rec = extract_record_angle(reduced_density(b.state, {fm->environment}));
    if (!rec)
      throw std::runtime_error("no definite record in the pre-emission environment");
    out.branches.push_back({branch_label(b, remote), rec->theta, rec->sign, b.weight});
    lab_vecs.push_back(factor_slice(b.state, lab));
  }

  for (size_t i = 0; i < lab_vecs.size(); ++i)
    for (size_t j = i + 1; j < lab_vecs.size(); ++j)
      out.max_lab_overlap =
          std::max(out.max_lab_overlap, std::abs(lab_vecs[i].dot(lab_vecs[j])));
  return out;
}

}  // namespace wfsim
