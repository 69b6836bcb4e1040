#include "wfsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wfsim {

namespace {

Eigen::VectorXcd basis_vec(long dim, long index) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v[index] = 1.0;
  return v;
}

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i)
    for (long j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

// Unitary with U in_k = out_k, extended deterministically over the rest of
// the space via isometry completion on both sides.
Eigen::MatrixXcd mapping_unitary(const std::vector<Eigen::VectorXcd>& in,
                                 const std::vector<Eigen::VectorXcd>& out, long dim) {
  Eigen::MatrixXcd vin = complete_isometry(in, dim);
  Eigen::MatrixXcd vout = complete_isometry(out, dim);
  return vout * vin.adjoint();
}

struct LabShape {
  int spin_dim, app_dim, env_dim;
};

LabShape lab_shape(const Register& reg, const std::string& spin, const std::string& apparatus,
                   const std::string& environment) {
  return {reg.dim(reg.index_of(spin)), reg.dim(reg.index_of(apparatus)),
          reg.dim(reg.index_of(environment))};
}

// Entangling premeasurement on (spin, apparatus, environment):
// |b_k>|idle>|idle> -> |b_k>|record_k>|record_k>, records at indices 1 and 2.
Eigen::MatrixXcd friend_unitary(const LabShape& sh, const QubitBasis& basis) {
  long dim = static_cast<long>(sh.spin_dim) * sh.app_dim * sh.env_dim;
  std::vector<Eigen::VectorXcd> in, out;
  Eigen::VectorXcd b[2] = {basis.plus(), basis.minus()};
  for (int k = 0; k < 2; ++k) {
    in.push_back(kron(b[k], kron(basis_vec(sh.app_dim, 0), basis_vec(sh.env_dim, 0))));
    out.push_back(kron(b[k], kron(basis_vec(sh.app_dim, k + 1), basis_vec(sh.env_dim, k + 1))));
  }
  return mapping_unitary(in, out, dim);
}

// Undoes the spin/apparatus correlation while the environment keeps the
// record: |b_k>|record_k>|record_k> -> |fiducial>|idle>|record_k>.
Eigen::MatrixXcd reset_unitary(const LabShape& sh, const QubitBasis& basis) {
  long dim = static_cast<long>(sh.spin_dim) * sh.app_dim * sh.env_dim;
  std::vector<Eigen::VectorXcd> in, out;
  Eigen::VectorXcd b[2] = {basis.plus(), basis.minus()};
  for (int k = 0; k < 2; ++k) {
    in.push_back(kron(b[k], kron(basis_vec(sh.app_dim, k + 1), basis_vec(sh.env_dim, k + 1))));
    out.push_back(kron(basis_vec(2, 0), kron(basis_vec(sh.app_dim, 0), basis_vec(sh.env_dim, k + 1))));
  }
  return mapping_unitary(in, out, dim);
}

// Controlled flip on one emitted qubit: X when the environment sits in the
// minus record level.
Eigen::MatrixXcd emit_flip_unitary(int env_dim) {
  long dim = 2L * env_dim;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  long r0 = 2L * 2 + 0, r1 = 2L * 2 + 1;  // (env = 2, qubit = 0/1)
  u(r0, r0) = 0.0;
  u(r1, r1) = 0.0;
  u(r0, r1) = 1.0;
  u(r1, r0) = 1.0;
  return u;
}

const QubitBasis* record_basis_for(const Scenario& s, const std::string& spin,
                                   const std::string& apparatus, const std::string& environment) {
  for (const auto& ev : s.events)
    if (const auto* fm = std::get_if<FriendMeasure>(&ev.op))
      if (fm->spin == spin && fm->apparatus == apparatus && fm->environment == environment)
        return &fm->record_basis;
  return nullptr;
}

std::vector<LabeledVector> measurement_basis(const ProjectiveMeasure& pm) {
  if (const auto* qb = std::get_if<QubitBasis>(&pm.basis))
    return {{"+", qb->plus()}, {"-", qb->minus()}};
  return std::get<std::vector<LabeledVector>>(pm.basis);
}

std::string describe_basis(const ProjectiveMeasure& pm) {
  if (const auto* qb = std::get_if<QubitBasis>(&pm.basis))
    return "qubit basis, theta = " + std::to_string(qb->angle);
  return "explicit basis, " +
         std::to_string(std::get<std::vector<LabeledVector>>(pm.basis).size()) + " vectors";
}

// Surviving weight plus everything pruned so far must still account for the
// full probability; anything else is a bookkeeping bug, not rounding.
void check_weights(const std::vector<Branch>& branches, double pruned_mass,
                   const std::string& event_id) {
  double total = pruned_mass;
  for (const auto& b : branches) total += b.weight;
  if (std::abs(total - 1.0) > kWeightTol)
    throw std::runtime_error("branch weights drifted from 1 after event " + event_id);
}

QState initial_state(const Scenario& s, const std::shared_ptr<const Register>& reg) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (int i = 0; i < reg->count(); ++i) {
    const auto& sub = reg->at(i);
    if (auto it = s.initial_amplitudes.find(sub.name); it != s.initial_amplitudes.end()) {
      v = kron(v, it->second);
    } else {
      v = kron(v, basis_vec(sub.dimension, reg->label_index(i, s.initial_labels.at(sub.name))));
    }
  }
  return QState(reg, std::move(v));
}

}  // namespace

std::optional<RecordAngle> extract_record_angle(const DensityMatrix& rho_env, int plus_index,
                                                int minus_index) {
  long dim = rho_env.dimension();
  if (plus_index < 0 || minus_index < 0 || plus_index >= dim || minus_index >= dim ||
      plus_index == minus_index)
    throw std::invalid_argument("record indices must be distinct and in range");

  constexpr double kRecordTol = 1e-9;
  if (rho_env.purity() < 1.0 - kRecordTol) return std::nullopt;
  double outside = 0.0;
  for (long d = 0; d < dim; ++d)
    if (d != plus_index && d != minus_index) outside += rho_env.matrix()(d, d).real();
  if (outside > kRecordTol) return std::nullopt;

  Eigen::Matrix2cd block;
  block << rho_env.matrix()(plus_index, plus_index), rho_env.matrix()(plus_index, minus_index),
      rho_env.matrix()(minus_index, plus_index), rho_env.matrix()(minus_index, minus_index);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
  Eigen::Vector2cd v = es.eigenvectors().col(1);  // principal component

  // Fix the global phase against the larger component, then demand a real
  // relative phase: the record family has real coefficients.
  cxd anchor = std::abs(v[0]) >= std::abs(v[1]) ? v[0] : v[1];
  v *= std::conj(anchor) / std::abs(anchor);
  if (std::abs(v[0].imag()) > kRecordTol || std::abs(v[1].imag()) > kRecordTol)
    return std::nullopt;

  // Direction angle modulo pi decides the family member:
  //   [0, pi/2)  -> sign +, theta = 2 phi
  //   [pi/2, pi) -> sign -, theta = 2 phi - pi
  double phi = std::atan2(v[1].real(), v[0].real());
  const double pi = std::acos(-1.0);
  if (phi < 0.0) phi += pi;
  if (phi >= pi) phi -= pi;
  if (phi < pi / 2) return RecordAngle{2.0 * phi, +1};
  return RecordAngle{std::max(0.0, 2.0 * phi - pi), -1};
}

RunReport run(const Scenario& s, FrameVelocity beta, UpdatePolicy policy,
              EmissionSemantics semantics, const RunOptions& options) {
  if (auto violations = validate(s); !violations.empty())
    throw validation_error(std::move(violations));

  auto reg = std::make_shared<Register>(s.register_spec);

  RunReport rep;
  rep.scenario_id = s.id;
  rep.beta = beta.beta();
  rep.policy = policy;
  rep.semantics = semantics;

  EventOrder order = order_events_detailed(s.event_locations(), beta);
  rep.event_order = order.ids;
  rep.order_notes = order.tie_notes;

  // Note structurally significant reorderings relative to the rest frame.
  std::vector<std::string> rest = order_events(s.event_locations(), FrameVelocity(0.0));
  auto position = [](const std::vector<std::string>& ids, const std::string& id) {
    return std::find(ids.begin(), ids.end(), id) - ids.begin();
  };
  for (const auto& [a, b] : s.spacelike_pairs) {
    bool rest_before = position(rest, a) < position(rest, b);
    bool now_before = position(order.ids, a) < position(order.ids, b);
    if (rest_before != now_before)
      rep.order_notes.push_back("reordered vs rest frame: " + a + "/" + b);
  }

  std::vector<Branch> branches;
  branches.push_back({initial_state(s, reg), 1.0, {}, 0.0, std::nullopt, std::nullopt});
  double pruned_mass = 0.0;

  for (const std::string& id : order.ids) {
    const ScenarioEvent& ev = *s.find_event(id);
    double tprime = boost(ev.where, beta).t;
    std::vector<Branch> next;

    if (const auto* prep = std::get_if<PrepareEntangled>(&ev.op)) {
      Eigen::VectorXcd target = prep->amplitudes;
      Eigen::MatrixXcd u = complete_isometry({target}, 4);
      for (auto& b : branches) {
        b.state = apply_unitary(b.state, {prep->first, prep->second}, u);
        b.frame_time = tprime;
        next.push_back(std::move(b));
      }
    } else if (const auto* fm = std::get_if<FriendMeasure>(&ev.op)) {
      LabShape sh = lab_shape(*reg, fm->spin, fm->apparatus, fm->environment);
      Eigen::MatrixXcd u = friend_unitary(sh, fm->record_basis);
      std::vector<std::string> lab = {fm->spin, fm->apparatus, fm->environment};
      for (auto& b : branches) {
        b.state = apply_unitary(b.state, lab, u);
        b.frame_time = tprime;
        if (policy == UpdatePolicy::UnitaryLab) {
          next.push_back(std::move(b));
          continue;
        }
        // ProjectiveAll: the record becomes definite as soon as it is written.
        std::vector<LabeledVector> record_basis = {
            {"+", basis_vec(sh.env_dim, 1)}, {"-", basis_vec(sh.env_dim, 2)}};
        for (auto& mo :
             measure(b.state, {fm->environment}, record_basis, RemainderPolicy::Collect)) {
          double w = b.weight * mo.probability;
          if (w < options.prune_threshold) {
            pruned_mass += w;
            continue;
          }
          Branch child = b;
          child.state = std::move(mo.state);
          child.weight = w;
          child.outcomes.push_back({id, "F", mo.label});
          next.push_back(std::move(child));
        }
      }
      if (policy == UpdatePolicy::ProjectiveAll)
        rep.measurements[id] = {"F", std::nullopt, "environment record basis"};
    } else if (const auto* rl = std::get_if<ResetLab>(&ev.op)) {
      LabShape sh = lab_shape(*reg, rl->spin, rl->apparatus, rl->environment);
      const QubitBasis* rb = record_basis_for(s, rl->spin, rl->apparatus, rl->environment);
      Eigen::MatrixXcd u = reset_unitary(sh, rb ? *rb : QubitBasis::z());
      std::vector<std::string> lab = {rl->spin, rl->apparatus, rl->environment};
      for (auto& b : branches) {
        b.state = apply_unitary(b.state, lab, u);
        b.frame_time = tprime;
        next.push_back(std::move(b));
      }
    } else if (const auto* em = std::get_if<EmitQubits>(&ev.op)) {
      EmissionSemantics sem = em->semantics_override.value_or(semantics);
      int env_dim = reg->dim(reg->index_of(em->environment));
      Eigen::MatrixXcd flip = emit_flip_unitary(env_dim);
      for (auto& b : branches) {
        std::optional<RecordAngle> rec;
        if (sem == EmissionSemantics::RecordAdaptive)
          rec = extract_record_angle(reduced_density(b.state, {em->environment}));
        if (rec) {
          // Definite record: prepare each fresh qubit in |sign theta>.
          QubitBasis rb{rec->theta};
          Eigen::VectorXcd target = rec->sign >= 0 ? rb.plus() : rb.minus();
          Eigen::MatrixXcd u = complete_isometry({target}, 2);
          for (const auto& q : em->qubit_names) b.state = apply_unitary(b.state, {q}, u);
          b.outcomes.push_back({id, "F", rec->label()});
          b.emit_record = rec;
        } else {
          for (const auto& q : em->qubit_names)
            b.state = apply_unitary(b.state, {em->environment, q}, flip);
        }
        b.frame_time = tprime;
        next.push_back(std::move(b));
      }
      if (sem == EmissionSemantics::RecordAdaptive)
        rep.measurements[id] = {"F", std::nullopt, "emission-time record"};
    } else {
      const auto& pm = std::get<ProjectiveMeasure>(ev.op);
      std::vector<LabeledVector> basis = measurement_basis(pm);
      std::optional<double> angle;
      if (const auto* qb = std::get_if<QubitBasis>(&pm.basis)) angle = qb->angle;
      rep.measurements[id] = {pm.actor, angle, describe_basis(pm)};
      for (auto& b : branches) {
        for (auto& mo : measure(b.state, pm.targets, basis, pm.remainder)) {
          double w = b.weight * mo.probability;
          if (w < options.prune_threshold) {
            pruned_mass += w;
            continue;
          }
          Branch child = b;
          child.state = std::move(mo.state);
          child.weight = w;
          child.outcomes.push_back({id, pm.actor, mo.label});
          child.frame_time = tprime;
          next.push_back(std::move(child));
        }
      }
    }

    branches = std::move(next);
    check_weights(branches, pruned_mass, id);
  }

  // Read the surviving environment record off every final branch; when it is
  // definite it becomes the synthetic variable ("F_record", "F").
  for (const auto& ev : s.events) {
    const auto* fm = std::get_if<FriendMeasure>(&ev.op);
    if (!fm) continue;
    rep.measurements["F_record"] = {"F", std::nullopt, "final environment record"};
    for (auto& b : branches) {
      b.final_record = extract_record_angle(reduced_density(b.state, {fm->environment}));
      if (b.final_record) b.outcomes.push_back({"F_record", "F", b.final_record->label()});
    }
    break;
  }

  if (branches.empty())
    throw std::runtime_error("prune threshold removed every branch");
  double total = 0.0;
  for (const auto& b : branches) total += b.weight;
  for (auto& b : branches) b.weight /= total;

  rep.branches = std::move(branches);
  return rep;
}

SampleReport sample(const Scenario& s, FrameVelocity beta, UpdatePolicy policy,
                    EmissionSemantics semantics, long long n, unsigned long long seed) {
  if (n < 1) throw std::invalid_argument("sample count must be positive");
  RunReport rep = run(s, beta, policy, semantics);

  std::vector<double> cumulative;
  cumulative.reserve(rep.branches.size());
  double acc = 0.0;
  for (const auto& b : rep.branches) {
    acc += b.weight;
    cumulative.push_back(acc);
  }

  std::vector<long long> counts(rep.branches.size(), 0);
  std::mt19937_64 gen(seed);
  for (long long i = 0; i < n; ++i) {
    // 53-bit uniform in [0, 1); avoids platform-dependent distributions.
    double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    size_t k = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
    if (k >= counts.size()) k = counts.size() - 1;
    ++counts[k];
  }

  SampleReport sr;
  sr.scenario_id = s.id;
  sr.beta = beta.beta();
  sr.policy = policy;
  sr.semantics = semantics;
  sr.n = n;
  sr.seed = seed;
  for (size_t k = 0; k < counts.size(); ++k)
    sr.counts.push_back({rep.branches[k].outcomes, counts[k]});
  return sr;
}

}  // namespace wfsim
