#include "wfsim/qstate.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace wfsim {

namespace {

// Mixed-radix offsets of every basis state of the chosen factor, and of its
// complement, measured in flat amplitude indices. `targets` may appear in any
// order; the factor basis is row-major over that order.
struct FactorIndex {
  std::vector<int> target_idx;
  std::vector<long> target_offsets;
  std::vector<long> base_offsets;  // complement configurations
  long target_dim = 1;
};

FactorIndex build_factor_index(const Register& reg, const std::vector<std::string>& targets) {
  if (targets.empty()) throw std::invalid_argument("no target subsystems given");
  FactorIndex fi;
  std::set<int> seen;
  for (const auto& name : targets) {
    int i = reg.index_of(name);
    if (!seen.insert(i).second)
      throw std::invalid_argument("duplicate target subsystem: " + name);
    fi.target_idx.push_back(i);
    fi.target_dim *= reg.dim(i);
  }

  fi.target_offsets.assign(fi.target_dim, 0);
  for (long k = 0; k < fi.target_dim; ++k) {
    long rem = k, off = 0;
    for (int j = static_cast<int>(fi.target_idx.size()) - 1; j >= 0; --j) {
      int sub = fi.target_idx[j];
      off += (rem % reg.dim(sub)) * reg.stride(sub);
      rem /= reg.dim(sub);
    }
    fi.target_offsets[k] = off;
  }

  std::vector<int> comp;
  for (int i = 0; i < reg.count(); ++i)
    if (!seen.count(i)) comp.push_back(i);
  long comp_dim = 1;
  for (int i : comp) comp_dim *= reg.dim(i);
  fi.base_offsets.assign(comp_dim, 0);
  for (long k = 0; k < comp_dim; ++k) {
    long rem = k, off = 0;
    for (int j = static_cast<int>(comp.size()) - 1; j >= 0; --j) {
      int sub = comp[j];
      off += (rem % reg.dim(sub)) * reg.stride(sub);
      rem /= reg.dim(sub);
    }
    fi.base_offsets[k] = off;
  }
  return fi;
}

void check_unitary(const Eigen::MatrixXcd& u, long dim) {
  if (u.rows() != dim || u.cols() != dim)
    throw std::invalid_argument("matrix dimension does not match target factor");
  Eigen::MatrixXcd defect = u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim);
  if (defect.cwiseAbs().maxCoeff() > kNormTol)
    throw std::invalid_argument("matrix is not unitary within tolerance");
}

void check_orthonormal(const std::vector<Eigen::VectorXcd>& vecs, long dim, double tol) {
  for (const auto& v : vecs)
    if (v.size() != dim)
      throw std::invalid_argument("basis vector dimension mismatch");
  for (size_t i = 0; i < vecs.size(); ++i) {
    for (size_t j = i; j < vecs.size(); ++j) {
      cxd g = vecs[i].dot(vecs[j]);  // conjugates the left argument
      double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - expect) > tol)
        throw std::invalid_argument("basis vectors are not orthonormal within tolerance");
    }
  }
}

}  // namespace

Register::Register(std::vector<SubsystemSpec> subsystems)
    : subsystems_(std::move(subsystems)) {
  if (subsystems_.empty()) throw std::invalid_argument("register must not be empty");
  std::set<std::string> names;
  for (const auto& s : subsystems_) {
    if (s.name.empty()) throw std::invalid_argument("subsystem name must not be empty");
    if (!names.insert(s.name).second)
      throw std::invalid_argument("duplicate subsystem name: " + s.name);
    if (s.dimension < 2)
      throw std::invalid_argument("subsystem dimension must be >= 2: " + s.name);
    if (static_cast<int>(s.basis_labels.size()) != s.dimension)
      throw std::invalid_argument("basis label count must equal dimension: " + s.name);
    std::set<std::string> labels(s.basis_labels.begin(), s.basis_labels.end());
    if (static_cast<int>(labels.size()) != s.dimension)
      throw std::invalid_argument("duplicate basis label in subsystem: " + s.name);
  }
  strides_.assign(subsystems_.size(), 1);
  for (int i = static_cast<int>(subsystems_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * subsystems_[i + 1].dimension;
  total_dim_ = strides_[0] * subsystems_[0].dimension;
}

int Register::index_of(const std::string& name) const {
  for (int i = 0; i < count(); ++i)
    if (subsystems_[i].name == name) return i;
  throw std::invalid_argument("unknown subsystem: " + name);
}

int Register::label_index(int subsystem, const std::string& label) const {
  const auto& s = subsystems_.at(subsystem);
  for (int i = 0; i < s.dimension; ++i)
    if (s.basis_labels[i] == label) return i;
  throw std::invalid_argument("unknown basis label '" + label + "' for subsystem " + s.name);
}

QState::QState(std::shared_ptr<const Register> reg, Eigen::VectorXcd amplitudes)
    : reg_(std::move(reg)), amps_(std::move(amplitudes)) {
  if (!reg_) throw std::invalid_argument("null register");
  if (amps_.size() != reg_->total_dimension())
    throw std::invalid_argument("amplitude vector does not match register dimension");
  if (!amps_.allFinite())
    throw std::invalid_argument("amplitudes must be finite");
  if (std::abs(amps_.squaredNorm() - 1.0) > kNormTol)
    throw std::invalid_argument("state is not normalized within tolerance");
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("density matrix must be square");
  if (!m.allFinite())
    throw std::invalid_argument("density matrix entries must be finite");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw std::invalid_argument("density matrix is not Hermitian within tolerance");
  if (std::abs(m.trace().real() - 1.0) > kHermitianTol || std::abs(m.trace().imag()) > kHermitianTol)
    throw std::invalid_argument("density matrix trace must be 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol)
    throw std::invalid_argument("density matrix is not positive semidefinite within tolerance");
  return DensityMatrix(std::move(m));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

double DensityMatrix::fidelity(const Eigen::VectorXcd& v) const {
  if (v.size() != m_.rows())
    throw std::invalid_argument("vector dimension does not match density matrix");
  return (v.dot(m_ * v)).real();
}

Eigen::Vector2cd QubitBasis::plus() const {
  return {cxd(std::cos(angle / 2), 0.0), cxd(std::sin(angle / 2), 0.0)};
}

Eigen::Vector2cd QubitBasis::minus() const {
  return {cxd(-std::sin(angle / 2), 0.0), cxd(std::cos(angle / 2), 0.0)};
}

QubitBasis QubitBasis::x() { return {std::acos(-1.0) / 2}; }

QState init_register(const std::vector<SubsystemSpec>& specs,
                     const std::map<std::string, std::string>& initial_labels) {
  return init_register(std::make_shared<Register>(specs), initial_labels);
}

QState init_register(std::shared_ptr<const Register> reg,
                     const std::map<std::string, std::string>& initial_labels) {
  if (!reg) throw std::invalid_argument("null register");
  if (static_cast<int>(initial_labels.size()) != reg->count())
    throw std::invalid_argument("initial_labels must name every subsystem exactly once");
  long index = 0;
  for (const auto& [name, label] : initial_labels) {
    int i = reg->index_of(name);
    index += reg->label_index(i, label) * reg->stride(i);
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(reg->total_dimension());
  amps[index] = 1.0;
  return QState(std::move(reg), std::move(amps));
}

QState apply_unitary(const QState& state, const std::vector<std::string>& targets,
                     const Eigen::MatrixXcd& u) {
  const Register& reg = state.reg();
  FactorIndex fi = build_factor_index(reg, targets);
  check_unitary(u, fi.target_dim);

  const Eigen::VectorXcd& x = state.amplitudes();
  Eigen::VectorXcd y(x.size());
  Eigen::VectorXcd slice(fi.target_dim);
  for (long base : fi.base_offsets) {
    for (long c = 0; c < fi.target_dim; ++c) slice[c] = x[base + fi.target_offsets[c]];
    Eigen::VectorXcd out = u * slice;
    for (long r = 0; r < fi.target_dim; ++r) y[base + fi.target_offsets[r]] = out[r];
  }
  return QState(state.reg_ptr(), std::move(y));
}

Eigen::MatrixXcd complete_isometry(const std::vector<Eigen::VectorXcd>& columns,
                                   long dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (static_cast<long>(columns.size()) > dimension)
    throw std::invalid_argument("more columns than the dimension admits");
  check_orthonormal(columns, dimension, kNormTol);

  Eigen::MatrixXcd b(dimension, dimension);
  long m = 0;
  for (const auto& c : columns) b.col(m++) = c;

  for (long i = 0; i < dimension && m < dimension; ++i) {
    Eigen::VectorXcd r = Eigen::VectorXcd::Zero(dimension);
    r[i] = 1.0;
    // Two projection passes keep orthogonality at machine precision.
    for (int pass = 0; pass < 2; ++pass)
      for (long j = 0; j < m; ++j) r -= b.col(j) * b.col(j).dot(r);
    double n = r.norm();
    if (n > kCompletionTol) b.col(m++) = r / n;
  }
  if (m < dimension)
    throw std::runtime_error("isometry completion failed to span the space");

  Eigen::MatrixXcd defect = b.adjoint() * b - Eigen::MatrixXcd::Identity(dimension, dimension);
  if (defect.cwiseAbs().maxCoeff() > kNormTol)
    throw std::runtime_error("completed matrix is not unitary within tolerance");
  return b;
}

std::vector<MeasurementOutcome> measure(const QState& state,
                                        const std::vector<std::string>& targets,
                                        const std::vector<LabeledVector>& basis,
                                        RemainderPolicy remainder) {
  if (basis.empty()) throw std::invalid_argument("measurement basis must not be empty");
  const Register& reg = state.reg();
  FactorIndex fi = build_factor_index(reg, targets);

  std::vector<Eigen::VectorXcd> vecs;
  std::set<std::string> labels;
  for (const auto& lv : basis) {
    if (!labels.insert(lv.label).second)
      throw std::invalid_argument("duplicate outcome label: " + lv.label);
    vecs.push_back(lv.vec);
  }
  check_orthonormal(vecs, fi.target_dim, kNormTol);
  bool complete = static_cast<long>(basis.size()) == fi.target_dim;
  if (!complete && remainder == RemainderPolicy::Error)
    throw std::invalid_argument("measurement basis does not span the target factor");

  const Eigen::VectorXcd& x = state.amplitudes();
  Eigen::VectorXcd projected_sum = Eigen::VectorXcd::Zero(x.size());
  std::vector<MeasurementOutcome> outcomes;

  Eigen::VectorXcd slice(fi.target_dim);
  for (const auto& lv : basis) {
    Eigen::VectorXcd collapsed = Eigen::VectorXcd::Zero(x.size());
    double p = 0.0;
    for (long base : fi.base_offsets) {
      for (long c = 0; c < fi.target_dim; ++c) slice[c] = x[base + fi.target_offsets[c]];
      cxd a = lv.vec.dot(slice);  // <b|slice>
      p += std::norm(a);
      for (long r = 0; r < fi.target_dim; ++r)
        collapsed[base + fi.target_offsets[r]] = a * lv.vec[r];
    }
    projected_sum += collapsed;
    if (p >= kOutcomeTol)
      outcomes.push_back({lv.label, p, QState(state.reg_ptr(), collapsed / std::sqrt(p))});
  }

  if (!complete && remainder == RemainderPolicy::Collect) {
    Eigen::VectorXcd residual = x - projected_sum;
    double p = residual.squaredNorm();
    if (p >= kOutcomeTol)
      outcomes.push_back({"rest", p, QState(state.reg_ptr(), residual / std::sqrt(p))});
  }
  return outcomes;
}

DensityMatrix reduced_density(const QState& state, const std::vector<std::string>& targets) {
  const Register& reg = state.reg();
  FactorIndex fi = build_factor_index(reg, targets);
  const Eigen::VectorXcd& x = state.amplitudes();

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(fi.target_dim, fi.target_dim);
  for (long base : fi.base_offsets)
    for (long r = 0; r < fi.target_dim; ++r) {
      cxd xr = x[base + fi.target_offsets[r]];
      if (xr == cxd(0.0, 0.0)) continue;
      for (long c = 0; c < fi.target_dim; ++c)
        rho(r, c) += xr * std::conj(x[base + fi.target_offsets[c]]);
    }
  // Rounding can leave the trace a hair off 1; rescale before validating.
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(std::move(rho));
}

std::optional<std::string> match_pure_record(const DensityMatrix& rho,
                                             const std::vector<LabeledVector>& candidates,
                                             double tol) {
  if (tol <= 0.0 || tol >= 1.0) throw std::invalid_argument("tol must lie in (0, 1)");
  for (const auto& c : candidates)
    if (std::abs(c.vec.squaredNorm() - 1.0) > kNormTol)
      throw std::invalid_argument("candidate vector is not normalized: " + c.label);
  if (rho.purity() < 1.0 - tol) return std::nullopt;
  for (const auto& c : candidates)
    if (rho.fidelity(c.vec) >= 1.0 - tol) return c.label;
  return std::nullopt;
}

}  // namespace wfsim
