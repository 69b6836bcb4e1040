#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wfsim {

using cxd = std::complex<double>;

// Numeric contracts shared across the engine.
inline constexpr double kNormTol = 1e-10;          // state / basis normalization
inline constexpr double kHermitianTol = 1e-10;     // density-matrix symmetry
inline constexpr double kPsdTol = 1e-8;            // smallest admissible eigenvalue
inline constexpr double kOutcomeTol = 1e-12;       // probabilities below this are dropped
inline constexpr double kCompletionTol = 1e-8;     // Gram-Schmidt residual cutoff

/// One named subsystem of a register: a finite-dimensional factor with
/// labeled basis states, e.g. {"eps0", "eps+", "eps-"}.
struct SubsystemSpec {
  std::string name;
  int dimension = 0;
  std::vector<std::string> basis_labels;

  bool operator==(const SubsystemSpec&) const = default;
};

/// Ordered collection of subsystems. Amplitude indexing is row-major over
/// the declared order: the first subsystem varies slowest.
class Register {
 public:
  explicit Register(std::vector<SubsystemSpec> subsystems);

  int count() const { return static_cast<int>(subsystems_.size()); }
  const SubsystemSpec& at(int i) const { return subsystems_.at(i); }
  const std::vector<SubsystemSpec>& subsystems() const { return subsystems_; }

  // Throws std::invalid_argument for unknown names/labels.
  int index_of(const std::string& name) const;
  int label_index(int subsystem, const std::string& label) const;

  long total_dimension() const { return total_dim_; }
  long stride(int i) const { return strides_.at(i); }
  int dim(int i) const { return subsystems_.at(i).dimension; }

  bool operator==(const Register& other) const {
    return subsystems_ == other.subsystems_;
  }

 private:
  std::vector<SubsystemSpec> subsystems_;
  std::vector<long> strides_;
  long total_dim_ = 1;
};

/// Dense pure state over a register. Immutable; operations return new values.
class QState {
 public:
  QState(std::shared_ptr<const Register> reg, Eigen::VectorXcd amplitudes);

  const Register& reg() const { return *reg_; }
  const std::shared_ptr<const Register>& reg_ptr() const { return reg_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  double squared_norm() const { return amps_.squaredNorm(); }

 private:
  std::shared_ptr<const Register> reg_;
  Eigen::VectorXcd amps_;
};

/// Validated reduced state: Hermitian, unit trace, positive semidefinite
/// within kPsdTol. Construct through from_matrix.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Eigen::MatrixXcd m);

  long dimension() const { return m_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  double purity() const;                              // Re tr(rho^2)
  double fidelity(const Eigen::VectorXcd& v) const;   // Re <v|rho|v>

 private:
  explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  Eigen::MatrixXcd m_;
};

/// Measurement basis for a single qubit, parameterized by angle theta:
///   |+theta> =  cos(theta/2)|0> + sin(theta/2)|1>
///   |-theta> = -sin(theta/2)|0> + cos(theta/2)|1>
/// theta = 0 is the z basis, theta = pi/2 the x basis.
struct QubitBasis {
  double angle = 0.0;

  Eigen::Vector2cd plus() const;
  Eigen::Vector2cd minus() const;

  static QubitBasis z() { return {0.0}; }
  static QubitBasis x();
};

struct LabeledVector {
  std::string label;
  Eigen::VectorXcd vec;
};

/// What to do with the part of the target factor a measurement basis does
/// not span: reject the basis, or collect it into a "rest" outcome.
enum class RemainderPolicy { Error, Collect };

struct MeasurementOutcome {
  std::string label;
  double probability = 0.0;
  QState state;
};

/// Product basis state selected by one label per subsystem.
QState init_register(const std::vector<SubsystemSpec>& specs,
                     const std::map<std::string, std::string>& initial_labels);
QState init_register(std::shared_ptr<const Register> reg,
                     const std::map<std::string, std::string>& initial_labels);

/// Applies u to the factor spanned by `targets` (in the given order; basis of
/// the factor is row-major over that order). u must be unitary within kNormTol.
QState apply_unitary(const QState& state, const std::vector<std::string>& targets,
                     const Eigen::MatrixXcd& u);

/// Extends orthonormal columns to a full unitary. Deterministic: candidate
/// columns are the standard basis vectors in index order; residuals below
/// kCompletionTol are skipped.
Eigen::MatrixXcd complete_isometry(const std::vector<Eigen::VectorXcd>& columns,
                                   long dimension);

/// Projective measurement of the target factor in the given orthonormal
/// basis. Outcomes with probability below kOutcomeTol are omitted; collapsed
/// states are renormalized. Probabilities sum to 1 within 1e-9.
std::vector<MeasurementOutcome> measure(const QState& state,
                                        const std::vector<std::string>& targets,
                                        const std::vector<LabeledVector>& basis,
                                        RemainderPolicy remainder);

/// Reduced density matrix of the target factor (row-major over `targets`).
DensityMatrix reduced_density(const QState& state,
                              const std::vector<std::string>& targets);

/// First candidate (in list order) with fidelity >= 1 - tol against a
/// near-pure rho; nullopt if rho is mixed beyond tol or nothing matches.
std::optional<std::string> match_pure_record(const DensityMatrix& rho,
                                             const std::vector<LabeledVector>& candidates,
                                             double tol);

}  // namespace wfsim
