#include "spinnet/qstate.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinnet/errors.h"

namespace spinnet::qstate {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw CapacityError("qubit count " + std::to_string(n) + " outside 1.." +
                        std::to_string(kMaxQubits));
  }
}

void check_targets(std::span<const int> targets, int num_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) {
      throw std::out_of_range("qubit index " + std::to_string(targets[i]) +
                              " out of range for " + std::to_string(num_qubits) + " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) throw std::invalid_argument("repeated target qubit");
    }
  }
}

// In-place m <- (op on targets) * m. op is ordered with targets[0] as its
// most significant bit.
void left_apply(Matrix& m, const Matrix& op, std::span<const int> targets, int n) {
  const int k = static_cast<int>(targets.size());
  const int sub = 1 << k;
  std::vector<int> masks(k);
  int target_mask = 0;
  for (int j = 0; j < k; ++j) {
    masks[j] = 1 << (n - 1 - targets[j]);
    target_mask |= masks[j];
  }
  std::vector<int> offsets(sub, 0);
  for (int s = 0; s < sub; ++s) {
    for (int j = 0; j < k; ++j) {
      if (s & (1 << (k - 1 - j))) offsets[s] |= masks[j];
    }
  }
  const int dim = 1 << n;
  const Eigen::Index cols = m.cols();
  std::vector<Complex> in(sub);
  for (int base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (int s = 0; s < sub; ++s) in[s] = m(base | offsets[s], c);
      for (int r = 0; r < sub; ++r) {
        Complex acc = 0.0;
        for (int s = 0; s < sub; ++s) acc += op(r, s) * in[s];
        m(base | offsets[r], c) = acc;
      }
    }
  }
}

// op * m * op^dagger
Matrix sandwich(const Matrix& m, const Matrix& op, std::span<const int> targets, int n) {
  Matrix a = m;
  left_apply(a, op, targets, n);
  Matrix b = a.adjoint();
  left_apply(b, op, targets, n);
  return b.adjoint();
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix pauli(char p) {
  Matrix m(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

Vector basis_vector(Basis basis, int outcome) {
  Vector v(2);
  switch (basis) {
    case Basis::Z:
      v << (outcome == 0 ? 1.0 : 0.0), (outcome == 0 ? 0.0 : 1.0);
      break;
    case Basis::X:
      v << kInvSqrt2, (outcome == 0 ? kInvSqrt2 : -kInvSqrt2);
      break;
    case Basis::Y:
      v << kInvSqrt2, (outcome == 0 ? Complex(0, kInvSqrt2) : Complex(0, -kInvSqrt2));
      break;
  }
  return v;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::SWAP:
    case GateKind::CZ:
      return 2;
    default:
      return 1;
  }
}

Matrix gate_matrix(const GateSpec& g) {
  const double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
  const Complex i(0, 1);
  Matrix m;
  switch (g.kind) {
    case GateKind::X: return pauli('X');
    case GateKind::Y: return pauli('Y');
    case GateKind::Z: return pauli('Z');
    case GateKind::H:
      m.resize(2, 2);
      m << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
      return m;
    case GateKind::S:
      m.resize(2, 2);
      m << 1, 0, 0, i;
      return m;
    case GateKind::Sdg:
      m.resize(2, 2);
      m << 1, 0, 0, -i;
      return m;
    case GateKind::Rx:
      m.resize(2, 2);
      m << c, -i * s, -i * s, c;
      return m;
    case GateKind::Ry:
      m.resize(2, 2);
      m << c, -s, s, c;
      return m;
    case GateKind::Rz:
      m.resize(2, 2);
      m << std::exp(-i * (g.theta / 2)), 0, 0, std::exp(i * (g.theta / 2));
      return m;
    case GateKind::CNOT:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    case GateKind::SWAP:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
      return m;
    case GateKind::CZ:
      m = Matrix::Identity(4, 4);
      m(3, 3) = -1;
      return m;
  }
  throw std::invalid_argument("unknown gate");
}

GateSpec adjoint(const GateSpec& g) {
  GateSpec a = g;
  switch (g.kind) {
    case GateKind::S: a.kind = GateKind::Sdg; break;
    case GateKind::Sdg: a.kind = GateKind::S; break;
    case GateKind::Rx:
    case GateKind::Ry:
    case GateKind::Rz: a.theta = -g.theta; break;
    default: break;  // self-inverse
  }
  return a;
}

std::vector<Matrix> kraus_operators(ChannelKind kind, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("channel probability " + std::to_string(p) + " outside [0,1]");
  }
  const Matrix id = pauli('I');
  switch (kind) {
    case ChannelKind::Depolarizing:
      return {std::sqrt(1.0 - 0.75 * p) * id, std::sqrt(p / 4) * pauli('X'),
              std::sqrt(p / 4) * pauli('Y'), std::sqrt(p / 4) * pauli('Z')};
    case ChannelKind::Dephasing:
      return {std::sqrt(1.0 - p) * id, std::sqrt(p) * pauli('Z')};
    case ChannelKind::BitFlip:
      return {std::sqrt(1.0 - p) * id, std::sqrt(p) * pauli('X')};
    case ChannelKind::AmplitudeDamping: {
      Matrix k0(2, 2), k1(2, 2);
      k0 << 1, 0, 0, std::sqrt(1.0 - p);
      k1 << 0, std::sqrt(p), 0, 0;
      return {k0, k1};
    }
  }
  throw std::invalid_argument("unknown channel");
}

DensityMatrix DensityMatrix::from_matrix(Matrix m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("density matrix must be square");
  const auto dim = m.rows();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw std::invalid_argument("dimension is not a power of two");
  check_qubit_count(n);
  DensityMatrix rho(n, std::move(m));
  if (rho.hermiticity_error() > tol) throw std::invalid_argument("matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > tol) throw std::invalid_argument("matrix trace is not 1");
  if (rho.min_eigenvalue() < -tol) throw std::invalid_argument("matrix is not positive semidefinite");
  rho.data_ = hermitize(rho.data_);
  return rho;
}

DensityMatrix DensityMatrix::from_pure(const Vector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw std::invalid_argument("zero state vector");
  Vector v = psi / norm;
  return from_matrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  check_qubit_count(num_qubits);
  const int dim = 1 << num_qubits;
  return DensityMatrix(num_qubits, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::adopt(int num_qubits, Matrix m) {
  return DensityMatrix(num_qubits, std::move(m));
}

double DensityMatrix::hermiticity_error() const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(data_), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::tensor(const DensityMatrix& other) const {
  const int n = num_qubits_ + other.num_qubits_;
  check_qubit_count(n);
  const Eigen::Index da = dim(), db = other.dim();
  Matrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = data_(i, j) * other.data_;
    }
  }
  return DensityMatrix(n, std::move(out));
}

DensityMatrix new_basis_state(int num_qubits, std::string_view bitstring) {
  check_qubit_count(num_qubits);
  if (static_cast<int>(bitstring.size()) != num_qubits) {
    throw std::invalid_argument("bitstring length does not match qubit count");
  }
  int index = 0;
  for (char b : bitstring) {
    if (b != '0' && b != '1') throw std::invalid_argument("bitstring must contain only 0/1");
    index = (index << 1) | (b == '1');
  }
  const int dim = 1 << num_qubits;
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityMatrix::adopt(num_qubits, std::move(m));
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u, std::span<const int> targets) {
  check_targets(targets, rho.num_qubits());
  const Eigen::Index sub = Eigen::Index{1} << targets.size();
  if (u.rows() != sub || u.cols() != sub) throw std::invalid_argument("operator size mismatch");
  return DensityMatrix::adopt(rho.num_qubits(),
                              hermitize(sandwich(rho.matrix(), u, targets, rho.num_qubits())));
}

DensityMatrix apply_gate(const DensityMatrix& rho, const GateSpec& g) {
  if (static_cast<int>(g.targets.size()) != gate_arity(g.kind)) {
    throw std::invalid_argument("gate target count does not match arity");
  }
  return apply_unitary(rho, gate_matrix(g), g.targets);
}

DensityMatrix apply_kraus(const DensityMatrix& rho, std::span<const Matrix> kraus,
                          std::span<const int> targets) {
  check_targets(targets, rho.num_qubits());
  const Eigen::Index sub = Eigen::Index{1} << targets.size();
  Matrix completeness = Matrix::Zero(sub, sub);
  for (const auto& k : kraus) {
    if (k.rows() != sub || k.cols() != sub) throw std::invalid_argument("Kraus operator size mismatch");
    completeness += k.adjoint() * k;
  }
  if ((completeness - Matrix::Identity(sub, sub)).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Kraus operators are not trace preserving");
  }
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : kraus) out += sandwich(rho.matrix(), k, targets, rho.num_qubits());
  return DensityMatrix::adopt(rho.num_qubits(), hermitize(out));
}

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& ch) {
  const auto ops = kraus_operators(ch.kind, ch.p);
  const int target[] = {ch.target};
  return apply_kraus(rho, ops, target);
}

Projection project_qubit(const DensityMatrix& rho, int q, Basis basis, int outcome) {
  const int target[] = {q};
  check_targets(target, rho.num_qubits());
  const Vector v = basis_vector(basis, outcome);
  const Matrix proj = v * v.adjoint();
  Matrix m = sandwich(rho.matrix(), proj, target, rho.num_qubits());
  const double prob = std::clamp(m.trace().real(), 0.0, 1.0);
  if (prob <= 1e-15) return {0.0, std::nullopt};
  return {prob, DensityMatrix::adopt(rho.num_qubits(), hermitize(m / m.trace().real()))};
}

Measurement measure_qubit(const DensityMatrix& rho, int q, Basis basis, Rng& rng) {
  Projection zero = project_qubit(rho, q, basis, 0);
  const bool pick_zero = rng.uniform() < zero.prob;
  if (pick_zero) return {0, std::move(*zero.state), zero.prob};
  Projection one = project_qubit(rho, q, basis, 1);
  return {1, std::move(*one.state), one.prob};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial trace needs at least one kept qubit");
  check_targets(keep, rho.num_qubits());
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  const int n = rho.num_qubits();
  const int nk = static_cast<int>(kept.size());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);
  }
  const int nt = static_cast<int>(traced.size());

  auto spread = [n](const std::vector<int>& qubits, int bits) {
    const int k = static_cast<int>(qubits.size());
    int idx = 0;
    for (int j = 0; j < k; ++j) {
      if (bits & (1 << (k - 1 - j))) idx |= 1 << (n - 1 - qubits[j]);
    }
    return idx;
  };

  const int dk = 1 << nk, dt = 1 << nt;
  std::vector<int> kept_idx(dk), traced_idx(dt);
  for (int a = 0; a < dk; ++a) kept_idx[a] = spread(kept, a);
  for (int t = 0; t < dt; ++t) traced_idx[t] = spread(traced, t);

  Matrix out = Matrix::Zero(dk, dk);
  for (int a = 0; a < dk; ++a) {
    for (int b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (int t = 0; t < dt; ++t) acc += rho(kept_idx[a] | traced_idx[t], kept_idx[b] | traced_idx[t]);
      out(a, b) = acc;
    }
  }
  return DensityMatrix::adopt(nk, hermitize(out));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Matrix sr = psd_sqrt(rho.matrix());
  const Matrix inner = hermitize(sr * sigma.matrix() * sr);
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  const double root_sum = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double fidelity_pure(const DensityMatrix& rho, const Vector& psi) {
  if (psi.size() != rho.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const double f = (psi.adjoint() * rho.matrix() * psi)(0, 0).real() / psi.squaredNorm();
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace spinnet::qstate
