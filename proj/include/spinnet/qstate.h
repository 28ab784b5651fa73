#pragma once

// Dense density-matrix engine for small registers (at most 10 qubits).
//
// Qubit ordering: qubit 0 is the most significant bit of the basis label, so
// for three qubits the basis index of |q0 q1 q2> is 4*q0 + 2*q1 + q2.

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spinnet/random.h"

namespace spinnet::qstate {

inline constexpr int kMaxQubits = 10;

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class GateKind { X, Y, Z, H, S, Sdg, Rx, Ry, Rz, CNOT, SWAP, CZ };

struct GateSpec {
  GateKind kind;
  std::vector<int> targets;  // CNOT: {control, target}
  double theta = 0.0;        // radians, rotations only

  static GateSpec x(int q) { return {GateKind::X, {q}}; }
  static GateSpec y(int q) { return {GateKind::Y, {q}}; }
  static GateSpec z(int q) { return {GateKind::Z, {q}}; }
  static GateSpec h(int q) { return {GateKind::H, {q}}; }
  static GateSpec s(int q) { return {GateKind::S, {q}}; }
  static GateSpec sdg(int q) { return {GateKind::Sdg, {q}}; }
  static GateSpec rx(int q, double t) { return {GateKind::Rx, {q}, t}; }
  static GateSpec ry(int q, double t) { return {GateKind::Ry, {q}, t}; }
  static GateSpec rz(int q, double t) { return {GateKind::Rz, {q}, t}; }
  static GateSpec cnot(int c, int t) { return {GateKind::CNOT, {c, t}}; }
  static GateSpec swap(int a, int b) { return {GateKind::SWAP, {a, b}}; }
  static GateSpec cz(int a, int b) { return {GateKind::CZ, {a, b}}; }
};

int gate_arity(GateKind kind);
Matrix gate_matrix(const GateSpec& g);
GateSpec adjoint(const GateSpec& g);

enum class ChannelKind { Depolarizing, Dephasing, AmplitudeDamping, BitFlip };

// Single-qubit channels:
//   depolarizing      rho -> (1-p) rho + p I/2
//   dephasing         Z applied with probability p
//   bit_flip          X applied with probability p
//   amplitude_damping decay |1> -> |0> with probability p
struct NoiseChannel {
  ChannelKind kind;
  double p;
  int target;
};

std::vector<Matrix> kraus_operators(ChannelKind kind, double p);

enum class Basis { Z, X, Y };

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity within `tol`.
  static DensityMatrix from_matrix(Matrix m, double tol = 1e-10);
  static DensityMatrix from_pure(const Vector& psi);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  int dim() const { return static_cast<int>(data_.rows()); }
  const Matrix& matrix() const { return data_; }
  Complex operator()(int row, int col) const { return data_(row, col); }

  double trace() const { return data_.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

  // |this> (x) |other>, with this occupying the low qubit indices.
  DensityMatrix tensor(const DensityMatrix& other) const;

  // Unchecked: callers guarantee a valid state.
  static DensityMatrix adopt(int num_qubits, Matrix m);

 private:
  DensityMatrix(int num_qubits, Matrix m) : num_qubits_(num_qubits), data_(std::move(m)) {}

  int num_qubits_;
  Matrix data_;
};

DensityMatrix new_basis_state(int num_qubits, std::string_view bitstring);

DensityMatrix apply_gate(const DensityMatrix& rho, const GateSpec& g);

// U rho U^dagger for an arbitrary 2^k x 2^k operator on `targets`.
DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u, std::span<const int> targets);

// sum_i K_i rho K_i^dagger. Completeness is checked to 1e-12.
DensityMatrix apply_kraus(const DensityMatrix& rho, std::span<const Matrix> kraus,
                          std::span<const int> targets);

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& ch);

struct Projection {
  double prob;
  std::optional<DensityMatrix> state;  // absent when prob is zero
};

// Deterministic branch of a single-qubit projective measurement.
Projection project_qubit(const DensityMatrix& rho, int q, Basis basis, int outcome);

struct Measurement {
  int outcome;
  DensityMatrix post;
  double prob;  // Born probability of `outcome`
};

Measurement measure_qubit(const DensityMatrix& rho, int q, Basis basis, Rng& rng);

// Reduced state on `keep` (ascending order is used for the output labels).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Faster path when sigma is the pure state |psi>.
double fidelity_pure(const DensityMatrix& rho, const Vector& psi);

}  // namespace spinnet::qstate
