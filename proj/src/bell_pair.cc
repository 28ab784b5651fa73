#include "spinnet/bell_pair.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinnet/errors.h"

namespace spinnet::entanglement {

namespace {

// (x, z) symplectic code of each index: I=00, X=10, Y=11, Z=01.
constexpr int kCode[4] = {0b00, 0b10, 0b11, 0b01};
constexpr int kFromCode[4] = {kI, kZ, kX, kY};

}  // namespace

BellCoeffs werner_coeffs(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw std::invalid_argument("fidelity outside [0,1]");
  const double e = (1.0 - fidelity) / 3.0;
  return {fidelity, e, e, e};
}

BellCoeffs phase_flip_coeffs(double fidelity) {
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw std::invalid_argument("fidelity outside [0,1]");
  return {fidelity, 0.0, 0.0, 1.0 - fidelity};
}

void validate_coeffs(const BellCoeffs& c) {
  double sum = 0.0;
  for (double v : c) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative Bell coefficient");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("Bell coefficients sum to " + std::to_string(sum));
  }
}

int pauli_product(int a, int b) { return kFromCode[kCode[a] ^ kCode[b]]; }

BellCoeffs compose(const BellCoeffs& a, const BellCoeffs& b) {
  BellCoeffs out{0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out[pauli_product(i, j)] += a[i] * b[j];
  }
  return out;
}

BellCoeffs dephase(const BellCoeffs& c, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("dephasing probability outside [0,1]");
  return compose(c, {1.0 - p, 0.0, 0.0, p});
}

BellCoeffs depolarize(const BellCoeffs& c, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("depolarizing weight outside [0,1]");
  BellCoeffs out;
  for (int i = 0; i < 4; ++i) out[i] = (1.0 - w) * c[i] + w / 4.0;
  return out;
}

void consume(BellDiagonalPair& pair) {
  if (pair.consumed) throw ConsumedPairError("Bell pair " + std::to_string(pair.id) + " already consumed");
  pair.consumed = true;
}

BellDiagonalPair PairLedger::make_pair(const BellCoeffs& coeffs, Endpoint a, Endpoint b, double now_ns) {
  BellDiagonalPair p;
  p.id = mint();
  p.coeffs = coeffs;
  p.endpoints = {a, b};
  p.created_at_ns = now_ns;
  return p;
}

void PairLedger::consume(BellDiagonalPair& pair) {
  if (pair.id != 0 && !consumed_.insert(pair.id).second) {
    throw ConsumedPairError("Bell pair " + std::to_string(pair.id) + " reused after consumption");
  }
  entanglement::consume(pair);
}

qstate::Vector bell_vector(int pauli_index) {
  const double r = 0.70710678118654752440;
  qstate::Vector v = qstate::Vector::Zero(4);
  switch (pauli_index) {
    case kI: v(0) = r; v(3) = r; break;
    case kX: v(1) = r; v(2) = r; break;
    case kY: v(1) = qstate::Complex(0, r); v(2) = qstate::Complex(0, -r); break;
    case kZ: v(0) = r; v(3) = -r; break;
    default: throw std::out_of_range("Pauli index");
  }
  return v;
}

qstate::DensityMatrix to_density_matrix(const BellCoeffs& c) {
  validate_coeffs(c);
  qstate::Matrix m = qstate::Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    const qstate::Vector v = bell_vector(k);
    m += c[k] * v * v.adjoint();
  }
  return qstate::DensityMatrix::adopt(2, m);
}

BellCoeffs bell_projections(const qstate::DensityMatrix& rho) {
  if (rho.num_qubits() != 2) throw std::invalid_argument("Bell projection needs a two-qubit state");
  BellCoeffs out;
  for (int k = 0; k < 4; ++k) {
    const qstate::Vector v = bell_vector(k);
    out[k] = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  }
  return out;
}

double off_bell_diagonal(const qstate::DensityMatrix& rho) {
  double worst = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      if (j == k) continue;
      worst = std::max(worst, std::abs((bell_vector(j).adjoint() * rho.matrix() * bell_vector(k))(0, 0)));
    }
  }
  return worst;
}

}  // namespace spinnet::entanglement
