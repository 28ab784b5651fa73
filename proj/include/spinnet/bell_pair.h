#pragma once

// Bell-diagonal bookkeeping shared by the photonic, entanglement and network
// layers.
//
// A pair is summarised by (pI, pX, pY, pZ): the probability that the Pauli
// error sigma acts on the second half of |Phi+>. (I (x) X)|Phi+> = |Psi+>,
// (I (x) Z)|Phi+> = |Phi->, (I (x) Y)|Phi+> = i|Psi->.

#include <array>
#include <cstdint>
#include <unordered_set>

#include "spinnet/qstate.h"

namespace spinnet::entanglement {

// Index into BellCoeffs.
enum PauliIndex : int { kI = 0, kX = 1, kY = 2, kZ = 3 };

using BellCoeffs = std::array<double, 4>;

struct Endpoint {
  int node_id = 0;
  int slot = 0;
  bool operator==(const Endpoint&) const = default;
};

struct BellDiagonalPair {
  std::uint64_t id = 0;
  BellCoeffs coeffs{1.0, 0.0, 0.0, 0.0};
  std::array<Endpoint, 2> endpoints{};
  double created_at_ns = 0.0;
  bool consumed = false;

  double fidelity() const { return coeffs[kI]; }
};

BellCoeffs werner_coeffs(double fidelity);
// (F, 0, 0, 1-F): the phase-flip-only family produced by heralding.
BellCoeffs phase_flip_coeffs(double fidelity);

// Throws std::invalid_argument unless non-negative and summing to 1 (1e-12).
void validate_coeffs(const BellCoeffs& c);

// Pauli product of the two error indices (phases dropped).
int pauli_product(int a, int b);

// Distribution of the composed error sigma_a sigma_b for independent a, b.
BellCoeffs compose(const BellCoeffs& a, const BellCoeffs& b);

// Z error on one half with probability p.
BellCoeffs dephase(const BellCoeffs& c, double p);
// Mix with the maximally mixed state: (1-w) c + w/4.
BellCoeffs depolarize(const BellCoeffs& c, double w);

// Marks the pair consumed; throws ConsumedPairError on reuse.
void consume(BellDiagonalPair& pair);

// Ledger of consumed pair ids. Catches reuse through stale copies whose own
// `consumed` flag was never set.
class PairLedger {
 public:
  std::uint64_t mint() { return ++last_id_; }
  BellDiagonalPair make_pair(const BellCoeffs& coeffs, Endpoint a, Endpoint b, double now_ns);
  void consume(BellDiagonalPair& pair);
  bool is_consumed(std::uint64_t id) const { return consumed_.contains(id); }
  std::size_t consumed_count() const { return consumed_.size(); }

 private:
  std::uint64_t last_id_ = 0;
  std::unordered_set<std::uint64_t> consumed_;
};

// |Phi+> with the given Pauli applied to the second qubit.
qstate::Vector bell_vector(int pauli_index);

// Two-qubit density matrix of the Bell-diagonal state.
qstate::DensityMatrix to_density_matrix(const BellCoeffs& c);

// <B_k| rho |B_k> for each Bell vector.
BellCoeffs bell_projections(const qstate::DensityMatrix& rho);

// Largest |<B_j| rho |B_k>| for j != k.
double off_bell_diagonal(const qstate::DensityMatrix& rho);

}  // namespace spinnet::entanglement
