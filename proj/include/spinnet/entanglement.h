#pragma once

// Consuming Bell pairs: teleported CNOT, entanglement swapping, recurrence
// distillation and memory decay of stored spin qubits.
//
// Every consuming operation marks its inputs consumed and throws
// ConsumedPairError if handed a pair that was already used. The closed-form
// Bell-diagonal paths are what the network layer calls; the circuit routines
// run the same protocols gate by gate in the density-matrix engine.

#include <array>
#include <limits>
#include <optional>
#include <span>

#include "spinnet/bell_pair.h"
#include "spinnet/qstate.h"
#include "spinnet/random.h"

namespace spinnet::entanglement {

inline constexpr int kMaxNuclei = 3;

// Slot 0 is the electron; slots 1..num_nuclei are nuclear spins.
struct SpinRegister {
  int node_id = 0;
  int num_nuclei = 3;
  double t2_electron_ms = 2.1;
  double t2_nuclear_s = 1.1;
  double t1_nuclear_s = std::numeric_limits<double>::infinity();
  double per_attempt_dephasing = 0.0;

  // Stored state over slots 0..num_nuclei, when the register holds data.
  std::optional<qstate::DensityMatrix> state;
  std::array<bool, kMaxNuclei> occupied{false, false, false};

  int slot_count() const { return 1 + num_nuclei; }
  void validate() const;
};

struct RegisterSlot {
  const SpinRegister* reg;
  int slot;
};

// ---- teleported CNOT -------------------------------------------------------

struct GateFidelityReport {
  double avg_gate_fidelity = 0.0;
  // Probabilities of the residual Pauli after the ideal CNOT, in the order
  // {I, X on target, Z on control and X on target, Z on control}.
  std::optional<std::array<double, 4>> pauli_error_diagnostic;
};

// Closed form for the one-pair CNOT teleportation: a Bell-pair error sigma
// leaves CNOT followed by a fixed two-qubit Pauli, so the process fidelity is
// pI and the average gate fidelity is (4 pI + 1) / 5.
GateFidelityReport teleported_cnot_closed_form(const BellCoeffs& c);

// Consumes `bp`. Control must sit on the node of endpoint 0 and target on the
// node of endpoint 1, in slots other than the pair's own.
GateFidelityReport teleported_cnot(BellDiagonalPair& bp, RegisterSlot control, RegisterSlot target,
                                   PairLedger* ledger = nullptr);

// Gate-level circuit on qubits (control, target, pair half A, pair half B):
// CNOT(control -> A), Z-measure A, X^m on B, CNOT(B -> target), X-measure B,
// Z^m on control. Returns the exact average over measurement branches for
// the two-qubit input state.
qstate::DensityMatrix teleported_cnot_circuit(const BellCoeffs& c, const qstate::DensityMatrix& input);

// ---- swapping --------------------------------------------------------------

// Pauli-group convolution of the two error vectors. Consumes both inputs.
BellDiagonalPair swap_entanglement(BellDiagonalPair& ab, BellDiagonalPair& bc,
                                   PairLedger* ledger = nullptr);

// Bell-state measurement on the shared node, gate by gate, over qubits
// (A, B1, B2, C). Returns the A-C state averaged over the four outcomes
// after Pauli correction on C.
qstate::DensityMatrix swap_circuit(const BellCoeffs& ab, const BellCoeffs& bc);

// ---- distillation ----------------------------------------------------------

struct DistillOptions {
  // Rx(pi/2) / Rx(-pi/2) on the two sides before the bilateral CNOT.
  bool dejmps_rotation = false;
};

struct DistillClosedForm {
  double success_prob;
  BellCoeffs coeffs;  // output conditioned on success
};

// Bilateral CNOT (first pair controls), Z-measure the second pair on both
// sides, keep the first on parity agreement.
DistillClosedForm bbpssw_closed_form(const BellCoeffs& a, const BellCoeffs& b,
                                     const DistillOptions& opts = {});

// Same protocol executed on the four-qubit density matrix (A1, B1, A2, B2).
DistillClosedForm bbpssw_circuit(const BellCoeffs& a, const BellCoeffs& b,
                                 const DistillOptions& opts = {});

// Consumes both inputs; returns the kept pair on success.
std::optional<BellDiagonalPair> distill_bbpssw(BellDiagonalPair& a, BellDiagonalPair& b, Rng& rng,
                                               const DistillOptions& opts = {},
                                               PairLedger* ledger = nullptr);

// Knockout tournament over the first 2^levels pairs. Stops at the first
// failed round; pairs that never entered a round stay unconsumed.
std::optional<BellDiagonalPair> tiered_distill(std::span<BellDiagonalPair> pairs, int levels, Rng& rng,
                                               const DistillOptions& opts = {},
                                               PairLedger* ledger = nullptr);

// ---- memory ----------------------------------------------------------------

// Phase-error probability accumulated over `attempts` entanglement attempts.
double accumulated_dephasing(double per_attempt, long long attempts);

// Dephasing probability from T2 decay over `elapsed_ns`: (1 - e^{-t/T2}) / 2.
double t2_dephasing(double t2_s, double elapsed_ns);

// Dephases every occupied nuclear slot by the per-attempt model, then applies
// T2 dephasing and T1 amplitude damping for the elapsed time.
void apply_memory_decay(SpinRegister& reg, long long attempts, double elapsed_ns = 0.0);

// The dephasing part of the same decay applied to one stored half of a
// Bell-diagonal pair (amplitude damping would leave the Bell-diagonal family).
BellCoeffs decay_stored_half(const BellCoeffs& c, const SpinRegister& reg, long long attempts,
                             double elapsed_ns);

}  // namespace spinnet::entanglement
