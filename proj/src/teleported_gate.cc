#include "spinnet/entanglement.h"

#include <stdexcept>

#include "spinnet/errors.h"

namespace spinnet::entanglement {

using qstate::Basis;
using qstate::DensityMatrix;
using qstate::GateSpec;

GateFidelityReport teleported_cnot_closed_form(const BellCoeffs& c) {
  validate_coeffs(c);
  GateFidelityReport r;
  r.avg_gate_fidelity = (4.0 * c[kI] + 1.0) / 5.0;
  // X on the far half flips the Z-parity feed-forward (X on target); Z flips
  // the X-measurement outcome (Z on control); Y does both.
  r.pauli_error_diagnostic = std::array<double, 4>{c[kI], c[kX], c[kY], c[kZ]};
  return r;
}

GateFidelityReport teleported_cnot(BellDiagonalPair& bp, RegisterSlot control, RegisterSlot target,
                                   PairLedger* ledger) {
  if (bp.consumed || (ledger && ledger->is_consumed(bp.id))) {
    throw ConsumedPairError("teleported_cnot: Bell pair already consumed");
  }
  if (!control.reg || !target.reg) throw std::invalid_argument("teleported_cnot: missing register");
  const auto check = [](RegisterSlot s, const Endpoint& e, const char* which) {
    if (s.reg->node_id != e.node_id) {
      throw std::invalid_argument(std::string("teleported_cnot: ") + which +
                                  " register is not on the pair's node");
    }
    if (s.slot < 0 || s.slot >= s.reg->slot_count()) {
      throw std::out_of_range(std::string("teleported_cnot: ") + which + " slot out of range");
    }
    if (s.slot == e.slot) {
      throw std::invalid_argument(std::string("teleported_cnot: ") + which +
                                  " slot collides with the Bell pair half");
    }
  };
  check(control, bp.endpoints[0], "control");
  check(target, bp.endpoints[1], "target");
  GateFidelityReport r = teleported_cnot_closed_form(bp.coeffs);
  if (ledger) {
    ledger->consume(bp);
  } else {
    consume(bp);
  }
  return r;
}

DensityMatrix teleported_cnot_circuit(const BellCoeffs& c, const DensityMatrix& input) {
  if (input.num_qubits() != 2) throw std::invalid_argument("teleported CNOT acts on two qubits");
  // Qubits: 0 control, 1 target, 2 near half (control side), 3 far half.
  DensityMatrix full = input.tensor(to_density_matrix(c));
  full = qstate::apply_gate(full, GateSpec::cnot(0, 2));

  qstate::Matrix acc = qstate::Matrix::Zero(4, 4);
  const int keep[] = {0, 1};
  for (int m1 = 0; m1 < 2; ++m1) {
    auto first = qstate::project_qubit(full, 2, Basis::Z, m1);
    if (!first.state) continue;
    DensityMatrix s = *first.state;
    if (m1) s = qstate::apply_gate(s, GateSpec::x(3));
    s = qstate::apply_gate(s, GateSpec::cnot(3, 1));
    for (int m2 = 0; m2 < 2; ++m2) {
      auto second = qstate::project_qubit(s, 3, Basis::X, m2);
      if (!second.state) continue;
      DensityMatrix t = *second.state;
      if (m2) t = qstate::apply_gate(t, GateSpec::z(0));
      acc += first.prob * second.prob * qstate::partial_trace(t, keep).matrix();
    }
  }
  return DensityMatrix::adopt(2, 0.5 * (acc + acc.adjoint()));
}

}  // namespace spinnet::entanglement
