#include "spinnet/entanglement.h"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinnet/errors.h"

namespace spinnet::entanglement {

using qstate::Basis;
using qstate::DensityMatrix;
using qstate::GateSpec;

namespace {

void require_unconsumed(const BellDiagonalPair& p, const PairLedger* ledger, const char* op) {
  if (p.consumed || (ledger && ledger->is_consumed(p.id))) {
    throw ConsumedPairError(std::string(op) + ": Bell pair " + std::to_string(p.id) +
                            " already consumed");
  }
}

void mark_consumed(BellDiagonalPair& p, PairLedger* ledger) {
  if (ledger) {
    ledger->consume(p);
  } else {
    consume(p);
  }
}

BellDiagonalPair derived_pair(const BellCoeffs& coeffs, Endpoint a, Endpoint b, double t,
                              PairLedger* ledger) {
  if (ledger) return ledger->make_pair(coeffs, a, b, t);
  BellDiagonalPair p;
  p.coeffs = coeffs;
  p.endpoints = {a, b};
  p.created_at_ns = t;
  return p;
}

// Rx(pi/2) (x) Rx(-pi/2) conjugates the far-half error and exchanges Y and Z.
BellCoeffs dejmps_rotate(const BellCoeffs& c) { return {c[kI], c[kX], c[kZ], c[kY]}; }

}  // namespace

BellDiagonalPair swap_entanglement(BellDiagonalPair& ab, BellDiagonalPair& bc, PairLedger* ledger) {
  require_unconsumed(ab, ledger, "swap_entanglement");
  require_unconsumed(bc, ledger, "swap_entanglement");

  int shared_ab = -1, shared_bc = -1, matches = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (ab.endpoints[i].node_id == bc.endpoints[j].node_id) {
        shared_ab = i;
        shared_bc = j;
        ++matches;
      }
    }
  }
  if (matches != 1) throw std::invalid_argument("swap_entanglement: pairs must share exactly one node");

  const BellCoeffs out = compose(ab.coeffs, bc.coeffs);
  const double t = std::max(ab.created_at_ns, bc.created_at_ns);
  const Endpoint left = ab.endpoints[1 - shared_ab];
  const Endpoint right = bc.endpoints[1 - shared_bc];
  mark_consumed(ab, ledger);
  mark_consumed(bc, ledger);
  return derived_pair(out, left, right, t, ledger);
}

DensityMatrix swap_circuit(const BellCoeffs& ab, const BellCoeffs& bc) {
  // Qubits: 0 = A, 1 = B (first pair), 2 = B (second pair), 3 = C.
  DensityMatrix full = to_density_matrix(ab).tensor(to_density_matrix(bc));
  full = qstate::apply_gate(full, GateSpec::cnot(1, 2));
  full = qstate::apply_gate(full, GateSpec::h(1));

  qstate::Matrix acc = qstate::Matrix::Zero(4, 4);
  const int keep[] = {0, 3};
  for (int phase = 0; phase < 2; ++phase) {
    auto first = qstate::project_qubit(full, 1, Basis::Z, phase);
    if (!first.state) continue;
    for (int parity = 0; parity < 2; ++parity) {
      auto second = qstate::project_qubit(*first.state, 2, Basis::Z, parity);
      if (!second.state) continue;
      DensityMatrix s = *second.state;
      if (parity) s = qstate::apply_gate(s, GateSpec::x(3));
      if (phase) s = qstate::apply_gate(s, GateSpec::z(3));
      acc += first.prob * second.prob * qstate::partial_trace(s, keep).matrix();
    }
  }
  return DensityMatrix::adopt(2, 0.5 * (acc + acc.adjoint()));
}

DistillClosedForm bbpssw_closed_form(const BellCoeffs& a_in, const BellCoeffs& b_in,
                                     const DistillOptions& opts) {
  validate_coeffs(a_in);
  validate_coeffs(b_in);
  const BellCoeffs a = opts.dejmps_rotation ? dejmps_rotate(a_in) : a_in;
  const BellCoeffs b = opts.dejmps_rotation ? dejmps_rotate(b_in) : b_in;

  // Bilateral CNOT on Bell labels (x, z): control keeps x and picks up the
  // target's z; the target's x becomes x1 ^ x2, which the Z measurements
  // reveal. Agreement keeps x1 == x2.
  const double keep_even = (a[kI] + a[kZ]) * (b[kI] + b[kZ]);
  const double keep_odd = (a[kX] + a[kY]) * (b[kX] + b[kY]);
  const double n = keep_even + keep_odd;

  DistillClosedForm out;
  out.success_prob = n;
  if (n <= 0.0) {
    out.coeffs = {0.25, 0.25, 0.25, 0.25};
    return out;
  }
  out.coeffs[kI] = (a[kI] * b[kI] + a[kZ] * b[kZ]) / n;
  out.coeffs[kZ] = (a[kI] * b[kZ] + a[kZ] * b[kI]) / n;
  out.coeffs[kX] = (a[kX] * b[kX] + a[kY] * b[kY]) / n;
  out.coeffs[kY] = (a[kX] * b[kY] + a[kY] * b[kX]) / n;
  return out;
}

DistillClosedForm bbpssw_circuit(const BellCoeffs& a, const BellCoeffs& b, const DistillOptions& opts) {
  // Qubits: 0 = A1, 1 = B1 (kept pair), 2 = A2, 3 = B2 (sacrificed pair).
  DensityMatrix full = to_density_matrix(a).tensor(to_density_matrix(b));
  if (opts.dejmps_rotation) {
    const double q = std::numbers::pi / 2;
    full = qstate::apply_gate(full, GateSpec::rx(0, q));
    full = qstate::apply_gate(full, GateSpec::rx(2, q));
    full = qstate::apply_gate(full, GateSpec::rx(1, -q));
    full = qstate::apply_gate(full, GateSpec::rx(3, -q));
  }
  full = qstate::apply_gate(full, GateSpec::cnot(0, 2));
  full = qstate::apply_gate(full, GateSpec::cnot(1, 3));

  qstate::Matrix acc = qstate::Matrix::Zero(4, 4);
  double success = 0.0;
  const int keep[] = {0, 1};
  for (int m = 0; m < 2; ++m) {
    auto first = qstate::project_qubit(full, 2, Basis::Z, m);
    if (!first.state) continue;
    auto second = qstate::project_qubit(*first.state, 3, Basis::Z, m);
    if (!second.state) continue;
    const double w = first.prob * second.prob;
    success += w;
    acc += w * qstate::partial_trace(*second.state, keep).matrix();
  }
  DistillClosedForm out;
  out.success_prob = success;
  if (success <= 0.0) {
    out.coeffs = {0.25, 0.25, 0.25, 0.25};
    return out;
  }
  acc /= success;
  out.coeffs = bell_projections(DensityMatrix::adopt(2, 0.5 * (acc + acc.adjoint())));
  return out;
}

std::optional<BellDiagonalPair> distill_bbpssw(BellDiagonalPair& a, BellDiagonalPair& b, Rng& rng,
                                               const DistillOptions& opts, PairLedger* ledger) {
  require_unconsumed(a, ledger, "distill_bbpssw");
  require_unconsumed(b, ledger, "distill_bbpssw");
  if (&a == &b || (a.id != 0 && a.id == b.id)) {
    throw std::invalid_argument("distill_bbpssw: the two inputs are the same pair");
  }
  const auto nodes = [](const BellDiagonalPair& p) {
    return std::minmax(p.endpoints[0].node_id, p.endpoints[1].node_id);
  };
  if (nodes(a) != nodes(b)) throw std::invalid_argument("distill_bbpssw: endpoint nodes differ");

  const DistillClosedForm cf = bbpssw_closed_form(a.coeffs, b.coeffs, opts);
  const bool ok = rng.bernoulli(cf.success_prob);
  const Endpoint ea = a.endpoints[0], eb = a.endpoints[1];
  const double t = std::max(a.created_at_ns, b.created_at_ns);
  mark_consumed(a, ledger);
  mark_consumed(b, ledger);
  if (!ok) return std::nullopt;
  return derived_pair(cf.coeffs, ea, eb, t, ledger);
}

std::optional<BellDiagonalPair> tiered_distill(std::span<BellDiagonalPair> pairs, int levels, Rng& rng,
                                               const DistillOptions& opts, PairLedger* ledger) {
  if (levels < 0) throw std::invalid_argument("tiered_distill: negative level count");
  const std::size_t needed = std::size_t{1} << levels;
  if (pairs.size() < needed) {
    throw std::invalid_argument("tiered_distill: need " + std::to_string(needed) + " pairs, got " +
                                std::to_string(pairs.size()));
  }
  for (std::size_t i = 0; i < needed; ++i) require_unconsumed(pairs[i], ledger, "tiered_distill");

  if (levels == 0) {
    BellDiagonalPair out = pairs[0];
    mark_consumed(pairs[0], ledger);
    out.consumed = false;
    if (ledger) out.id = ledger->mint();
    return out;
  }

  // Level 1 reads the caller's pairs; later levels work on survivors.
  std::vector<BellDiagonalPair> round;
  for (std::size_t i = 0; i < needed; i += 2) {
    auto kept = distill_bbpssw(pairs[i], pairs[i + 1], rng, opts, ledger);
    if (!kept) return std::nullopt;
    round.push_back(*kept);
  }
  for (int level = 1; level < levels; ++level) {
    std::vector<BellDiagonalPair> next;
    for (std::size_t i = 0; i < round.size(); i += 2) {
      auto kept = distill_bbpssw(round[i], round[i + 1], rng, opts, ledger);
      if (!kept) return std::nullopt;
      next.push_back(*kept);
    }
    round = std::move(next);
  }
  return round.front();
}

}  // namespace spinnet::entanglement
