#include "spinnet/entanglement.h"

#include <cmath>
#include <stdexcept>

namespace spinnet::entanglement {

void SpinRegister::validate() const {
  if (num_nuclei < 0 || num_nuclei > kMaxNuclei) {
    throw std::invalid_argument("num_nuclei must be in 0..3");
  }
  if (!(t2_electron_ms > 0.0)) throw std::invalid_argument("t2_electron_ms must be > 0");
  if (!(t2_nuclear_s > 0.0)) throw std::invalid_argument("t2_nuclear_s must be > 0");
  if (!(t1_nuclear_s > 0.0)) throw std::invalid_argument("t1_nuclear_s must be > 0");
  if (!(per_attempt_dephasing >= 0.0 && per_attempt_dephasing <= 1.0)) {
    throw std::invalid_argument("per_attempt_dephasing must be in [0,1]");
  }
  if (state && state->num_qubits() != slot_count()) {
    throw std::invalid_argument("register state size does not match slot count");
  }
}

double accumulated_dephasing(double per_attempt, long long attempts) {
  if (attempts < 0) throw std::invalid_argument("attempt count must be >= 0");
  if (!(per_attempt >= 0.0 && per_attempt <= 1.0)) {
    throw std::invalid_argument("per-attempt dephasing outside [0,1]");
  }
  return 1.0 - std::pow(1.0 - per_attempt, static_cast<double>(attempts));
}

double t2_dephasing(double t2_s, double elapsed_ns) {
  if (elapsed_ns <= 0.0 || std::isinf(t2_s)) return 0.0;
  return 0.5 * (1.0 - std::exp(-elapsed_ns * 1e-9 / t2_s));
}

void apply_memory_decay(SpinRegister& reg, long long attempts, double elapsed_ns) {
  const double p_attempts = accumulated_dephasing(reg.per_attempt_dephasing, attempts);
  if (!reg.state) return;
  reg.validate();
  const double p_t2 = t2_dephasing(reg.t2_nuclear_s, elapsed_ns);
  const double p_t1 = (elapsed_ns > 0.0 && !std::isinf(reg.t1_nuclear_s))
                          ? 1.0 - std::exp(-elapsed_ns * 1e-9 / reg.t1_nuclear_s)
                          : 0.0;
  qstate::DensityMatrix s = *reg.state;
  for (int n = 0; n < reg.num_nuclei; ++n) {
    if (!reg.occupied[n]) continue;
    const int q = 1 + n;
    if (p_attempts > 0.0) s = qstate::apply_channel(s, {qstate::ChannelKind::Dephasing, p_attempts, q});
    if (p_t2 > 0.0) s = qstate::apply_channel(s, {qstate::ChannelKind::Dephasing, p_t2, q});
    if (p_t1 > 0.0) s = qstate::apply_channel(s, {qstate::ChannelKind::AmplitudeDamping, p_t1, q});
  }
  reg.state = std::move(s);
}

BellCoeffs decay_stored_half(const BellCoeffs& c, const SpinRegister& reg, long long attempts,
                             double elapsed_ns) {
  const double p_attempts = accumulated_dephasing(reg.per_attempt_dephasing, attempts);
  const double p_t2 = t2_dephasing(reg.t2_nuclear_s, elapsed_ns);
  return dephase(dephase(c, p_attempts), p_t2);
}

}  // namespace spinnet::entanglement
