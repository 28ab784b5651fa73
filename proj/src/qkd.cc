#include "spinnet/qkd.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "spinnet/errors.h"

namespace spinnet::protocols {

using qstate::Basis;
using qstate::DensityMatrix;
using qstate::GateSpec;

namespace {

void require_probability(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(field) + " must lie in [0,1]");
}

DensityMatrix phi_plus() {
  qstate::Vector v = qstate::Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix::from_pure(v);
}

int free_slot(const entanglement::SpinRegister& reg) {
  for (int s = 0; s < reg.num_nuclei; ++s) {
    if (!reg.occupied[s]) return s + 1;
  }
  return -1;
}

}  // namespace

void TimeBinQubit::validate() const {
  if (bit != 0 && bit != 1) throw std::invalid_argument("time-bin bit must be 0 or 1");
  if (basis == Basis::Y) throw std::invalid_argument("time-bin basis must be Z or X");
  if (!(mean_photon_number > 0.0)) throw std::invalid_argument("mean_photon_number must be > 0");
  if (!(window_ns > 0.0)) throw std::invalid_argument("window_ns must be > 0");
}

DensityMatrix TimeBinQubit::state() const {
  qstate::Vector v = qstate::Vector::Zero(2);
  if (basis == Basis::Z) {
    v(bit) = 1.0;
  } else {
    v(0) = 1.0 / std::sqrt(2.0);
    v(1) = (bit == 0 ? 1.0 : -1.0) / std::sqrt(2.0);
  }
  return DensityMatrix::from_pure(v);
}

void ClientConfig::validate() const {
  if (!(mean_photon_number > 0.0)) throw std::invalid_argument("mean_photon_number must be > 0");
  require_probability(link_efficiency, "link_efficiency");
  require_probability(channel_p, "channel_p");
}

void HubConfig::validate() const {
  require_probability(emitter_efficiency, "emitter_efficiency");
  if (max_load_retries < 1) throw std::invalid_argument("max_load_retries must be >= 1");
  if (!(load_cycle_ns > 0.0)) throw std::invalid_argument("load_cycle_ns must be > 0");
}

LoadResult load_timebin(const TimeBinQubit& q, entanglement::SpinRegister& reg, const ClientConfig& client,
                        const HubConfig& hub, Rng& rng) {
  q.validate();
  const int slot = free_slot(reg);
  if (slot < 0) throw CapacityError("register on node " + std::to_string(reg.node_id) + " has no free slot");

  // Client photons reaching the beamsplitter: 0, 1 or several.
  const double u = rng.uniform();
  int client_photons = 0;
  if (client.source == PhotonSource::Poisson) {
    const double lambda = q.mean_photon_number * client.link_efficiency;
    const double p0 = std::exp(-lambda);
    client_photons = u < p0 ? 0 : (u < p0 * (1.0 + lambda) ? 1 : 2);
  } else {
    client_photons = u < std::min(q.mean_photon_number, 1.0) * client.link_efficiency ? 1 : 0;
  }
  const bool hub_photon = rng.bernoulli(hub.emitter_efficiency);

  LoadResult r;
  if (client_photons + (hub_photon ? 1 : 0) < 2) return r;

  if (client_photons >= 2) {
    // Two clicks without a faithful Bell projection: the spin is left random.
    if (!rng.bernoulli(0.5)) return r;
    r.multiphoton = true;
    r.state = DensityMatrix::maximally_mixed(1);
  } else {
    // Qubits: client photon 0, hub photon 1, hub spin 2.
    DensityMatrix photon = q.state();
    if (client.channel_p > 0.0) photon = qstate::apply_channel(photon, {client.channel, client.channel_p, 0});
    DensityMatrix rho = qstate::apply_gate(photon.tensor(phi_plus()), GateSpec::cnot(0, 1));
    // Linear optics resolves only the two outcomes with hub-photon bit 1.
    const auto m1 = qstate::measure_qubit(rho, 1, Basis::Z, rng);
    if (m1.outcome == 0) return r;
    const auto m0 = qstate::measure_qubit(m1.post, 0, Basis::X, rng);
    const int keep[] = {2};
    DensityMatrix spin = qstate::partial_trace(m0.post, keep);
    r.frame = {true, m0.outcome == 1};
    spin = qstate::apply_gate(spin, GateSpec::x(0));
    if (r.frame.z) spin = qstate::apply_gate(spin, GateSpec::z(0));
    r.state = std::move(spin);
  }
  r.heralded = true;
  r.slot = slot;
  reg.occupied[slot - 1] = true;
  return r;
}

void release_slot(entanglement::SpinRegister& reg, int slot) {
  if (slot < 1 || slot > reg.num_nuclei) throw std::out_of_range("no nuclear slot " + std::to_string(slot));
  reg.occupied[slot - 1] = false;
}

double h2(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("h2 argument outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double secret_fraction(double qber) { return std::max(0.0, 1.0 - 2.0 * h2(qber)); }

namespace {

// Returns the two-spin state after the CNOT (spin A controls spin B).
using EntanglingStep = std::function<std::optional<DensityMatrix>(const DensityMatrix&, Rng& link_rng, double& link_ns)>;

TimeBinQubit pick(const ClientConfig& c, Rng& rng) {
  TimeBinQubit q;
  q.basis = rng.bernoulli(0.5) ? Basis::X : Basis::Z;
  q.bit = rng.bernoulli(0.5) ? 1 : 0;
  q.mean_photon_number = c.mean_photon_number;
  return q;
}

struct Loaded {
  LoadResult result;
  int tries = 0;
};

Loaded load_with_retries(const TimeBinQubit& q, entanglement::SpinRegister& reg, const ClientConfig& c,
                         const HubConfig& hub, Rng& rng) {
  Loaded l;
  while (l.tries < hub.max_load_retries) {
    ++l.tries;
    l.result = load_timebin(q, reg, c, hub, rng);
    if (l.result.heralded) break;
  }
  return l;
}

QkdSessionResult run_session(const ClientConfig& a, const ClientConfig& b, const HubConfig& hub, long long rounds,
                             network::EventEngine& engine, Rng& rng, const EntanglingStep& entangle) {
  a.validate();
  b.validate();
  hub.validate();
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");

  QkdSessionResult out;
  out.rounds = rounds;
  long long errors_z = 0, errors_x = 0, sifted_z = 0, sifted_x = 0;
  entanglement::SpinRegister reg_a, reg_b;
  reg_b.node_id = 1;
  const double start = engine.now();

  std::function<void(long long)> round = [&](long long r) {
    if (r == rounds) {
      engine.schedule(engine.now(), network::EventKind::ProtocolDone, [] {});
      return;
    }
    // Fixed stream layout per round keeps sessions with and without an
    // inter-hub link paired draw for draw.
    Rng rng_a = rng.split(), rng_b = rng.split(), rng_link = rng.split(), rng_hub = rng.split();
    const TimeBinQubit qa = pick(a, rng_a), qb = pick(b, rng_b);
    const Loaded la = load_with_retries(qa, reg_a, a, hub, rng_a);
    const Loaded lb = load_with_retries(qb, reg_b, b, hub, rng_b);
    double duration = std::max(la.tries, lb.tries) * hub.load_cycle_ns;

    if (la.result.heralded && lb.result.heralded) {
      double link_ns = 0.0;
      auto rho = entangle(la.result.state->tensor(*lb.result.state), rng_link, link_ns);
      duration = std::max(duration, link_ns);
      if (rho) {
        ++out.completed_rounds;
        rho = qstate::apply_gate(*rho, GateSpec::h(0));
        const auto mx = qstate::measure_qubit(*rho, 0, Basis::Z, rng_hub);
        const auto mz = qstate::measure_qubit(mx.post, 1, Basis::Z, rng_hub);
        if (qa.basis == qb.basis) {
          const int parity = qa.basis == Basis::Z ? mz.outcome : mx.outcome;
          const bool error = (qb.bit ^ parity) != qa.bit;
          ++out.sifted_bits;
          if (qa.basis == Basis::Z) {
            ++sifted_z;
            errors_z += error;
          } else {
            ++sifted_x;
            errors_x += error;
          }
        }
      } else {
        ++out.abandoned_rounds;
      }
    } else {
      ++out.abandoned_rounds;
    }
    if (la.result.heralded) release_slot(reg_a, la.result.slot);
    if (lb.result.heralded) release_slot(reg_b, lb.result.slot);
    engine.schedule_in(duration, network::EventKind::AttemptStart, [&round, r] { round(r + 1); });
  };
  engine.schedule(engine.now(), network::EventKind::AttemptStart, [&round] { round(0); });
  engine.run();

  out.errors = errors_z + errors_x;
  out.elapsed_ns = engine.now() - start;
  if (sifted_z > 0) out.qber_z = static_cast<double>(errors_z) / sifted_z;
  if (sifted_x > 0) out.qber_x = static_cast<double>(errors_x) / sifted_x;
  if (out.sifted_bits > 0) {
    out.qber = std::min(0.5, static_cast<double>(out.errors) / out.sifted_bits);
    out.secret_fraction = secret_fraction(out.qber);
  }
  if (out.elapsed_ns > 0.0) out.raw_rate_hz = out.sifted_bits / (out.elapsed_ns * 1e-9);
  return out;
}

}  // namespace

QkdSessionResult mdi_qkd_single_hub(const ClientConfig& a, const ClientConfig& b, const HubConfig& hub,
                                    long long rounds, network::EventEngine& engine, Rng& rng) {
  return run_session(a, b, hub, rounds, engine, rng,
                     [](const DensityMatrix& rho, Rng&, double&) -> std::optional<DensityMatrix> {
                       return qstate::apply_gate(rho, GateSpec::cnot(0, 1));
                     });
}

QkdSessionResult mdi_qkd_two_hub(const ClientConfig& a, const ClientConfig& b, const HubConfig& hub,
                                 const network::HeraldedLink& inter_hub, long long rounds,
                                 network::EventEngine& engine, Rng& rng) {
  return run_session(a, b, hub, rounds, engine, rng,
                     [&](const DensityMatrix& rho, Rng& link_rng, double& link_ns) -> std::optional<DensityMatrix> {
                       network::LinkResult pair;
                       try {
                         pair = network::run_link_until_success(inter_hub, engine, link_rng);
                       } catch (const TimeoutError& e) {
                         link_ns = e.elapsed_ns;
                         return std::nullopt;
                       }
                       link_ns = pair.elapsed_ns;
                       entanglement::consume(pair.pair);
                       return entanglement::teleported_cnot_circuit(pair.pair.coeffs, rho);
                     });
}

}  // namespace spinnet::protocols
