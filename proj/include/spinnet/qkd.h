#pragma once

// Memory-assisted MDI QKD: clients' time-bin photons are loaded into hub
// spins and a Bell-state measurement on the spins announces their parity.

#include <optional>

#include "spinnet/entanglement.h"
#include "spinnet/event_engine.h"
#include "spinnet/link.h"
#include "spinnet/qstate.h"
#include "spinnet/random.h"

namespace spinnet::protocols {

struct TimeBinQubit {
  qstate::Basis basis = qstate::Basis::Z;  // Z: early/late, X: superposition
  int bit = 0;
  double mean_photon_number = 0.1;
  double window_ns = 10.0;

  void validate() const;
  // |bit> in Z, |+> or |-> in X.
  qstate::DensityMatrix state() const;
};

enum class PhotonSource { Poisson, SinglePhoton };

struct ClientConfig {
  PhotonSource source = PhotonSource::Poisson;
  double mean_photon_number = 0.1;
  double link_efficiency = 1.0;
  // Applied to the photon on its way to the hub.
  qstate::ChannelKind channel = qstate::ChannelKind::Depolarizing;
  double channel_p = 0.0;

  void validate() const;
};

struct HubConfig {
  double emitter_efficiency = 1.0;  // hub photon reaching the beamsplitter
  int max_load_retries = 10;
  double load_cycle_ns = 1000.0;

  void validate() const;
};

struct PauliFrame {
  bool x = false;
  bool z = false;
};

struct LoadResult {
  bool heralded = false;
  bool multiphoton = false;  // heralded by a multi-photon event
  int slot = -1;             // claimed nuclear slot on herald
  PauliFrame frame;          // BSM outcome, already undone on `state`
  std::optional<qstate::DensityMatrix> state;  // loaded spin, one qubit
};

// One loading attempt. The hub emits a photon entangled with its spin, the
// client photon interferes with it and a linear-optics Bell measurement
// heralds on the two distinguishable outcomes, teleporting the client state
// onto the spin. Multi-photon heralds leave the spin maximally mixed.
// Claims the first free nuclear slot on herald; throws CapacityError when
// none is free.
LoadResult load_timebin(const TimeBinQubit& q, entanglement::SpinRegister& reg, const ClientConfig& client,
                        const HubConfig& hub, Rng& rng);

// Marks a nuclear slot free again.
void release_slot(entanglement::SpinRegister& reg, int slot);

struct QkdSessionResult {
  long long rounds = 0;
  long long abandoned_rounds = 0;
  long long completed_rounds = 0;  // both clients loaded
  long long sifted_bits = 0;
  long long errors = 0;
  double qber = 0.5;  // 0.5 with no sifted bits
  double qber_z = 0.5;
  double qber_x = 0.5;
  double secret_fraction = 0.0;
  double raw_rate_hz = 0.0;
  double elapsed_ns = 0.0;
};

// Binary entropy in bits.
double h2(double p);
// max(0, 1 - 2 h2(q)).
double secret_fraction(double qber);

QkdSessionResult mdi_qkd_single_hub(const ClientConfig& a, const ClientConfig& b, const HubConfig& hub,
                                    long long rounds, network::EventEngine& engine, Rng& rng);

// The two spins sit in different hubs; the Bell measurement runs through a
// teleported CNOT that consumes a pair from `inter_hub`. A link timeout
// abandons the round.
QkdSessionResult mdi_qkd_two_hub(const ClientConfig& a, const ClientConfig& b, const HubConfig& hub,
                                 const network::HeraldedLink& inter_hub, long long rounds,
                                 network::EventEngine& engine, Rng& rng);

}  // namespace spinnet::protocols
