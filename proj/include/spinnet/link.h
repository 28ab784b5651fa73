#pragma once

// Heralded links: repeated entanglement attempts over one topology link.

#include <functional>
#include <optional>

#include "spinnet/bell_pair.h"
#include "spinnet/entanglement.h"
#include "spinnet/event_engine.h"
#include "spinnet/photonics.h"
#include "spinnet/random.h"
#include "spinnet/topology.h"

namespace spinnet::network {

struct LinkTiming {
  double optical_cycle_ns = 1000.0;  // spin reset + two optical rounds
  double herald_latency_ns = 0.0;    // detector and classical processing
  long long max_attempts = 10'000'000;
};

class HeraldedLink {
 public:
  // For LinkModel::Fixed the emitters and herald config are ignored.
  HeraldedLink(LinkSpec spec, const TopologyConstants& constants, photonics::EmitterParams a = {},
               photonics::EmitterParams b = {}, photonics::HeraldConfig herald = {}, LinkTiming timing = {});

  const LinkSpec& spec() const { return spec_; }
  const LinkTiming& timing() const { return timing_; }
  double efficiency() const { return efficiency_; }

  // max(optical cycle, round-trip time of flight + herald latency).
  double attempt_duration_ns() const;

  // True when no attempt can ever herald.
  bool never_succeeds() const;

  // One attempt: the heralded pair's coefficients on success.
  std::optional<entanglement::BellCoeffs> attempt(Rng& rng) const;

 private:
  LinkSpec spec_;
  TopologyConstants constants_;
  photonics::EmitterParams a_, b_;  // efficiencies already include the link
  photonics::HeraldConfig herald_;
  LinkTiming timing_;
  double efficiency_;
};

struct LinkResult {
  entanglement::BellDiagonalPair pair;
  long long attempts = 0;
  double elapsed_ns = 0.0;
};

// Attempts until success starting at engine.now(). Draws one child stream
// from `rng`. Applies per-attempt memory decay to the endpoint registers when
// given. Throws TimeoutError after timing().max_attempts failures.
LinkResult run_link_until_success(const HeraldedLink& link, const EventEngine& engine, Rng& rng,
                                  entanglement::PairLedger* ledger = nullptr,
                                  entanglement::SpinRegister* reg_a = nullptr,
                                  entanglement::SpinRegister* reg_b = nullptr);

// Event-driven form: schedules an attempt_start now and a herald_arrived when
// the pair is ready, then calls `on_herald` from that event.
void start_link(EventEngine& engine, const HeraldedLink& link, Rng& rng, entanglement::PairLedger* ledger,
                std::function<void(LinkResult)> on_herald);

// `channels` independent attempt streams in lock step; the first herald wins
// (lowest channel index within a time step). `attempts` counts every channel
// attempt made.
LinkResult multiplexed_link(const HeraldedLink& link, int channels, const EventEngine& engine, Rng& rng,
                            entanglement::PairLedger* ledger = nullptr);

}  // namespace spinnet::network
