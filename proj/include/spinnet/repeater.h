#pragma once

// First- and second-generation repeater chains over heralded links.

#include <span>
#include <vector>

#include "spinnet/bell_pair.h"
#include "spinnet/entanglement.h"
#include "spinnet/event_engine.h"
#include "spinnet/link.h"
#include "spinnet/random.h"
#include "spinnet/topology.h"

namespace spinnet::network {

struct RepeaterResult {
  double end_to_end_fidelity = 0.0;
  double wall_time_ns = 0.0;
  long long attempts_total = 0;
  long long pairs_distilled = 0;
  entanglement::BellCoeffs coeffs{};
};

// Links in path order; links[i] joins nodes[i] and nodes[i + 1].
struct RepeaterChain {
  std::vector<int> nodes;
  std::vector<HeraldedLink> links;
};

// Builds the chain for `link_ids` from a topology (all links BarrettKok with
// the given emitters, or Fixed as their specs say).
RepeaterChain make_repeater_chain(const Topology& topo, const std::vector<int>& link_ids,
                                  const photonics::EmitterParams& emitter = {},
                                  const photonics::HeraldConfig& herald = {}, const LinkTiming& timing = {});

// Whether distillation runs on the pairs entering a swap level or on the pairs
// a swap level produces.
enum class DistillPlacement { BeforeSwap, AfterSwap };

struct Gen1Options {
  int distill_rounds = 0;  // tiers per distilled level; 2^rounds copies each
  DistillPlacement placement = DistillPlacement::BeforeSwap;
  entanglement::DistillOptions distill;
  // Decay model for stored halves: t2_nuclear_s and per_attempt_dephasing.
  entanglement::SpinRegister memory;
};

// Nested doubling over a power-of-two number of links. Link pairs are
// generated in parallel; each swap waits for both children, the earlier one
// decaying in memory meanwhile. With distillation, each distilled level
// produces 2^rounds copies one after another and restarts on failure.
RepeaterResult gen1_repeater(const RepeaterChain& chain, const Gen1Options& opts, EventEngine& engine,
                             Rng& rng, entanglement::PairLedger* ledger = nullptr);

struct CodeParams {
  int n = 7;
  int k = 1;
  int d = 3;
};

// Probability that more than floor((d-1)/2) of n independent errors occur.
double logical_error_rate(const CodeParams& code, double p_phys);
// Same with per-qubit error rates (Poisson-binomial tail).
double logical_error_rate(const CodeParams& code, std::span<const double> p_phys);

struct HopStats {
  double wall_time_ns = 0.0;    // slowest of the n parallel links
  double serial_time_ns = 0.0;  // the n link times summed
  double p_logical = 0.0;
  long long attempts = 0;
};

struct Gen2Result : RepeaterResult {
  std::vector<HopStats> hops;
};

// n parallel physical pairs per hop with a transversal logical swap. Each
// physical pair's Pauli error rate is 1 - pI. Throws CapacityError when a
// chain node has fewer than n registers.
Gen2Result gen2_repeater(const Topology& topo, const RepeaterChain& chain, const CodeParams& code,
                         EventEngine& engine, Rng& rng, entanglement::PairLedger* ledger = nullptr);

}  // namespace spinnet::network
