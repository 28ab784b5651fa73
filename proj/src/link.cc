#include "spinnet/link.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinnet/errors.h"

namespace spinnet::network {

HeraldedLink::HeraldedLink(LinkSpec spec, const TopologyConstants& constants, photonics::EmitterParams a,
                           photonics::EmitterParams b, photonics::HeraldConfig herald, LinkTiming timing)
    : spec_(std::move(spec)),
      constants_(constants),
      a_(a),
      b_(b),
      herald_(herald),
      timing_(timing),
      efficiency_(link_efficiency(spec_, constants)) {
  if (timing_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (!(timing_.optical_cycle_ns > 0.0)) throw std::invalid_argument("optical_cycle_ns must be > 0");
  if (!(timing_.herald_latency_ns >= 0.0)) throw std::invalid_argument("herald_latency_ns must be >= 0");
  if (spec_.model == LinkModel::BarrettKok) {
    a_.validate();
    b_.validate();
    herald_.validate();
    // Each photon crosses the link on its way to the beamsplitter.
    a_.efficiency *= efficiency_;
    b_.efficiency *= efficiency_;
  }
}

double HeraldedLink::attempt_duration_ns() const {
  const double round_trip = 2.0 * one_way_delay_ns(spec_, constants_) + timing_.herald_latency_ns;
  return std::max(timing_.optical_cycle_ns, round_trip);
}

bool HeraldedLink::never_succeeds() const {
  if (spec_.model == LinkModel::Fixed) return spec_.fixed_success_prob <= 0.0;
  return herald_.dark_count_rate_hz <= 0.0 && (a_.efficiency <= 0.0 || b_.efficiency <= 0.0);
}

std::optional<entanglement::BellCoeffs> HeraldedLink::attempt(Rng& rng) const {
  if (spec_.model == LinkModel::Fixed) {
    if (!rng.bernoulli(spec_.fixed_success_prob)) return std::nullopt;
    return entanglement::werner_coeffs(spec_.fixed_fidelity);
  }
  const photonics::AttemptOutcome o = photonics::barrett_kok_attempt(a_, b_, herald_, rng);
  if (!o.success) return std::nullopt;
  return o.heralded_pair->coeffs;
}

namespace {

entanglement::BellDiagonalPair mint(const HeraldedLink& link, const entanglement::BellCoeffs& c, double t,
                                    entanglement::PairLedger* ledger) {
  const entanglement::Endpoint a{link.spec().endpoints[0], 0}, b{link.spec().endpoints[1], 0};
  if (ledger) return ledger->make_pair(c, a, b, t);
  entanglement::BellDiagonalPair p;
  p.coeffs = c;
  p.endpoints = {a, b};
  p.created_at_ns = t;
  return p;
}

[[noreturn]] void timeout(const HeraldedLink& link, long long attempts) {
  throw TimeoutError("link " + std::to_string(link.spec().link_id) + " gave up after " +
                         std::to_string(attempts) + " attempts",
                     attempts, static_cast<double>(attempts) * link.attempt_duration_ns());
}

}  // namespace

LinkResult run_link_until_success(const HeraldedLink& link, const EventEngine& engine, Rng& rng,
                                  entanglement::PairLedger* ledger, entanglement::SpinRegister* reg_a,
                                  entanglement::SpinRegister* reg_b) {
  Rng stream = rng.split();
  const long long budget = link.timing().max_attempts;
  if (link.never_succeeds()) timeout(link, budget);

  const double duration = link.attempt_duration_ns();
  for (long long n = 1; n <= budget; ++n) {
    auto coeffs = link.attempt(stream);
    if (!coeffs) continue;
    LinkResult r;
    r.attempts = n;
    r.elapsed_ns = static_cast<double>(n) * duration;
    r.pair = mint(link, *coeffs, engine.now() + r.elapsed_ns, ledger);
    if (reg_a) entanglement::apply_memory_decay(*reg_a, n, r.elapsed_ns);
    if (reg_b) entanglement::apply_memory_decay(*reg_b, n, r.elapsed_ns);
    return r;
  }
  timeout(link, budget);
}

void start_link(EventEngine& engine, const HeraldedLink& link, Rng& rng, entanglement::PairLedger* ledger,
                std::function<void(LinkResult)> on_herald) {
  engine.schedule(engine.now(), EventKind::AttemptStart,
                  [&engine, &link, &rng, ledger, on_herald = std::move(on_herald)]() {
                    LinkResult r = run_link_until_success(link, engine, rng, ledger);
                    engine.schedule_in(r.elapsed_ns, EventKind::HeraldArrived,
                                       [r, on_herald]() { on_herald(r); });
                  });
}

LinkResult multiplexed_link(const HeraldedLink& link, int channels, const EventEngine& engine, Rng& rng,
                            entanglement::PairLedger* ledger) {
  if (channels < 1) throw std::invalid_argument("multiplexed_link needs at least one channel");
  std::vector<Rng> streams;
  streams.reserve(channels);
  for (int c = 0; c < channels; ++c) streams.push_back(rng.split());

  const long long budget = link.timing().max_attempts;
  if (link.never_succeeds()) timeout(link, budget * channels);
  const double duration = link.attempt_duration_ns();
  for (long long step = 1; step <= budget; ++step) {
    for (int c = 0; c < channels; ++c) {
      auto coeffs = link.attempt(streams[c]);
      if (!coeffs) continue;
      LinkResult r;
      r.attempts = (step - 1) * channels + c + 1;
      r.elapsed_ns = static_cast<double>(step) * duration;
      r.pair = mint(link, *coeffs, engine.now() + r.elapsed_ns, ledger);
      return r;
    }
  }
  timeout(link, budget * channels);
}

}  // namespace spinnet::network
