#include "spinnet/repeater.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "spinnet/errors.h"

namespace spinnet::network {

using entanglement::BellDiagonalPair;

RepeaterChain make_repeater_chain(const Topology& topo, const std::vector<int>& link_ids,
                                  const photonics::EmitterParams& emitter, const photonics::HeraldConfig& herald,
                                  const LinkTiming& timing) {
  RepeaterChain chain;
  chain.nodes = topo.path_nodes(link_ids);
  for (std::size_t i = 0; i < link_ids.size(); ++i) {
    LinkSpec spec = topo.link(link_ids[i]);
    // Orient the link along the path.
    if (spec.endpoints[0] != chain.nodes[i]) std::swap(spec.endpoints[0], spec.endpoints[1]);
    chain.links.emplace_back(spec, topo.constants, emitter, emitter, herald, timing);
  }
  return chain;
}

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

class Gen1Run {
 public:
  using Done = std::function<void(BellDiagonalPair)>;

  Gen1Run(const RepeaterChain& chain, const Gen1Options& opts, EventEngine& engine, Rng& rng,
          entanglement::PairLedger* ledger)
      : chain_(chain), opts_(opts), engine_(engine), rng_(rng), ledger_(ledger) {
    for (const auto& link : chain.links) {
      for (int node : link.spec().endpoints) {
        auto [it, fresh] = attempt_ns_.try_emplace(node, link.attempt_duration_ns());
        if (!fresh) it->second = std::min(it->second, link.attempt_duration_ns());
      }
    }
    levels_ = 0;
    while ((std::size_t{1} << levels_) < chain.links.size()) ++levels_;
  }

  RepeaterResult run() {
    const double start = engine_.now();
    std::optional<BellDiagonalPair> final;
    double finished = start;
    produce(levels_, 0, [&](BellDiagonalPair p) {
      age(p);
      final = p;
      finished = engine_.now();
      engine_.schedule(engine_.now(), EventKind::ProtocolDone, [] {});
    });
    engine_.run();
    if (!final) throw std::logic_error("gen1_repeater: chain never completed");
    RepeaterResult r;
    r.coeffs = final->coeffs;
    r.end_to_end_fidelity = final->fidelity();
    r.wall_time_ns = finished - start;
    r.attempts_total = attempts_;
    r.pairs_distilled = distilled_;
    return r;
  }

 private:
  bool distilled_at(int level) const {
    if (opts_.distill_rounds == 0) return false;
    if (levels_ == 0) return true;
    return opts_.placement == DistillPlacement::BeforeSwap ? level < levels_ : level > 0;
  }

  // Brings a stored pair's coefficients up to the current time. Each half
  // dephases by T2 and by the attempts its node made meanwhile.
  void age(BellDiagonalPair& p) {
    const double wait = engine_.now() - p.created_at_ns;
    if (wait <= 0.0) return;
    for (const auto& end : p.endpoints) {
      const auto it = attempt_ns_.find(end.node_id);
      const long long attempts = it == attempt_ns_.end() ? 0 : static_cast<long long>(wait / it->second);
      p.coeffs = entanglement::decay_stored_half(p.coeffs, opts_.memory, attempts, wait);
    }
    p.created_at_ns = engine_.now();
  }

  void produce(int level, int index, Done done) {
    if (distilled_at(level))
      collect(level, index, std::make_shared<std::vector<BellDiagonalPair>>(), std::move(done));
    else
      produce_raw(level, index, std::move(done));
  }

  void produce_raw(int level, int index, Done done) {
    if (level == 0) {
      start_link(engine_, chain_.links[index], rng_, ledger_, [this, done](LinkResult r) {
        attempts_ += r.attempts;
        done(r.pair);
      });
      return;
    }
    struct Join {
      std::optional<BellDiagonalPair> left, right;
    };
    auto join = std::make_shared<Join>();
    auto try_swap = [this, join, done]() {
      if (!join->left || !join->right) return;
      age(*join->left);
      age(*join->right);
      BellDiagonalPair out = entanglement::swap_entanglement(*join->left, *join->right, ledger_);
      out.created_at_ns = engine_.now();
      engine_.schedule(engine_.now(), EventKind::SwapReady, [done, out]() { done(out); });
    };
    produce(level - 1, 2 * index, [join, try_swap](BellDiagonalPair p) {
      join->left = p;
      try_swap();
    });
    produce(level - 1, 2 * index + 1, [join, try_swap](BellDiagonalPair p) {
      join->right = p;
      try_swap();
    });
  }

  void collect(int level, int index, std::shared_ptr<std::vector<BellDiagonalPair>> batch, Done done) {
    produce_raw(level, index, [this, level, index, batch, done](BellDiagonalPair p) {
      batch->push_back(p);
      if (batch->size() < (std::size_t{1} << opts_.distill_rounds)) {
        collect(level, index, batch, done);
        return;
      }
      for (auto& q : *batch) age(q);
      auto out = entanglement::tiered_distill(*batch, opts_.distill_rounds, rng_, opts_.distill, ledger_);
      batch->clear();
      if (!out) {
        collect(level, index, batch, done);
        return;
      }
      ++distilled_;
      out->created_at_ns = engine_.now();
      engine_.schedule(engine_.now(), EventKind::DistillReady, [done, p = *out]() { done(p); });
    });
  }

  const RepeaterChain& chain_;
  const Gen1Options& opts_;
  EventEngine& engine_;
  Rng& rng_;
  entanglement::PairLedger* ledger_;
  std::unordered_map<int, double> attempt_ns_;
  int levels_ = 0;
  long long attempts_ = 0;
  long long distilled_ = 0;
};

}  // namespace

RepeaterResult gen1_repeater(const RepeaterChain& chain, const Gen1Options& opts, EventEngine& engine, Rng& rng,
                             entanglement::PairLedger* ledger) {
  if (!is_power_of_two(chain.links.size()))
    throw std::invalid_argument("gen1_repeater needs a power-of-two number of links, got " +
                                std::to_string(chain.links.size()));
  if (opts.distill_rounds < 0) throw std::invalid_argument("distill_rounds must be >= 0");
  if (opts.distill_rounds > opts.memory.num_nuclei)
    throw CapacityError("distill_rounds " + std::to_string(opts.distill_rounds) + " needs more than " +
                        std::to_string(opts.memory.num_nuclei) + " nuclear slots");
  opts.memory.validate();
  return Gen1Run(chain, opts, engine, rng, ledger).run();
}

double logical_error_rate(const CodeParams& code, double p_phys) {
  std::vector<double> p(static_cast<std::size_t>(code.n), p_phys);
  return logical_error_rate(code, p);
}

double logical_error_rate(const CodeParams& code, std::span<const double> p_phys) {
  if (code.n < 1 || code.k < 1 || code.d < 1 || code.k > code.n)
    throw std::invalid_argument("code parameters must satisfy 1 <= k <= n and d >= 1");
  if (p_phys.size() != static_cast<std::size_t>(code.n))
    throw std::invalid_argument("need one physical error rate per code qubit");
  // dist[j] = P(j errors so far).
  std::vector<double> dist(p_phys.size() + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t i = 0; i < p_phys.size(); ++i) {
    const double p = p_phys[i];
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("physical error rate outside [0,1]");
    for (std::size_t j = i + 1; j > 0; --j) dist[j] = dist[j] * (1.0 - p) + dist[j - 1] * p;
    dist[0] *= 1.0 - p;
  }
  const int t = (code.d - 1) / 2;
  double tail = 0.0;
  for (std::size_t j = static_cast<std::size_t>(t) + 1; j < dist.size(); ++j) tail += dist[j];
  return tail;
}

Gen2Result gen2_repeater(const Topology& topo, const RepeaterChain& chain, const CodeParams& code,
                         EventEngine& engine, Rng& rng, entanglement::PairLedger* ledger) {
  if (code.n > 7) throw std::invalid_argument("codes with more than 7 physical qubits are not supported");
  if (chain.links.empty()) throw std::invalid_argument("gen2_repeater needs at least one link");
  for (int id : chain.nodes) {
    if (topo.node(id).registers < code.n)
      throw CapacityError("node " + std::to_string(id) + " has " + std::to_string(topo.node(id).registers) +
                          " registers, code needs " + std::to_string(code.n));
  }

  const std::size_t hops = chain.links.size();
  const double start = engine.now();
  std::vector<std::vector<LinkResult>> results(hops);
  for (std::size_t h = 0; h < hops; ++h) {
    results[h].reserve(code.n);
    for (int j = 0; j < code.n; ++j) {
      start_link(engine, chain.links[h], rng, ledger, [&results, h](LinkResult r) {
        results[h].push_back(std::move(r));
      });
    }
  }
  engine.run();

  Gen2Result out;
  double fidelity = 1.0;
  for (std::size_t h = 0; h < hops; ++h) {
    HopStats s;
    std::vector<double> p;
    for (auto& r : results[h]) {
      s.wall_time_ns = std::max(s.wall_time_ns, r.pair.created_at_ns - start);
      s.serial_time_ns += r.elapsed_ns;
      s.attempts += r.attempts;
      p.push_back(1.0 - r.pair.fidelity());
      if (ledger)
        ledger->consume(r.pair);
      else
        entanglement::consume(r.pair);
    }
    s.p_logical = logical_error_rate(code, p);
    fidelity *= 1.0 - s.p_logical;
    out.attempts_total += s.attempts;
    out.wall_time_ns = std::max(out.wall_time_ns, s.wall_time_ns);
    out.hops.push_back(s);
  }
  out.end_to_end_fidelity = fidelity;
  out.coeffs = {fidelity, (1.0 - fidelity) / 3.0, (1.0 - fidelity) / 3.0, (1.0 - fidelity) / 3.0};
  engine.schedule(engine.now(), EventKind::ProtocolDone, [] {});
  engine.run();
  return out;
}

}  // namespace spinnet::network
