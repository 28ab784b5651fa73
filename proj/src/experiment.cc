#include "spinnet/experiment.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

#include "spinnet/errors.h"
#include "spinnet/random.h"

namespace spinnet::cli {

namespace {

// Running mean and variance, accumulated in trial order.
struct Stat {
  long long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double stderr_of_mean() const { return n < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(n - 1) / n); }
};

using Metrics = std::vector<std::pair<std::string, double>>;
// Returns the trial's metrics; throws TimeoutError when a link gives up.
using TrialFn = std::function<Metrics(Rng&)>;

struct Trial {
  std::vector<std::string> metrics;  // row order
  TrialFn run;
};

std::vector<int> repeater_links(const ExperimentConfig& cfg) {
  if (!cfg.repeater.links.empty()) return cfg.repeater.links;
  std::vector<int> ids;
  for (const auto& l : cfg.topology.links) ids.push_back(l.link_id);
  return ids;
}

network::HeraldedLink build_link(const ExperimentConfig& cfg, network::LinkSpec spec) {
  return network::HeraldedLink(spec, cfg.topology.constants, cfg.emitters.at(spec.emitters[0]),
                               cfg.emitters.at(spec.emitters[1]), cfg.herald, cfg.timing);
}

network::RepeaterChain build_chain(const ExperimentConfig& cfg) {
  const std::vector<int> ids = repeater_links(cfg);
  network::RepeaterChain chain;
  chain.nodes = cfg.topology.path_nodes(ids);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    network::LinkSpec spec = cfg.topology.link(ids[i]);
    if (spec.endpoints[0] != chain.nodes[i]) {
      std::swap(spec.endpoints[0], spec.endpoints[1]);
      std::swap(spec.emitters[0], spec.emitters[1]);
    }
    chain.links.push_back(build_link(cfg, spec));
  }
  return chain;
}

// Per-experiment trial function. Deterministic analyses ignore the stream.
Trial make_trial(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case ExperimentKind::BellPairCurve: {
      auto link = std::make_shared<network::HeraldedLink>(build_link(cfg, cfg.topology.links.front()));
      return {{"herald_rate", "fidelity"}, [link](Rng& rng) -> Metrics {
        const auto coeffs = link->attempt(rng);
        if (!coeffs) return {{"herald_rate", 0.0}};
        return {{"herald_rate", 1.0}, {"fidelity", (*coeffs)[entanglement::kI]}};
      }};
    }
    case ExperimentKind::RepeaterGen1: {
      auto chain = std::make_shared<network::RepeaterChain>(build_chain(cfg));
      network::Gen1Options opts;
      opts.distill_rounds = cfg.repeater.distill_rounds;
      opts.placement = cfg.repeater.placement;
      opts.distill.dejmps_rotation = cfg.repeater.dejmps;
      opts.memory.t2_nuclear_s = cfg.memory.t2_nuclear_s;
      opts.memory.per_attempt_dephasing = cfg.memory.per_attempt_dephasing.value_or(0.0);
      return {{"fidelity", "wall_time_ns", "attempts", "pairs_distilled"}, [chain, opts](Rng& rng) -> Metrics {
        network::EventEngine engine;
        const auto r = network::gen1_repeater(*chain, opts, engine, rng);
        return {{"fidelity", r.end_to_end_fidelity},
                {"wall_time_ns", r.wall_time_ns},
                {"attempts", static_cast<double>(r.attempts_total)},
                {"pairs_distilled", static_cast<double>(r.pairs_distilled)}};
      }};
    }
    case ExperimentKind::RepeaterGen2: {
      auto chain = std::make_shared<network::RepeaterChain>(build_chain(cfg));
      const network::Topology topo = cfg.topology;
      const network::CodeParams code = cfg.repeater.code;
      return {{"fidelity", "wall_time_ns", "hop_wall_time_ns", "hop_serial_time_ns", "p_logical", "attempts"},
              [chain, topo, code](Rng& rng) -> Metrics {
        network::EventEngine engine;
        const auto r = network::gen2_repeater(topo, *chain, code, engine, rng);
        double wall = 0.0, serial = 0.0, p_logical = 0.0;
        for (const auto& h : r.hops) {
          wall += h.wall_time_ns;
          serial += h.serial_time_ns;
          p_logical += h.p_logical;
        }
        const double hops = static_cast<double>(r.hops.size());
        return {{"fidelity", r.end_to_end_fidelity},
                {"wall_time_ns", r.wall_time_ns},
                {"hop_wall_time_ns", wall / hops},
                {"hop_serial_time_ns", serial / hops},
                {"p_logical", p_logical / hops},
                {"attempts", static_cast<double>(r.attempts_total)}};
      }};
    }
    case ExperimentKind::QkdSingleHub:
    case ExperimentKind::QkdTwoHub: {
      const QkdParams q = cfg.qkd;
      std::shared_ptr<network::HeraldedLink> link;
      if (cfg.experiment == ExperimentKind::QkdTwoHub)
        link = std::make_shared<network::HeraldedLink>(build_link(cfg, cfg.topology.link(q.inter_hub_link)));
      return {{"qber", "qber_z", "qber_x", "secret_fraction", "sifted_bits", "abandoned_rounds", "raw_rate_hz"},
              [q, link](Rng& rng) -> Metrics {
        network::EventEngine engine;
        const auto r = link ? protocols::mdi_qkd_two_hub(q.client_a, q.client_b, q.hub, *link, q.rounds, engine, rng)
                            : protocols::mdi_qkd_single_hub(q.client_a, q.client_b, q.hub, q.rounds, engine, rng);
        return {{"qber", r.qber},
                {"qber_z", r.qber_z},
                {"qber_x", r.qber_x},
                {"secret_fraction", r.secret_fraction},
                {"sifted_bits", static_cast<double>(r.sifted_bits)},
                {"abandoned_rounds", static_cast<double>(r.abandoned_rounds)},
                {"raw_rate_hz", r.raw_rate_hz}};
      }};
    }
    case ExperimentKind::Connectivity: {
      const ConnectivityParams c = cfg.connectivity;
      return {{"depth", "total_gates", "est_fidelity", "interconnects_used", "swap_chain_fidelity"},
              [c](Rng&) -> Metrics {
        const auto r = protocols::transversal_depth(c.n, c.interconnects, c.routing, c.gate_fidelity);
        return {{"depth", static_cast<double>(r.depth)},
                {"total_gates", static_cast<double>(r.total_gates)},
                {"est_fidelity", r.est_fidelity},
                {"interconnects_used", static_cast<double>(r.interconnects_used)},
                {"swap_chain_fidelity", protocols::swap_chain_fidelity(c.swap_distance, c.gate_fidelity)}};
      }};
    }
    case ExperimentKind::Overhead: {
      const OverheadParams o = cfg.overhead;
      return {{"surface_per_logical", "qldpc_per_logical", "ratio"}, [o](Rng&) -> Metrics {
        const auto r = protocols::overhead_compare(o.surface_phys_per_logical, o.qldpc_n, o.qldpc_k);
        return {{"surface_per_logical", r.surface_per_logical},
                {"qldpc_per_logical", r.qldpc_per_logical},
                {"ratio", r.ratio}};
      }};
    }
  }
  throw std::logic_error("unhandled experiment kind");
}

bool deterministic(ExperimentKind kind) {
  return kind == ExperimentKind::Connectivity || kind == ExperimentKind::Overhead;
}


void run_point(const ExperimentConfig& cfg, std::size_t sweep_index, const std::string& sweep_param,
               std::optional<double> sweep_value, std::vector<ResultRow>& rows) {
  const Trial trial = make_trial(cfg);
  const long long trials = deterministic(cfg.experiment) ? 1 : cfg.trials;
  std::map<std::string, Stat> stats;
  long long timeouts = 0;
  for (long long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(cfg.seed, sweep_index, static_cast<std::uint64_t>(t)));
    try {
      for (const auto& [name, v] : trial.run(rng)) stats[name].add(v);
    } catch (const TimeoutError&) {
      ++timeouts;
    }
  }

  ResultRow base;
  base.experiment = experiment_name(cfg.experiment);
  base.sweep_param = sweep_param;
  base.sweep_value = sweep_value;
  base.seed = cfg.seed;
  for (const auto& name : trial.metrics) {
    const Stat& s = stats[name];
    ResultRow row = base;
    row.metric = name;
    row.value = s.n > 0 ? s.mean : std::numeric_limits<double>::quiet_NaN();
    row.stderr_value = s.stderr_of_mean();
    row.trials = s.n;
    row.status = s.n > 0 ? "ok" : "no_data";
    rows.push_back(row);
  }
  if (timeouts > 0) {
    ResultRow row = base;
    row.metric = "timeouts";
    row.value = static_cast<double>(timeouts);
    row.trials = trials;
    row.status = "timeout";
    rows.push_back(row);
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  if (!cfg.sweep) {
    run_point(cfg, 0, "", std::nullopt, rows);
    return rows;
  }
  for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
    const double v = cfg.sweep->values[i];
    run_point(apply_sweep_value(cfg, v), i, cfg.sweep->parameter, v, rows);
  }
  return rows;
}

std::string csv_header() { return "experiment,sweep_param,sweep_value,metric,value,stderr,trials,seed,status"; }

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += r.experiment + "," + r.sweep_param + "," + (r.sweep_value ? format_number(*r.sweep_value) : "") + "," +
           r.metric + "," + format_number(r.value) + "," + format_number(r.stderr_value) + "," +
           std::to_string(r.trials) + "," + std::to_string(r.seed) + "," + r.status + "\n";
  }
  return out;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << to_csv(rows);
  if (!out.flush()) throw std::runtime_error("failed writing " + path);
}

}  // namespace spinnet::cli
