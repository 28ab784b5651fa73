#include "spinnet/config.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace spinnet::cli {

using nlohmann::json;

namespace {

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<ExperimentKind> kExperiments[] = {
    {ExperimentKind::BellPairCurve, "bell_pair_curve"}, {ExperimentKind::RepeaterGen1, "repeater_gen1"},
    {ExperimentKind::RepeaterGen2, "repeater_gen2"},    {ExperimentKind::QkdSingleHub, "qkd_single_hub"},
    {ExperimentKind::QkdTwoHub, "qkd_two_hub"},         {ExperimentKind::Connectivity, "connectivity"},
    {ExperimentKind::Overhead, "overhead"},
};
constexpr EnumName<network::LinkModel> kLinkModels[] = {
    {network::LinkModel::BarrettKok, "barrett_kok"}, {network::LinkModel::Fixed, "fixed"}};
constexpr EnumName<network::DistillPlacement> kPlacements[] = {
    {network::DistillPlacement::BeforeSwap, "before_swap"}, {network::DistillPlacement::AfterSwap, "after_swap"}};
constexpr EnumName<protocols::IntraConnectivity> kRouting[] = {
    {protocols::IntraConnectivity::AllToAll, "all_to_all"}, {protocols::IntraConnectivity::Planar, "planar"}};
constexpr EnumName<protocols::PhotonSource> kSources[] = {
    {protocols::PhotonSource::Poisson, "poisson"}, {protocols::PhotonSource::SinglePhoton, "single_photon"}};
constexpr EnumName<qstate::ChannelKind> kChannels[] = {
    {qstate::ChannelKind::Depolarizing, "depolarizing"},
    {qstate::ChannelKind::Dephasing, "dephasing"},
    {qstate::ChannelKind::AmplitudeDamping, "amplitude_damping"},
    {qstate::ChannelKind::BitFlip, "bit_flip"},
};

template <typename E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string path(const char* key) const { return join_path(path_, key); }

  const json* take(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  void get(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(path(key), "must be a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    long long wide = out;
    get(key, wide);
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())
      throw ConfigError(path(key), "out of integer range");
    out = static_cast<int>(wide);
  }
  void get(const char* key, long long& out) {
    if (const json* v = take(key)) {
      if (v->is_number_float()) {
        const double d = v->get<double>();
        // 1e7 style integers are accepted when exact.
        if (d != std::floor(d) || std::abs(d) > 9.0e15) throw ConfigError(path(key), "must be an integer");
        out = static_cast<long long>(d);
        return;
      }
      if (!v->is_number_integer()) throw ConfigError(path(key), "must be an integer");
      if (v->is_number_unsigned() && v->get<std::uint64_t>() > std::numeric_limits<long long>::max())
        throw ConfigError(path(key), "out of integer range");
      out = v->get<long long>();
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else if (v->is_number_integer()) {
        throw ConfigError(path(key), "must be >= 0");
      } else {
        throw ConfigError(path(key), "must be a non-negative integer");
      }
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key), "must be true or false");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(path(key), "must be a string");
      out = v->get<std::string>();
    }
  }
  template <typename E, std::size_t N>
  void get_enum(const char* key, const EnumName<E> (&table)[N], E& out) {
    std::string s;
    if (!has(key)) return;
    get(key, s);
    for (const auto& e : table) {
      if (s == e.name) {
        out = e.value;
        return;
      }
    }
    std::string allowed;
    for (const auto& e : table) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
    throw ConfigError(path(key), "unknown value \"" + s + "\" (expected one of " + allowed + ")");
  }

  // Rejects keys nobody asked for.
  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError(join_path(path_, item.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const json& require_array(const json* v, const std::string& path) {
  if (!v->is_array()) throw ConfigError(path, "must be a list");
  return *v;
}

void read_emitter(const json& j, const std::string& path, photonics::EmitterParams& e) {
  Reader r(j, path);
  r.get("bare_lifetime_ns", e.bare_lifetime_ns);
  r.get("purcell_factor", e.purcell_factor);
  r.get("dephasing_rate_mhz", e.dephasing_rate_mhz);
  r.get("detuning_mhz", e.detuning_mhz);
  r.get("efficiency", e.efficiency);
  r.get("cyclicity", e.cyclicity);
  r.get("spectral_diffusion_mhz", e.spectral_diffusion_mhz);
  r.finish();
}

void read_client(const json& j, const std::string& path, protocols::ClientConfig& c) {
  Reader r(j, path);
  r.get_enum("source", kSources, c.source);
  r.get("mean_photon_number", c.mean_photon_number);
  r.get("link_efficiency", c.link_efficiency);
  r.get_enum("channel", kChannels, c.channel);
  r.get("channel_p", c.channel_p);
  r.finish();
}

network::Topology default_topology() {
  network::Topology t;
  t.nodes = {{0, 1, 0}, {1, 1, 0}};
  network::LinkSpec l;
  t.links = {l};
  return t;
}

ExperimentConfig from_json(const json& doc) {
  ExperimentConfig cfg;
  cfg.topology = default_topology();
  cfg.emitters["default"] = photonics::EmitterParams::t_centre_defaults();

  Reader root(doc, "");
  if (!root.has("experiment")) throw ConfigError("experiment", "is required");
  root.get_enum("experiment", kExperiments, cfg.experiment);
  root.get("seed", cfg.seed);
  root.get("trials", cfg.trials);
  root.get("output_path", cfg.output_path);

  if (const json* e = root.take("emitters")) {
    Reader sets(*e, "emitters");
    for (const auto& item : e->items()) {
      auto& params = cfg.emitters.try_emplace(item.key(), photonics::EmitterParams::t_centre_defaults()).first->second;
      read_emitter(*sets.take(item.key().c_str()), join_path("emitters", item.key()), params);
    }
    sets.finish();
  }

  if (const json* h = root.take("herald")) {
    Reader r(*h, "herald");
    r.get("dt_max_ns", cfg.herald.dt_max_ns);
    r.get("window_ns", cfg.herald.window_ns);
    r.get("dark_count_rate_hz", cfg.herald.dark_count_rate_hz);
    r.get("depolarizing_floor", cfg.herald.depolarizing_floor);
    r.finish();
  }

  if (const json* t = root.take("timing")) {
    Reader r(*t, "timing");
    r.get("optical_cycle_ns", cfg.timing.optical_cycle_ns);
    r.get("herald_latency_ns", cfg.timing.herald_latency_ns);
    r.get("max_attempts", cfg.timing.max_attempts);
    r.finish();
  }

  if (const json* m = root.take("memory")) {
    Reader r(*m, "memory");
    r.get("t2_nuclear_s", cfg.memory.t2_nuclear_s);
    if (r.has("per_attempt_dephasing")) {
      double eps = 0.0;
      r.get("per_attempt_dephasing", eps);
      cfg.memory.per_attempt_dephasing = eps;
    }
    r.finish();
  }

  if (const json* t = root.take("topology")) {
    Reader r(*t, "topology");
    if (const json* c = r.take("constants")) {
      Reader rc(*c, "topology.constants");
      rc.get("fibre_atten_db_per_km", cfg.topology.constants.fibre_atten_db_per_km);
      rc.get("switch_loss_db", cfg.topology.constants.switch_loss_db);
      rc.get("speed_of_light_fibre_km_per_ms", cfg.topology.constants.speed_of_light_fibre_km_per_ms);
      rc.finish();
    }
    if (const json* nodes = r.take("nodes")) {
      cfg.topology.nodes.clear();
      const json& list = require_array(nodes, "topology.nodes");
      for (std::size_t i = 0; i < list.size(); ++i) {
        Reader rn(list[i], "topology.nodes." + std::to_string(i));
        network::NodeSpec n;
        n.node_id = static_cast<int>(i);
        rn.get("node_id", n.node_id);
        rn.get("registers", n.registers);
        rn.get("cryostat_id", n.cryostat_id);
        rn.finish();
        cfg.topology.nodes.push_back(n);
      }
    }
    if (const json* links = r.take("links")) {
      cfg.topology.links.clear();
      const json& list = require_array(links, "topology.links");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "topology.links." + std::to_string(i);
        Reader rl(list[i], path);
        network::LinkSpec l;
        l.link_id = static_cast<int>(i);
        rl.get("link_id", l.link_id);
        if (const json* ends = rl.take("endpoints")) {
          if (!ends->is_array() || ends->size() != 2 || !(*ends)[0].is_number_integer() ||
              !(*ends)[1].is_number_integer())
            throw ConfigError(path + ".endpoints", "must be a list of two node ids");
          l.endpoints = {(*ends)[0].get<int>(), (*ends)[1].get<int>()};
        }
        rl.get("fibre_km", l.fibre_km);
        rl.get("switch_layers", l.switch_layers);
        rl.get("detector_efficiency", l.detector_efficiency);
        rl.get_enum("model", kLinkModels, l.model);
        if (const json* em = rl.take("emitters")) {
          if (!em->is_array() || em->size() != 2 || !(*em)[0].is_string() || !(*em)[1].is_string())
            throw ConfigError(path + ".emitters", "must be a list of two emitter names");
          l.emitters = {(*em)[0].get<std::string>(), (*em)[1].get<std::string>()};
        }
        rl.get("fixed_success_prob", l.fixed_success_prob);
        rl.get("fixed_fidelity", l.fixed_fidelity);
        rl.finish();
        cfg.topology.links.push_back(l);
      }
    }
    r.finish();
  }

  if (const json* rp = root.take("repeater")) {
    Reader r(*rp, "repeater");
    if (const json* links = r.take("links")) {
      const json& list = require_array(links, "repeater.links");
      for (const auto& v : list) {
        if (!v.is_number_integer()) throw ConfigError("repeater.links", "must be a list of link ids");
        cfg.repeater.links.push_back(v.get<int>());
      }
    }
    r.get("distill_rounds", cfg.repeater.distill_rounds);
    r.get_enum("distill_placement", kPlacements, cfg.repeater.placement);
    r.get("dejmps", cfg.repeater.dejmps);
    if (const json* code = r.take("code")) {
      Reader rc(*code, "repeater.code");
      rc.get("n", cfg.repeater.code.n);
      rc.get("k", cfg.repeater.code.k);
      rc.get("d", cfg.repeater.code.d);
      rc.finish();
    }
    r.finish();
  }

  if (const json* q = root.take("qkd")) {
    Reader r(*q, "qkd");
    if (const json* a = r.take("client_a")) read_client(*a, "qkd.client_a", cfg.qkd.client_a);
    if (const json* b = r.take("client_b")) read_client(*b, "qkd.client_b", cfg.qkd.client_b);
    if (const json* h = r.take("hub")) {
      Reader rh(*h, "qkd.hub");
      rh.get("emitter_efficiency", cfg.qkd.hub.emitter_efficiency);
      rh.get("max_load_retries", cfg.qkd.hub.max_load_retries);
      rh.get("load_cycle_ns", cfg.qkd.hub.load_cycle_ns);
      rh.finish();
    }
    r.get("rounds", cfg.qkd.rounds);
    r.get("inter_hub_link", cfg.qkd.inter_hub_link);
    r.finish();
  }

  if (const json* c = root.take("connectivity")) {
    Reader r(*c, "connectivity");
    r.get("n", cfg.connectivity.n);
    r.get("interconnects", cfg.connectivity.interconnects);
    r.get_enum("routing", kRouting, cfg.connectivity.routing);
    r.get("gate_fidelity", cfg.connectivity.gate_fidelity);
    r.get("swap_distance", cfg.connectivity.swap_distance);
    r.finish();
  }

  if (const json* o = root.take("overhead")) {
    Reader r(*o, "overhead");
    r.get("surface_phys_per_logical", cfg.overhead.surface_phys_per_logical);
    r.get("qldpc_n", cfg.overhead.qldpc_n);
    r.get("qldpc_k", cfg.overhead.qldpc_k);
    r.finish();
  }

  if (const json* s = root.take("sweep")) {
    Reader r(*s, "sweep");
    SweepSpec sweep;
    if (!r.has("parameter")) throw ConfigError("sweep.parameter", "is required");
    r.get("parameter", sweep.parameter);
    if (!r.has("values")) throw ConfigError("sweep.values", "is required");
    const json& values = require_array(r.take("values"), "sweep.values");
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError("sweep.values", "must be a list of numbers");
      sweep.values.push_back(v.get<double>());
    }
    if (sweep.values.empty()) throw ConfigError("sweep.values", "must not be empty");
    r.finish();
    cfg.sweep = std::move(sweep);
  }

  root.finish();
  return cfg;
}

// Wraps a component's own std::invalid_argument with its path. Messages of
// the form "<field> must ..." are attributed to that field.
template <typename F>
void check_component(const std::string& path, F&& validate) {
  try {
    validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto space = msg.find(' ');
    if (space != std::string::npos && msg.compare(space, 6, " must ") == 0)
      throw ConfigError(path + "." + msg.substr(0, space), msg.substr(space + 1));
    throw ConfigError(path, msg);
  }
}

void require(bool ok, const std::string& path, const char* rule) {
  if (!ok) throw ConfigError(path, rule);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void validate(const ExperimentConfig& cfg) {
  require(cfg.trials >= 1, "trials", "must be >= 1");

  for (const auto& [name, e] : cfg.emitters) check_component(join_path("emitters", name), [&] { e.validate(); });
  check_component("herald", [&] { cfg.herald.validate(); });

  require(cfg.timing.optical_cycle_ns > 0.0, "timing.optical_cycle_ns", "must be > 0");
  require(cfg.timing.herald_latency_ns >= 0.0, "timing.herald_latency_ns", "must be >= 0");
  require(cfg.timing.max_attempts >= 1, "timing.max_attempts", "must be >= 1");

  require(cfg.memory.t2_nuclear_s > 0.0, "memory.t2_nuclear_s", "must be > 0");
  if (cfg.memory.per_attempt_dephasing)
    require(in_unit(*cfg.memory.per_attempt_dephasing), "memory.per_attempt_dephasing", "must be in [0,1]");

  const auto& t = cfg.topology;
  const auto& c = t.constants;
  require(c.fibre_atten_db_per_km >= 0.0, "topology.constants.fibre_atten_db_per_km", "must be >= 0");
  require(c.switch_loss_db >= 0.0, "topology.constants.switch_loss_db", "must be >= 0");
  require(c.speed_of_light_fibre_km_per_ms > 0.0, "topology.constants.speed_of_light_fibre_km_per_ms",
          "must be > 0");
  for (std::size_t i = 0; i < t.nodes.size(); ++i)
    require(t.nodes[i].registers >= 1, "topology.nodes." + std::to_string(i) + ".registers", "must be >= 1");
  for (std::size_t i = 0; i < t.links.size(); ++i) {
    const auto& l = t.links[i];
    const std::string p = "topology.links." + std::to_string(i);
    require(l.fibre_km >= 0.0, p + ".fibre_km", "must be >= 0");
    require(l.switch_layers >= 0, p + ".switch_layers", "must be >= 0");
    require(in_unit(l.detector_efficiency), p + ".detector_efficiency", "must be in [0,1]");
    require(in_unit(l.fixed_success_prob), p + ".fixed_success_prob", "must be in [0,1]");
    require(in_unit(l.fixed_fidelity), p + ".fixed_fidelity", "must be in [0,1]");
    for (const auto& name : l.emitters)
      require(cfg.emitters.contains(name), p + ".emitters", "names an emitter set that is not defined");
  }
  require(!t.nodes.empty(), "topology.nodes", "must not be empty");
  check_component("topology", [&] { t.validate(); });

  const auto& r = cfg.repeater;
  for (int id : r.links) {
    bool found = false;
    for (const auto& l : t.links) found |= l.link_id == id;
    require(found, "repeater.links", "names a link that is not in the topology");
  }
  require(r.distill_rounds >= 0 && r.distill_rounds <= entanglement::kMaxNuclei, "repeater.distill_rounds",
          "must be in [0,3]");
  require(r.code.n >= 1 && r.code.n <= 7, "repeater.code.n", "must be in [1,7]");
  require(r.code.k >= 1 && r.code.k <= r.code.n, "repeater.code.k", "must be in [1,n]");
  require(r.code.d >= 1, "repeater.code.d", "must be >= 1");

  check_component("qkd.client_a", [&] { cfg.qkd.client_a.validate(); });
  check_component("qkd.client_b", [&] { cfg.qkd.client_b.validate(); });
  check_component("qkd.hub", [&] { cfg.qkd.hub.validate(); });
  require(cfg.qkd.rounds >= 1, "qkd.rounds", "must be >= 1");

  const auto& cn = cfg.connectivity;
  require(cn.n >= 1, "connectivity.n", "must be >= 1");
  require(cn.interconnects >= 1, "connectivity.interconnects", "must be >= 1");
  require(cn.gate_fidelity > 0.0 && cn.gate_fidelity <= 1.0, "connectivity.gate_fidelity", "must be in (0,1]");
  require(cn.swap_distance >= 0, "connectivity.swap_distance", "must be >= 0");

  const auto& o = cfg.overhead;
  require(o.surface_phys_per_logical >= 1, "overhead.surface_phys_per_logical", "must be >= 1");
  require(o.qldpc_n >= 1, "overhead.qldpc_n", "must be >= 1");
  require(o.qldpc_k >= 1 && o.qldpc_k <= o.qldpc_n, "overhead.qldpc_k", "must be in [1,qldpc_n]");

  // Experiment-specific requirements.
  switch (cfg.experiment) {
    case ExperimentKind::BellPairCurve:
      require(!t.links.empty(), "topology.links", "bell_pair_curve needs a link");
      break;
    case ExperimentKind::RepeaterGen1:
    case ExperimentKind::RepeaterGen2: {
      std::vector<int> ids = r.links;
      if (ids.empty())
        for (const auto& l : t.links) ids.push_back(l.link_id);
      require(!ids.empty(), "repeater.links", "the chain needs at least one link");
      std::vector<int> path;
      check_component("repeater.links", [&] { path = t.path_nodes(ids); });
      if (cfg.experiment == ExperimentKind::RepeaterGen1) {
        require(cfg.memory.per_attempt_dephasing.has_value(), "memory.per_attempt_dephasing",
                "is required for repeater_gen1 (no default is assumed)");
        require((ids.size() & (ids.size() - 1)) == 0, "repeater.links",
                "repeater_gen1 needs a power-of-two number of links");
      } else {
        for (int id : path)
          require(t.node(id).registers >= r.code.n, "topology.nodes",
                  "every chain node needs at least repeater.code.n registers");
      }
      break;
    }
    case ExperimentKind::QkdTwoHub: {
      bool found = false;
      for (const auto& l : t.links) found |= l.link_id == cfg.qkd.inter_hub_link;
      require(found, "qkd.inter_hub_link", "names a link that is not in the topology");
      break;
    }
    default:
      break;
  }
}

json emitter_json(const photonics::EmitterParams& e) {
  return {{"bare_lifetime_ns", e.bare_lifetime_ns},
          {"purcell_factor", e.purcell_factor},
          {"dephasing_rate_mhz", e.dephasing_rate_mhz},
          {"detuning_mhz", e.detuning_mhz},
          {"efficiency", e.efficiency},
          {"cyclicity", e.cyclicity},
          {"spectral_diffusion_mhz", e.spectral_diffusion_mhz}};
}

json client_json(const protocols::ClientConfig& c) {
  return {{"source", name_of(kSources, c.source)},
          {"mean_photon_number", c.mean_photon_number},
          {"link_efficiency", c.link_efficiency},
          {"channel", name_of(kChannels, c.channel)},
          {"channel_p", c.channel_p}};
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = name_of(kExperiments, cfg.experiment);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["output_path"] = cfg.output_path;
  for (const auto& [name, e] : cfg.emitters) j["emitters"][name] = emitter_json(e);
  j["herald"] = {{"dt_max_ns", cfg.herald.dt_max_ns},
                 {"window_ns", cfg.herald.window_ns},
                 {"dark_count_rate_hz", cfg.herald.dark_count_rate_hz},
                 {"depolarizing_floor", cfg.herald.depolarizing_floor}};
  j["timing"] = {{"optical_cycle_ns", cfg.timing.optical_cycle_ns},
                 {"herald_latency_ns", cfg.timing.herald_latency_ns},
                 {"max_attempts", cfg.timing.max_attempts}};
  j["memory"] = {{"t2_nuclear_s", cfg.memory.t2_nuclear_s}};
  if (cfg.memory.per_attempt_dephasing) j["memory"]["per_attempt_dephasing"] = *cfg.memory.per_attempt_dephasing;

  const auto& t = cfg.topology;
  j["topology"]["constants"] = {{"fibre_atten_db_per_km", t.constants.fibre_atten_db_per_km},
                                {"switch_loss_db", t.constants.switch_loss_db},
                                {"speed_of_light_fibre_km_per_ms", t.constants.speed_of_light_fibre_km_per_ms}};
  j["topology"]["nodes"] = json::array();
  for (const auto& n : t.nodes)
    j["topology"]["nodes"].push_back({{"node_id", n.node_id}, {"registers", n.registers}, {"cryostat_id", n.cryostat_id}});
  j["topology"]["links"] = json::array();
  for (const auto& l : t.links) {
    j["topology"]["links"].push_back({{"link_id", l.link_id},
                                      {"endpoints", {l.endpoints[0], l.endpoints[1]}},
                                      {"fibre_km", l.fibre_km},
                                      {"switch_layers", l.switch_layers},
                                      {"detector_efficiency", l.detector_efficiency},
                                      {"model", name_of(kLinkModels, l.model)},
                                      {"emitters", {l.emitters[0], l.emitters[1]}},
                                      {"fixed_success_prob", l.fixed_success_prob},
                                      {"fixed_fidelity", l.fixed_fidelity}});
  }

  j["repeater"] = {{"links", cfg.repeater.links},
                   {"distill_rounds", cfg.repeater.distill_rounds},
                   {"distill_placement", name_of(kPlacements, cfg.repeater.placement)},
                   {"dejmps", cfg.repeater.dejmps},
                   {"code", {{"n", cfg.repeater.code.n}, {"k", cfg.repeater.code.k}, {"d", cfg.repeater.code.d}}}};
  j["qkd"] = {{"client_a", client_json(cfg.qkd.client_a)},
              {"client_b", client_json(cfg.qkd.client_b)},
              {"hub",
               {{"emitter_efficiency", cfg.qkd.hub.emitter_efficiency},
                {"max_load_retries", cfg.qkd.hub.max_load_retries},
                {"load_cycle_ns", cfg.qkd.hub.load_cycle_ns}}},
              {"rounds", cfg.qkd.rounds},
              {"inter_hub_link", cfg.qkd.inter_hub_link}};
  j["connectivity"] = {{"n", cfg.connectivity.n},
                       {"interconnects", cfg.connectivity.interconnects},
                       {"routing", name_of(kRouting, cfg.connectivity.routing)},
                       {"gate_fidelity", cfg.connectivity.gate_fidelity},
                       {"swap_distance", cfg.connectivity.swap_distance}};
  j["overhead"] = {{"surface_phys_per_logical", cfg.overhead.surface_phys_per_logical},
                   {"qldpc_n", cfg.overhead.qldpc_n},
                   {"qldpc_k", cfg.overhead.qldpc_k}};
  if (cfg.sweep) j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  return j;
}

json::json_pointer pointer_for(const std::string& dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("sweep.parameter", "empty path component in \"" + dotted + "\"");
    p += "/" + part;
  }
  return json::json_pointer(p);
}

json with_value(const json& doc, const std::string& dotted, double value) {
  json out = doc;
  out.erase("sweep");
  const auto ptr = pointer_for(dotted);
  if (!out.contains(ptr) || !out.at(ptr).is_number_float())
    throw ConfigError("sweep.parameter", "\"" + dotted + "\" does not name a real-valued field");
  out[ptr] = value;
  return out;
}

}  // namespace

std::string experiment_name(ExperimentKind kind) { return name_of(kExperiments, kind); }

std::optional<ExperimentKind> parse_experiment_name(std::string_view name) {
  for (const auto& e : kExperiments) {
    if (name == e.name) return e.value;
  }
  return std::nullopt;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kExperiments) v.push_back(e.name);
    return v;
  }();
  return names;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("syntax error: ") + e.what());
  }
  ExperimentConfig cfg = from_json(doc);
  validate(cfg);
  if (cfg.sweep) {
    const json normal = to_json(cfg);
    for (double v : cfg.sweep->values) {
      try {
        validate(from_json(with_value(normal, cfg.sweep->parameter, v)));
      } catch (const ConfigError& e) {
        if (e.path == "sweep.parameter") throw;
        std::ostringstream msg;
        msg << "sweep value " << v << " is invalid: " << e.what();
        throw ConfigError(cfg.sweep->parameter, msg.str());
      }
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json_text(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, double value) {
  if (!cfg.sweep) return cfg;
  ExperimentConfig out = from_json(with_value(to_json(cfg), cfg.sweep->parameter, value));
  validate(out);
  return out;
}

std::string schema_text() {
  return R"(spinnet experiment configuration (JSON). Unknown keys are rejected.

key                                        default        meaning
experiment                                 (required)     bell_pair_curve | repeater_gen1 | repeater_gen2 |
                                                          qkd_single_hub | qkd_two_hub | connectivity | overhead
seed                                       0              64-bit base seed; trial seeds derive from
                                                          (seed, sweep index, trial index)
trials                                     1000           trials per sweep point
output_path                                ""             CSV destination; empty writes to stdout

emitters.<name>.bare_lifetime_ns           940            excited-state lifetime without cavity
emitters.<name>.purcell_factor             20             lifetime reduction by the cavity
emitters.<name>.dephasing_rate_mhz         2/tau          pure dephasing rate gamma (1/us); default
                                                          gives a linewidth 5x the lifetime limit
emitters.<name>.detuning_mhz               0              optical detuning from the reference line
emitters.<name>.efficiency                 1              photon collection and detection, [0,1]
emitters.<name>.cyclicity                  1              spin survival per optical cycle, (0,1]
emitters.<name>.spectral_diffusion_mhz     0              per-attempt detuning jitter (std dev)
  (every named set starts from these defaults; "default" always exists)

herald.dt_max_ns                           50             accepted detection-time difference
herald.window_ns                           200            detection window per round
herald.dark_count_rate_hz                  0              per detector
herald.depolarizing_floor                  0              weight of white noise on heralded pairs

timing.optical_cycle_ns                    1000           minimum time per entanglement attempt
timing.herald_latency_ns                   0              added to the round-trip time of flight
timing.max_attempts                        10000000       attempts before a link times out

memory.t2_nuclear_s                        1.1            nuclear spin coherence time
memory.per_attempt_dephasing               (required for repeater_gen1)
                                                          dephasing of stored qubits per attempt

topology.constants.fibre_atten_db_per_km   0.2
topology.constants.switch_loss_db          1.5            per switch layer
topology.constants.speed_of_light_fibre_km_per_ms  200
topology.nodes[]                           two nodes      {node_id, registers = 1, cryostat_id = 0}
topology.links[]                           one 0 km link  {link_id, endpoints [a, b], fibre_km = 0,
                                                          switch_layers = 0, detector_efficiency = 1,
                                                          model = barrett_kok | fixed,
                                                          emitters = ["default", "default"],
                                                          fixed_success_prob = 1, fixed_fidelity = 1}

repeater.links                             all links      link ids in path order
repeater.distill_rounds                    0              tiers of distillation per distilled level
repeater.distill_placement                 before_swap    before_swap | after_swap
repeater.dejmps                            false          basis rotation before the bilateral CNOT
repeater.code.{n,k,d}                      7, 1, 3        block code for repeater_gen2

qkd.client_a / qkd.client_b                               {source = poisson | single_photon,
                                                          mean_photon_number = 0.1,
                                                          link_efficiency = 1,
                                                          channel = depolarizing | dephasing |
                                                          amplitude_damping | bit_flip,
                                                          channel_p = 0}
qkd.hub.emitter_efficiency                 1
qkd.hub.max_load_retries                   10             loading attempts before a round is dropped
qkd.hub.load_cycle_ns                      1000           time per loading attempt
qkd.rounds                                 10000          rounds per session (one session per trial)
qkd.inter_hub_link                         0              link joining the hubs (qkd_two_hub)

connectivity.n                             7              qubits per code block
connectivity.interconnects                 7              links between the two modules
connectivity.routing                       all_to_all     all_to_all | planar
connectivity.gate_fidelity                 0.99           per CNOT
connectivity.swap_distance                 5              line distance for swap_chain_fidelity

overhead.surface_phys_per_logical          3000
overhead.qldpc_n                           1000
overhead.qldpc_k                           100

sweep.parameter                            (none)         dotted path to one real-valued field,
                                                          list entries by index, e.g.
                                                          herald.dt_max_ns or topology.links.0.fibre_km
sweep.values                               (none)         list of values

Operating temperature (1-2 K) is documentation only; it enters no model.
)";
}

}  // namespace spinnet::cli
