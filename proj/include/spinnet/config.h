#pragma once

// Experiment configuration: strict JSON parsing with defaults, validation
// errors that name the offending field, and single-parameter sweeps.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinnet/connectivity.h"
#include "spinnet/link.h"
#include "spinnet/photonics.h"
#include "spinnet/qkd.h"
#include "spinnet/repeater.h"
#include "spinnet/topology.h"

namespace spinnet::cli {

// Raised for malformed documents, unknown keys and out-of-range values.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path(path) {}
  std::string path;
};

enum class ExperimentKind {
  BellPairCurve,
  RepeaterGen1,
  RepeaterGen2,
  QkdSingleHub,
  QkdTwoHub,
  Connectivity,
  Overhead,
};

std::string experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_name(std::string_view name);
const std::vector<std::string>& experiment_names();

struct SweepSpec {
  std::string parameter;  // dotted path, list indices as numbers
  std::vector<double> values;
};

struct MemoryParams {
  double t2_nuclear_s = 1.1;
  std::optional<double> per_attempt_dephasing;  // required by repeater_gen1
};

struct RepeaterParams {
  std::vector<int> links;  // path order; empty means every topology link in order
  int distill_rounds = 0;
  network::DistillPlacement placement = network::DistillPlacement::BeforeSwap;
  bool dejmps = false;
  network::CodeParams code;
};

struct QkdParams {
  protocols::ClientConfig client_a, client_b;
  protocols::HubConfig hub;
  long long rounds = 10000;
  int inter_hub_link = 0;
};

struct ConnectivityParams {
  int n = 7;
  int interconnects = 7;
  protocols::IntraConnectivity routing = protocols::IntraConnectivity::AllToAll;
  double gate_fidelity = 0.99;
  int swap_distance = 5;
};

struct OverheadParams {
  int surface_phys_per_logical = 3000;
  int qldpc_n = 1000;
  int qldpc_k = 100;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::BellPairCurve;
  std::uint64_t seed = 0;
  long long trials = 1000;
  std::string output_path;  // empty: standard output

  network::Topology topology;
  // Every named set starts from the T centre defaults; "default" always exists.
  std::map<std::string, photonics::EmitterParams> emitters;
  photonics::HeraldConfig herald;
  network::LinkTiming timing;
  MemoryParams memory;

  RepeaterParams repeater;
  QkdParams qkd;
  ConnectivityParams connectivity;
  OverheadParams overhead;

  std::optional<SweepSpec> sweep;
};

// Throws ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Full document with every default spelled out; parse_config round-trips it.
std::string to_json_text(const ExperimentConfig& cfg);

// The configuration with the sweep parameter set to `value` (sweep dropped).
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, double value);

// Reference table of every key, its default and its meaning.
std::string schema_text();

}  // namespace spinnet::cli
