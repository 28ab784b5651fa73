// spinnet: run, validate and document network simulation experiments.
//
//   spinnet simulate <experiment> --config <path> [--seed N] [--out <path>]
//   spinnet validate --config <path>
//   spinnet schema
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spinnet/config.h"
#include "spinnet/connectivity.h"
#include "spinnet/experiment.h"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

void print_connectivity(const spinnet::cli::ExperimentConfig& cfg) {
  using namespace spinnet::protocols;
  const auto& c = cfg.connectivity;
  std::vector<ConnectivityReport> rows;
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) {
      const auto point = spinnet::cli::apply_sweep_value(cfg, v).connectivity;
      rows.push_back(transversal_depth(point.n, point.interconnects, point.routing, point.gate_fidelity));
    }
  } else {
    rows.push_back(transversal_depth(c.n, c.interconnects, c.routing, c.gate_fidelity));
  }
  std::cout << format_connectivity_table(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for spin-photon quantum networks"};
  app.require_subcommand(1);

  std::string config_path, out_path, experiment;
  std::uint64_t seed = 0;

  auto* simulate = app.add_subcommand("simulate", "Run an experiment and write its CSV");
  simulate->add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(spinnet::cli::experiment_names()));
  simulate->add_option("--config", config_path, "Config file (JSON)")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--out", out_path, "Override the CSV output path");

  auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
  validate->add_option("--config", config_path, "Config file (JSON)")->required();

  auto* schema = app.add_subcommand("schema", "Print the configuration reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  if (schema->parsed()) {
    std::cout << spinnet::cli::schema_text();
    return kOk;
  }

  spinnet::cli::ExperimentConfig cfg;
  try {
    cfg = spinnet::cli::load_config(config_path);
  } catch (const spinnet::cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalid;
  }

  if (validate->parsed()) {
    std::cout << "ok: " << spinnet::cli::experiment_name(cfg.experiment);
    if (cfg.sweep) std::cout << ", sweep over " << cfg.sweep->parameter << " (" << cfg.sweep->values.size() << " values)";
    std::cout << "\n";
    return kOk;
  }

  if (spinnet::cli::experiment_name(cfg.experiment) != experiment) {
    std::cerr << "invalid config: experiment: config is for " << spinnet::cli::experiment_name(cfg.experiment)
              << ", not " << experiment << "\n";
    return kInvalid;
  }
  if (seed_opt->count() > 0) cfg.seed = seed;
  if (!out_path.empty()) cfg.output_path = out_path;

  try {
    const auto rows = spinnet::cli::run_experiment(cfg);
    if (cfg.output_path.empty()) {
      std::cout << spinnet::cli::to_csv(rows);
    } else {
      spinnet::cli::write_csv(rows, cfg.output_path);
      if (cfg.experiment == spinnet::cli::ExperimentKind::Connectivity) print_connectivity(cfg);
    }
  } catch (const spinnet::cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
