#pragma once

// Runs a configured experiment over its sweep points and trials and renders
// the results as CSV rows.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinnet/config.h"

namespace spinnet::cli {

struct ResultRow {
  std::string experiment;
  std::string sweep_param;           // empty without a sweep
  std::optional<double> sweep_value;
  std::string metric;
  double value = 0.0;
  double stderr_value = 0.0;         // standard error of the mean over trials
  long long trials = 0;              // trials contributing to `value`
  std::uint64_t seed = 0;            // base seed of the run
  std::string status;                // "ok", or why trials did not finish
};

// Trial t of sweep point s runs on Rng(derive_seed(cfg.seed, s, t)). Link
// timeouts are counted and reported in a "timeouts" row instead of aborting.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);

// Throws std::runtime_error on I/O failure.
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace spinnet::cli
