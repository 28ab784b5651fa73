#pragma once

#include <cstdint>
#include <random>

namespace spinnet {

// Seeded stream used by every stochastic routine. All draws go through the
// helpers below so that results are bit-reproducible across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

  double exponential(double mean);

  // Box-Muller; one draw discarded so the stream position is predictable.
  double normal(double mean, double stddev);

  // Deterministic child stream; leaves this stream advanced by one draw.
  Rng split() { return Rng(mix64(engine_())); }

  static std::uint64_t mix64(std::uint64_t x);

 private:
  std::mt19937_64 engine_;
};

// Pure function of (seed, sweep_index, trial_index). SplitMix64 finalizer
// applied to each component in turn.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t sweep_index,
                          std::uint64_t trial_index);

}  // namespace spinnet
