#include "spinnet/random.h"

#include <cmath>
#include <numbers>

namespace spinnet {

std::uint64_t Rng::mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::exponential(double mean) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -mean * std::log(1.0 - uniform());
}

double Rng::normal(double mean, double stddev) {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t sweep_index,
                          std::uint64_t trial_index) {
  std::uint64_t h = Rng::mix64(seed);
  h = Rng::mix64(h ^ Rng::mix64(sweep_index + 0x51ed270b27a3c2b5ULL));
  h = Rng::mix64(h ^ Rng::mix64(trial_index + 0x2545f4914f6cdd1dULL));
  return h;
}

}  // namespace spinnet
