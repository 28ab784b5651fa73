#pragma once

// Spin-photon interface model: two-photon interference between exponential
// wavepackets and the two-round Barrett-Kok heralding scheme.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "spinnet/bell_pair.h"
#include "spinnet/random.h"

namespace spinnet::photonics {

// Rates: dephasing_rate_mhz is a decay rate in 1/us. detuning_mhz and
// spectral_diffusion_mhz are ordinary frequencies in MHz (converted to angular
// frequency internally).
struct EmitterParams {
  double bare_lifetime_ns = 940.0;
  double purcell_factor = 20.0;
  double dephasing_rate_mhz = 0.0;
  double detuning_mhz = 0.0;
  double efficiency = 1.0;
  double cyclicity = 1.0;
  double spectral_diffusion_mhz = 0.0;  // stddev of per-attempt detuning jitter

  double lifetime_ns() const { return bare_lifetime_ns / purcell_factor; }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  // Purcell-reduced lifetime with a total linewidth five times the lifetime
  // limit, i.e. pure dephasing rate 2/tau.
  static EmitterParams t_centre_defaults();
};

struct HeraldConfig {
  double dt_max_ns = 50.0;
  double window_ns = 200.0;
  double dark_count_rate_hz = 0.0;  // per detector
  double depolarizing_floor = 0.0;  // weight mixed into every heralded pair

  void validate() const;
};

enum class HeraldPattern { None, SameDetector, DifferentDetector };

struct AttemptOutcome {
  bool success = false;
  // Exactly one click in each round, before the dt filter is applied.
  bool pattern_ok = false;
  double dt_ns = 0.0;
  std::optional<entanglement::BellDiagonalPair> heralded_pair;
  std::array<int, 2> photons_detected{0, 0};  // clicking detectors per round
  HeraldPattern pattern = HeraldPattern::None;
  bool dark_count_involved = false;
  double fidelity = 0.0;  // of the heralded state, set when pattern_ok
};

double hom_visibility(double dt_ns, const EmitterParams& a, const EmitterParams& b);

// (1 + V)/2 clamped to [0, 1].
double herald_fidelity(double dt_ns, const EmitterParams& a, const EmitterParams& b);

// Bell coefficients of a pair heralded at dt, including the depolarizing floor.
entanglement::BellCoeffs heralded_coeffs(double fidelity, const HeraldConfig& h);

// One two-round attempt. The number of draws taken from `rng` does not depend
// on any parameter, so streams stay paired across parameter changes.
AttemptOutcome barrett_kok_attempt(const EmitterParams& a, const EmitterParams& b,
                                   const HeraldConfig& h, Rng& rng);

// Success probability of one attempt when the dt filter accepts everything
// and there are no dark counts.
double unconditional_success_probability(const EmitterParams& a, const EmitterParams& b);

struct CurvePoint {
  double dt_max_ns;
  double rate;           // successes / trials
  double mean_fidelity;  // NaN when nothing was heralded
  long long successes;
};

// Runs `trials` attempts once and filters the same event stream by every
// threshold, so the rate column is exactly monotone.
std::vector<CurvePoint> rate_fidelity_curve(const EmitterParams& a, const EmitterParams& b,
                                            std::span<const double> thresholds, long long trials,
                                            const HeraldConfig& base, Rng& rng);

}  // namespace spinnet::photonics
