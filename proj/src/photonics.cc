#include "spinnet/photonics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinnet::photonics {

namespace {

void require(bool ok, const char* field, const char* rule) {
  if (!ok) throw std::invalid_argument(std::string(field) + " " + rule);
}

struct PhotonEvent {
  bool present = false;
  double time_ns = 0.0;
  int detector = 0;
};

struct RoundDraws {
  std::array<double, 2> survive;
  std::array<double, 2> detect;
  std::array<double, 2> delay;
  std::array<double, 2> detector;
  std::array<double, 2> dark;
  std::array<double, 2> dark_time;
};

RoundDraws draw_round(Rng& rng) {
  RoundDraws d;
  for (int e = 0; e < 2; ++e) {
    d.survive[e] = rng.uniform();
    d.detect[e] = rng.uniform();
    d.delay[e] = rng.uniform();
    d.detector[e] = rng.uniform();
  }
  for (int det = 0; det < 2; ++det) {
    d.dark[det] = rng.uniform();
    d.dark_time[det] = rng.uniform();
  }
  return d;
}

}  // namespace

void EmitterParams::validate() const {
  require(bare_lifetime_ns > 0.0, "bare_lifetime_ns", "must be > 0");
  require(purcell_factor >= 1.0, "purcell_factor", "must be >= 1");
  require(dephasing_rate_mhz >= 0.0, "dephasing_rate_mhz", "must be >= 0");
  require(std::isfinite(detuning_mhz), "detuning_mhz", "must be finite");
  require(efficiency >= 0.0 && efficiency <= 1.0, "efficiency", "must be in [0,1]");
  require(cyclicity > 0.0 && cyclicity <= 1.0, "cyclicity", "must be in (0,1]");
  require(spectral_diffusion_mhz >= 0.0, "spectral_diffusion_mhz", "must be >= 0");
}

EmitterParams EmitterParams::t_centre_defaults() {
  EmitterParams p;
  p.bare_lifetime_ns = 940.0;
  p.purcell_factor = 20.0;
  // gamma = 4/(2 tau); 1/ns -> 1/us.
  p.dephasing_rate_mhz = 2.0 / p.lifetime_ns() * 1e3;
  return p;
}

void HeraldConfig::validate() const {
  require(dt_max_ns > 0.0, "dt_max_ns", "must be > 0");
  require(window_ns > 0.0, "window_ns", "must be > 0");
  require(dt_max_ns <= window_ns, "dt_max_ns", "must not exceed window_ns");
  require(dark_count_rate_hz >= 0.0, "dark_count_rate_hz", "must be >= 0");
  require(depolarizing_floor >= 0.0 && depolarizing_floor <= 1.0, "depolarizing_floor",
          "must be in [0,1]");
}

double hom_visibility(double dt_ns, const EmitterParams& a, const EmitterParams& b) {
  const double gamma_per_ns = (a.dephasing_rate_mhz + b.dephasing_rate_mhz) * 1e-3;
  const double omega_per_ns = 2.0 * std::numbers::pi * (a.detuning_mhz - b.detuning_mhz) * 1e-3;
  const double ta = a.lifetime_ns(), tb = b.lifetime_ns();
  const double overlap = 2.0 * std::sqrt(ta * tb) / (ta + tb);
  return overlap * std::exp(-gamma_per_ns * std::abs(dt_ns)) * std::cos(omega_per_ns * dt_ns);
}

double herald_fidelity(double dt_ns, const EmitterParams& a, const EmitterParams& b) {
  return std::clamp(0.5 * (1.0 + hom_visibility(dt_ns, a, b)), 0.0, 1.0);
}

entanglement::BellCoeffs heralded_coeffs(double fidelity, const HeraldConfig& h) {
  return entanglement::depolarize(entanglement::phase_flip_coeffs(fidelity), h.depolarizing_floor);
}

double unconditional_success_probability(const EmitterParams& a, const EmitterParams& b) {
  const double c = a.cyclicity * b.cyclicity;
  return 0.5 * a.efficiency * b.efficiency * c * c;
}

AttemptOutcome barrett_kok_attempt(const EmitterParams& a, const EmitterParams& b,
                                   const HeraldConfig& h, Rng& rng) {
  const std::array<const EmitterParams*, 2> em{&a, &b};

  // Spin configuration in the computational basis: emitter e is bright in
  // round 0 iff up[e], and bright in round 1 after the spin flip otherwise.
  const std::array<bool, 2> up{rng.uniform() < 0.5, rng.uniform() < 0.5};
  const std::array<double, 2> jitter{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)};
  const std::array<RoundDraws, 2> draws{draw_round(rng), draw_round(rng)};

  const double p_dark = 1.0 - std::exp(-h.dark_count_rate_hz * h.window_ns * 1e-9);

  AttemptOutcome out;
  bool cycled = true;
  std::array<double, 2> click_time{0.0, 0.0};
  std::array<int, 2> click_detector{0, 0};
  bool genuine = true;

  for (int r = 0; r < 2; ++r) {
    const RoundDraws& d = draws[r];
    std::array<bool, 2> fired{false, false};
    std::array<double, 2> first{std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity()};
    std::array<bool, 2> dark_at{false, false};

    for (int e = 0; e < 2; ++e) {
      if (d.survive[e] >= em[e]->cyclicity) cycled = false;
      const bool bright = (r == 0) ? up[e] : !up[e];
      if (!bright || d.detect[e] >= em[e]->efficiency) continue;
      const double t = -em[e]->lifetime_ns() * std::log(1.0 - d.delay[e]);
      if (t > h.window_ns) continue;
      const int det = d.detector[e] < 0.5 ? 0 : 1;
      fired[det] = true;
      first[det] = std::min(first[det], t);
    }
    for (int det = 0; det < 2; ++det) {
      if (d.dark[det] < p_dark) {
        fired[det] = true;
        dark_at[det] = true;
        first[det] = std::min(first[det], d.dark_time[det] * h.window_ns);
      }
    }
    out.photons_detected[r] = int(fired[0]) + int(fired[1]);
    if (out.photons_detected[r] == 1) {
      const int det = fired[0] ? 0 : 1;
      click_time[r] = first[det];
      click_detector[r] = det;
      if (dark_at[det]) genuine = false;
    }
  }

  out.pattern_ok = cycled && out.photons_detected[0] == 1 && out.photons_detected[1] == 1;
  if (!out.pattern_ok) return out;

  // Only the anti-aligned configurations give one photon per round without
  // dark counts; anything else that clicked once per round was helped by one.
  if (up[0] == up[1]) genuine = false;
  out.dark_count_involved = !genuine;
  out.dt_ns = click_time[1] - click_time[0];
  out.pattern = click_detector[0] == click_detector[1] ? HeraldPattern::SameDetector
                                                       : HeraldPattern::DifferentDetector;

  entanglement::BellCoeffs coeffs;
  if (genuine) {
    EmitterParams ja = a, jb = b;
    ja.detuning_mhz += a.spectral_diffusion_mhz * jitter[0];
    jb.detuning_mhz += b.spectral_diffusion_mhz * jitter[1];
    out.fidelity = herald_fidelity(out.dt_ns, ja, jb);
    coeffs = heralded_coeffs(out.fidelity, h);
  } else {
    coeffs = {0.25, 0.25, 0.25, 0.25};
  }
  out.fidelity = coeffs[entanglement::kI];

  out.success = std::abs(out.dt_ns) <= h.dt_max_ns;
  if (out.success) {
    entanglement::BellDiagonalPair pair;
    pair.coeffs = coeffs;
    out.heralded_pair = pair;
  }
  return out;
}

std::vector<CurvePoint> rate_fidelity_curve(const EmitterParams& a, const EmitterParams& b,
                                            std::span<const double> thresholds, long long trials,
                                            const HeraldConfig& base, Rng& rng) {
  if (thresholds.empty()) throw std::invalid_argument("threshold list is empty");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("thresholds must be sorted ascending");
  }
  if (trials < 10000) throw std::invalid_argument("rate_fidelity_curve needs at least 1e4 trials");

  HeraldConfig loose = base;
  loose.dt_max_ns = loose.window_ns;

  const std::size_t n = thresholds.size();
  std::vector<long long> count(n, 0);
  std::vector<double> fsum(n, 0.0);
  for (long long t = 0; t < trials; ++t) {
    const AttemptOutcome o = barrett_kok_attempt(a, b, loose, rng);
    if (!o.pattern_ok) continue;
    const double adt = std::abs(o.dt_ns);
    for (std::size_t i = 0; i < n; ++i) {
      if (adt <= thresholds[i]) {
        ++count[i];
        fsum[i] += o.fidelity;
      }
    }
  }

  std::vector<CurvePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({thresholds[i], static_cast<double>(count[i]) / static_cast<double>(trials),
                   count[i] > 0 ? fsum[i] / static_cast<double>(count[i])
                                : std::numeric_limits<double>::quiet_NaN(),
                   count[i]});
  }
  return out;
}

}  // namespace spinnet::photonics
