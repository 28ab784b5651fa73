#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "spinnet/errors.h"
#include "spinnet/repeater.h"

using namespace spinnet;
using namespace spinnet::network;
using entanglement::BellCoeffs;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinkSpec fixed_link(double p, double fidelity, double km = 0.0) {
  LinkSpec s;
  s.model = LinkModel::Fixed;
  s.fixed_success_prob = p;
  s.fixed_fidelity = fidelity;
  s.fibre_km = km;
  return s;
}

RepeaterChain fixed_chain(int links, double p, double fidelity, LinkTiming timing = {}) {
  Topology t = make_chain(links, fixed_link(p, fidelity));
  std::vector<int> ids;
  for (int i = 0; i < links; ++i) ids.push_back(i);
  return make_repeater_chain(t, ids, {}, {}, timing);
}

Gen1Options no_memory_loss() {
  Gen1Options o;
  o.memory.t2_nuclear_s = kInf;
  o.memory.per_attempt_dephasing = 0.0;
  return o;
}

// Independent composition oracle: Pauli error of a swapped pair is the product
// of the two halves' errors, enumerated over all index pairs.
BellCoeffs convolve(const BellCoeffs& a, const BellCoeffs& b) {
  // Pauli codes as (x, z) bits: I=00, X=10, Y=11, Z=01.
  const int code[4] = {0b00, 0b10, 0b11, 0b01};
  BellCoeffs out{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int c = code[i] ^ code[j];
      for (int k = 0; k < 4; ++k)
        if (code[k] == c) out[k] += a[i] * b[j];
    }
  return out;
}

BellCoeffs werner(double f) { return {f, (1 - f) / 3, (1 - f) / 3, (1 - f) / 3}; }

double binomial_tail(int n, int t, double p) {
  double sum = 0.0;
  for (int j = t + 1; j <= n; ++j) sum += std::tgamma(n + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(n - j + 1.0)) *
                                          std::pow(p, j) * std::pow(1 - p, n - j);
  return sum;
}

// E[max of n iid geometric(p)] = sum_{k>=0} P(max > k).
double expected_max_geometric(int n, double p) {
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) sum += 1.0 - std::pow(1.0 - std::pow(1.0 - p, k), n);
  return sum;
}

}  // namespace

TEST_CASE("link efficiency examples") {
  TopologyConstants c;
  LinkSpec s;
  CHECK(link_efficiency(s, c) == 1.0);
  s.fibre_km = 50.0;
  CHECK(link_efficiency(s, c) == doctest::Approx(0.1).epsilon(1e-12));
  s.fibre_km = 0.0;
  s.switch_layers = 2;
  s.detector_efficiency = 0.8;
  CHECK(link_efficiency(s, c) == doctest::Approx(0.8 * std::pow(10.0, -0.3)).epsilon(1e-12));
}

TEST_CASE("topology validation and paths") {
  Topology t = make_chain(3, LinkSpec{});
  CHECK_NOTHROW(t.validate());
  CHECK(t.connected());
  CHECK(t.path_nodes({0, 1, 2}) == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS(t.path_nodes({0, 2}));
  t.links[1].fibre_km = -1.0;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  Topology split = make_chain(2, LinkSpec{});
  split.links.pop_back();
  CHECK_FALSE(split.connected());
}

TEST_CASE("event engine orders by time then insertion") {
  EventEngine e;
  std::vector<int> order;
  e.schedule(5.0, EventKind::AttemptStart, [&] { order.push_back(2); });
  e.schedule(1.0, EventKind::AttemptStart, [&] { order.push_back(0); });
  e.schedule(5.0, EventKind::HeraldArrived, [&] { order.push_back(3); });
  e.schedule(1.0, EventKind::SwapReady, [&] {
    order.push_back(1);
    CHECK_THROWS_AS(e.schedule(0.5, EventKind::SwapReady, [] {}), std::logic_error);
  });
  e.run();
  CHECK(order == std::vector<int>{0, 1, 2, 3});
  CHECK(e.now() == 5.0);
  CHECK(e.processed() == 4);
}

TEST_CASE("run_link_until_success") {
  EventEngine engine;
  Rng rng(7);

  SUBCASE("p = 1 succeeds on the first attempt") {
    HeraldedLink link(fixed_link(1.0, 0.9), {});
    for (int i = 0; i < 100; ++i) CHECK(run_link_until_success(link, engine, rng).attempts == 1);
  }
  SUBCASE("geometric mean attempts") {
    HeraldedLink link(fixed_link(0.01, 0.9), {});
    const int runs = 10000;
    double sum = 0.0;
    for (int i = 0; i < runs; ++i) sum += run_link_until_success(link, engine, rng).attempts;
    const double sigma = std::sqrt(0.99) / 0.01 / std::sqrt(runs);
    CHECK(std::abs(sum / runs - 100.0) < 3 * sigma);
  }
  SUBCASE("time of flight bounds the attempt duration") {
    HeraldedLink link(fixed_link(1.0, 1.0, 100.0), {});
    CHECK(link.attempt_duration_ns() >= 2.0 * 100.0 / 200.0 * 1e6);
    auto r = run_link_until_success(link, engine, rng);
    CHECK(r.elapsed_ns == link.attempt_duration_ns());
    CHECK(r.pair.created_at_ns == r.elapsed_ns);
  }
  SUBCASE("p = 0 times out") {
    LinkTiming timing;
    timing.max_attempts = 1000;
    HeraldedLink link(fixed_link(0.0, 1.0), {}, {}, {}, {}, timing);
    CHECK_THROWS_AS(run_link_until_success(link, engine, rng), TimeoutError);
  }
  SUBCASE("Barrett-Kok link with zero efficiency and no dark counts times out") {
    LinkSpec s;
    s.detector_efficiency = 0.0;
    LinkTiming timing;
    timing.max_attempts = 10;
    HeraldedLink link(s, {}, {}, {}, {}, timing);
    CHECK_THROWS_AS(run_link_until_success(link, engine, rng), TimeoutError);
  }
  SUBCASE("endpoint registers decay with the attempts taken") {
    HeraldedLink link(fixed_link(1.0, 1.0), {});
    entanglement::SpinRegister a, b;
    a.per_attempt_dephasing = b.per_attempt_dephasing = 0.1;
    a.t2_nuclear_s = b.t2_nuclear_s = kInf;
    a.occupied[0] = true;
    a.state = qstate::DensityMatrix::from_pure(
        qstate::Vector::Constant(16, std::complex<double>(0.25, 0.0)));
    b.state = a.state;
    run_link_until_success(link, engine, rng, nullptr, &a, &b);
    CHECK(std::abs(a.state->matrix()(0, 15)) < 0.0625 - 1e-6);
    CHECK(b.state->matrix().isApprox(qstate::DensityMatrix::from_pure(
        qstate::Vector::Constant(16, std::complex<double>(0.25, 0.0))).matrix()));
  }
}

TEST_CASE("multiplexed link") {
  EventEngine engine;

  SUBCASE("one channel matches the single link on the same seed") {
    LinkSpec s;  // full Barrett-Kok model
    HeraldedLink link(s, {});
    for (std::uint64_t seed = 1; seed < 20; ++seed) {
      Rng r1(seed), r2(seed);
      auto a = run_link_until_success(link, engine, r1);
      auto b = multiplexed_link(link, 1, engine, r2);
      CHECK(a.attempts == b.attempts);
      CHECK(a.elapsed_ns == b.elapsed_ns);
      CHECK(a.pair.coeffs == b.pair.coeffs);
    }
  }
  SUBCASE("per-step success follows the complement rule") {
    const double p = 0.05;
    const int k = 4;
    HeraldedLink link(fixed_link(p, 0.9), {});
    Rng rng(11);
    const int runs = 20000;
    double steps = 0.0;
    for (int i = 0; i < runs; ++i) steps += multiplexed_link(link, k, engine, rng).elapsed_ns / link.attempt_duration_ns();
    const double q = 1.0 - std::pow(1.0 - p, k);
    const double sigma = std::sqrt(1.0 - q) / q / std::sqrt(runs);
    CHECK(std::abs(steps / runs - 1.0 / q) < 3 * sigma);
  }
  SUBCASE("p = 1 takes one attempt duration") {
    HeraldedLink link(fixed_link(1.0, 1.0, 10.0), {});
    Rng rng(3);
    for (int k : {1, 3, 8}) CHECK(multiplexed_link(link, k, engine, rng).elapsed_ns == link.attempt_duration_ns());
  }
  Rng rng(1);
  CHECK_THROWS_AS(multiplexed_link(HeraldedLink(fixed_link(1.0, 1.0), {}), 0, engine, rng), std::invalid_argument);
}

TEST_CASE("gen1: degenerate and perfect chains") {
  SUBCASE("one link equals run_link_until_success") {
    Topology t = make_chain(1, LinkSpec{});
    RepeaterChain chain = make_repeater_chain(t, {0});
    for (std::uint64_t seed = 1; seed < 10; ++seed) {
      EventEngine e1, e2;
      Rng r1(seed), r2(seed);
      auto direct = run_link_until_success(chain.links[0], e1, r1);
      auto rep = gen1_repeater(chain, Gen1Options{}, e2, r2);
      CHECK(rep.attempts_total == direct.attempts);
      CHECK(rep.wall_time_ns == direct.elapsed_ns);
      CHECK(rep.coeffs == direct.pair.coeffs);
    }
  }
  SUBCASE("two perfect links give fidelity 1") {
    EventEngine e;
    Rng rng(1);
    auto r = gen1_repeater(fixed_chain(2, 1.0, 1.0), Gen1Options{}, e, rng);
    CHECK(r.end_to_end_fidelity == 1.0);
  }
  SUBCASE("non power of two is rejected") {
    EventEngine e;
    Rng rng(1);
    CHECK_THROWS_AS(gen1_repeater(fixed_chain(3, 1.0, 1.0), Gen1Options{}, e, rng), std::invalid_argument);
  }
  SUBCASE("link timeouts propagate") {
    EventEngine e;
    Rng rng(1);
    LinkTiming timing;
    timing.max_attempts = 100;
    CHECK_THROWS_AS(gen1_repeater(fixed_chain(2, 0.0, 1.0, timing), Gen1Options{}, e, rng), TimeoutError);
  }
}

TEST_CASE("gen1: two links against swap closed form and max-of-geometrics") {
  const double p = 0.05, f = 0.9;
  const RepeaterChain chain = fixed_chain(2, p, f);
  const int runs = 5000;
  double fid = 0.0, steps = 0.0;
  Rng rng(21);
  for (int i = 0; i < runs; ++i) {
    EventEngine e;
    auto r = gen1_repeater(chain, no_memory_loss(), e, rng);
    fid += r.end_to_end_fidelity;
    steps += r.wall_time_ns / chain.links[0].attempt_duration_ns();
  }
  CHECK(fid / runs == doctest::Approx(convolve(werner(f), werner(f))[0]).epsilon(1e-12));
  // Var[max] bounded by the sum of both variances.
  const double mean = expected_max_geometric(2, p);
  const double sigma = std::sqrt(2 * (1 - p) / (p * p) / runs);
  CHECK(std::abs(steps / runs - mean) < 3 * sigma);
}

TEST_CASE("gen1: four Werner links compose by convolution") {
  const double f = 0.95;
  const BellCoeffs expect = convolve(convolve(werner(f), werner(f)), convolve(werner(f), werner(f)));
  EventEngine e;
  Rng rng(5);
  auto r = gen1_repeater(fixed_chain(4, 0.2, f), no_memory_loss(), e, rng);
  for (int k = 0; k < 4; ++k) CHECK(r.coeffs[k] == doctest::Approx(expect[k]).epsilon(1e-12));
  CHECK(r.attempts_total >= 4);
}

TEST_CASE("gen1: memory decay couples wait time to fidelity") {
  Gen1Options slow = no_memory_loss();
  slow.memory.per_attempt_dephasing = 1e-3;
  const RepeaterChain chain = fixed_chain(2, 0.01, 1.0);
  double fid = 0.0;
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    EventEngine e;
    fid += gen1_repeater(chain, slow, e, rng).end_to_end_fidelity;
  }
  CHECK(fid / 200 < 0.99);
}

TEST_CASE("gen1: swap-only chains never beat their worst link") {
  Rng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const int links = 1 << (1 + trial % 3);
    Topology t = make_chain(links, fixed_link(1.0, 1.0));
    double worst = 1.0;
    std::vector<int> ids;
    for (auto& l : t.links) {
      l.fixed_fidelity = 0.25 + 0.75 * (1.0 - rng.uniform());
      worst = std::min(worst, l.fixed_fidelity);
      ids.push_back(l.link_id);
    }
    EventEngine e;
    auto r = gen1_repeater(make_repeater_chain(t, ids), no_memory_loss(), e, rng);
    CHECK(r.end_to_end_fidelity <= worst + 1e-12);
  }
}

TEST_CASE("gen1: distillation placements") {
  const RepeaterChain chain = fixed_chain(2, 1.0, 0.85);
  for (auto placement : {DistillPlacement::BeforeSwap, DistillPlacement::AfterSwap}) {
    Gen1Options o = no_memory_loss();
    o.distill_rounds = 1;
    o.placement = placement;
    double with = 0.0;
    long long distilled = 0;
    Rng rng(4);
    const int runs = 300;
    for (int i = 0; i < runs; ++i) {
      EventEngine e;
      auto r = gen1_repeater(chain, o, e, rng);
      with += r.end_to_end_fidelity;
      distilled += r.pairs_distilled;
    }
    CHECK(with / runs > convolve(werner(0.85), werner(0.85))[0]);
    CHECK(distilled >= runs);
  }
  Gen1Options too_many;
  too_many.distill_rounds = 4;
  EventEngine e;
  Rng rng(1);
  CHECK_THROWS_AS(gen1_repeater(chain, too_many, e, rng), CapacityError);
}

TEST_CASE("gen1 is deterministic for a fixed seed") {
  Topology t = make_chain(4, LinkSpec{});
  t.links[2].fibre_km = 20.0;
  const RepeaterChain chain = make_repeater_chain(t, {0, 1, 2, 3});
  Gen1Options o;
  o.memory.per_attempt_dephasing = 1e-4;
  o.distill_rounds = 1;
  EventEngine e1, e2;
  Rng r1(99), r2(99);
  auto a = gen1_repeater(chain, o, e1, r1);
  auto b = gen1_repeater(chain, o, e2, r2);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.wall_time_ns == b.wall_time_ns);
  CHECK(a.attempts_total == b.attempts_total);
  CHECK(a.pairs_distilled == b.pairs_distilled);
}

TEST_CASE("cross-cryostat links run the same code as intra-chip links") {
  // A 100 km link, and a 0 km link with the same efficiency and latency.
  Topology far = make_chain(2, LinkSpec{});
  far.links[1].fibre_km = 100.0;
  Topology near = far;
  for (auto& n : near.nodes) n.cryostat_id = 0;
  near.links[1].fibre_km = 0.0;
  near.links[1].detector_efficiency = link_efficiency(far.links[1], far.constants);
  CHECK(far.crosses_cryostats(far.links[1]));
  CHECK_FALSE(near.crosses_cryostats(near.links[1]));

  LinkTiming far_timing, near_timing;
  near_timing.herald_latency_ns = 2.0 * one_way_delay_ns(far.links[1], far.constants);
  RepeaterChain a = make_repeater_chain(far, {0, 1}, {}, {}, far_timing);
  RepeaterChain b = make_repeater_chain(near, {0, 1}, {}, {}, far_timing);
  b.links[1] = HeraldedLink(near.links[1], near.constants, {}, {}, {}, near_timing);
  CHECK(a.links[1].attempt_duration_ns() == b.links[1].attempt_duration_ns());

  for (std::uint64_t seed = 1; seed < 6; ++seed) {
    EventEngine e1, e2;
    Rng r1(seed), r2(seed);
    auto x = gen1_repeater(a, Gen1Options{}, e1, r1);
    auto y = gen1_repeater(b, Gen1Options{}, e2, r2);
    CHECK(x.coeffs == y.coeffs);
    CHECK(x.wall_time_ns == y.wall_time_ns);
    CHECK(x.attempts_total == y.attempts_total);
  }
}

TEST_CASE("gen2: logical error rate") {
  const CodeParams steane{7, 1, 3};
  CHECK(logical_error_rate(steane, 0.0) == 0.0);
  const double oracle = binomial_tail(7, 1, 0.01);
  CHECK(logical_error_rate(steane, 0.01) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(2.0e-3).epsilon(0.02));

  // Heterogeneous rates against subset enumeration.
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> p(7);
    for (double& x : p) x = 0.2 * rng.uniform();
    double tail = 0.0;
    for (int mask = 0; mask < 128; ++mask) {
      if (__builtin_popcount(mask) < 2) continue;
      double prob = 1.0;
      for (int i = 0; i < 7; ++i) prob *= (mask >> i & 1) ? p[i] : 1 - p[i];
      tail += prob;
    }
    CHECK(logical_error_rate(steane, p) == doctest::Approx(tail).epsilon(1e-12));
  }
}

TEST_CASE("gen2: hops run their n links in parallel") {
  const double p = 0.01;
  const CodeParams steane;
  Topology t = make_chain(2, fixed_link(p, 0.99), 7);
  const RepeaterChain chain = make_repeater_chain(t, {0, 1});
  const double duration = chain.links[0].attempt_duration_ns();
  const int runs = 2000;
  double wall = 0.0, serial = 0.0;
  Rng rng(8);
  for (int i = 0; i < runs; ++i) {
    EventEngine e;
    auto r = gen2_repeater(t, chain, steane, e, rng);
    REQUIRE(r.hops.size() == 2);
    for (const auto& h : r.hops) {
      CHECK(h.wall_time_ns < h.serial_time_ns);
      CHECK(h.p_logical == doctest::Approx(binomial_tail(7, 1, 0.01)).epsilon(1e-9));
      wall += h.wall_time_ns / duration;
      serial += h.serial_time_ns / duration;
    }
    CHECK(r.wall_time_ns == std::max(r.hops[0].wall_time_ns, r.hops[1].wall_time_ns));
    CHECK(r.end_to_end_fidelity ==
          doctest::Approx((1 - r.hops[0].p_logical) * (1 - r.hops[1].p_logical)).epsilon(1e-12));
  }
  const double samples = 2.0 * runs;
  const double sigma = std::sqrt(7 * (1 - p) / (p * p) / samples);
  CHECK(std::abs(wall / samples - expected_max_geometric(7, p)) < 3 * sigma);
  CHECK(std::abs(serial / samples - 7 / p) < 3 * sigma);
  CHECK(expected_max_geometric(7, p) < 7 / p / 2);
}

TEST_CASE("gen2: perfect pairs and capacity") {
  Topology t = make_chain(1, fixed_link(1.0, 1.0), 7);
  const RepeaterChain chain = make_repeater_chain(t, {0});
  EventEngine e;
  Rng rng(1);
  auto r = gen2_repeater(t, chain, CodeParams{}, e, rng);
  CHECK(r.end_to_end_fidelity == 1.0);
  CHECK(r.attempts_total == 7);

  t.nodes[1].registers = 6;
  CHECK_THROWS_AS(gen2_repeater(t, chain, CodeParams{}, e, rng), CapacityError);
}
