#include <cmath>
#include <vector>

#include "doctest.h"
#include "spinnet/connectivity.h"
#include "spinnet/errors.h"
#include "spinnet/qkd.h"
#include "support/random_states.h"
#include "support/swap_network_oracle.h"

using namespace spinnet;
using namespace spinnet::protocols;
using qstate::Basis;

namespace {

ClientConfig ideal_client() {
  ClientConfig c;
  c.source = PhotonSource::SinglePhoton;
  c.mean_photon_number = 1.0;
  return c;
}

network::HeraldedLink fixed_link(double p, double fidelity) {
  network::LinkSpec s;
  s.model = network::LinkModel::Fixed;
  s.fixed_success_prob = p;
  s.fixed_fidelity = fidelity;
  return network::HeraldedLink(s, {});
}

double z_two_proportion(long long k1, long long n1, long long k2, long long n2) {
  const double p1 = double(k1) / n1, p2 = double(k2) / n2, p = double(k1 + k2) / (n1 + n2);
  const double se = std::sqrt(p * (1 - p) * (1.0 / n1 + 1.0 / n2));
  return se == 0.0 ? 0.0 : (p1 - p2) / se;
}

}  // namespace

TEST_CASE("binary entropy and secret fraction") {
  CHECK(h2(0.0) == 0.0);
  CHECK(h2(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h2(1.0) == 0.0);
  CHECK(secret_fraction(0.0) == 1.0);
  CHECK(secret_fraction(0.5) == 0.0);
  CHECK(secret_fraction(0.11) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(secret_fraction(0.2) == 0.0);
  const double q = 0.05;
  CHECK(secret_fraction(q) == doctest::Approx(1 + 2 * (q * std::log2(q) + (1 - q) * std::log2(1 - q))));
}

TEST_CASE("loading teleports the client state") {
  Rng rng(2);
  for (Basis b : {Basis::Z, Basis::X}) {
    for (int bit : {0, 1}) {
      TimeBinQubit q{b, bit, 1.0, 10.0};
      bool seen_z[2] = {false, false};
      int heralds = 0;
      while (heralds < 40) {
        entanglement::SpinRegister reg;
        auto r = load_timebin(q, reg, ideal_client(), HubConfig{}, rng);
        if (!r.heralded) continue;
        ++heralds;
        CHECK(r.slot == 1);
        CHECK(reg.occupied[0]);
        CHECK(r.frame.x);
        seen_z[r.frame.z] = true;
        CHECK(qstate::fidelity(*r.state, q.state()) == doctest::Approx(1.0).epsilon(1e-12));
        const auto p = qstate::project_qubit(*r.state, 0, b, bit);
        CHECK(p.prob == doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK(seen_z[0]);
      CHECK(seen_z[1]);
    }
  }
}

TEST_CASE("herald probability") {
  Rng rng(3);
  auto rate = [&](const ClientConfig& c, const HubConfig& hub, int trials) {
    TimeBinQubit q{Basis::Z, 0, c.mean_photon_number, 10.0};
    int n = 0;
    for (int i = 0; i < trials; ++i) {
      entanglement::SpinRegister reg;
      n += load_timebin(q, reg, c, hub, rng).heralded;
    }
    return double(n) / trials;
  };
  const int trials = 40000;
  SUBCASE("ideal single photon: half the Bell states are resolved") {
    const double r = rate(ideal_client(), HubConfig{}, trials);
    CHECK(std::abs(r - 0.5) < 3 * std::sqrt(0.25 / trials));
  }
  SUBCASE("Poisson source with loss") {
    ClientConfig c;
    c.mean_photon_number = 0.5;
    c.link_efficiency = 0.6;
    HubConfig hub;
    hub.emitter_efficiency = 0.7;
    const double lambda = 0.3, p0 = std::exp(-lambda), p1 = lambda * p0;
    const double expect = 0.5 * (p1 * 0.7 + (1 - p0 - p1));
    const double r = rate(c, hub, trials);
    CHECK(std::abs(r - expect) < 3 * std::sqrt(expect * (1 - expect) / trials));
  }
  SUBCASE("vacuum limit") {
    ClientConfig c;
    c.mean_photon_number = 1e-9;
    CHECK(rate(c, HubConfig{}, 10000) == 0.0);
  }
}

TEST_CASE("loaded X error rate equals client dephasing") {
  const double p = 0.08;
  ClientConfig c = ideal_client();
  c.channel = qstate::ChannelKind::Dephasing;
  c.channel_p = p;
  Rng rng(5);
  int heralds = 0, errors = 0;
  while (heralds < 10000) {
    const int bit = static_cast<int>(rng.below(2));
    TimeBinQubit q{Basis::X, bit, 1.0, 10.0};
    entanglement::SpinRegister reg;
    auto r = load_timebin(q, reg, c, HubConfig{}, rng);
    if (!r.heralded) continue;
    ++heralds;
    errors += qstate::measure_qubit(*r.state, 0, Basis::X, rng).outcome != bit;
  }
  CHECK(std::abs(double(errors) / heralds - p) < 3 * std::sqrt(p * (1 - p) / heralds));
}

TEST_CASE("loading needs a free slot") {
  entanglement::SpinRegister reg;
  reg.num_nuclei = 1;
  reg.occupied[0] = true;
  Rng rng(1);
  CHECK_THROWS_AS(load_timebin(TimeBinQubit{}, reg, ideal_client(), HubConfig{}, rng), CapacityError);
  release_slot(reg, 1);
  CHECK_NOTHROW(load_timebin(TimeBinQubit{}, reg, ideal_client(), HubConfig{}, rng));
}

TEST_CASE("single hub sessions") {
  network::EventEngine engine;
  SUBCASE("noiseless") {
    Rng rng(10);
    auto r = mdi_qkd_single_hub(ideal_client(), ideal_client(), HubConfig{}, 10000, engine, rng);
    CHECK(r.errors == 0);
    CHECK(r.qber == 0.0);
    CHECK(r.secret_fraction == 1.0);
    CHECK(r.sifted_bits <= r.rounds);
    const double n = double(r.completed_rounds);
    CHECK(std::abs(r.sifted_bits / n - 0.5) < 3 * std::sqrt(0.25 / n));
    CHECK(r.raw_rate_hz > 0.0);
  }
  SUBCASE("depolarized client") {
    ClientConfig noisy = ideal_client();
    noisy.channel_p = 0.1;  // flips either basis with probability 0.05
    Rng rng(11);
    auto r = mdi_qkd_single_hub(noisy, ideal_client(), HubConfig{}, 40000, engine, rng);
    CHECK(std::abs(r.qber - 0.05) < 3 * std::sqrt(0.05 * 0.95 / r.sifted_bits));
    CHECK(std::abs(r.qber_z - r.qber_x) < 0.02);
  }
  SUBCASE("multi-photon heralds add errors") {
    ClientConfig wcp;
    wcp.mean_photon_number = 0.8;
    Rng rng(12);
    auto r = mdi_qkd_single_hub(wcp, wcp, HubConfig{}, 5000, engine, rng);
    CHECK(r.qber > 0.0);
  }
}

TEST_CASE("two hub sessions") {
  SUBCASE("perfect pairs match the single hub") {
    network::EventEngine e1, e2;
    Rng r1(21), r2(21);
    auto one = mdi_qkd_single_hub(ideal_client(), ideal_client(), HubConfig{}, 20000, e1, r1);
    auto two = mdi_qkd_two_hub(ideal_client(), ideal_client(), HubConfig{}, fixed_link(1.0, 1.0), 20000, e2, r2);
    CHECK(std::abs(z_two_proportion(one.errors, one.sifted_bits, two.errors, two.sifted_bits)) < 2.576);
    CHECK(one.sifted_bits == two.sifted_bits);
  }
  SUBCASE("Werner pairs raise the error rate per basis") {
    network::EventEngine e;
    Rng rng(22);
    const double f = 0.9;
    auto r = mdi_qkd_two_hub(ideal_client(), ideal_client(), HubConfig{}, fixed_link(1.0, f), 30000, e, rng);
    // X error on the target half flips Z parity; Z on the control flips X
    // parity; Y does both.
    const double expect = 2 * (1 - f) / 3;
    CHECK(std::abs(r.qber_z - expect) < 3 * std::sqrt(expect * (1 - expect) * 2 / r.sifted_bits));
    CHECK(std::abs(r.qber_x - expect) < 3 * std::sqrt(expect * (1 - expect) * 2 / r.sifted_bits));
  }
  SUBCASE("dead link") {
    network::EventEngine e;
    Rng rng(23);
    network::LinkSpec s;
    s.detector_efficiency = 0.0;
    network::HeraldedLink dead(s, {});
    auto r = mdi_qkd_two_hub(ideal_client(), ideal_client(), HubConfig{}, dead, 200, e, rng);
    CHECK(r.sifted_bits == 0);
    CHECK(r.abandoned_rounds == 200);
    CHECK(r.secret_fraction == 0.0);
  }
}

TEST_CASE("transversal depth") {
  CHECK(transversal_depth(7, 7, IntraConnectivity::AllToAll).depth == 1);
  CHECK(transversal_depth(7, 1, IntraConnectivity::AllToAll).depth == 7);
  CHECK(transversal_depth(7, 2, IntraConnectivity::AllToAll).depth == 4);
  for (int n = 1; n <= 16; ++n) {
    CHECK(transversal_depth(n, n, IntraConnectivity::AllToAll).depth == 1);
    CHECK(transversal_depth(n, n, IntraConnectivity::Planar).depth == 1);
    for (int c = 1; c <= 16; ++c) {
      const auto all = transversal_depth(n, c, IntraConnectivity::AllToAll, 0.99);
      const auto planar = transversal_depth(n, c, IntraConnectivity::Planar, 0.99);
      const int bound = (n + c - 1) / c;
      CHECK(all.depth == bound);
      CHECK(planar.depth >= bound);
      CHECK(planar.total_gates >= all.total_gates);
      CHECK(planar.est_fidelity <= all.est_fidelity);
      CHECK((planar.total_gates - n) % 3 == 0);
      CHECK(all.interconnects_used == std::min(n, c));
    }
  }
  CHECK(transversal_depth(7, 1, IntraConnectivity::Planar).depth > 7);
  CHECK_THROWS(transversal_depth(0, 1, IntraConnectivity::AllToAll));
  CHECK_THROWS(transversal_depth(3, 0, IntraConnectivity::AllToAll));
  const auto table = format_connectivity_table({transversal_depth(7, 2, IntraConnectivity::Planar)});
  CHECK(table.find("planar") != std::string::npos);
}

TEST_CASE("swap chain fidelity") {
  CHECK(swap_chain_fidelity(1, 0.97) == doctest::Approx(0.97));
  CHECK(swap_chain_fidelity(0, 0.97) == 1.0);
  for (int d = 0; d < 30; ++d) CHECK(swap_chain_fidelity(d, 1.0) == 1.0);
  for (int d = 1; d < 30; ++d) CHECK(swap_chain_fidelity(d + 1, 0.995) < swap_chain_fidelity(d, 0.995));
  CHECK(swap_chain_gate_count(5) == 25);
}

TEST_CASE("swap network circuit oracle") {
  Rng rng(4);
  const auto input = testing::random_mixed_state(6, rng);
  SUBCASE("noiseless network is the long-range CNOT") {
    const auto run = testing::run_swap_network(input, 1.0);
    const auto ideal = qstate::apply_gate(input, qstate::GateSpec::cnot(0, 5));
    CHECK((run.line.matrix() - ideal.matrix()).norm() < 1e-10);
    CHECK(run.p_no_fault == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("fault-free probability is the analytic product") {
    const auto run = testing::run_swap_network(input, 0.99);
    CHECK(run.cnots == swap_chain_gate_count(5));
    CHECK(std::abs(run.p_no_fault - swap_chain_fidelity(5, 0.99)) < 1e-6);
    CHECK(std::abs(swap_chain_fidelity(5, 0.99) - std::pow(0.99, 25)) < 1e-15);
  }
}

TEST_CASE("overhead comparison") {
  auto a = overhead_compare(3000, 1000, 100);
  CHECK(a.surface_per_logical == 3000.0);
  CHECK(a.qldpc_per_logical == 10.0);
  CHECK(a.ratio == 300.0);
  auto b = overhead_compare(3000, 3, 1);
  CHECK(b.qldpc_per_logical == 3.0);
  CHECK(b.ratio == 1000.0);
  CHECK(overhead_compare(12, 12, 1).ratio == 1.0);
  CHECK_THROWS(overhead_compare(0, 3, 1));
  CHECK_THROWS(overhead_compare(10, 3, 4));
}
