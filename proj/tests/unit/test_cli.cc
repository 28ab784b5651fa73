#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "spinnet/config.h"
#include "spinnet/experiment.h"
#include "spinnet/random.h"

using namespace spinnet;
using namespace spinnet::cli;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spinnet_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPINNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kPerfectCurve = R"({
  "experiment": "bell_pair_curve",
  "trials": 2000,
  "seed": 5,
  "emitters": {"default": {"dephasing_rate_mhz": 0.0}},
  "sweep": {"parameter": "herald.dt_max_ns", "values": [5, 10, 20, 40, 80]}
})";

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto cfg = parse_config(R"({"experiment": "bell_pair_curve"})");
  CHECK(cfg.experiment == ExperimentKind::BellPairCurve);
  CHECK(cfg.seed == 0);
  CHECK(cfg.trials == 1000);
  CHECK(cfg.output_path.empty());
  CHECK_FALSE(cfg.sweep.has_value());
  const auto& e = cfg.emitters.at("default");
  CHECK(e.bare_lifetime_ns == 940.0);
  CHECK(e.purcell_factor == 20.0);
  CHECK(cfg.topology.constants.fibre_atten_db_per_km == 0.2);
  CHECK(cfg.topology.constants.switch_loss_db == 1.5);
  CHECK(cfg.timing.max_attempts == 10'000'000);
  CHECK(cfg.topology.links.size() == 1);
}

TEST_CASE("validation errors name the field") {
  CHECK(error_of(R"({"experiment": "bell_pair_curve", "emitters": {"default": {"efficiency": 1.5}}})")
            .starts_with("emitters.default.efficiency:"));
  CHECK(error_of(R"({"experiment": "bell_pair_curve", "topology": {"links": [{"endpoints": [0, 1],
                 "detector_efficiency": -0.1}]}})")
            .starts_with("topology.links.0.detector_efficiency:"));
  CHECK(error_of(R"({"experiment": "bell_pair_curve", "trials": 0})").starts_with("trials:"));
  CHECK(error_of(R"({"experiment": "repeater_gen1"})").starts_with("memory.per_attempt_dephasing:"));
  CHECK(error_of(R"({"experiment": "teleport"})").starts_with("experiment:"));
  CHECK(error_of(R"({"trials": 3})").starts_with("experiment:"));
  CHECK(error_of(R"({"experiment": "bell_pair_curve", "seed": -1})").starts_with("seed:"));
  CHECK(error_of("{not json").starts_with("syntax error"));
}

TEST_CASE("unknown keys are rejected") {
  CHECK(error_of(R"({"experiment": "overhead", "trails": 10})") == "trails: unknown key");
  CHECK(error_of(R"({"experiment": "overhead", "herald": {"dt_max": 10}})") == "herald.dt_max: unknown key");
  CHECK(error_of(R"({"experiment": "overhead", "topology": {"nodes": [{"node_id": 0, "qubits": 2}]}})") ==
        "topology.nodes.0.qubits: unknown key");
}

TEST_CASE("sweep parsing and round trip") {
  const auto cfg = parse_config(R"({"experiment": "bell_pair_curve",
    "sweep": {"parameter": "herald.dt_max_ns", "values": [1,2,3,4,5,6,7,8,9,10]}})");
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->parameter == "herald.dt_max_ns");
  CHECK(cfg.sweep->values.size() == 10);

  const std::string text = to_json_text(cfg);
  const auto again = parse_config(text);
  CHECK(to_json_text(again) == text);

  const auto point = apply_sweep_value(cfg, 7.0);
  CHECK(point.herald.dt_max_ns == 7.0);
  CHECK_FALSE(point.sweep.has_value());

  const auto links = parse_config(R"({"experiment": "bell_pair_curve",
    "sweep": {"parameter": "topology.links.0.fibre_km", "values": [0, 25.5]}})");
  CHECK(apply_sweep_value(links, 25.5).topology.links[0].fibre_km == 25.5);
}

TEST_CASE("bad sweeps are rejected") {
  CHECK(error_of(R"({"experiment": "overhead", "sweep": {"parameter": "trials", "values": [1]}})")
            .starts_with("sweep.parameter:"));
  CHECK(error_of(R"({"experiment": "overhead", "sweep": {"parameter": "herald.nope", "values": [1]}})")
            .starts_with("sweep.parameter:"));
  CHECK(error_of(R"({"experiment": "overhead", "sweep": {"parameter": "herald.dt_max_ns", "values": []}})")
            .starts_with("sweep.values:"));
  CHECK(error_of(R"({"experiment": "overhead", "sweep": {"parameter": "herald.dt_max_ns", "values": [500]}})")
            .starts_with("herald.dt_max_ns:"));
}

TEST_CASE("a full config round-trips") {
  const auto cfg = parse_config(R"({
    "experiment": "repeater_gen1", "seed": 18446744073709551615, "trials": 3,
    "emitters": {"hot": {"detuning_mhz": 3.5}},
    "memory": {"per_attempt_dephasing": 0.001},
    "topology": {"nodes": [{"node_id": 0}, {"node_id": 1, "cryostat_id": 1}, {"node_id": 2}],
                 "links": [{"link_id": 0, "endpoints": [0, 1], "fibre_km": 10, "emitters": ["hot", "default"]},
                           {"link_id": 1, "endpoints": [2, 1], "model": "fixed", "fixed_success_prob": 0.2}]},
    "repeater": {"distill_rounds": 1, "distill_placement": "after_swap", "dejmps": true}
  })");
  CHECK(cfg.seed == 18446744073709551615ULL);
  CHECK(cfg.emitters.size() == 2);
  CHECK(cfg.topology.links[1].model == network::LinkModel::Fixed);
  const std::string text = to_json_text(cfg);
  CHECK(to_json_text(parse_config(text)) == text);
}

TEST_CASE("seed derivation fixed vectors") {
  CHECK(derive_seed(0, 0, 0) == 0x0768e27643e9ba72ULL);
  CHECK(derive_seed(0, 0, 1) == 0x96148de83aef573dULL);
  CHECK(derive_seed(0, 1, 0) == 0xa5cb778dd19953cbULL);
  CHECK(derive_seed(42, 3, 7) == 0x2d3fcb5b8d11766aULL);
  CHECK(derive_seed(~0ULL, ~0ULL, ~0ULL) == 0x3dd9488f59bba859ULL);
}

TEST_CASE("csv header is stable") {
  CHECK(csv_header() == "experiment,sweep_param,sweep_value,metric,value,stderr,trials,seed,status");
  CHECK(to_csv({}) == csv_header() + "\n");
}

TEST_CASE("perfect emitters give fidelity 1 at every threshold") {
  const auto rows = run_experiment(parse_config(kPerfectCurve));
  int fidelity_rows = 0;
  for (const auto& r : rows) {
    CHECK(r.sweep_param == "herald.dt_max_ns");
    if (r.metric != "fidelity") continue;
    ++fidelity_rows;
    CHECK(r.value == 1.0);
    CHECK(r.status == "ok");
  }
  CHECK(fidelity_rows == 5);
}

TEST_CASE("experiments are byte-for-byte reproducible") {
  const auto cfg = parse_config(kPerfectCurve);
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  write_csv(run_experiment(cfg), a.string());
  write_csv(run_experiment(cfg), b.string());
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a).starts_with(csv_header() + "\n"));

  auto other = cfg;
  other.seed = 6;
  CHECK(to_csv(run_experiment(other)) != read_file(a));
}

TEST_CASE("gen1 wall time matches the max-of-geometrics oracle") {
  const double p = 0.05;
  const auto cfg = parse_config(R"({
    "experiment": "repeater_gen1", "trials": 4000, "seed": 3,
    "memory": {"per_attempt_dephasing": 0.0},
    "topology": {"nodes": [{"node_id": 0}, {"node_id": 1}, {"node_id": 2}],
                 "links": [{"endpoints": [0, 1], "model": "fixed", "fixed_success_prob": 0.05},
                           {"endpoints": [1, 2], "model": "fixed", "fixed_success_prob": 0.05}]}
  })");
  const auto rows = run_experiment(cfg);
  const double duration = cfg.timing.optical_cycle_ns;
  // E[max(G1, G2)] = 2/p - 1/(1 - (1-p)^2); Var bounded by twice one variance.
  const double expect = (2 / p - 1 / (1 - (1 - p) * (1 - p))) * duration;
  const double sigma = std::sqrt(2 * (1 - p) / (p * p) / 4000.0) * duration;
  bool seen = false;
  for (const auto& r : rows) {
    if (r.metric != "wall_time_ns") continue;
    seen = true;
    CHECK(std::abs(r.value - expect) < 3 * sigma);
    CHECK(r.stderr_value > 0.0);
    CHECK(r.trials == 4000);
  }
  CHECK(seen);
}

TEST_CASE("timeouts become rows") {
  const auto cfg = parse_config(R"({
    "experiment": "repeater_gen1", "trials": 4,
    "memory": {"per_attempt_dephasing": 0.0},
    "timing": {"max_attempts": 100},
    "topology": {"links": [{"endpoints": [0, 1], "model": "fixed", "fixed_success_prob": 0.0}]}
  })");
  const auto rows = run_experiment(cfg);
  REQUIRE(!rows.empty());
  CHECK(rows.back().metric == "timeouts");
  CHECK(rows.back().value == 4.0);
  CHECK(rows.back().status == "timeout");
  CHECK(rows.front().status == "no_data");
  CHECK(std::isnan(rows.front().value));
}

TEST_CASE("analysis experiments") {
  const auto rows = run_experiment(parse_config(R"({"experiment": "overhead"})"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].metric == "ratio");
  CHECK(rows[2].value == 300.0);
  CHECK(rows[2].trials == 1);
  const auto conn = run_experiment(parse_config(R"({"experiment": "connectivity",
    "connectivity": {"interconnects": 2}})"));
  CHECK(conn[0].metric == "depth");
  CHECK(conn[0].value == 4.0);
}

TEST_CASE("command line exit codes") {
  const auto good = scratch("good.json"), bad = scratch("bad.json"), out = scratch("out.csv");
  std::ofstream(good) << R"({"experiment": "overhead"})";
  std::ofstream(bad) << R"({"experiment": "overhead", "overhead": {"qldpc_k": 0}})";

  CHECK(run_cli("schema") == 0);
  CHECK(run_cli("validate --config " + good.string()) == 0);
  CHECK(run_cli("validate --config " + bad.string()) == 1);
  CHECK(run_cli("validate --config " + scratch("missing.json").string()) == 1);
  CHECK(run_cli("simulate overhead --config " + good.string() + " --out " + out.string()) == 0);
  CHECK(read_file(out).starts_with(csv_header()));
  CHECK(run_cli("simulate connectivity --config " + good.string()) == 1);
  CHECK(run_cli("simulate overhead --config " + good.string() + " --out /nonexistent/dir/x.csv") == 2);
  CHECK(run_cli("frobnicate") == 1);
}
