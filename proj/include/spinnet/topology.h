#pragma once

#include <array>
#include <string>
#include <vector>

namespace spinnet::network {

struct TopologyConstants {
  double fibre_atten_db_per_km = 0.2;
  double switch_loss_db = 1.5;
  double speed_of_light_fibre_km_per_ms = 200.0;
};

struct NodeSpec {
  int node_id = 0;
  int registers = 1;
  int cryostat_id = 0;
};

// How a link produces pairs: the full two-emitter heralding model, or a
// fixed per-attempt success probability with Werner pairs.
enum class LinkModel { BarrettKok, Fixed };

struct LinkSpec {
  int link_id = 0;
  std::array<int, 2> endpoints{0, 1};
  double fibre_km = 0.0;
  int switch_layers = 0;
  double detector_efficiency = 1.0;

  LinkModel model = LinkModel::BarrettKok;
  std::array<std::string, 2> emitters{"default", "default"};
  double fixed_success_prob = 1.0;
  double fixed_fidelity = 1.0;
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  TopologyConstants constants;

  const NodeSpec& node(int node_id) const;
  const LinkSpec& link(int link_id) const;

  // Unique ids, endpoints exist, non-negative losses. Throws std::invalid_argument.
  void validate() const;
  bool connected() const;
  bool crosses_cryostats(const LinkSpec& link) const;

  // Node sequence visited by consecutive links; throws unless they form a
  // simple path.
  std::vector<int> path_nodes(const std::vector<int>& link_ids) const;
};

// 10^(-(km * alpha + layers * switch_loss)/10) * detector_efficiency.
double link_efficiency(const LinkSpec& link, const TopologyConstants& constants);

double one_way_delay_ns(const LinkSpec& link, const TopologyConstants& constants);

// A linear chain of `links` identical links over nodes 0..links.
Topology make_chain(int links, const LinkSpec& prototype, int registers_per_node = 1);

}  // namespace spinnet::network
