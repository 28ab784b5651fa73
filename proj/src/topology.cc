#include "spinnet/topology.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace spinnet::network {

const NodeSpec& Topology::node(int node_id) const {
  for (const auto& n : nodes) {
    if (n.node_id == node_id) return n;
  }
  throw std::out_of_range("unknown node " + std::to_string(node_id));
}

const LinkSpec& Topology::link(int link_id) const {
  for (const auto& l : links) {
    if (l.link_id == link_id) return l;
  }
  throw std::out_of_range("unknown link " + std::to_string(link_id));
}

void Topology::validate() const {
  std::set<int> node_ids, link_ids;
  for (const auto& n : nodes) {
    if (!node_ids.insert(n.node_id).second) {
      throw std::invalid_argument("duplicate node id " + std::to_string(n.node_id));
    }
    if (n.registers < 1) throw std::invalid_argument("node registers must be >= 1");
  }
  for (const auto& l : links) {
    const std::string where = "link " + std::to_string(l.link_id) + ": ";
    if (!link_ids.insert(l.link_id).second) throw std::invalid_argument("duplicate link id " + std::to_string(l.link_id));
    for (int e : l.endpoints) {
      if (!node_ids.contains(e)) throw std::invalid_argument(where + "unknown endpoint " + std::to_string(e));
    }
    if (l.endpoints[0] == l.endpoints[1]) throw std::invalid_argument(where + "endpoints must differ");
    if (!(l.fibre_km >= 0.0)) throw std::invalid_argument(where + "fibre_km must be >= 0");
    if (l.switch_layers < 0) throw std::invalid_argument(where + "switch_layers must be >= 0");
    if (!(l.detector_efficiency >= 0.0 && l.detector_efficiency <= 1.0)) {
      throw std::invalid_argument(where + "detector_efficiency must be in [0,1]");
    }
    if (!(l.fixed_success_prob >= 0.0 && l.fixed_success_prob <= 1.0)) {
      throw std::invalid_argument(where + "fixed_success_prob must be in [0,1]");
    }
    if (!(l.fixed_fidelity >= 0.0 && l.fixed_fidelity <= 1.0)) {
      throw std::invalid_argument(where + "fixed_fidelity must be in [0,1]");
    }
  }
  if (!(constants.fibre_atten_db_per_km >= 0.0)) throw std::invalid_argument("fibre_atten_db_per_km must be >= 0");
  if (!(constants.switch_loss_db >= 0.0)) throw std::invalid_argument("switch_loss_db must be >= 0");
  if (!(constants.speed_of_light_fibre_km_per_ms > 0.0)) {
    throw std::invalid_argument("speed_of_light_fibre_km_per_ms must be > 0");
  }
}

bool Topology::connected() const {
  if (nodes.empty()) return true;
  std::map<int, std::vector<int>> adj;
  for (const auto& l : links) {
    adj[l.endpoints[0]].push_back(l.endpoints[1]);
    adj[l.endpoints[1]].push_back(l.endpoints[0]);
  }
  std::set<int> seen{nodes.front().node_id};
  std::queue<int> frontier;
  frontier.push(nodes.front().node_id);
  while (!frontier.empty()) {
    const int n = frontier.front();
    frontier.pop();
    for (int m : adj[n]) {
      if (seen.insert(m).second) frontier.push(m);
    }
  }
  return seen.size() == nodes.size();
}

bool Topology::crosses_cryostats(const LinkSpec& l) const {
  return node(l.endpoints[0]).cryostat_id != node(l.endpoints[1]).cryostat_id;
}

std::vector<int> Topology::path_nodes(const std::vector<int>& link_ids) const {
  if (link_ids.empty()) throw std::invalid_argument("empty link path");
  const LinkSpec& first = link(link_ids.front());
  std::vector<int> path;
  if (link_ids.size() == 1) return {first.endpoints[0], first.endpoints[1]};
  const LinkSpec& second = link(link_ids[1]);
  // Orient the first link so that its far end touches the second.
  const bool forward = first.endpoints[1] == second.endpoints[0] || first.endpoints[1] == second.endpoints[1];
  path.push_back(forward ? first.endpoints[0] : first.endpoints[1]);
  path.push_back(forward ? first.endpoints[1] : first.endpoints[0]);
  for (std::size_t i = 1; i < link_ids.size(); ++i) {
    const LinkSpec& l = link(link_ids[i]);
    if (l.endpoints[0] == path.back()) {
      path.push_back(l.endpoints[1]);
    } else if (l.endpoints[1] == path.back()) {
      path.push_back(l.endpoints[0]);
    } else {
      throw std::invalid_argument("links do not form a chain at link " + std::to_string(l.link_id));
    }
  }
  std::set<int> unique(path.begin(), path.end());
  if (unique.size() != path.size()) throw std::invalid_argument("link path revisits a node");
  return path;
}

double link_efficiency(const LinkSpec& link, const TopologyConstants& c) {
  const double loss_db = link.fibre_km * c.fibre_atten_db_per_km + link.switch_layers * c.switch_loss_db;
  return std::pow(10.0, -loss_db / 10.0) * link.detector_efficiency;
}

double one_way_delay_ns(const LinkSpec& link, const TopologyConstants& c) {
  return link.fibre_km / c.speed_of_light_fibre_km_per_ms * 1e6;
}

Topology make_chain(int links, const LinkSpec& prototype, int registers_per_node) {
  if (links < 1) throw std::invalid_argument("chain needs at least one link");
  Topology t;
  for (int n = 0; n <= links; ++n) t.nodes.push_back({n, registers_per_node, n});
  for (int l = 0; l < links; ++l) {
    LinkSpec spec = prototype;
    spec.link_id = l;
    spec.endpoints = {l, l + 1};
    t.links.push_back(spec);
  }
  return t;
}

}  // namespace spinnet::network
