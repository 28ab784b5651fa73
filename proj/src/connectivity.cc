#include "spinnet/connectivity.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinnet::protocols {

namespace {

// Greedy line schedule. Returns {depth, swaps}.
std::pair<int, long long> planar_schedule(int n, int c) {
  std::vector<int> port(c);
  for (int j = 0; j < c; ++j) port[j] = static_cast<int>((2LL * j + 1) * n / (2LL * c));

  // occupant[pos] = qubit at that position; owner[q] = port serving q.
  std::vector<int> occupant(n), owner(n);
  std::vector<bool> served(n, false);
  for (int q = 0; q < n; ++q) {
    occupant[q] = q;
    int best = 0;
    for (int j = 1; j < c; ++j) {
      if (std::abs(port[j] - q) < std::abs(port[best] - q)) best = j;
    }
    owner[q] = best;
  }

  int depth = 0, remaining = n;
  long long swaps = 0;
  while (remaining > 0) {
    ++depth;
    for (int j = 0; j < c; ++j) {
      const int at = occupant[port[j]];
      if (!served[at] && owner[at] == j) {
        served[at] = true;
        --remaining;
        continue;
      }
      // Nearest unserved qubit of this port; ties go to the left.
      int pos = -1;
      for (int d = 1; d < n && pos < 0; ++d) {
        for (int p : {port[j] - d, port[j] + d}) {
          if (p >= 0 && p < n && !served[occupant[p]] && owner[occupant[p]] == j) {
            pos = p;
            break;
          }
        }
      }
      if (pos < 0) continue;
      const int toward = pos < port[j] ? pos + 1 : pos - 1;
      std::swap(occupant[pos], occupant[toward]);
      ++swaps;
    }
  }
  return {depth, swaps};
}

}  // namespace

ConnectivityReport transversal_depth(int n, int c, IntraConnectivity connectivity, double gate_fidelity) {
  if (n < 1) throw std::invalid_argument("transversal_depth needs n >= 1");
  if (c < 1) throw std::invalid_argument("transversal_depth needs at least one interconnect");
  if (!(gate_fidelity > 0.0 && gate_fidelity <= 1.0)) throw std::invalid_argument("gate_fidelity must lie in (0,1]");

  ConnectivityReport r;
  r.n = n;
  r.interconnects = c;
  r.connectivity = connectivity;
  r.interconnects_used = std::min(n, c);
  if (connectivity == IntraConnectivity::AllToAll) {
    r.depth = (n + c - 1) / c;
    r.total_gates = n;
  } else {
    const auto [depth, swaps] = planar_schedule(n, r.interconnects_used);
    r.depth = depth;
    r.total_gates = n + 3 * swaps;
  }
  r.est_fidelity = std::pow(gate_fidelity, static_cast<double>(r.total_gates));
  return r;
}

long long swap_chain_gate_count(int distance) {
  if (distance < 0) throw std::invalid_argument("distance must be >= 0");
  if (distance == 0) return 0;
  return 3LL * (distance - 1) * 2 + 1;
}

double swap_chain_fidelity(int distance, double gate_fidelity) {
  if (!(gate_fidelity > 0.0 && gate_fidelity <= 1.0)) throw std::invalid_argument("gate_fidelity must lie in (0,1]");
  return std::pow(gate_fidelity, static_cast<double>(swap_chain_gate_count(distance)));
}

OverheadReport overhead_compare(int surface_phys_per_logical, int qldpc_n, int qldpc_k) {
  if (surface_phys_per_logical < 1 || qldpc_n < 1 || qldpc_k < 1)
    throw std::invalid_argument("overhead_compare needs positive integers");
  if (qldpc_k > qldpc_n) throw std::invalid_argument("qldpc_k cannot exceed qldpc_n");
  OverheadReport r;
  r.surface_per_logical = surface_phys_per_logical;
  r.qldpc_per_logical = static_cast<double>(qldpc_n) / qldpc_k;
  r.ratio = r.surface_per_logical / r.qldpc_per_logical;
  return r;
}

std::string format_connectivity_table(const std::vector<ConnectivityReport>& rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%6s %6s %-10s %6s %8s %12s %6s\n", "n", "c", "routing", "depth", "gates",
                "est_fid", "used");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%6d %6d %-10s %6d %8lld %12.6g %6d\n", r.n, r.interconnects,
                  r.connectivity == IntraConnectivity::AllToAll ? "all_to_all" : "planar", r.depth, r.total_gates,
                  r.est_fidelity, r.interconnects_used);
    out += line;
  }
  return out;
}

}  // namespace spinnet::protocols
