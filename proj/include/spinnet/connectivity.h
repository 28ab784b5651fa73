#pragma once

// Depth and error cost of moving qubits between and within modules.

#include <string>
#include <vector>

namespace spinnet::protocols {

enum class IntraConnectivity { AllToAll, Planar };

struct ConnectivityReport {
  int n = 0;
  int interconnects = 0;
  IntraConnectivity connectivity = IntraConnectivity::AllToAll;
  int depth = 0;
  long long total_gates = 0;  // CNOT equivalents, SWAP = 3
  double est_fidelity = 1.0;
  int interconnects_used = 0;
};

// Transversal CNOT between two n-qubit blocks through c interconnects. With
// all-to-all routing each interconnect serves one pair per step. On a planar
// line, ports sit evenly along the line and each qubit is swapped to its
// nearest port one step at a time.
ConnectivityReport transversal_depth(int n, int c, IntraConnectivity connectivity, double gate_fidelity = 1.0);

// CNOT between qubits `distance` apart on a line by swapping there and back.
long long swap_chain_gate_count(int distance);
double swap_chain_fidelity(int distance, double gate_fidelity);

struct OverheadReport {
  double surface_per_logical = 0.0;
  double qldpc_per_logical = 0.0;
  double ratio = 0.0;  // surface / QLDPC
};

OverheadReport overhead_compare(int surface_phys_per_logical, int qldpc_n, int qldpc_k);

// Aligned text table of connectivity reports.
std::string format_connectivity_table(const std::vector<ConnectivityReport>& rows);

}  // namespace spinnet::protocols
