#pragma once

#include <cstdint>
#include <vector>

#include "hcsim/netmodel.hpp"
#include "hcsim/trace.hpp"

namespace hcsim {

// Every node holds bitsPerPair private bits for each target but itself and
// all of them must be delivered.
struct MacProblem {
  const Network* net = nullptr;
  std::vector<NodeId> nodes;
  std::vector<NodeId> targets; // subset of nodes; the full problem targets everyone
  Bits bitsPerPair = 1;        // L
  int quantBits = 2;           // Q
};

MacProblem fullMacProblem(const Network& net, Bits bitsPerPair = 1, int quantBits = 2);

struct MacSchedule {
  int levels = 1;
  ScheduleTrace trace;
  double claimedBound = 0.0; // K m^{(h+1)/h} L, or its A-target variant
  // Delivered bits per (node index, target index), row-major; filled only
  // when MacOptions::trackDeliveries is set.
  std::vector<Bits> delivered;
};

struct MacOptions {
  int reuse = 1;               // parallel-cluster classes; 1 = all concurrent
  bool trackDeliveries = false;
  Clusterer clusterer;         // defaults to the spatial grid
  CellBox box;                 // scope bounds for the spatial grid
  // The published validity floor for target counts, A >= round(m^{h/(h+1)});
  // the two-scale session scheme gates on its own coupled condition and
  // turns this off.
  bool enforceTargetFloor = true;
};

// Plain TDMA: one (source, target, bit) per slot, round-robin by source then
// target; sum over sources of l * |targets minus self| slots.
MacSchedule tdmaMac(const MacProblem& problem, const MacOptions& opt = {});

// Theorem-style recursion on the full problem: per cluster S in sequence,
// m*l MIMO slots (one batch per destination node), then every cluster solves
// an (M-node, Q*l)-bit exchange in parallel. levels == 1 is tdmaMac.
MacSchedule recursiveMac(const MacProblem& problem, int levels, const MacOptions& opt = {});

// Same two-phase structure with phase 1 shortened to |targets| * l MIMO
// slots per cluster; validated only against the bound
// K (A/m) m^{(h+1)/h} log2 m.
MacSchedule generalizedMac(const MacProblem& problem, int levels, const MacOptions& opt = {});

} // namespace hcsim
