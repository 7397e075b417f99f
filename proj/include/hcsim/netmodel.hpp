#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "hcsim/types.hpp"

namespace hcsim {

struct ChannelParams {
  double alpha = 2.0; // path-loss exponent, >= 2
  double power = 1.0; // per-node transmit power budget
  double noise = 1.0; // noise spectral density
  int quantBits = 2;  // Q, bits kept per quantized observation
};

struct Network {
  int n = 0;
  ChannelParams channel;
  std::uint64_t seed = 0;
  std::vector<double> x, y;    // positions in the unit square
  std::vector<NodeId> pairing; // pairing[s] = destination of source s
};

// n nodes placed uniformly at random in the unit square; the pairing is a
// uniform permutation rejection-sampled until it has no fixed point, i.e. a
// uniform derangement. n == 2 therefore always yields the swap.
Network generateNetwork(int n, const ChannelParams& channel, std::uint64_t seed);

// Fading coefficient between distinct nodes i and k for a caller-supplied
// phase sample: magnitude r^{-alpha/2}, argument = phase. Phases are drawn by
// the caller per query; the network stores none.
std::complex<double> channelGain(const Network& net, NodeId i, NodeId k, double phase);

struct CellBox {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

// One partition of a node set into g*g square cells (row-major). `spatial`
// is false for clusterings that ignore positions (id blocks), in which case
// reuse classes fall back to cell index modulo the class count.
struct Clustering {
  int g = 1;
  bool spatial = true;
  std::vector<std::vector<NodeId>> cells;
  std::vector<CellBox> boxes;

  int cellCount() const { return static_cast<int>(cells.size()); }
  int colorOf(int cell, int classes) const;
};

using Clusterer = std::function<Clustering(const Network&, const std::vector<NodeId>&,
                                           const CellBox&, int)>;

// Splits `nodes` into cells of target size M within `box`, with
// g = max(1, round(sqrt(count / M))) cells per side. Cells are half-open
// except that the last row/column include the far boundary.
Clustering clusterNodes(const Network& net, const std::vector<NodeId>& nodes,
                        const CellBox& box, int targetSize);

// Position-blind clusterer: consecutive blocks of exactly `targetSize` ids
// (the last block keeps the remainder). Used to build perfectly balanced
// instances for closed-form oracle runs.
Clustering idBlockClusters(const Network& net, const std::vector<NodeId>& nodes,
                           const CellBox& box, int targetSize);

// Whole-network grid at cluster size M.
struct ClusterGrid {
  int targetSize = 1;
  Clustering clustering;

  int g() const { return clustering.g; }
  const std::vector<std::vector<NodeId>>& cells() const { return clustering.cells; }
  int cellOf(double px, double py) const;
  int cellOfNode(const Network& net, NodeId v) const;
};

ClusterGrid buildGrid(const Network& net, int targetSize);

// Destination cell counts for the given sources under net.pairing.
std::vector<int> destinationHistogram(const Network& net, const ClusterGrid& grid,
                                      const std::vector<NodeId>& sources);

// Text round-trip: "n alpha P N0 Q seed" header, then one "id x y dest" line
// per node. Doubles are written with round-trip precision so save/load/save
// is byte-identical.
void saveNetwork(const Network& net, std::ostream& out);
Network loadNetwork(std::istream& in);

// Deterministic placement whose spatial grid is exact at every scale in
// `sizes` (cluster sizes from coarse to fine; every count ratio must be a
// perfect square). Ids are assigned cell-major, and the pairing shifts whole
// top-level clusters, so no pair shares a cluster.
Network makeIdealNetwork(int n, const std::vector<int>& sizes,
                         const ChannelParams& channel = {});

} // namespace hcsim
