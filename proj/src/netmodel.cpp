#include "hcsim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "hcsim/errors.hpp"
#include "hcsim/rng.hpp"

namespace hcsim {

Network generateNetwork(int n, const ChannelParams& channel, std::uint64_t seed) {
  if (n < 2) throw ConstraintError("generateNetwork: need at least 2 nodes");
  if (channel.alpha < 2.0) throw ConstraintError("generateNetwork: alpha must be >= 2");
  if (channel.quantBits < 1) throw ConstraintError("generateNetwork: quantBits must be >= 1");
  if (channel.power <= 0.0 || channel.noise <= 0.0)
    throw ConstraintError("generateNetwork: power and noise must be positive");

  Network net;
  net.n = n;
  net.channel = channel;
  net.seed = seed;
  net.x.resize(n);
  net.y.resize(n);

  Rng place(Rng::derive(seed, 0));
  for (int i = 0; i < n; ++i) {
    net.x[i] = place.uniform01();
    net.y[i] = place.uniform01();
  }

  Rng pair(Rng::derive(seed, 1));
  net.pairing.resize(n);
  std::iota(net.pairing.begin(), net.pairing.end(), 0);
  for (;;) {
    pair.shuffle(net.pairing);
    bool fixedPoint = false;
    for (int i = 0; i < n; ++i) {
      if (net.pairing[i] == i) {
        fixedPoint = true;
        break;
      }
    }
    if (!fixedPoint) break;
  }
  return net;
}

std::complex<double> channelGain(const Network& net, NodeId i, NodeId k, double phase) {
  if (i == k) throw ConstraintError("channelGain: self channel is undefined");
  const double dx = net.x[i] - net.x[k];
  const double dy = net.y[i] - net.y[k];
  const double r = std::hypot(dx, dy);
  if (r <= 0.0) throw ConstraintError("channelGain: coincident nodes");
  return std::polar(std::pow(r, -net.channel.alpha / 2.0), phase);
}

int Clustering::colorOf(int cell, int classes) const {
  if (classes <= 1) return 0;
  const int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(classes))));
  if (spatial && side * side == classes) {
    const int row = cell / g;
    const int col = cell % g;
    return (row % side) * side + (col % side);
  }
  return cell % classes;
}

namespace {

int cellIndexIn(const CellBox& box, int g, double px, double py) {
  const double w = (box.x1 - box.x0) / g;
  const double h = (box.y1 - box.y0) / g;
  int col = static_cast<int>(std::floor((px - box.x0) / w));
  int row = static_cast<int>(std::floor((py - box.y0) / h));
  col = std::clamp(col, 0, g - 1);
  row = std::clamp(row, 0, g - 1);
  return row * g + col;
}

} // namespace

Clustering clusterNodes(const Network& net, const std::vector<NodeId>& nodes,
                        const CellBox& box, int targetSize) {
  if (targetSize < 1) throw ConstraintError("clusterNodes: target size must be >= 1");
  Clustering out;
  const double count = static_cast<double>(nodes.size());
  out.g = std::max<int>(1, static_cast<int>(std::llround(std::sqrt(count / targetSize))));
  out.spatial = true;
  out.cells.assign(static_cast<std::size_t>(out.g) * out.g, {});
  out.boxes.resize(out.cells.size());
  const double w = (box.x1 - box.x0) / out.g;
  const double h = (box.y1 - box.y0) / out.g;
  for (int row = 0; row < out.g; ++row) {
    for (int col = 0; col < out.g; ++col) {
      CellBox& b = out.boxes[static_cast<std::size_t>(row) * out.g + col];
      b.x0 = box.x0 + col * w;
      b.y0 = box.y0 + row * h;
      b.x1 = (col + 1 == out.g) ? box.x1 : box.x0 + (col + 1) * w;
      b.y1 = (row + 1 == out.g) ? box.y1 : box.y0 + (row + 1) * h;
    }
  }
  for (NodeId v : nodes)
    out.cells[cellIndexIn(box, out.g, net.x[v], net.y[v])].push_back(v);
  return out;
}

Clustering idBlockClusters(const Network&, const std::vector<NodeId>& nodes,
                           const CellBox& box, int targetSize) {
  if (targetSize < 1) throw ConstraintError("idBlockClusters: target size must be >= 1");
  Clustering out;
  out.spatial = false;
  const std::size_t blocks =
      std::max<std::size_t>(1, (nodes.size() + targetSize - 1) / targetSize);
  out.g = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(blocks))));
  out.cells.resize(blocks);
  out.boxes.assign(blocks, box);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    out.cells[std::min(blocks - 1, i / targetSize)].push_back(nodes[i]);
  return out;
}

int ClusterGrid::cellOf(double px, double py) const {
  return cellIndexIn({0.0, 0.0, 1.0, 1.0}, clustering.g, px, py);
}

int ClusterGrid::cellOfNode(const Network& net, NodeId v) const {
  return cellOf(net.x[v], net.y[v]);
}

ClusterGrid buildGrid(const Network& net, int targetSize) {
  if (targetSize < 1 || targetSize > net.n)
    throw ConstraintError("buildGrid: cluster size must be in [1, n]");
  ClusterGrid grid;
  grid.targetSize = targetSize;
  std::vector<NodeId> all(net.n);
  std::iota(all.begin(), all.end(), 0);
  grid.clustering = clusterNodes(net, all, {0.0, 0.0, 1.0, 1.0}, targetSize);
  return grid;
}

std::vector<int> destinationHistogram(const Network& net, const ClusterGrid& grid,
                                      const std::vector<NodeId>& sources) {
  std::vector<int> counts(grid.clustering.cells.size(), 0);
  for (NodeId s : sources) counts[grid.cellOfNode(net, net.pairing[s])]++;
  return counts;
}

void saveNetwork(const Network& net, std::ostream& out) {
  out.precision(17);
  out << net.n << ' ' << net.channel.alpha << ' ' << net.channel.power << ' '
      << net.channel.noise << ' ' << net.channel.quantBits << ' ' << net.seed << '\n';
  for (int i = 0; i < net.n; ++i)
    out << i << ' ' << net.x[i] << ' ' << net.y[i] << ' ' << net.pairing[i] << '\n';
}

Network loadNetwork(std::istream& in) {
  Network net;
  if (!(in >> net.n >> net.channel.alpha >> net.channel.power >> net.channel.noise >>
        net.channel.quantBits >> net.seed))
    throw ConstraintError("loadNetwork: bad header");
  if (net.n < 2) throw ConstraintError("loadNetwork: bad node count");
  net.x.resize(net.n);
  net.y.resize(net.n);
  net.pairing.resize(net.n);
  for (int i = 0; i < net.n; ++i) {
    int id = -1;
    if (!(in >> id >> net.x[i] >> net.y[i] >> net.pairing[i]) || id != i)
      throw ConstraintError("loadNetwork: bad node line");
  }
  return net;
}

namespace {

void placeLattice(Network& net, const CellBox& box, int first, int count,
                  const std::vector<int>& sizes, std::size_t depth) {
  if (depth == sizes.size()) {
    const int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(count))));
    if (side * side != count)
      throw ConstraintError("makeIdealNetwork: leaf cluster size must be a perfect square");
    const double w = (box.x1 - box.x0) / side;
    const double h = (box.y1 - box.y0) / side;
    for (int row = 0; row < side; ++row) {
      for (int col = 0; col < side; ++col) {
        const int id = first + row * side + col;
        net.x[id] = box.x0 + (col + 0.5) * w;
        net.y[id] = box.y0 + (row + 0.5) * h;
      }
    }
    return;
  }
  const int m = sizes[depth];
  if (m < 1 || count % m != 0)
    throw ConstraintError("makeIdealNetwork: cluster size must divide the node count");
  const int cells = count / m;
  const int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(cells))));
  if (side * side != cells)
    throw ConstraintError("makeIdealNetwork: cluster count must be a perfect square");
  const double w = (box.x1 - box.x0) / side;
  const double h = (box.y1 - box.y0) / side;
  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      const CellBox sub{box.x0 + col * w, box.y0 + row * h, box.x0 + (col + 1) * w,
                        box.y0 + (row + 1) * h};
      placeLattice(net, sub, first + (row * side + col) * m, m, sizes, depth + 1);
    }
  }
}

} // namespace

Network makeIdealNetwork(int n, const std::vector<int>& sizes, const ChannelParams& channel) {
  if (n < 2) throw ConstraintError("makeIdealNetwork: need at least 2 nodes");
  Network net;
  net.n = n;
  net.channel = channel;
  net.seed = 0;
  net.x.resize(n);
  net.y.resize(n);
  placeLattice(net, {0.0, 0.0, 1.0, 1.0}, 0, n, sizes, 0);
  const int shift = sizes.empty() ? std::max(1, n / 2) : sizes.front();
  net.pairing.resize(n);
  for (int i = 0; i < n; ++i) net.pairing[i] = (i + shift) % n;
  return net;
}

} // namespace hcsim
