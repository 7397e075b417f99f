#include "hcsim/mac.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hcsim/analytic.hpp"
#include "hcsim/calibration.hpp"
#include "hcsim/errors.hpp"
#include "sched_util.hpp"

namespace hcsim {

namespace {

struct MacBuild {
  const Network* net = nullptr;
  int q = 2;
  int reuse = 1;
  Clusterer clusterer;
  ScheduleTrace* trace = nullptr;
  int emitDepth = 1;

  // delivery bookkeeping, active only when tracking
  std::vector<Bits>* delivered = nullptr;
  std::vector<int> nodeIndex, targetIndex;
  std::size_t targetCount = 0;

  // top-level phase accounting
  Slots topTdma = 0, topMimo = 0, topCollect = 0;

  void claim(NodeId s, NodeId t, Bits l) {
    if (!delivered || s == t) return;
    (*delivered)[static_cast<std::size_t>(nodeIndex[s]) * targetCount + targetIndex[t]] += l;
  }
};

void pushEvent(MacBuild& b, Slots start, Slots end, Phase phase, int depth, int cluster,
               EventKind kind) {
  TraceEvent e;
  e.slotStart = start;
  e.slotEnd = end;
  e.phase = phase;
  e.level = static_cast<std::uint8_t>(depth + 1);
  e.cluster = cluster;
  e.kind = kind;
  e.payloadBits = end - start;
  b.trace->events.push_back(std::move(e));
}

// Span of the exchange on `nodes` restricted to `targets` (targets == nodes
// for the full problem). Events and delivery claims happen only above
// emitDepth / at depth 0; deeper calls just count slots.
Slots solveExchange(MacBuild& b, const std::vector<NodeId>& nodes,
                    const std::vector<NodeId>& targets, const CellBox& box, Bits l, int levels,
                    int depth, Slots start) {
  const std::int64_t m = static_cast<std::int64_t>(nodes.size());
  const std::int64_t a = static_cast<std::int64_t>(targets.size());
  const bool emit = b.trace && depth < b.emitDepth;
  const bool top = depth == 0;

  if (levels <= 1 || m < 2) {
    // Plain TDMA rounds: each member sends l bits to every target but itself.
    // Targets are members, so exactly a of the m*a ordered pairs drop out.
    const Slots span = a * (m - 1) * l;
    if (top) {
      b.topTdma += span;
      for (NodeId s : nodes)
        for (NodeId t : targets) b.claim(s, t, l);
    }
    if (emit && span > 0) pushEvent(b, start, start + span, Phase::p1, depth, -1, EventKind::tdma);
    return span;
  }

  // Cluster size M = round(m^{(levels-1)/levels}); the collect phase that
  // follows each source cluster's MIMO rounds is the same every time, so the
  // per-cell sub-exchange spans are computed once.
  const double exponent = 1.0 / macExponentRecursion(levels - 1);
  const std::int64_t targetSize = std::max<std::int64_t>(
      2, std::llround(std::pow(static_cast<double>(m), exponent)));
  const Clustering part = b.clusterer(*b.net, nodes, box, static_cast<int>(targetSize));

  std::vector<std::vector<NodeId>> cellTargets(part.cellCount());
  {
    std::vector<char> isTarget(b.net->n, 0);
    for (NodeId t : targets) isTarget[t] = 1;
    for (int c = 0; c < part.cellCount(); ++c)
      for (NodeId v : part.cells[c])
        if (isTarget[v]) cellTargets[c].push_back(v);
  }

  std::vector<Slots> sub(part.cellCount(), 0);
  for (int c = 0; c < part.cellCount(); ++c) {
    if (part.cells[c].size() < 2 || cellTargets[c].empty()) continue;
    sub[c] = solveExchange(b, part.cells[c], cellTargets[c], part.boxes[c], b.q * l, levels - 1,
                           depth + 1, 0);
  }
  const detail::ParallelLayout lay = detail::layoutParallel(sub, part, b.reuse);

  Slots cursor = start;
  for (int s = 0; s < part.cellCount(); ++s) {
    const auto& cell = part.cells[s];
    if (cell.empty()) continue;
    if (cell.size() == 1) {
      // A lone member cannot beamform; it sends its rounds directly and no
      // observations need collecting.
      const NodeId v = cell[0];
      const bool selfTarget = !cellTargets[s].empty();
      const Slots direct = (a - (selfTarget ? 1 : 0)) * l;
      if (top) {
        b.topTdma += direct;
        for (NodeId t : targets) b.claim(v, t, l);
      }
      if (emit && direct > 0)
        pushEvent(b, cursor, cursor + direct, Phase::p1, depth, s, EventKind::direct);
      cursor += direct;
      continue;
    }
    // MIMO rounds: l joint batches per target.
    const Slots mimo = a * l;
    if (top) {
      b.topMimo += mimo;
      for (NodeId src : cell)
        for (NodeId t : targets) b.claim(src, t, l);
    }
    if (emit) pushEvent(b, cursor, cursor + mimo, Phase::p2, depth, s, EventKind::mimo);
    cursor += mimo;
    // Quantize-and-collect: every cluster resolves its stored observations
    // one level down, all cells in parallel up to the reuse factor.
    if (lay.span > 0) {
      if (emit)
        for (int c = 0; c < part.cellCount(); ++c)
          if (sub[c] > 0)
            pushEvent(b, cursor + lay.starts[c], cursor + lay.starts[c] + sub[c], Phase::p3,
                      depth, c, EventKind::recurse);
      if (top) b.topCollect += lay.span;
      cursor += lay.span;
    }
  }
  return cursor - start;
}

void checkProblem(const MacProblem& p) {
  if (!p.net) throw ConstraintError("mac: problem carries no network");
  if (p.nodes.size() < 2) throw ConstraintError("mac: need at least 2 nodes");
  if (p.targets.empty()) throw ConstraintError("mac: need at least one target");
  if (p.bitsPerPair < 1) throw ConstraintError("mac: bits per pair must be >= 1");
  if (p.quantBits < 1) throw ConstraintError("mac: quantization bits must be >= 1");
  std::vector<char> member(p.net->n, 0);
  for (NodeId v : p.nodes) {
    if (v < 0 || v >= p.net->n) throw ConstraintError("mac: node id out of range");
    member[v] = 1;
  }
  for (NodeId t : p.targets)
    if (t < 0 || t >= p.net->n || !member[t])
      throw ConstraintError("mac: every target must be a scope member");
}

MacSchedule runExchange(const MacProblem& p, int levels, const MacOptions& opt, bool generalized) {
  checkProblem(p);
  if (levels < 1) throw ConstraintError("mac: levels must be >= 1");
  const std::int64_t m = static_cast<std::int64_t>(p.nodes.size());
  const std::int64_t a = static_cast<std::int64_t>(p.targets.size());
  if (!generalized && a != m)
    throw ConstraintError("recursiveMac: the full problem must target every member");
  if (generalized && opt.enforceTargetFloor) {
    const std::int64_t floor = std::llround(
        std::pow(static_cast<double>(m), static_cast<double>(levels) / (levels + 1.0)));
    if (a < floor)
      throw ConstraintError("generalizedMac: target count below the m^{h/(h+1)} validity floor");
  }

  MacSchedule sched;
  sched.levels = levels;

  MacBuild b;
  b.net = p.net;
  b.q = p.quantBits;
  b.reuse = std::max(1, opt.reuse);
  b.clusterer = opt.clusterer ? opt.clusterer : clusterNodes;
  b.trace = &sched.trace;
  if (opt.trackDeliveries) {
    sched.delivered.assign(static_cast<std::size_t>(m) * a, 0);
    b.delivered = &sched.delivered;
    b.nodeIndex.assign(p.net->n, -1);
    b.targetIndex.assign(p.net->n, -1);
    for (std::size_t i = 0; i < p.nodes.size(); ++i) b.nodeIndex[p.nodes[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < p.targets.size(); ++i)
      b.targetIndex[p.targets[i]] = static_cast<int>(i);
    b.targetCount = p.targets.size();
  }

  sched.trace.totalSlots = solveExchange(b, p.nodes, p.targets, opt.box, p.bitsPerPair, levels,
                                         0, 0);
  sched.trace.phaseSpans = {b.topTdma, b.topMimo, b.topCollect, 0};

  const double md = static_cast<double>(m);
  const double growth = std::pow(md, (levels + 1.0) / levels);
  sched.claimedBound =
      generalized
          ? calib::kGenMacBoundK * (static_cast<double>(a) / md) * growth * std::log2(md) *
                static_cast<double>(p.bitsPerPair)
          : calib::kMacBoundK * growth * static_cast<double>(p.bitsPerPair);
  return sched;
}

} // namespace

MacProblem fullMacProblem(const Network& net, Bits bitsPerPair, int quantBits) {
  MacProblem p;
  p.net = &net;
  p.nodes.resize(net.n);
  std::iota(p.nodes.begin(), p.nodes.end(), 0);
  p.targets = p.nodes;
  p.bitsPerPair = bitsPerPair;
  p.quantBits = quantBits;
  return p;
}

MacSchedule tdmaMac(const MacProblem& problem, const MacOptions& opt) {
  MacOptions plain = opt;
  plain.enforceTargetFloor = false; // one-at-a-time rounds work for any target set
  return runExchange(problem, 1, plain, true);
}

MacSchedule recursiveMac(const MacProblem& problem, int levels, const MacOptions& opt) {
  return runExchange(problem, levels, opt, false);
}

MacSchedule generalizedMac(const MacProblem& problem, int levels, const MacOptions& opt) {
  return runExchange(problem, levels, opt, true);
}

} // namespace hcsim
