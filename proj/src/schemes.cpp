#include "hcsim/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "hcsim/errors.hpp"
#include "hcsim/rng.hpp"
#include "sched_util.hpp"

namespace hcsim {

namespace {

constexpr CellBox kUnitBox{};

struct Build {
  const Network* net = nullptr;
  int q = 2;
  int reuse = 1;
  bool reserve = false;
  Clusterer clusterer;
  BuiltSchedule out;

  void event(Slots s, Slots e, Phase ph, int cluster, EventKind k, Bits payload,
             std::vector<std::uint32_t> deliveries = {}) {
    TraceEvent ev;
    ev.slotStart = s;
    ev.slotEnd = e;
    ev.phase = ph;
    ev.level = 1;
    ev.cluster = cluster;
    ev.kind = k;
    ev.payloadBits = payload;
    ev.deliveries = std::move(deliveries);
    out.trace.events.push_back(std::move(ev));
  }
};

Build makeBuild(const Network& net, const SchemeOptions& opt) {
  if (net.n < 2) throw ConstraintError("schemes: need at least 2 nodes");
  Build b;
  b.net = &net;
  b.q = net.channel.quantBits;
  b.reuse = std::max(1, opt.reuse);
  b.reserve = opt.reserveFrames;
  b.clusterer = opt.clusterer ? opt.clusterer : clusterNodes;
  return b;
}

std::vector<NodeId> allNodes(const Network& net) {
  std::vector<NodeId> v(net.n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<int> cellIndexMap(const Network& net, const Clustering& part) {
  std::vector<int> cellOf(net.n, -1);
  for (int c = 0; c < part.cellCount(); ++c)
    for (NodeId v : part.cells[c]) cellOf[v] = c;
  return cellOf;
}

// ---------------------------------------------------------------------------
// Nested unicast hierarchy. The recursion is evaluated on a scope tree built
// once per run; inner exchanges are solved per (scope, payload) and memoized,
// which keeps deep hierarchies linear in the number of scopes instead of
// exponential in shift rounds.

struct Scope {
  std::vector<NodeId> nodes;
  CellBox box;
  bool leaf = true;
  Clustering part;         // aligned with kids; only when !leaf
  std::vector<Scope> kids;
  std::map<Bits, Slots> memo;
};

Scope buildScope(Build& b, std::vector<NodeId> nodes, const CellBox& box,
                 const std::vector<int>& sizes, std::size_t depth) {
  Scope s;
  s.nodes = std::move(nodes);
  s.box = box;
  if (depth >= sizes.size() || s.nodes.size() < 2) return s;
  s.leaf = false;
  s.part = b.clusterer(*b.net, s.nodes, s.box, sizes[depth]);
  s.kids.reserve(s.part.cells.size());
  for (int c = 0; c < s.part.cellCount(); ++c)
    s.kids.push_back(buildScope(b, s.part.cells[c], s.part.boxes[c], sizes, depth + 1));
  return s;
}

// Span of the balanced exchange on a scope: every member moves p bits to a
// cyclic-shift partner inside it. Spread and collect decompose into shift
// rounds solved one level down; shares differ by at most one bit, so at most
// two distinct sub-payloads occur and the count multiplies instead of
// looping. The collect payload is uniformized at Q times the largest
// activation count, which is exact on balanced instances. A lone member in a
// cell keeps its payload whole and its cell skips both cooperation phases.
Slots uniformSpan(Build& b, Scope& sc, Bits p) {
  const std::int64_t m = static_cast<std::int64_t>(sc.nodes.size());
  if (p <= 0 || m < 2) return 0;
  if (sc.leaf) return m * p;
  const auto hit = sc.memo.find(p);
  if (hit != sc.memo.end()) return hit->second;

  const int cells = sc.part.cellCount();
  std::vector<Slots> spread(cells, 0), collect(cells, 0);
  Slots mimo = 0;
  Bits actMax = 0;
  for (int c = 0; c < cells; ++c) {
    const std::int64_t mc = static_cast<std::int64_t>(sc.part.cells[c].size());
    if (mc == 0) continue;
    const Bits lo = p / mc;
    const std::int64_t r = p % mc;
    const std::int64_t hiShifts = r >= 1 ? r - 1 : 0;
    if (hiShifts > 0) spread[c] += hiShifts * uniformSpan(b, sc.kids[c], lo + 1);
    spread[c] += (mc - 1 - hiShifts) * uniformSpan(b, sc.kids[c], lo);
    const Bits act = (p + mc - 1) / mc;
    mimo += mc * act;
    actMax = std::max(actMax, act);
  }
  for (int c = 0; c < cells; ++c) {
    const std::int64_t mc = static_cast<std::int64_t>(sc.part.cells[c].size());
    if (mc < 2) continue;
    collect[c] = (mc - 1) * uniformSpan(b, sc.kids[c], b.q * actMax);
  }
  const Slots span = detail::layoutParallel(spread, sc.part, b.reuse).span + mimo +
                     detail::layoutParallel(collect, sc.part, b.reuse).span;
  sc.memo.emplace(p, span);
  return span;
}

void validateSizes(const Network& net, const std::vector<int>& sizes) {
  if (sizes.empty()) throw ConstraintError("buildHLevel: need at least one cluster size");
  if (sizes.front() > net.n)
    throw ConstraintError("buildHLevel: top cluster size exceeds the network");
  int prev = net.n + 1;
  for (int m : sizes) {
    if (m < 1 || m >= prev)
      throw ConstraintError("buildHLevel: cluster sizes must be strictly decreasing");
    prev = m;
  }
}

BuiltSchedule runUnicast(const Network& net, const std::vector<int>& sizes,
                         const SchemeOptions& opt) {
  validateSizes(net, sizes);
  Build b = makeBuild(net, opt);
  Bits bulk = 1;
  for (int m : sizes) bulk *= m;
  b.out.bulkSize = bulk;

  Scope top = buildScope(b, allNodes(net), kUnitBox, sizes, 0);
  const Clustering& part = top.part;
  const int cells = part.cellCount();
  const std::int64_t topM = sizes.front();
  const std::vector<int> cellOf = cellIndexMap(net, part);
  const bool deep = sizes.size() > 1;

  for (NodeId s = 0; s < net.n; ++s)
    b.out.ledger.batches.push_back({s, net.pairing[s], bulk, 0, -1});

  // Pairs whose source cannot anchor the phases: destination in the same
  // cluster, or a source cluster too thin to spread over. They fall through
  // to direct rounds after phase 3.
  std::vector<char> viaPhases(net.n, 1);
  for (NodeId s = 0; s < net.n; ++s) {
    const int sc = cellOf[s];
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[sc].size());
    if (sc == cellOf[net.pairing[s]] || mc < 2 || 2 * mc < topM) viaPhases[s] = 0;
  }

  // Phase 1: every cluster spreads all member payloads, shift by shift.
  std::vector<Slots> ph1(cells, 0);
  for (int c = 0; c < cells; ++c) {
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[c].size());
    if (mc < 2) continue;
    const Bits lo = bulk / mc;
    const std::int64_t r = bulk % mc;
    const std::int64_t hiShifts = r >= 1 ? r - 1 : 0;
    if (hiShifts > 0) ph1[c] += hiShifts * uniformSpan(b, top.kids[c], lo + 1);
    ph1[c] += (mc - 1 - hiShifts) * uniformSpan(b, top.kids[c], lo);
  }
  const detail::ParallelLayout lay1 = detail::layoutParallel(ph1, part, b.reuse);
  for (int c = 0; c < cells; ++c) {
    if (ph1[c] == 0) continue;
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[c].size());
    const Bits moved = mc * (bulk - bulk / mc - (bulk % mc ? 1 : 0));
    b.event(lay1.starts[c], lay1.starts[c] + ph1[c], Phase::p1, c,
            deep ? EventKind::recurse : EventKind::tdma, moved);
  }
  Slots cursor = lay1.span;
  b.out.trace.phaseSpans[0] = lay1.span;

  // Phase 2: long-range activations, one block per cross pair, sequential.
  std::vector<Bits> act(net.n, 0);
  Slots mimo = 0;
  Bits mimoPayload = 0;
  for (NodeId s = 0; s < net.n; ++s) {
    if (!viaPhases[s]) continue;
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[cellOf[s]].size());
    act[s] = (bulk + mc - 1) / mc;
    mimo += act[s];
    mimoPayload += bulk;
  }
  if (mimo > 0) b.event(cursor, cursor + mimo, Phase::p2, -1, EventKind::mimo, mimoPayload);
  cursor += mimo;
  b.out.trace.phaseSpans[1] = mimo;

  // Phase 3: per destination cluster. At the base depth the rounds are
  // enumerated per destination; deeper, the shift rounds run at the
  // uniformized observation payload.
  std::vector<Slots> ph3(cells, 0);
  std::vector<std::vector<std::uint32_t>> landing(cells);
  std::vector<Bits> actMaxIn(cells, 0);
  for (NodeId s = 0; s < net.n; ++s) {
    if (!viaPhases[s]) continue;
    const int dc = cellOf[net.pairing[s]];
    landing[dc].push_back(static_cast<std::uint32_t>(s));
    actMaxIn[dc] = std::max(actMaxIn[dc], act[s]);
  }
  for (int c = 0; c < cells; ++c) {
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[c].size());
    if (mc < 2 || landing[c].empty()) continue;
    if (!deep) {
      for (std::uint32_t s : landing[c]) ph3[c] += b.q * act[s] * (mc - 1);
    } else {
      ph3[c] = (mc - 1) * uniformSpan(b, top.kids[c], b.q * actMaxIn[c]);
    }
  }
  const detail::ParallelLayout lay3 = detail::layoutParallel(ph3, part, b.reuse);
  for (int c = 0; c < cells; ++c) {
    if (landing[c].empty()) continue;
    Bits obs = 0;
    for (std::uint32_t s : landing[c]) obs += b.q * act[s];
    b.event(cursor + lay3.starts[c], cursor + lay3.starts[c] + ph3[c], Phase::p3, c,
            deep ? EventKind::recurse : EventKind::tdma, obs, std::move(landing[c]));
  }
  cursor += lay3.span;
  b.out.trace.phaseSpans[2] = lay3.span;

  // Appendix: leftover pairs run direct rounds inside the source cluster,
  // clusters in parallel.
  std::vector<Slots> app(cells, 0);
  std::vector<std::vector<std::uint32_t>> appBatch(cells);
  for (NodeId s = 0; s < net.n; ++s) {
    if (viaPhases[s]) continue;
    const int c = cellOf[s];
    app[c] += bulk;
    appBatch[c].push_back(static_cast<std::uint32_t>(s));
  }
  const detail::ParallelLayout layA = detail::layoutParallel(app, part, b.reuse);
  for (int c = 0; c < cells; ++c) {
    if (appBatch[c].empty()) continue;
    b.event(cursor + layA.starts[c], cursor + layA.starts[c] + app[c], Phase::extra, c,
            EventKind::direct, app[c], std::move(appBatch[c]));
  }
  cursor += layA.span;
  b.out.trace.phaseSpans[3] = layA.span;

  b.out.trace.totalSlots = cursor;
  return std::move(b.out);
}

} // namespace

BuiltSchedule buildThreePhase(const Network& net, int m1, const SchemeOptions& opt) {
  return runUnicast(net, {m1}, opt);
}

BuiltSchedule buildHLevel(const Network& net, const std::vector<int>& sizes,
                          const SchemeOptions& opt) {
  return runUnicast(net, sizes, opt);
}

BuiltSchedule buildModifiedHier(const Network& net, int m, int macLevels,
                                const SchemeOptions& opt) {
  if (m < 2 || m > net.n) throw ConstraintError("buildModifiedHier: need 2 <= M <= n");
  if (macLevels < 1) throw ConstraintError("buildModifiedHier: exchange depth must be >= 1");
  Build b = makeBuild(net, opt);
  const Bits bulk = m;
  b.out.bulkSize = bulk;

  const Clustering part = b.clusterer(net, allNodes(net), kUnitBox, m);
  const int cells = part.cellCount();
  const std::vector<int> cellOf = cellIndexMap(net, part);

  for (NodeId s = 0; s < net.n; ++s)
    b.out.ledger.batches.push_back({s, net.pairing[s], bulk, 0, -1});

  std::vector<char> viaPhases(net.n, 1);
  for (NodeId s = 0; s < net.n; ++s) {
    const int sc = cellOf[s];
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[sc].size());
    if (sc == cellOf[net.pairing[s]] || mc < 2 || 2 * mc < m) viaPhases[s] = 0;
  }

  MacOptions mo;
  mo.reuse = b.reuse;
  mo.clusterer = b.clusterer;

  const auto exchangeSpan = [&](int c, Bits perPair) -> Slots {
    if (part.cells[c].size() < 2 || perPair <= 0) return 0;
    MacProblem p;
    p.net = &net;
    p.nodes = part.cells[c];
    p.targets = part.cells[c];
    p.bitsPerPair = perPair;
    p.quantBits = b.q;
    MacOptions local = mo;
    local.box = part.boxes[c];
    return recursiveMac(p, macLevels, local).trace.totalSlots;
  };

  // Phase 1: each cluster runs a full exchange sized to spread every
  // member's bulk.
  std::vector<Slots> ph1(cells, 0);
  for (int c = 0; c < cells; ++c) {
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[c].size());
    if (mc < 2) continue;
    ph1[c] = exchangeSpan(c, (bulk + mc - 1) / mc);
  }
  const detail::ParallelLayout lay1 = detail::layoutParallel(ph1, part, b.reuse);
  for (int c = 0; c < cells; ++c)
    if (ph1[c] > 0)
      b.event(lay1.starts[c], lay1.starts[c] + ph1[c], Phase::p1, c, EventKind::recurse,
              static_cast<Bits>(part.cells[c].size()) * bulk);
  Slots cursor = lay1.span;
  b.out.trace.phaseSpans[0] = lay1.span;

  // Phase 2.
  std::vector<Bits> act(net.n, 0);
  Slots mimo = 0;
  Bits mimoPayload = 0;
  for (NodeId s = 0; s < net.n; ++s) {
    if (!viaPhases[s]) continue;
    const std::int64_t mc = static_cast<std::int64_t>(part.cells[cellOf[s]].size());
    act[s] = (bulk + mc - 1) / mc;
    mimo += act[s];
    mimoPayload += bulk;
  }
  if (mimo > 0) b.event(cursor, cursor + mimo, Phase::p2, -1, EventKind::mimo, mimoPayload);
  cursor += mimo;
  b.out.trace.phaseSpans[1] = mimo;

  // Phase 3: per destination cluster, an exchange at the quantized
  // observation payload.
  std::vector<Slots> ph3(cells, 0);
  std::vector<std::vector<std::uint32_t>> landing(cells);
  std::vector<Bits> actMaxIn(cells, 0);
  for (NodeId s = 0; s < net.n; ++s) {
    if (!viaPhases[s]) continue;
    const int dc = cellOf[net.pairing[s]];
    landing[dc].push_back(static_cast<std::uint32_t>(s));
    actMaxIn[dc] = std::max(actMaxIn[dc], act[s]);
  }
  for (int c = 0; c < cells; ++c)
    if (!landing[c].empty()) ph3[c] = exchangeSpan(c, b.q * actMaxIn[c]);
  const detail::ParallelLayout lay3 = detail::layoutParallel(ph3, part, b.reuse);
  for (int c = 0; c < cells; ++c) {
    if (landing[c].empty()) continue;
    Bits obs = 0;
    for (std::uint32_t s : landing[c]) obs += b.q * act[s];
    b.event(cursor + lay3.starts[c], cursor + lay3.starts[c] + ph3[c], Phase::p3, c,
            EventKind::recurse, obs, std::move(landing[c]));
  }
  cursor += lay3.span;
  b.out.trace.phaseSpans[2] = lay3.span;

  std::vector<Slots> app(cells, 0);
  std::vector<std::vector<std::uint32_t>> appBatch(cells);
  for (NodeId s = 0; s < net.n; ++s) {
    if (viaPhases[s]) continue;
    const int c = cellOf[s];
    app[c] += bulk;
    appBatch[c].push_back(static_cast<std::uint32_t>(s));
  }
  const detail::ParallelLayout layA = detail::layoutParallel(app, part, b.reuse);
  for (int c = 0; c < cells; ++c) {
    if (appBatch[c].empty()) continue;
    b.event(cursor + layA.starts[c], cursor + layA.starts[c] + app[c], Phase::extra, c,
            EventKind::direct, app[c], std::move(appBatch[c]));
  }
  cursor += layA.span;
  b.out.trace.phaseSpans[3] = layA.span;

  b.out.trace.totalSlots = cursor;
  return std::move(b.out);
}

BuiltSchedule buildSession(const Network& net, int m, SessionVariant variant,
                           const SchemeOptions& opt) {
  if (m < 1 || static_cast<std::int64_t>(m) * m > net.n)
    throw ConstraintError("buildSession: need 1 <= M <= sqrt(n) for session operation");
  Build b = makeBuild(net, opt);
  b.out.bulkSize = m;

  const Clustering part = b.clusterer(net, allNodes(net), kUnitBox, m);
  const int cells = part.cellCount();
  const std::vector<int> cellOf = cellIndexMap(net, part);
  const Slots collectBudget = std::llround(
      b.q * static_cast<double>(m) * std::log2(static_cast<double>(net.n)));

  std::vector<std::vector<NodeId>> unserved = part.cells;
  std::int64_t left = net.n;
  Rng rng(Rng::derive(opt.seed, 2));
  Slots cursor = 0;
  int scan = 0; // rotating cell pointer for the restricted variant

  while (left > 0) {
    // Pick this session's sources: one per cluster, uniformly among the
    // cluster's not-yet-served members. The restricted variant admits only M
    // clusters per session, scanned round-robin; exhausted clusters are
    // skipped either way.
    std::vector<NodeId> served;
    if (variant == SessionVariant::full) {
      for (auto& pool : unserved) {
        if (pool.empty()) continue;
        const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
        served.push_back(pool[i]);
        pool[i] = pool.back();
        pool.pop_back();
      }
    } else {
      int picked = 0;
      for (int step = 0; step < cells && picked < m; ++step) {
        auto& pool = unserved[(scan + step) % cells];
        if (pool.empty()) continue;
        const std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
        served.push_back(pool[i]);
        pool[i] = pool.back();
        pool.pop_back();
        ++picked;
      }
      scan = cells > 0 ? (scan + picked) % cells : 0;
    }
    left -= static_cast<std::int64_t>(served.size());

    const Slots sstart = cursor;
    std::vector<std::uint32_t> refs;
    for (NodeId s : served) {
      refs.push_back(static_cast<std::uint32_t>(b.out.ledger.batches.size()));
      b.out.ledger.batches.push_back({s, net.pairing[s], m, sstart, -1});
    }

    // Phase 1: fixed M-slot frame, every cluster in parallel.
    b.event(cursor, cursor + m, Phase::p1, -1, EventKind::tdma,
            static_cast<Bits>(served.size()) * m);
    cursor += m;
    b.out.trace.phaseSpans[0] += m;

    // Phase 2: one long-range slot per served pair.
    const Slots mimo = static_cast<Slots>(served.size());
    if (mimo > 0)
      b.event(cursor, cursor + mimo, Phase::p2, -1, EventKind::mimo,
              static_cast<Bits>(served.size()) * m);
    cursor += mimo;
    b.out.trace.phaseSpans[1] += mimo;

    // Phase 3: per-cluster rounds driven by realized destination counts.
    std::vector<Slots> ph3(cells, 0);
    for (NodeId s : served) ph3[cellOf[net.pairing[s]]] += static_cast<Slots>(b.q) * m;
    Slots span3 = detail::layoutParallel(ph3, part, b.reuse).span;
    if (b.reserve) span3 = std::max(span3, collectBudget);
    b.event(cursor, cursor + span3, Phase::p3, -1, EventKind::tdma,
            static_cast<Bits>(served.size()) * m, std::move(refs));
    cursor += span3;
    b.out.trace.phaseSpans[2] += span3;
    b.out.sessions += 1;
  }

  b.out.trace.totalSlots = cursor;
  return std::move(b.out);
}

BuiltSchedule buildSessionHier(const Network& net, int m1, int m2, int h1, int h2,
                               SessionVariant variant, const SchemeOptions& opt) {
  if (h1 < 1 || h2 != h1 + 1)
    throw ConstraintError("buildSessionHier: scales must couple as h2 = h1 + 1 with h1 >= 1");
  if (m2 < 2 || m2 > m1 || m1 > net.n)
    throw ConstraintError("buildSessionHier: need 2 <= M2 <= M1 <= n");
  const std::int64_t floorM2 = std::llround(
      std::pow(static_cast<double>(m1), static_cast<double>(h1) / (h1 + 1.0)));
  if (m2 < floorM2)
    throw ConstraintError(
        "buildSessionHier: small-cluster size below the coupled floor M1^{h1/(h1+1)}");
  Build b = makeBuild(net, opt);
  b.out.bulkSize = m1;

  const Clustering large = b.clusterer(net, allNodes(net), kUnitBox, m1);
  const int larges = large.cellCount();
  const std::vector<int> largeOf = cellIndexMap(net, large);
  std::vector<Clustering> small(larges);
  for (int c = 0; c < larges; ++c)
    if (!large.cells[c].empty()) small[c] = b.clusterer(net, large.cells[c], large.boxes[c], m2);

  // Active large clusters: all of them, or a fixed M1^{1/h2}-sized prefix of
  // the occupied ones in the restricted variant.
  std::vector<int> active;
  for (int c = 0; c < larges; ++c)
    if (!large.cells[c].empty()) active.push_back(c);
  if (variant == SessionVariant::restricted) {
    const std::size_t cap = static_cast<std::size_t>(std::max<std::int64_t>(
        1, std::llround(std::pow(static_cast<double>(m1), 1.0 / h2))));
    if (active.size() > cap) active.resize(cap);
  }

  // Per active large cluster, the occupied small cells queue up for one
  // promotion each.
  std::vector<std::vector<int>> queue(larges);
  std::size_t sessions = 0;
  for (int c : active) {
    for (int k = 0; k < small[c].cellCount(); ++k)
      if (!small[c].cells[k].empty()) queue[c].push_back(k);
    sessions = std::max(sessions, queue[c].size());
  }

  const Slots subBudget = std::llround(
      b.q * std::pow(static_cast<double>(m2), (h1 + 1.0) / h1));
  const Slots collectBudget = std::llround(
      b.q * (static_cast<double>(m2) / static_cast<double>(m1)) *
      std::pow(static_cast<double>(m1), (h2 + 1.0) / h2) *
      std::log2(static_cast<double>(m1)));

  MacOptions mo;
  mo.reuse = b.reuse;
  mo.clusterer = b.clusterer;
  mo.enforceTargetFloor = false; // realized targets per cluster are small by design

  Slots cursor = 0;
  for (std::size_t k = 0; k < sessions; ++k) {
    std::vector<NodeId> served;
    std::vector<Slots> subSpans;
    for (int c : active) {
      if (k >= queue[c].size()) continue;
      const std::vector<NodeId>& cell = small[c].cells[queue[c][k]];
      served.insert(served.end(), cell.begin(), cell.end());
      if (cell.size() >= 2) {
        MacProblem p;
        p.net = &net;
        p.nodes = cell;
        p.targets = cell;
        p.bitsPerPair = b.q;
        p.quantBits = b.q;
        MacOptions local = mo;
        local.box = small[c].boxes[queue[c][k]];
        subSpans.push_back(recursiveMac(p, h1, local).trace.totalSlots);
      }
    }
    if (served.empty()) continue;

    const Slots sstart = cursor;
    std::vector<std::uint32_t> refs;
    for (NodeId s : served) {
      refs.push_back(static_cast<std::uint32_t>(b.out.ledger.batches.size()));
      b.out.ledger.batches.push_back({s, net.pairing[s], m1, sstart, -1});
    }

    // Sub-phase 1: an M1-slot joint frame hands every promoted payload to
    // its large cluster.
    b.event(cursor, cursor + m1, Phase::p1, -1, EventKind::mimo,
            static_cast<Bits>(served.size()) * m1);
    cursor += m1;
    Slots p1Span = m1;

    // Sub-phase 2: promoted small clusters resolve their observations with
    // the recursive exchange, all in parallel.
    Slots sub = 0;
    for (Slots s : subSpans) sub = std::max(sub, s);
    if (b.reserve) sub = std::max(sub, subBudget);
    if (sub > 0)
      b.event(cursor, cursor + sub, Phase::p1, -1, EventKind::recurse,
              static_cast<Bits>(served.size()) * b.q * m2);
    cursor += sub;
    p1Span += sub;
    b.out.trace.phaseSpans[0] += p1Span;

    // Phase 2: one long-range slot per served source.
    const Slots mimo = static_cast<Slots>(served.size());
    b.event(cursor, cursor + mimo, Phase::p2, -1, EventKind::mimo,
            static_cast<Bits>(served.size()) * m1);
    cursor += mimo;
    b.out.trace.phaseSpans[1] += mimo;

    // Phase 3: each large cluster resolves the observations of the
    // destinations that landed in it, targeted exchange at depth h2.
    std::vector<std::vector<NodeId>> landed(larges);
    for (NodeId s : served) landed[largeOf[net.pairing[s]]].push_back(net.pairing[s]);
    std::vector<Slots> ph3(larges, 0);
    for (int c = 0; c < larges; ++c) {
      if (landed[c].empty() || large.cells[c].size() < 2) continue;
      MacProblem p;
      p.net = &net;
      p.nodes = large.cells[c];
      p.targets = landed[c];
      p.bitsPerPair = b.q;
      p.quantBits = b.q;
      MacOptions local = mo;
      local.box = large.boxes[c];
      ph3[c] = generalizedMac(p, h2, local).trace.totalSlots;
    }
    const detail::ParallelLayout lay3 = detail::layoutParallel(ph3, large, b.reuse);
    Slots span3 = lay3.span;
    if (b.reserve) span3 = std::max(span3, collectBudget);
    for (int c = 0; c < larges; ++c)
      if (ph3[c] > 0)
        b.event(cursor + lay3.starts[c], cursor + lay3.starts[c] + ph3[c], Phase::p3, c,
                EventKind::recurse, static_cast<Bits>(landed[c].size()) * b.q * m2);
    // Deliveries ride the session: bits depart at its start and are decoded
    // at its end.
    b.event(cursor, cursor + span3, Phase::p3, -1, EventKind::tdma,
            static_cast<Bits>(served.size()) * m1, std::move(refs));
    cursor += span3;
    b.out.trace.phaseSpans[2] += span3;
    b.out.sessions += 1;
  }

  b.out.trace.totalSlots = cursor;
  return std::move(b.out);
}

} // namespace hcsim
