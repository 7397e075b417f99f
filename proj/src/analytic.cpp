#include "hcsim/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "hcsim/errors.hpp"

namespace hcsim {

namespace {

// Unified h-level count. Every member of an m-node scope must move p bits to
// a partner. With no deeper level this is plain TDMA, m*p slots. Otherwise
// the scope splits into clusters of M and runs spread / MIMO / collect, with
// the two cooperation phases decomposed into cyclic-shift rounds solved one
// level down at p/M bits each. The paper books M rounds and we also support
// the M-1 the builders actually emit.
Slots unicastSlots(std::int64_t m, const std::int64_t* sizes, std::size_t depth, Bits p,
                   int q, CountRule rule, Slots* phases) {
  if (depth == 0) return m * p;
  const std::int64_t cluster = sizes[0];
  if (p % cluster != 0)
    throw ConstraintError("analytic: per-pair payload must split evenly over a cluster");
  const std::int64_t rounds = rule == CountRule::paper ? cluster : cluster - 1;
  const Slots inner = unicastSlots(cluster, sizes + 1, depth - 1, p / cluster, q, rule, nullptr);
  const Slots spread = rounds * inner;
  const Slots mimo = m * (p / cluster);
  const Slots collect = q * rounds * inner;
  if (phases) {
    phases[0] = spread;
    phases[1] = mimo;
    phases[2] = collect;
  }
  return spread + mimo + collect;
}

AnalyticResult unicastResult(std::int64_t n, const std::vector<std::int64_t>& sizes, int q,
                             CountRule rule) {
  Bits bulk = 1;
  for (std::int64_t m : sizes) bulk *= m;
  AnalyticResult r;
  r.bulkSize = bulk;
  Slots phases[3] = {0, 0, 0};
  r.totalSlots = unicastSlots(n, sizes.data(), sizes.size(), bulk, q, rule, phases);
  r.phaseSlots = {phases[0], phases[1], phases[2]};
  r.bitsDelivered = n * bulk;
  r.throughput = static_cast<double>(r.bitsDelivered) / static_cast<double>(r.totalSlots);
  r.delay = static_cast<double>(r.totalSlots);
  return r;
}

double log2d(std::int64_t v) { return std::log2(static_cast<double>(v)); }

} // namespace

AnalyticResult threePhaseSlots(std::int64_t n, std::int64_t m1, int q, CountRule rule) {
  if (m1 < 1 || m1 > n) throw ConstraintError("threePhaseSlots: need 1 <= M1 <= n");
  if (q < 1) throw ConstraintError("threePhaseSlots: Q must be >= 1");
  return unicastResult(n, {m1}, q, rule);
}

AnalyticResult twoLevelSlots(std::int64_t n, std::int64_t m1, std::int64_t m2, int q,
                             CountRule rule) {
  if (m2 < 1 || m2 > m1 || m1 > n) throw ConstraintError("twoLevelSlots: need 1 <= M2 <= M1 <= n");
  if (q < 1) throw ConstraintError("twoLevelSlots: Q must be >= 1");
  return unicastResult(n, {m1, m2}, q, rule);
}

AnalyticResult hLevelSlots(std::int64_t n, const std::vector<std::int64_t>& sizes, int q,
                           CountRule rule) {
  if (sizes.empty()) throw ConstraintError("hLevelSlots: need at least one cluster size");
  std::int64_t prev = n;
  for (std::int64_t m : sizes) {
    if (m < 1 || m > prev) throw ConstraintError("hLevelSlots: cluster sizes must not grow");
    prev = m;
  }
  if (q < 1) throw ConstraintError("hLevelSlots: Q must be >= 1");
  return unicastResult(n, sizes, q, rule);
}

SchemeExponents hLevelExponents(int h) {
  if (h < 1) throw ConstraintError("hLevelExponents: h must be >= 1");
  const double hd = h;
  return {hd / (hd + 1.0), hd / 2.0, (hd * hd + hd + 2.0) / (2.0 * (hd + 1.0))};
}

double macExponentRecursion(int levels) {
  if (levels < 1) throw ConstraintError("macExponentRecursion: levels must be >= 1");
  double b = 2.0;
  for (int k = 1; k < levels; ++k) b = 2.0 - 1.0 / b;
  return b;
}

Slots macSlots(std::int64_t n, int q, int levels, std::int64_t l) {
  if (n < 2) throw ConstraintError("macSlots: need at least 2 nodes");
  if (levels < 1) throw ConstraintError("macSlots: levels must be >= 1");
  if (l < 1) throw ConstraintError("macSlots: bits per pair must be >= 1");
  if (levels == 1) return n * (n - 1) * l;
  const double exponent = 1.0 / macExponentRecursion(levels - 1);
  const std::int64_t m =
      std::max<std::int64_t>(2, std::llround(std::pow(static_cast<double>(n), exponent)));
  const Slots inner = macSlots(m, q, levels - 1, q * l);
  return std::llround(static_cast<double>(n) / static_cast<double>(m) *
                      static_cast<double>(n * l + inner));
}

AnalyticResult modifiedHierSlots(std::int64_t n, std::int64_t m, int q, int macLevels) {
  if (m < 2 || m > n) throw ConstraintError("modifiedHierSlots: need 2 <= M <= n");
  AnalyticResult r;
  r.phaseSlots = {macSlots(m, q, macLevels, 1), n, macSlots(m, q, macLevels, q)};
  r.totalSlots = r.phaseSlots[0] + r.phaseSlots[1] + r.phaseSlots[2];
  r.bulkSize = m;
  r.bitsDelivered = n * m;
  r.throughput = static_cast<double>(r.bitsDelivered) / static_cast<double>(r.totalSlots);
  r.delay = static_cast<double>(r.totalSlots);
  return r;
}

AnalyticResult modifiedHierThroughput(std::int64_t n, std::int64_t m, int q, double k, int h) {
  if (m < 1 || m > n) throw ConstraintError("modifiedHierThroughput: need 1 <= M <= n");
  if (h < 1) throw ConstraintError("modifiedHierThroughput: h must be >= 1");
  if (k <= 0.0) throw ConstraintError("modifiedHierThroughput: K must be positive");
  const double coop = k * std::pow(static_cast<double>(m), (h + 1.0) / h);
  AnalyticResult r;
  r.phaseSlots = {std::llround(coop), n, std::llround(q * coop)};
  r.totalSlots = r.phaseSlots[0] + r.phaseSlots[1] + r.phaseSlots[2];
  r.bulkSize = m;
  r.bitsDelivered = n * m;
  r.throughput = static_cast<double>(r.bitsDelivered) / static_cast<double>(r.totalSlots);
  r.delay = static_cast<double>(r.totalSlots);
  return r;
}

AnalyticResult sessionSlots(std::int64_t n, std::int64_t m, int q, SessionVariant variant) {
  if (m < 1 || m * m > n)
    throw ConstraintError("sessionSlots: need 1 <= M <= sqrt(n) for session operation");
  if (q < 1) throw ConstraintError("sessionSlots: Q must be >= 1");
  const std::int64_t activePairs = variant == SessionVariant::full ? n / m : m;
  const std::int64_t sessions = variant == SessionVariant::full ? m : n / m;
  const Slots collect = std::llround(q * static_cast<double>(m) * log2d(n));
  AnalyticResult r;
  r.phaseSlots = {m, activePairs, collect};
  r.sessionSpan = m + activePairs + collect;
  r.sessions = sessions;
  r.totalSlots = sessions * r.sessionSpan;
  r.bulkSize = m;
  r.bitsDelivered = sessions * activePairs * m;
  r.throughput = static_cast<double>(r.bitsDelivered) / static_cast<double>(r.totalSlots);
  r.delay = static_cast<double>(r.sessionSpan);
  return r;
}

AnalyticResult sessionHierSlots(std::int64_t n, std::int64_t m1, std::int64_t m2, int q,
                                int h1, int h2, SessionVariant variant) {
  if (h1 < 1 || h2 != h1 + 1)
    throw ConstraintError("sessionHierSlots: scales must couple as h2 = h1 + 1 with h1 >= 1");
  if (m2 < 2 || m2 > m1 || m1 > n)
    throw ConstraintError("sessionHierSlots: need 2 <= M2 <= M1 <= n");
  const std::int64_t floorM2 = std::llround(
      std::pow(static_cast<double>(m1), static_cast<double>(h1) / (h1 + 1.0)));
  if (m2 < floorM2)
    throw ConstraintError(
        "sessionHierSlots: small-cluster size below the coupled floor M1^{h1/(h1+1)}");
  if (q < 1) throw ConstraintError("sessionHierSlots: Q must be >= 1");
  const std::int64_t active =
      variant == SessionVariant::full
          ? n / m1
          : std::max<std::int64_t>(
                1, std::llround(std::pow(static_cast<double>(m1), 1.0 / h2)));
  const Slots sub = m1 + std::llround(q * std::pow(static_cast<double>(m2), (h1 + 1.0) / h1));
  const Slots mimo = active * m2;
  const Slots collect = std::llround(q * (static_cast<double>(m2) / static_cast<double>(m1)) *
                                     std::pow(static_cast<double>(m1), (h2 + 1.0) / h2) *
                                     log2d(m1));
  AnalyticResult r;
  r.phaseSlots = {sub, mimo, collect};
  r.sessionSpan = sub + mimo + collect;
  r.sessions = std::max<std::int64_t>(1, m1 / m2);
  r.totalSlots = r.sessions * r.sessionSpan;
  r.bulkSize = m1;
  r.bitsDelivered = r.sessions * active * m1 * m2;
  r.throughput = static_cast<double>(r.bitsDelivered) / static_cast<double>(r.totalSlots);
  r.delay = static_cast<double>(r.sessionSpan);
  return r;
}

namespace {

double planThroughput(SchemeKind scheme, std::int64_t n, int q, int h,
                      const std::vector<std::int64_t>& ms) {
  try {
    switch (scheme) {
      case SchemeKind::threePhase:
        return threePhaseSlots(n, ms.at(0), q).throughput;
      case SchemeKind::hLevel:
        return hLevelSlots(n, ms, q).throughput;
      case SchemeKind::modifiedHier:
        return modifiedHierThroughput(n, ms.at(0), q, 1.0, h).throughput;
      case SchemeKind::session:
        return sessionSlots(n, ms.at(0), q).throughput;
      case SchemeKind::sessionHier:
        return sessionHierSlots(n, ms.at(0), ms.at(1), q, h - 1, h).throughput;
    }
  } catch (const ConstraintError&) {
    return 0.0;
  }
  return 0.0;
}

void searchSizes(SchemeKind scheme, std::int64_t n, int q, int h,
                 std::vector<std::int64_t>& point, std::size_t depth,
                 const std::vector<std::int64_t>& center, std::vector<std::int64_t>& best,
                 double& bestT) {
  if (depth == center.size()) {
    const double t = planThroughput(scheme, n, q, h, point);
    if (t > bestT) {
      bestT = t;
      best = point;
    }
    return;
  }
  const std::int64_t lo = std::max<std::int64_t>(1, center[depth] / 2);
  const std::int64_t hi = std::min(n, center[depth] * 2);
  for (std::int64_t m = lo; m <= hi; ++m) {
    point[depth] = m;
    searchSizes(scheme, n, q, h, point, depth + 1, center, best, bestT);
  }
}

} // namespace

ClusterSizePlan optimizeClusterSizes(SchemeKind scheme, std::int64_t n, int q, int h) {
  if (n < 4) throw ConstraintError("optimizeClusterSizes: need n >= 4");
  if (h < 1) throw ConstraintError("optimizeClusterSizes: h must be >= 1");
  ClusterSizePlan plan;
  const double nd = static_cast<double>(n);
  switch (scheme) {
    case SchemeKind::threePhase:
      plan.closedForm = {std::max<std::int64_t>(1, std::llround(std::sqrt(nd)))};
      break;
    case SchemeKind::hLevel:
      for (int k = 1; k <= h; ++k)
        plan.closedForm.push_back(std::max<std::int64_t>(
            1, std::llround(std::pow(nd, (h + 1.0 - k) / (h + 1.0)))));
      break;
    case SchemeKind::modifiedHier:
      plan.closedForm = {
          std::max<std::int64_t>(1, std::llround(std::pow(nd, h / (h + 1.0))))};
      break;
    case SchemeKind::session:
      plan.closedForm = {std::max<std::int64_t>(1, std::llround(std::sqrt(nd)))};
      break;
    case SchemeKind::sessionHier: {
      const double m1 = std::pow(nd, h / (h + 1.0));
      plan.closedForm = {std::max<std::int64_t>(2, std::llround(m1)),
                         std::max<std::int64_t>(2, std::llround(std::pow(m1, (h - 1.0) / h)))};
      break;
    }
  }
  plan.closedFormThroughput = planThroughput(scheme, n, q, h, plan.closedForm);
  std::vector<std::int64_t> point = plan.closedForm;
  plan.searchBest = plan.closedForm;
  plan.searchBestThroughput = plan.closedFormThroughput;
  searchSizes(scheme, n, q, h, point, 0, plan.closedForm, plan.searchBest,
              plan.searchBestThroughput);
  plan.betterPointExists = plan.searchBestThroughput > plan.closedFormThroughput;
  return plan;
}

} // namespace hcsim
