#include "hcsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "hcsim/engine.hpp"
#include "hcsim/errors.hpp"
#include "hcsim/schemes.hpp"

namespace hcsim {

namespace {

constexpr std::int64_t kTraceCap = 1 << 14;

const char* schemeName(SchemeKind k) {
  switch (k) {
    case SchemeKind::threePhase: return "threePhase";
    case SchemeKind::hLevel: return "hLevel";
    case SchemeKind::modifiedHier: return "modifiedHier";
    case SchemeKind::session: return "session";
    case SchemeKind::sessionHier: return "sessionHier";
  }
  return "?";
}

std::int64_t roundPow(std::int64_t n, double e, std::int64_t floor) {
  return std::max(floor, std::llround(std::pow(static_cast<double>(n), e)));
}

// Closed-form cluster sizes n^{(h+1-k)/(h+1)}, nudged apart if rounding
// collides so the builder's strict ordering holds.
std::vector<int> hLevelSizes(std::int64_t n, int h) {
  std::vector<int> sizes;
  for (int k = 1; k <= h; ++k) {
    int m = static_cast<int>(roundPow(n, (h + 1.0 - k) / (h + 1.0), 1));
    if (!sizes.empty()) m = std::min(m, sizes.back() - 1);
    sizes.push_back(std::max(1, m));
  }
  return sizes;
}

std::int64_t sessionSize(std::int64_t n) {
  std::int64_t m = roundPow(n, 0.5, 1);
  while (m > 1 && m * m > n) --m;
  return m;
}

SweepRow baseRow(const SweepSpec& spec, std::int64_t n) {
  SweepRow row;
  row.scheme = schemeName(spec.scheme);
  row.n = n;
  row.q = spec.q;
  switch (spec.scheme) {
    case SchemeKind::threePhase:
    case SchemeKind::session: row.h = 1; break;
    case SchemeKind::hLevel: row.h = spec.h; break;
    case SchemeKind::modifiedHier: row.h = spec.macLevels; break;
    case SchemeKind::sessionHier: row.h = spec.h2; break;
  }
  return row;
}

SweepRow analyticRow(const SweepSpec& spec, std::int64_t n) {
  SweepRow row = baseRow(spec, n);
  AnalyticResult r;
  switch (spec.scheme) {
    case SchemeKind::threePhase: {
      row.m1 = roundPow(n, 0.5, 1);
      r = threePhaseSlots(n, row.m1, spec.q, spec.rule);
      break;
    }
    case SchemeKind::hLevel: {
      const std::vector<int> sizes = hLevelSizes(n, spec.h);
      std::vector<std::int64_t> wide(sizes.begin(), sizes.end());
      row.m1 = wide.front();
      if (wide.size() > 1) row.m2 = wide[1];
      r = hLevelSlots(n, wide, spec.q, spec.rule);
      break;
    }
    case SchemeKind::modifiedHier: {
      row.m1 = roundPow(n, spec.macLevels / (spec.macLevels + 1.0), 2);
      r = modifiedHierSlots(n, row.m1, spec.q, spec.macLevels);
      break;
    }
    case SchemeKind::session: {
      row.m1 = sessionSize(n);
      r = sessionSlots(n, row.m1, spec.q, spec.variant);
      break;
    }
    case SchemeKind::sessionHier: {
      row.m1 = roundPow(n, spec.h2 / (spec.h2 + 1.0), 2);
      row.m2 = std::max<std::int64_t>(
          2, std::llround(std::pow(static_cast<double>(row.m1), spec.h1 / (spec.h1 + 1.0))));
      r = sessionHierSlots(n, row.m1, row.m2, spec.q, spec.h1, spec.h2, spec.variant);
      break;
    }
  }
  row.totalSlots = r.totalSlots;
  row.bits = r.bitsDelivered;
  row.throughput = r.throughput;
  row.delay = r.delay;
  row.bulk = r.bulkSize;
  return row;
}

SweepRow traceRow(const SweepSpec& spec, std::int64_t n, std::uint64_t seed) {
  SweepRow row = baseRow(spec, n);
  row.seed = seed;
  ChannelParams ch;
  ch.quantBits = spec.q;
  const Network net = generateNetwork(static_cast<int>(n), ch, seed);
  SchemeOptions opt;
  opt.reuse = spec.reuse;
  opt.seed = seed;
  BuiltSchedule built;
  switch (spec.scheme) {
    case SchemeKind::threePhase: {
      row.m1 = roundPow(n, 0.5, 1);
      built = buildThreePhase(net, static_cast<int>(row.m1), opt);
      break;
    }
    case SchemeKind::hLevel: {
      const std::vector<int> sizes = hLevelSizes(n, spec.h);
      row.m1 = sizes.front();
      if (sizes.size() > 1) row.m2 = sizes[1];
      built = buildHLevel(net, sizes, opt);
      break;
    }
    case SchemeKind::modifiedHier: {
      row.m1 = roundPow(n, spec.macLevels / (spec.macLevels + 1.0), 2);
      built = buildModifiedHier(net, static_cast<int>(row.m1), spec.macLevels, opt);
      break;
    }
    case SchemeKind::session: {
      row.m1 = sessionSize(n);
      built = buildSession(net, static_cast<int>(row.m1), spec.variant, opt);
      break;
    }
    case SchemeKind::sessionHier: {
      row.m1 = roundPow(n, spec.h2 / (spec.h2 + 1.0), 2);
      row.m2 = std::max<std::int64_t>(
          2, std::llround(std::pow(static_cast<double>(row.m1), spec.h1 / (spec.h1 + 1.0))));
      built = buildSessionHier(net, static_cast<int>(row.m1), static_cast<int>(row.m2), spec.h1,
                               spec.h2, spec.variant, opt);
      break;
    }
  }
  const Metrics m = execute(built.trace, built.ledger);
  row.totalSlots = m.totalSlots;
  row.bits = m.totalBits;
  row.throughput = m.throughput;
  row.delay = m.meanDelay;
  row.bulk = built.bulkSize;
  return row;
}

double fieldValue(const SweepRow& row, const std::string& field) {
  if (field == "n") return static_cast<double>(row.n);
  if (field == "h") return static_cast<double>(row.h);
  if (field == "q") return static_cast<double>(row.q);
  if (field == "m1") return static_cast<double>(row.m1);
  if (field == "m2") return static_cast<double>(row.m2);
  if (field == "totalSlots") return static_cast<double>(row.totalSlots);
  if (field == "bits") return static_cast<double>(row.bits);
  if (field == "throughput") return row.throughput;
  if (field == "delay") return row.delay;
  if (field == "bulk") return static_cast<double>(row.bulk);
  throw ConstraintError("fitExponent: unknown field " + field);
}

} // namespace

std::vector<SweepRow> runSweep(const SweepSpec& spec) {
  if (spec.nGrid.empty()) throw ConstraintError("runSweep: empty n grid");
  for (std::size_t i = 1; i < spec.nGrid.size(); ++i)
    if (spec.nGrid[i] <= spec.nGrid[i - 1])
      throw ConstraintError("runSweep: n grid must be strictly increasing");
  if (spec.seeds.empty()) throw ConstraintError("runSweep: need at least one seed");
  if (spec.mode == SweepMode::trace && spec.nGrid.back() > kTraceCap)
    throw ConstraintError("runSweep: trace mode is capped at n = 16384; use analytic mode for "
                          "larger networks");
  std::vector<SweepRow> rows;
  for (std::int64_t n : spec.nGrid) {
    if (spec.mode == SweepMode::analytic) {
      rows.push_back(analyticRow(spec, n));
    } else {
      for (std::uint64_t seed : spec.seeds) rows.push_back(traceRow(spec, n, seed));
    }
  }
  return rows;
}

std::string toCsv(const std::vector<SweepRow>& rows) {
  std::string out = "scheme,n,h,q,m1,m2,seed,totalSlots,bits,throughput,delay,bulk\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%lld,%d,%d,%lld,%lld,%llu,%lld,%lld,%.10g,%.10g,%lld\n",
                  r.scheme.c_str(), static_cast<long long>(r.n), r.h, r.q,
                  static_cast<long long>(r.m1), static_cast<long long>(r.m2),
                  static_cast<unsigned long long>(r.seed), static_cast<long long>(r.totalSlots),
                  static_cast<long long>(r.bits), r.throughput, r.delay,
                  static_cast<long long>(r.bulk));
    out += buf;
  }
  return out;
}

void writeCsv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConstraintError("writeCsv: cannot open " + path);
  out << toCsv(rows);
}

std::vector<SweepRow> readCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConstraintError("readCsv: cannot open " + path);
  std::string line;
  std::getline(in, line); // header
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f;
    SweepRow r;
    std::getline(ss, r.scheme, ',');
    std::getline(ss, f, ',');
    r.n = std::strtoll(f.c_str(), nullptr, 10);
    std::getline(ss, f, ',');
    r.h = static_cast<int>(std::strtol(f.c_str(), nullptr, 10));
    std::getline(ss, f, ',');
    r.q = static_cast<int>(std::strtol(f.c_str(), nullptr, 10));
    std::getline(ss, f, ',');
    r.m1 = std::strtoll(f.c_str(), nullptr, 10);
    std::getline(ss, f, ',');
    r.m2 = std::strtoll(f.c_str(), nullptr, 10);
    std::getline(ss, f, ',');
    r.seed = std::strtoull(f.c_str(), nullptr, 10);
    std::getline(ss, f, ',');
    r.totalSlots = std::strtoll(f.c_str(), nullptr, 10);
    std::getline(ss, f, ',');
    r.bits = std::strtoll(f.c_str(), nullptr, 10);
    std::getline(ss, f, ',');
    r.throughput = std::strtod(f.c_str(), nullptr);
    std::getline(ss, f, ',');
    r.delay = std::strtod(f.c_str(), nullptr);
    std::getline(ss, f, ',');
    r.bulk = std::strtoll(f.c_str(), nullptr, 10);
    rows.push_back(std::move(r));
  }
  return rows;
}

ScalingFit fitExponent(const std::vector<SweepRow>& rows, const std::string& xField,
                       const std::string& yField, int dropSmallest) {
  std::map<double, std::pair<double, int>> grouped; // x -> (sum y, count)
  for (const SweepRow& r : rows) {
    const double x = fieldValue(r, xField);
    auto& slot = grouped[x];
    slot.first += fieldValue(r, yField);
    slot.second += 1;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, sum] : grouped) pts.emplace_back(x, sum.first / sum.second);
  if (dropSmallest > 0)
    pts.erase(pts.begin(), pts.begin() + std::min<std::size_t>(dropSmallest, pts.size()));
  if (pts.size() < 3)
    throw ConstraintError("fitExponent: need at least 3 distinct grid points");
  for (const auto& [x, y] : pts)
    if (x <= 0.0 || y <= 0.0)
      throw ConstraintError("fitExponent: log fit needs positive values");

  const double count = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    const double lx = std::log2(x), ly = std::log2(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double det = count * sxx - sx * sx;
  if (det == 0.0) throw ConstraintError("fitExponent: degenerate x grid");

  ScalingFit fit;
  fit.slope = (count * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / count;
  double ssRes = 0, ssTot = 0;
  const double meanY = sy / count;
  for (const auto& [x, y] : pts) {
    const double lx = std::log2(x), ly = std::log2(y);
    const double res = ly - (fit.slope * lx + fit.intercept);
    fit.residuals.push_back(res);
    ssRes += res * res;
    ssTot += (ly - meanY) * (ly - meanY);
  }
  fit.r2 = ssTot > 0.0 ? 1.0 - ssRes / ssTot : (ssRes == 0.0 ? 1.0 : 0.0);
  return fit;
}

namespace {

int levelsFor(double b) {
  // Smallest h with h/(h+1) >= b, i.e. h >= b/(1-b); the epsilon keeps exact
  // lattice points like b = 2/3 on their intended level.
  return std::max(1, static_cast<int>(std::ceil(b / (1.0 - b) - 1e-9)));
}

void checkBGrid(const std::vector<double>& bGrid, std::int64_t n, int q) {
  if (bGrid.empty()) throw ConstraintError("tradeoffCurve: empty b grid");
  for (double b : bGrid)
    if (b < 0.0 || b >= 1.0)
      throw ConstraintError("tradeoffCurve: operating exponent must satisfy 0 <= b < 1");
  if (n < 4) throw ConstraintError("tradeoffCurve: need n >= 4");
  if (q < 1) throw ConstraintError("tradeoffCurve: Q must be >= 1");
}

} // namespace

std::vector<TradeoffRow> tradeoffCurve(const std::vector<double>& bGrid, std::int64_t n, int q) {
  checkBGrid(bGrid, n, q);
  std::vector<TradeoffRow> rows;
  for (double b : bGrid) {
    TradeoffRow row;
    row.b = b;
    if (b == 0.0) {
      row.throughput = 1.0;
      row.delay = 1.0;
      rows.push_back(row);
      continue;
    }
    const int h = levelsFor(b);
    row.h = h;
    row.predictedDelayExp = h / (h + 1.0);
    if (h == 1) {
      std::int64_t m = roundPow(n, b, 1);
      while (m > 1 && m * m > n) --m;
      const AnalyticResult r = sessionSlots(n, m, q, SessionVariant::restricted);
      row.throughput = r.throughput;
      row.delay = r.delay;
    } else {
      const std::int64_t m1 = roundPow(n, b, 2);
      const std::int64_t m2 = std::max<std::int64_t>(
          2, std::llround(std::pow(static_cast<double>(m1), (h - 1.0) / h)));
      const AnalyticResult r =
          sessionHierSlots(n, m1, m2, q, h - 1, h, SessionVariant::restricted);
      row.throughput = r.throughput;
      row.delay = r.delay;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<TradeoffRow> tradeoffCurveTrace(const std::vector<double>& bGrid, std::int64_t n,
                                            int q, std::uint64_t seed) {
  checkBGrid(bGrid, n, q);
  if (n > kTraceCap)
    throw ConstraintError("tradeoffCurveTrace: capped at n = 16384; use tradeoffCurve for "
                          "larger networks");
  ChannelParams ch;
  ch.quantBits = q;
  const Network net = generateNetwork(static_cast<int>(n), ch, seed);
  SchemeOptions opt;
  opt.seed = seed;
  opt.reserveFrames = true; // match the budget-sized spans the law is stated for
  std::vector<TradeoffRow> rows;
  for (double b : bGrid) {
    TradeoffRow row;
    row.b = b;
    if (b == 0.0) {
      row.throughput = 1.0;
      row.delay = 1.0;
      rows.push_back(row);
      continue;
    }
    const int h = levelsFor(b);
    row.h = h;
    row.predictedDelayExp = h / (h + 1.0);
    BuiltSchedule built;
    if (h == 1) {
      std::int64_t m = roundPow(n, b, 1);
      while (m > 1 && m * m > n) --m;
      built = buildSession(net, static_cast<int>(m), SessionVariant::restricted, opt);
    } else {
      const std::int64_t m1 = roundPow(n, b, 2);
      const std::int64_t m2 = std::max<std::int64_t>(
          2, std::llround(std::pow(static_cast<double>(m1), (h - 1.0) / h)));
      built = buildSessionHier(net, static_cast<int>(m1), static_cast<int>(m2), h - 1, h,
                               SessionVariant::restricted, opt);
    }
    BitLedger ledger = built.ledger;
    const Metrics m = execute(built.trace, ledger);
    row.throughput = m.throughput;
    row.delay = m.meanDelay;
    rows.push_back(row);
  }
  return rows;
}

} // namespace hcsim
