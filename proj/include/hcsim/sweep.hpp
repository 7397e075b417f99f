#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcsim/analytic.hpp"
#include "hcsim/netmodel.hpp"

namespace hcsim {

enum class SweepMode { analytic, trace };

struct SweepSpec {
  SchemeKind scheme = SchemeKind::threePhase;
  SweepMode mode = SweepMode::analytic;
  std::vector<std::int64_t> nGrid;
  int h = 1;           // hLevel depth; also picks cluster sizes n^{(h+1-k)/(h+1)}
  int h1 = 1, h2 = 2;  // sessionHier scales
  int q = 2;
  SessionVariant variant = SessionVariant::restricted;
  CountRule rule = CountRule::exact;
  int macLevels = 2;
  std::vector<std::uint64_t> seeds{1};
  int reuse = 1;
};

struct SweepRow {
  std::string scheme;
  std::int64_t n = 0;
  int h = 0;
  int q = 0;
  std::int64_t m1 = 0, m2 = 0;
  std::uint64_t seed = 0;
  Slots totalSlots = 0;
  Bits bits = 0;
  double throughput = 0.0;
  double delay = 0.0;
  Bits bulk = 0;
};

std::vector<SweepRow> runSweep(const SweepSpec& spec);

std::string toCsv(const std::vector<SweepRow>& rows);
void writeCsv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> readCsv(const std::string& path);

struct ScalingFit {
  double slope = 0.0; // of log2(y) against log2(x)
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> residuals; // one per fitted grid point, log2 units
};

// Ordinary least squares on (log2 x, log2 y) after averaging y over seeds
// per distinct x. dropSmallest ignores that many leading x values
// (pre-asymptotic burn-in); at least 3 distinct x must remain.
ScalingFit fitExponent(const std::vector<SweepRow>& rows, const std::string& xField,
                       const std::string& yField, int dropSmallest = 0);

struct TradeoffRow {
  double b = 0.0;       // target throughput exponent
  int h = 0;            // levels chosen to reach it
  double throughput = 0.0;
  double delay = 0.0;
  double predictedDelayExp = 0.0; // h/(h+1) == b exactly only on lattice points
};

// For each target exponent b pick the shallowest hierarchy whose throughput
// scaling reaches it, then report its analytic (or traced) operating point.
// b = 0 is the plain one-at-a-time baseline, (T, D) = (1, 1).
std::vector<TradeoffRow> tradeoffCurve(const std::vector<double>& bGrid, std::int64_t n, int q);
std::vector<TradeoffRow> tradeoffCurveTrace(const std::vector<double>& bGrid,
                                            std::int64_t n, int q, std::uint64_t seed);

} // namespace hcsim
