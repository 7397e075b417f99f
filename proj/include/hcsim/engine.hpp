#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcsim/analytic.hpp"
#include "hcsim/trace.hpp"
#include "hcsim/types.hpp"

namespace hcsim {

struct Metrics {
  Slots totalSlots = 0;
  Bits totalBits = 0;
  double throughput = 0.0; // delivered bits per slot, network-wide
  double meanDelay = 0.0;  // slots, bit-weighted over delivered batches
  double maxDelay = 0.0;
  Bits bulkSize = 0;       // bits per source-destination pair
  double perPairRate = 0.0; // throughput / pairs served
  std::int64_t pairsServed = 0;
};

// Walk the trace slot range by slot range, stamping departure and arrival
// slots into the ledger, then reduce to throughput/delay. Throws
// OracleMismatch if any batch is left undelivered.
Metrics execute(const ScheduleTrace& trace, BitLedger& ledger);

struct VerifyReport {
  bool ok = true;
  Slots tracedSlots = 0;
  Slots predictedSlots = 0;
  double ratio = 1.0;
  std::string firstDivergence; // empty when ok
};

// Compare a traced schedule against closed-form slot counts phase by phase.
// tolerance is a multiplicative slack; use 0 to demand equality.
VerifyReport verifyAgainstAnalytic(const ScheduleTrace& trace,
                                   const AnalyticResult& predicted,
                                   double tolerance);

struct BinsReport {
  int bins = 0;
  std::int64_t balls = 0;
  int trials = 0;
  std::vector<int> minLoad;    // per trial
  std::vector<int> maxLoad;
  std::vector<double> meanLoad;
  double fracWithin(double lo, double hi) const; // trials with every load in [lo, hi]
  double fracMaxAtMost(double cap) const;
};

BinsReport ballsBins(int bins, std::int64_t balls, int trials, std::uint64_t seed);

void writeBinsCsv(const BinsReport& report, const std::string& path);

} // namespace hcsim
