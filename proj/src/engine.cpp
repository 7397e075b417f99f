#include "hcsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "hcsim/errors.hpp"
#include "hcsim/rng.hpp"

namespace hcsim {

Metrics execute(const ScheduleTrace& trace, BitLedger& ledger) {
  const Bits total = ledger.totalBits();
  if (total <= 0 || trace.totalSlots <= 0)
    throw OracleMismatch("execute: degenerate schedule, zero bits or zero slots");

  for (BitBatch& b : ledger.batches) b.arrivalSlot = -1;
  for (const TraceEvent& ev : trace.events) {
    if (ev.slotEnd < ev.slotStart || ev.slotEnd > trace.totalSlots)
      throw OracleMismatch("execute: event range escapes the trace span");
    for (std::uint32_t i : ev.deliveries) {
      if (i >= ledger.batches.size())
        throw OracleMismatch("execute: delivery references a missing ledger entry");
      BitBatch& b = ledger.batches[i];
      if (b.arrivalSlot >= 0)
        throw OracleMismatch("execute: batch " + std::to_string(i) + " delivered twice");
      if (b.departureSlot < 0 || b.departureSlot > ev.slotEnd)
        throw OracleMismatch("execute: batch " + std::to_string(i) +
                             " departs outside its delivery window");
      b.arrivalSlot = ev.slotEnd;
    }
  }

  Metrics m;
  m.totalSlots = trace.totalSlots;
  m.totalBits = total;
  double weighted = 0.0;
  for (std::size_t i = 0; i < ledger.batches.size(); ++i) {
    const BitBatch& b = ledger.batches[i];
    if (b.arrivalSlot < 0)
      throw OracleMismatch("execute: bits from " + std::to_string(b.source) + " to " +
                           std::to_string(b.destination) + " were never delivered");
    const double delay = static_cast<double>(b.arrivalSlot - b.departureSlot);
    weighted += delay * static_cast<double>(b.size);
    m.maxDelay = std::max(m.maxDelay, delay);
    m.bulkSize = std::max(m.bulkSize, b.size);
  }
  m.pairsServed = static_cast<std::int64_t>(ledger.batches.size());
  m.throughput = static_cast<double>(total) / static_cast<double>(trace.totalSlots);
  m.meanDelay = weighted / static_cast<double>(total);
  m.perPairRate = m.throughput / static_cast<double>(m.pairsServed);
  return m;
}

VerifyReport verifyAgainstAnalytic(const ScheduleTrace& trace, const AnalyticResult& predicted,
                                   double tolerance) {
  VerifyReport r;
  r.tracedSlots = trace.totalSlots;
  r.predictedSlots = predicted.totalSlots;
  r.ratio = predicted.totalSlots > 0
                ? static_cast<double>(trace.totalSlots) / static_cast<double>(predicted.totalSlots)
                : 0.0;
  if (tolerance > 0.0) {
    // Bounded mode: predictions are upper-bound budgets.
    if (static_cast<double>(trace.totalSlots) >
        static_cast<double>(predicted.totalSlots) * (1.0 + tolerance)) {
      r.ok = false;
      r.firstDivergence = "total";
    }
    return r;
  }
  // Exact mode: phase-by-phase equality, naming the first phase that drifts.
  const char* names[3] = {"phase 1", "phase 2", "phase 3"};
  for (int p = 0; p < 3; ++p) {
    if (trace.phaseSpans[p] != predicted.phaseSlots[p]) {
      r.ok = false;
      r.firstDivergence = names[p];
      return r;
    }
  }
  if (trace.phaseSpans[3] != 0 && trace.totalSlots != predicted.totalSlots) {
    r.ok = false;
    r.firstDivergence = "appendix";
    return r;
  }
  if (trace.totalSlots != predicted.totalSlots) {
    r.ok = false;
    r.firstDivergence = "total";
  }
  return r;
}

double BinsReport::fracWithin(double lo, double hi) const {
  if (trials == 0) return 0.0;
  int ok = 0;
  for (int t = 0; t < trials; ++t)
    if (static_cast<double>(minLoad[t]) >= lo && static_cast<double>(maxLoad[t]) <= hi) ++ok;
  return static_cast<double>(ok) / static_cast<double>(trials);
}

double BinsReport::fracMaxAtMost(double cap) const {
  if (trials == 0) return 0.0;
  int ok = 0;
  for (int t = 0; t < trials; ++t)
    if (static_cast<double>(maxLoad[t]) <= cap) ++ok;
  return static_cast<double>(ok) / static_cast<double>(trials);
}

BinsReport ballsBins(int bins, std::int64_t balls, int trials, std::uint64_t seed) {
  if (bins < 1) throw ConstraintError("ballsBins: need at least one bin");
  if (balls < 0) throw ConstraintError("ballsBins: ball count must be >= 0");
  if (trials < 1) throw ConstraintError("ballsBins: need at least one trial");
  BinsReport r;
  r.bins = bins;
  r.balls = balls;
  r.trials = trials;
  r.minLoad.reserve(trials);
  r.maxLoad.reserve(trials);
  r.meanLoad.reserve(trials);
  std::vector<int> load(static_cast<std::size_t>(bins));
  for (int t = 0; t < trials; ++t) {
    std::fill(load.begin(), load.end(), 0);
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    for (std::int64_t i = 0; i < balls; ++i)
      ++load[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(bins)))];
    r.minLoad.push_back(*std::min_element(load.begin(), load.end()));
    r.maxLoad.push_back(*std::max_element(load.begin(), load.end()));
    r.meanLoad.push_back(static_cast<double>(balls) / static_cast<double>(bins));
  }
  return r;
}

void writeBinsCsv(const BinsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConstraintError("writeBinsCsv: cannot open " + path);
  out << "trial,maxLoad,meanLoad\n";
  char buf[64];
  for (int t = 0; t < report.trials; ++t) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.10g\n", t, report.maxLoad[t], report.meanLoad[t]);
    out << buf;
  }
}

} // namespace hcsim
