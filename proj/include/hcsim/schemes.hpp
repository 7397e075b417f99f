#pragma once

#include <cstdint>
#include <vector>

#include "hcsim/analytic.hpp"
#include "hcsim/mac.hpp"
#include "hcsim/netmodel.hpp"
#include "hcsim/trace.hpp"

namespace hcsim {

struct SchemeOptions {
  int reuse = 1;               // 1 = all clusters concurrent, 9 = 3x3 classes
  bool reserveFrames = false;  // size cooperate phases by their w.h.p. budgets
  Clusterer clusterer;         // injectable for balanced oracle instances
  std::uint64_t seed = 1;      // session source-selection draws
};

struct BuiltSchedule {
  ScheduleTrace trace;
  BitLedger ledger;
  Bits bulkSize = 0;
  std::int64_t sessions = 0; // 0 for non-sessionized schemes
};

// One-level cooperation: TDMA spread inside clusters of m1, one MIMO slot
// batch per pair, quantize-and-collect. Pairs that share a cluster skip the
// phases and are served by direct TDMA appended after phase 3. Quant bits
// come from net.channel.
BuiltSchedule buildThreePhase(const Network& net, int m1, const SchemeOptions& opt = {});

// Recursive hierarchy; sizes = cluster sizes coarse to fine, bulk per pair =
// product of sizes. buildThreePhase is the single-entry case.
BuiltSchedule buildHLevel(const Network& net, const std::vector<int>& sizes,
                          const SchemeOptions& opt = {});

// Hierarchy with both cooperation phases handed to the recursive exchange
// schedule (recursiveMac) instead of nested unicast sessions.
BuiltSchedule buildModifiedHier(const Network& net, int m, int macLevels,
                                const SchemeOptions& opt = {});

// Sessionized one-level scheme: each session serves one source per active
// cluster; phase 1 is a fixed M-slot frame, phase 2 one MIMO slot per served
// pair, phase 3 per-cluster TDMA driven by realized destination counts.
BuiltSchedule buildSession(const Network& net, int m, SessionVariant variant,
                           const SchemeOptions& opt = {});

// Two-scale sessionized hierarchy: per session each active large cluster
// promotes one unserved small cluster; distribute via M1 MIMO slots, local
// exchange at h1 levels, one long-range MIMO batch per served source, then a
// targeted collect at h2 levels.
BuiltSchedule buildSessionHier(const Network& net, int m1, int m2, int h1, int h2,
                               SessionVariant variant, const SchemeOptions& opt = {});

} // namespace hcsim
