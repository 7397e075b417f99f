#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hcsim/types.hpp"

namespace hcsim {

enum class Phase : std::uint8_t { p1 = 1, p2 = 2, p3 = 3, extra = 4 };

enum class EventKind : std::uint8_t { tdma, mimo, recurse, direct };

// One aggregated schedule segment. Per-slot granularity is never stored;
// an event covers the half-open slot range [slotStart, slotEnd) for one
// cluster (or the whole network when cluster is -1). Events of parallel
// clusters overlap in time.
struct TraceEvent {
  Slots slotStart = 0;
  Slots slotEnd = 0;
  Phase phase = Phase::p1;
  std::uint8_t level = 1; // recursion depth, 1 = top
  std::int32_t cluster = -1;
  EventKind kind = EventKind::tdma;
  Bits payloadBits = 0;
  std::vector<std::uint32_t> deliveries; // ledger entries decoded at slotEnd
};

struct BitBatch {
  NodeId source = -1;
  NodeId destination = -1;
  Bits size = 0;
  Slots departureSlot = -1;
  Slots arrivalSlot = -1;
};

struct BitLedger {
  std::vector<BitBatch> batches;
  Bits totalBits() const;
};

struct ScheduleTrace {
  Slots totalSlots = 0;
  std::array<Slots, 4> phaseSpans{0, 0, 0, 0}; // top-level phases 1..3 + appendix
  std::vector<TraceEvent> events;
};

const char* phaseName(Phase p);
const char* kindName(EventKind k);

// One JSON object per line: slot range, phase, level, cluster id, event
// kind, payload bits, delivery count.
void writeJsonLines(const ScheduleTrace& trace, std::ostream& out);

} // namespace hcsim
