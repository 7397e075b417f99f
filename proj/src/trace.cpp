#include "hcsim/trace.hpp"

#include <ostream>

namespace hcsim {

Bits BitLedger::totalBits() const {
  Bits sum = 0;
  for (const BitBatch& b : batches) sum += b.size;
  return sum;
}

const char* phaseName(Phase p) {
  switch (p) {
    case Phase::p1: return "p1";
    case Phase::p2: return "p2";
    case Phase::p3: return "p3";
    case Phase::extra: return "extra";
  }
  return "?";
}

const char* kindName(EventKind k) {
  switch (k) {
    case EventKind::tdma: return "tdma";
    case EventKind::mimo: return "mimo";
    case EventKind::recurse: return "recurse";
    case EventKind::direct: return "direct";
  }
  return "?";
}

void writeJsonLines(const ScheduleTrace& trace, std::ostream& out) {
  for (const TraceEvent& e : trace.events) {
    out << "{\"slotStart\":" << e.slotStart << ",\"slotEnd\":" << e.slotEnd << ",\"phase\":\""
        << phaseName(e.phase) << "\",\"level\":" << static_cast<int>(e.level)
        << ",\"cluster\":" << e.cluster << ",\"kind\":\"" << kindName(e.kind)
        << "\",\"payloadBits\":" << e.payloadBits << ",\"deliveries\":" << e.deliveries.size()
        << "}\n";
  }
}

} // namespace hcsim
