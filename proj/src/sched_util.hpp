#pragma once

// Internal helpers shared by the schedule builders. Not installed.

#include <algorithm>
#include <vector>

#include "hcsim/netmodel.hpp"
#include "hcsim/types.hpp"

namespace hcsim::detail {

// Time layout of per-cell work under a spatial-reuse factor. With reuse 1
// every cell starts together and the span is the maximum; otherwise the
// color classes run as sequential rounds, each round as wide as its slowest
// cell.
struct ParallelLayout {
  Slots span = 0;
  std::vector<Slots> starts; // per cell, relative to the phase start
};

inline ParallelLayout layoutParallel(const std::vector<Slots>& work, const Clustering& part,
                                     int reuse) {
  ParallelLayout out;
  out.starts.assign(work.size(), 0);
  if (reuse <= 1) {
    for (Slots w : work) out.span = std::max(out.span, w);
    return out;
  }
  for (int color = 0; color < reuse; ++color) {
    Slots widest = 0;
    for (std::size_t c = 0; c < work.size(); ++c) {
      if (part.colorOf(static_cast<int>(c), reuse) != color) continue;
      out.starts[c] = out.span;
      widest = std::max(widest, work[c]);
    }
    out.span += widest;
  }
  return out;
}

// Share of a b-bit bulk kept by offset `o` when a source spreads it over the
// mc members of its cluster, remainder handed out from the source (offset 0)
// outward. Offset = (member - source) mod mc, so a cyclic shift s moves
// shareOf(b, mc, s) bits per pair.
inline Bits shareOf(Bits b, std::int64_t mc, std::int64_t o) {
  return b / mc + (o < b % mc ? 1 : 0);
}

} // namespace hcsim::detail
