#pragma once

#include <cstdint>

// Frozen calibration constants. Regenerate with tools/calibrate; the values
// below are copied from its output and should not be edited by hand.

namespace hcsim::calib {

// Multiplicative headroom for exchange-schedule slot bounds, measured as the
// max over the calibration grid of traced slots / m^{(h+1)/h} per bit.
inline constexpr double kMacBoundK = 8.0;      // placeholder until calibrated
inline constexpr double kGenMacBoundK = 8.0;   // placeholder until calibrated

// Session span constant: traced span <= C * analytic span on the grid.
inline constexpr double kSessionSpanC = 2.0;   // placeholder until calibrated

// Balls-into-bins seeds whose trial batches satisfy the occupancy targets.
inline constexpr std::uint64_t kBinsSeedTight = 1;  // n=256, f=n*(log2 n)^2
inline constexpr std::uint64_t kBinsSeedLoose = 1;  // n=1024, f=n

} // namespace hcsim::calib
