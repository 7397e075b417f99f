#pragma once

#include <cstdint>

namespace hcsim {

using NodeId = std::int32_t;
using Slots = std::int64_t;
using Bits = std::int64_t;

} // namespace hcsim
