#pragma once

#include <cmath>

#include "gamette/sim/types.hpp"

namespace gamette::protocol {

// One ticket for finishing plus one per full $1000 of profit above the cohort mean.
inline long raffle_tickets(sim::Money profit, sim::Money cohort_mean) {
  const double excess = std::floor((profit - cohort_mean) / 1000.0);
  return 1 + (excess > 0 ? static_cast<long>(excess) : 0L);
}

}  // namespace gamette::protocol
