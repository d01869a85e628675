#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gamette/sim/types.hpp"

namespace gamette::sim {

// Splits `total` into integer parts proportional to integer `weights` using
// the largest-remainder method. Ties go to the lower index. A zero weight sum
// yields all zeros.
inline std::vector<Units> largest_remainder(Units total, std::span<const Units> weights) {
  std::vector<Units> parts(weights.size(), 0);
  Units weight_sum = std::accumulate(weights.begin(), weights.end(), Units{0});
  if (weight_sum <= 0 || total <= 0) return parts;

  std::vector<Units> remainder(weights.size(), 0);
  Units assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    // total * w can exceed 64 bits only for absurd inputs; widen anyway.
    const __int128 scaled = static_cast<__int128>(total) * weights[i];
    parts[i] = static_cast<Units>(scaled / weight_sum);
    remainder[i] = static_cast<Units>(scaled % weight_sum);
    assigned += parts[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) parts[order[k % order.size()]] += 1;
  return parts;
}

// Real-valued shares variant; shares need not be normalized.
inline std::vector<Units> largest_remainder(Units total, std::span<const double> shares) {
  std::vector<Units> parts(shares.size(), 0);
  const double share_sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  if (share_sum <= 0.0 || total <= 0) return parts;

  std::vector<double> remainder(shares.size(), 0.0);
  Units assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double quota = static_cast<double>(total) * shares[i] / share_sum;
    parts[i] = static_cast<Units>(std::floor(quota));
    remainder[i] = quota - static_cast<double>(parts[i]);
    assigned += parts[i];
  }
  // Rounding in the quota can overshoot by one; trim from the smallest remainder.
  while (assigned > total) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < shares.size(); ++i)
      if (parts[i] > 0 && (parts[worst] == 0 || remainder[i] < remainder[worst])) worst = i;
    parts[worst] -= 1;
    --assigned;
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) parts[order[k % order.size()]] += 1;
  return parts;
}

// Inputs of the order-up-to rule as seen by one agent.
struct PositionInputs {
  Units on_hand = 0;
  Units pipeline = 0;     // shipped toward the agent, not yet received
  Units outstanding = 0;  // ordered, not yet shipped by the supplier
  Units backlog = 0;      // owed to customers

  Units inventory_position() const { return on_hand + pipeline + outstanding - backlog; }
};

// Quantity that raises the inventory position to `level`; never negative.
inline Units order_up_to_suggestion(const PositionInputs& in, Units level) {
  return std::max<Units>(0, level - in.inventory_position());
}

// Per-supplier trust held by a health center. Scores live in [floor, 1].
struct TrustState {
  std::vector<double> scores;
  double smoothing = 0.2;
  double floor = 0.05;

  std::vector<double> shares() const {
    std::vector<double> out(scores.size(), 0.0);
    const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
    if (scores.empty()) return out;
    if (sum <= 0.0) {
      std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(scores.size()));
      return out;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] / sum;
    return out;
  }
  friend bool operator==(const TrustState&, const TrustState&) = default;
};

// Exponential smoothing of the observed fill rate, clamped to [floor, 1].
inline TrustState trust_update(TrustState trust, std::span<const double> fill_rates) {
  if (fill_rates.size() != trust.scores.size())
    throw std::invalid_argument("trust_update: one fill rate per supplier required");
  for (double f : fill_rates)
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("trust_update: fill rate outside [0,1]");
  for (std::size_t i = 0; i < fill_rates.size(); ++i) {
    const double next = (1.0 - trust.smoothing) * trust.scores[i] + trust.smoothing * fill_rates[i];
    trust.scores[i] = std::clamp(next, trust.floor, 1.0);
  }
  return trust;
}

// Divides a health center's demand across its suppliers.
inline std::vector<Units> split_demand(Units demand, SplitRule rule, const TrustState& trust) {
  if (demand < 0) throw std::invalid_argument("split_demand: negative demand");
  const std::size_t n = trust.scores.size();
  if (n == 0) return {};
  if (rule == SplitRule::Equal) {
    const std::vector<Units> ones(n, 1);
    return largest_remainder(demand, std::span<const Units>(ones));
  }
  const auto shares = trust.shares();
  return largest_remainder(demand, std::span<const double>(shares));
}

// Rations `on_hand` across customer `demands`. When stock covers everything the
// allocation is simply the demand vector.
inline std::vector<Units> allocate(Units on_hand, std::span<const Units> demands, AllocationPolicy policy) {
  if (on_hand < 0) throw std::invalid_argument("allocate: negative on-hand");
  for (Units d : demands)
    if (d < 0) throw std::invalid_argument("allocate: negative demand");
  const Units total = std::accumulate(demands.begin(), demands.end(), Units{0});
  if (on_hand >= total) return {demands.begin(), demands.end()};

  if (policy == AllocationPolicy::Proportional) return largest_remainder(on_hand, demands);

  std::vector<std::size_t> order(demands.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (policy == AllocationPolicy::Hc2First && order.size() >= 2) std::swap(order[0], order[1]);

  std::vector<Units> out(demands.size(), 0);
  Units left = on_hand;
  for (std::size_t i : order) {
    out[i] = std::min(left, demands[i]);
    left -= out[i];
  }
  return out;
}

}  // namespace gamette::sim
