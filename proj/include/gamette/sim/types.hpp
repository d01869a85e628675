#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gamette::sim {

using Units = std::int64_t;
using Money = double;
using Week = int;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class StepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Role { Manufacturer, Wholesaler, HealthCenter };

// How a wholesaler rations on-hand stock when it cannot cover everything owed.
enum class AllocationPolicy { Hc1First, Hc2First, Proportional };

// How a health center divides its demand across its wholesalers.
enum class SplitRule { Equal, Trust };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Manufacturer: return "manufacturer";
    case Role::Wholesaler: return "wholesaler";
    case Role::HealthCenter: return "health-center";
  }
  return "?";
}

inline std::optional<Role> parse_role(std::string_view s) {
  if (s == "manufacturer") return Role::Manufacturer;
  if (s == "wholesaler") return Role::Wholesaler;
  if (s == "health-center") return Role::HealthCenter;
  return std::nullopt;
}

inline std::string_view to_string(AllocationPolicy p) {
  switch (p) {
    case AllocationPolicy::Hc1First: return "hc1_first";
    case AllocationPolicy::Hc2First: return "hc2_first";
    case AllocationPolicy::Proportional: return "proportional";
  }
  return "?";
}

inline std::optional<AllocationPolicy> parse_allocation_policy(std::string_view s) {
  if (s == "hc1_first") return AllocationPolicy::Hc1First;
  if (s == "hc2_first") return AllocationPolicy::Hc2First;
  if (s == "proportional") return AllocationPolicy::Proportional;
  return std::nullopt;
}

inline std::string_view to_string(SplitRule r) {
  return r == SplitRule::Equal ? "equal" : "trust";
}

inline std::optional<SplitRule> parse_split_rule(std::string_view s) {
  if (s == "equal") return SplitRule::Equal;
  if (s == "trust") return SplitRule::Trust;
  return std::nullopt;
}

struct Ledger {
  Money revenue = 0;
  Money holding_cost = 0;
  Money stockout_cost = 0;

  Money profit() const { return revenue - holding_cost - stockout_cost; }

  Ledger& operator+=(const Ledger& o) {
    revenue += o.revenue;
    holding_cost += o.holding_cost;
    stockout_cost += o.stockout_cost;
    return *this;
  }
  friend bool operator==(const Ledger&, const Ledger&) = default;
};

// Units in transit toward `destination`, available on `arrival`.
struct Shipment {
  Week arrival = 0;
  Units units = 0;
  std::size_t destination = 0;
  friend bool operator==(const Shipment&, const Shipment&) = default;
};

// An order sitting in the supplier's inbox until `due`.
struct PendingOrder {
  Week due = 0;
  std::size_t supplier = 0;
  std::size_t customer = 0;
  Units units = 0;
  friend bool operator==(const PendingOrder&, const PendingOrder&) = default;
};

}  // namespace gamette::sim
