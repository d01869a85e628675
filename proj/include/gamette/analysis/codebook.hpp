#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

// Situation-awareness coding frame: each coded thought is a tuple
// <level, topic, description>.
namespace gamette::analysis {

enum class SaLevel { Perception, Comprehension, Projection };
inline constexpr std::array kSaLevels{SaLevel::Perception, SaLevel::Comprehension, SaLevel::Projection};

enum class Topic {
  InventoryCost,
  BacklogCost,
  Costs,
  Profit,
  Inventory,
  Demand,
  Backlog,
  Order,
  General,
  SupplyLine,
  Allocation,
};

enum class Description {
  Increase,
  Decrease,
  Consistent,
  Zero,
  OverOrder,
  UnderOrder,
  Positive,
  Negative,
  Neutral,
  Uncertain,
  Improve,
  AnticipateProblem,
  Constant,
  Proportionally,
  HigherDeliveryRate,
  Hc2,
};

inline std::string_view to_string(SaLevel l) {
  switch (l) {
    case SaLevel::Perception: return "perception";
    case SaLevel::Comprehension: return "comprehension";
    case SaLevel::Projection: return "projection";
  }
  return "?";
}

inline std::string_view to_string(Topic t) {
  switch (t) {
    case Topic::InventoryCost: return "inventory cost";
    case Topic::BacklogCost: return "backlog cost";
    case Topic::Costs: return "costs";
    case Topic::Profit: return "profit";
    case Topic::Inventory: return "inventory";
    case Topic::Demand: return "demand";
    case Topic::Backlog: return "backlog";
    case Topic::Order: return "order";
    case Topic::General: return "general";
    case Topic::SupplyLine: return "supply line";
    case Topic::Allocation: return "allocation";
  }
  return "?";
}

inline std::string_view to_string(Description d) {
  switch (d) {
    case Description::Increase: return "increase";
    case Description::Decrease: return "decrease";
    case Description::Consistent: return "consistent";
    case Description::Zero: return "zero";
    case Description::OverOrder: return "over-order";
    case Description::UnderOrder: return "under-order";
    case Description::Positive: return "positive";
    case Description::Negative: return "negative";
    case Description::Neutral: return "neutral";
    case Description::Uncertain: return "uncertain";
    case Description::Improve: return "improve";
    case Description::AnticipateProblem: return "anticipate problem/uncertainty";
    case Description::Constant: return "constant";
    case Description::Proportionally: return "proportionally";
    case Description::HigherDeliveryRate: return "HC with higher delivery rate";
    case Description::Hc2: return "HC2";
  }
  return "?";
}

namespace detail {
template <class E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<E, N>& all) {
  for (auto e : all)
    if (to_string(e) == s) return e;
  return std::nullopt;
}
}  // namespace detail

inline constexpr std::array kTopics{Topic::InventoryCost, Topic::BacklogCost, Topic::Costs,  Topic::Profit,
                                   Topic::Inventory,     Topic::Demand,      Topic::Backlog, Topic::Order,
                                   Topic::General,       Topic::SupplyLine,  Topic::Allocation};
inline constexpr std::array kDescriptions{
    Description::Increase, Description::Decrease,          Description::Consistent, Description::Zero,
    Description::OverOrder, Description::UnderOrder,       Description::Positive,   Description::Negative,
    Description::Neutral,  Description::Uncertain,         Description::Improve,    Description::AnticipateProblem,
    Description::Constant, Description::Proportionally,    Description::HigherDeliveryRate, Description::Hc2};

inline std::optional<SaLevel> parse_sa_level(std::string_view s) { return detail::parse_enum(s, kSaLevels); }
inline std::optional<Topic> parse_topic(std::string_view s) { return detail::parse_enum(s, kTopics); }
inline std::optional<Description> parse_description(std::string_view s) {
  return detail::parse_enum(s, kDescriptions);
}

// Topics and descriptions admitted at each level.
inline bool topic_allowed(SaLevel l, Topic t) {
  using T = Topic;
  switch (l) {
    case SaLevel::Perception:
      return t == T::InventoryCost || t == T::BacklogCost || t == T::Costs || t == T::Profit || t == T::Inventory ||
             t == T::Demand || t == T::Backlog || t == T::Order;
    case SaLevel::Comprehension:
      return t == T::General || t == T::Inventory || t == T::Demand || t == T::Backlog || t == T::SupplyLine ||
             t == T::Order;
    case SaLevel::Projection:
      return t == T::General || t == T::Profit || t == T::Inventory || t == T::Demand || t == T::Backlog ||
             t == T::Order || t == T::Allocation;
  }
  return false;
}

inline bool description_allowed(SaLevel l, Description d) {
  using D = Description;
  switch (l) {
    case SaLevel::Perception:
      return d == D::Increase || d == D::Decrease || d == D::Consistent || d == D::Zero || d == D::OverOrder ||
             d == D::UnderOrder;
    case SaLevel::Comprehension:
      return d == D::Positive || d == D::Negative || d == D::Neutral || d == D::Uncertain;
    case SaLevel::Projection:
      return d == D::Improve || d == D::AnticipateProblem || d == D::Increase || d == D::Decrease ||
             d == D::Constant || d == D::Uncertain || d == D::Proportionally || d == D::HigherDeliveryRate ||
             d == D::Hc2;
  }
  return false;
}

struct SACode {
  SaLevel level = SaLevel::Perception;
  Topic topic = Topic::Inventory;
  Description description = Description::Increase;
  friend auto operator<=>(const SACode&, const SACode&) = default;
};

inline bool in_codebook(const SACode& c) {
  return topic_allowed(c.level, c.topic) && description_allowed(c.level, c.description);
}

}  // namespace gamette::analysis
