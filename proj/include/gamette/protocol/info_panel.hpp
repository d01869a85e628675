#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamette/protocol/condition.hpp"
#include "gamette/sim/engine.hpp"

namespace gamette::protocol {

struct CustomerNote {
  std::string customer;
  std::string behavior;
  friend bool operator==(const CustomerNote&, const CustomerNote&) = default;
};

// Extra information granted by the condition. Absent fields are not shown.
struct InfoPanel {
  std::optional<sim::Units> manufacturer_inventory;
  std::optional<std::vector<std::pair<std::string, double>>> delivery_rates;
  std::optional<std::vector<CustomerNote>> customer_behavior;
  friend bool operator==(const InfoPanel&, const InfoPanel&) = default;

  bool empty() const { return !manufacturer_inventory && !delivery_rates && !customer_behavior; }
};

inline std::string behavior_text(sim::SplitRule rule) {
  return rule == sim::SplitRule::Trust
             ? "orders less from a wholesaler that fails to deliver consistently"
             : "splits its orders equally between wholesalers";
}

inline InfoPanel visible_info(const Condition& condition, const sim::SimState& state,
                              std::optional<std::size_t> agent = std::nullopt) {
  InfoPanel panel;
  if (condition.info == InfoLevel::None) return panel;
  const auto who = agent ? agent : state.controlled();
  if (!who) return panel;
  const auto supplier = state.network.suppliers[*who].front();
  panel.manufacturer_inventory = state.agents[supplier].on_hand;
  if (condition.info == InfoLevel::Partial) return panel;

  std::vector<std::pair<std::string, double>> rates;
  std::vector<CustomerNote> notes;
  for (std::size_t k = 0; k < state.network.customers[*who].size(); ++k) {
    const auto hc = state.network.customers[*who][k];
    rates.emplace_back(state.spec(hc).id, state.delivery_rate[*who][k]);
    notes.push_back({state.spec(hc).id, behavior_text(state.spec(hc).split)});
  }
  panel.delivery_rates = std::move(rates);
  panel.customer_behavior = std::move(notes);
  return panel;
}

}  // namespace gamette::protocol
