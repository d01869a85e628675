#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "gamette/sim/engine.hpp"

namespace gamette::protocol {

// Factual history shown at a meeting: one point per week, no commentary.
struct ReviewData {
  std::vector<sim::Week> weeks;
  std::vector<double> profit;
  std::vector<double> revenue;
  std::vector<double> holding_cost;
  std::vector<double> stockout_cost;
  std::vector<sim::Units> inventory;
  std::vector<sim::Units> demand;
  std::vector<sim::Units> backlog;
  std::vector<sim::Units> receipts;
  std::vector<sim::Units> orders;
  friend bool operator==(const ReviewData&, const ReviewData&) = default;
};

inline ReviewData performance_review(std::span<const sim::WeekReport> history, std::size_t agent) {
  if (history.empty()) throw std::invalid_argument("performance_review: empty history");
  ReviewData r;
  for (const auto& wr : history) {
    const auto& a = wr.agents.at(agent);
    r.weeks.push_back(wr.week);
    r.profit.push_back(a.delta.profit());
    r.revenue.push_back(a.delta.revenue);
    r.holding_cost.push_back(a.delta.holding_cost);
    r.stockout_cost.push_back(a.delta.stockout_cost);
    r.inventory.push_back(a.inventory_after);
    r.demand.push_back(a.demand);
    r.backlog.push_back(a.backlog_after);
    r.receipts.push_back(a.receipts);
    r.orders.push_back(a.orders_placed);
  }
  return r;
}

}  // namespace gamette::protocol
