#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "gamette/sim/engine.hpp"

namespace gamette::harness {

// Runs the scenario with every agent automated.
inline std::vector<sim::WeekReport> run_standalone(const sim::ScenarioConfig& scenario, int weeks) {
  if (weeks < 0) throw std::invalid_argument("weeks must be >= 0");
  auto state = sim::build_network(sim::standalone(scenario));
  std::vector<sim::WeekReport> out;
  out.reserve(static_cast<std::size_t>(weeks));
  for (int i = 0; i < weeks; ++i) out.push_back(sim::step_in_place(state, std::nullopt));
  return out;
}

namespace detail {
inline std::string slot_list(const std::vector<std::size_t>& agents, const std::vector<sim::Units>& units,
                             const sim::SimState& s) {
  std::string out;
  for (std::size_t k = 0; k < units.size() && k < agents.size(); ++k) {
    if (!out.empty()) out += ';';
    out += s.spec(agents[k]).id + ":" + std::to_string(units[k]);
  }
  return out;
}
}  // namespace detail

// One row per (week, agent). shipped_to / ordered_from list per-partner
// units as "ID:units;ID:units".
inline void write_trajectory(std::ostream& out, const sim::ScenarioConfig& scenario,
                             const std::vector<sim::WeekReport>& reports) {
  const auto s = sim::build_network(sim::standalone(scenario));
  out << "week,agent,role,inventory_before,receipts,demand,shipments,sales,backlog_before,backlog_after,"
         "inventory_after,orders_placed,suggestion,capacity,revenue,holding_cost,stockout_cost,shipped_to,"
         "ordered_from\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.agents.size(); ++i) {
      const auto& a = r.agents[i];
      out << r.week << ',' << s.spec(i).id << ',' << sim::to_string(s.spec(i).role) << ',' << a.inventory_before
          << ',' << a.receipts << ',' << a.demand << ',' << a.shipments << ',' << a.sales << ',' << a.backlog_before
          << ',' << a.backlog_after << ',' << a.inventory_after << ',' << a.orders_placed << ',' << a.suggestion << ','
          << a.capacity << ',' << a.delta.revenue << ',' << a.delta.holding_cost << ',' << a.delta.stockout_cost << ','
          << detail::slot_list(s.network.customers[i], a.shipped_to, s) << ','
          << detail::slot_list(s.network.suppliers[i], a.ordered_from, s) << '\n';
    }
}

inline void write_trajectory(const std::filesystem::path& path, const sim::ScenarioConfig& scenario,
                             const std::vector<sim::WeekReport>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trajectory(out, scenario, reports);
}

}  // namespace gamette::harness
