#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gamette/sim/engine.hpp"

// Invariant checks over engine runs, shared by unit and acceptance tests.
namespace gamette::testing {

using namespace gamette::sim;

inline Units units_in_system(const SimState& s) {
  Units u = 0;
  for (std::size_t i = 0; i < s.agents.size(); ++i)
    if (s.spec(i).role != Role::HealthCenter) u += s.agents[i].on_hand + detail::pipeline_units(s.agents[i]);
  return u;
}

// Empty string when every invariant holds for the week `r` taking `before` to `after`.
inline std::string check_week(const SimState& before, const SimState& after, const WeekReport& r) {
  auto fail = [&](const std::string& what, std::size_t i) {
    return "week " + std::to_string(r.week) + " " + before.spec(i).id + ": " + what;
  };
  Units produced = 0, consumed = 0;
  for (std::size_t i = 0; i < r.agents.size(); ++i) {
    const auto& a = r.agents[i];
    const auto role = before.spec(i).role;
    if (role == Role::HealthCenter) {
      consumed += a.receipts;
      continue;
    }
    if (a.inventory_after != a.inventory_before + a.receipts - a.shipments) return fail("inventory balance", i);
    if (a.backlog_after != a.backlog_before + a.demand - a.sales) return fail("backlog balance", i);
    if (a.inventory_after < 0 || a.backlog_after < 0) return fail("negative stock or backlog", i);
    // Allocation completeness: stock is never held back while anything is owed.
    const Units available = a.inventory_before + a.receipts;
    const Units owed = a.backlog_before + a.demand;
    if (a.sales != std::min(available, owed)) return fail("allocation incomplete", i);
    Units shipped = 0;
    for (auto u : a.shipped_to) shipped += u;
    if (shipped != a.sales) return fail("per-customer shipments do not add up", i);
    if (role == Role::Manufacturer) {
      produced += a.orders_placed;
      const Units cap = detail::effective_capacity(before, i, r.week);
      if (a.capacity != cap || a.orders_placed > cap) return fail("production above capacity", i);
      for (const auto& d : before.config.disruptions)
        if (d.target == before.spec(i).id && d.active(r.week) &&
            a.orders_placed > static_cast<Units>(std::floor(d.capacity_fraction * before.spec(i).capacity)))
          return fail("disruption clamp violated", i);
    }
  }
  if (units_in_system(after) != units_in_system(before) + produced - consumed) return fail("units not conserved", 0);
  return {};
}

// Shipments of week w arrive exactly one week later; production takes the
// configured lead time.
inline std::string check_lead_times(const SimState& s, const std::vector<WeekReport>& reports) {
  const Week lt = s.config.production_lead_time;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      const auto& spec = s.spec(i);
      if (spec.role == Role::Wholesaler && k >= 1) {
        const auto mn = s.network.suppliers[i].front();
        const auto slot = s.network.customer_slot(mn, i);
        if (reports[k].agents[i].receipts != reports[k - 1].agents[mn].shipped_to[slot])
          return "week " + std::to_string(reports[k].week) + " " + spec.id + ": receipts differ from last week's shipment";
      }
      if (spec.role == Role::Manufacturer && k >= static_cast<std::size_t>(lt)) {
        if (reports[k].agents[i].receipts != reports[k - static_cast<std::size_t>(lt)].agents[i].orders_placed)
          return "week " + std::to_string(reports[k].week) + " " + spec.id + ": production lead time violated";
      }
    }
  }
  return {};
}

// Scenario with random disruption windows across a long horizon.
inline ScenarioConfig fuzz_scenario(std::uint64_t seed, int weeks) {
  auto c = default_scenario();
  std::mt19937_64 rng(seed);
  for (Week w = c.start_week + 5; w < c.start_week + weeks; w += 20 + static_cast<int>(rng() % 40)) {
    const Week len = 1 + static_cast<int>(rng() % 8);
    c.disruptions.push_back({rng() % 2 ? "MN1" : "MN2", w, w + len - 1, 0.05});
  }
  return c;
}

// Random but valid decision for the controlled wholesaler.
inline ExternalDecision fuzz_decision(const SimState& s, std::mt19937_64& rng) {
  const auto v = observe(s);
  ExternalDecision d;
  // Mostly around the suggestion so stock stays lean; sometimes zero or wild.
  switch (rng() % 10) {
    case 0: d.order = 0; break;
    case 1: d.order = static_cast<Units>(rng() % 401); break;
    default: d.order = v.suggestion * static_cast<Units>(50 + rng() % 100) / 100;
  }
  if (!v.needs_allocation) return d;
  switch (rng() % 4) {
    case 0: d.allocation = AllocationPolicy::Hc1First; break;
    case 1: d.allocation = AllocationPolicy::Hc2First; break;
    case 2: d.allocation = AllocationPolicy::Proportional; break;
    default: {
      ManualAllocation m;
      Units left = v.on_hand;
      m.units.assign(v.due.size(), 0);
      const std::size_t first = rng() % v.due.size();
      for (std::size_t j = 0; j < v.due.size(); ++j) {
        const auto k = (first + j) % v.due.size();
        const Units give = j + 1 == v.due.size() ? std::min(left, v.due[k])
                                                 : std::min<Units>(v.due[k], static_cast<Units>(rng() % (left + 1)));
        m.units[k] = give;
        left -= give;
      }
      // Hand any remainder to whoever still has room.
      for (std::size_t k = 0; k < v.due.size() && left > 0; ++k) {
        const Units extra = std::min(left, v.due[k] - m.units[k]);
        m.units[k] += extra;
        left -= extra;
      }
      d.allocation = m;
    }
  }
  return d;
}

struct FuzzOutcome {
  std::string failure;  // empty when every week passed
  std::vector<WeekReport> reports;
  SimState final_state;
  std::size_t shortage_weeks = 0;  // weeks the controlled wholesaler had to ration
};

inline FuzzOutcome fuzz_run(std::uint64_t seed, int weeks) {
  FuzzOutcome out;
  auto s = build_network(fuzz_scenario(seed, weeks));
  std::mt19937_64 rng(seed ^ 0xf00d);
  out.reports.reserve(static_cast<std::size_t>(weeks));
  for (int k = 0; k < weeks; ++k) {
    const auto d = fuzz_decision(s, rng);
    out.shortage_weeks += d.allocation.has_value();
    SimState before = s;
    auto r = step_in_place(s, d);
    if (out.failure.empty()) out.failure = check_week(before, s, r);
    out.reports.push_back(std::move(r));
  }
  if (out.failure.empty()) out.failure = check_lead_times(s, out.reports);
  out.final_state = std::move(s);
  return out;
}

}  // namespace gamette::testing
