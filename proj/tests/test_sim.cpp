#include <gtest/gtest.h>

#include "gamette/sim/engine.hpp"
#include "sim_properties.hpp"

using namespace gamette::sim;

namespace {

ExternalDecision follow(const SimState& s) {
  const auto v = observe(s);
  return {v.suggestion, AllocationPolicy::Proportional};
}

std::size_t slot_of(const SimState& s, std::size_t hc, std::string_view ws) {
  const auto& sup = s.network.suppliers[hc];
  return static_cast<std::size_t>(std::find(sup.begin(), sup.end(), s.index(ws)) - sup.begin());
}

ScenarioConfig zero_scenario() { return load_scenario(GAMETTE_DATA_DIR "/scenarios/zero-demand.json"); }

}  // namespace

TEST(Network, DefaultHasSixAgentsWithWs1Controlled) {
  const auto s = build_network(default_scenario());
  ASSERT_EQ(s.agents.size(), 6u);
  ASSERT_TRUE(s.controlled());
  EXPECT_EQ(s.spec(*s.controlled()).id, "WS1");
  EXPECT_EQ(s.network.suppliers[s.index("WS1")], std::vector<std::size_t>{s.index("MN1")});
  EXPECT_EQ(s.network.customers[s.index("WS1")].size(), 2u);
}

TEST(Network, ZeroDemandHasZeroFlowsAndCosts) {
  auto s = build_network(standalone(zero_scenario()));
  for (int k = 0; k < 10; ++k) {
    const auto r = step_in_place(s, std::nullopt);
    for (const auto& a : r.agents) {
      EXPECT_EQ(a.receipts, 0);
      EXPECT_EQ(a.shipments, 0);
      EXPECT_EQ(a.demand, 0);
      EXPECT_EQ(a.orders_placed, 0);
      EXPECT_EQ(a.delta.revenue, 0);
      EXPECT_EQ(a.delta.stockout_cost, 0);
      EXPECT_EQ(a.delta.holding_cost, 0);
    }
  }
}

TEST(Network, UndisruptedRunIsStationary) {
  auto s = build_network(default_scenario());
  const auto first = step_in_place(s, follow(s));
  for (int k = 1; k < 10; ++k) {
    const auto r = step_in_place(s, follow(s));
    EXPECT_TRUE(r.same_flows(first)) << "week " << r.week;
  }
}

TEST(Network, RejectsInvalidConfigs) {
  auto c = default_scenario();
  c.topology.links.push_back({"WS1", "WS2"});
  EXPECT_THROW(build_network(c), ConfigError);
  c = default_scenario();
  c.topology.agents[0].capacity = 10;  // below steady demand
  EXPECT_THROW(build_network(c), ConfigError);
}

TEST(Step, OrderArrivesTwoWeeksLater) {
  auto s = build_network(default_scenario());
  for (int k = 0; k < 3; ++k) step_in_place(s, follow(s));
  const auto ws1 = s.index("WS1");
  const Week t = s.week;
  const Units extra = 37;
  auto d = follow(s);
  d.order += extra;
  const auto base = step_in_place(s, d);
  EXPECT_EQ(base.agents[ws1].orders_placed, d.order);
  const auto r1 = step_in_place(s, follow(s));
  const auto r2 = step_in_place(s, follow(s));
  EXPECT_EQ(r2.week, t + 2);
  EXPECT_EQ(r2.agents[ws1].receipts, d.order);
  EXPECT_NE(r1.agents[ws1].receipts, d.order);
}

TEST(Step, ZeroOrderZeroDemandOnlyAdvancesWeek) {
  auto s = build_network(zero_scenario());
  const auto before = s;
  auto [next, report] = step(s, ExternalDecision{0, std::nullopt});
  EXPECT_EQ(next.week, before.week + 1);
  next.week = before.week;
  EXPECT_EQ(next, before);
}

TEST(Step, DisruptionClampsProduction) {
  auto c = default_scenario();
  c.disruptions = {standard_disruption("MN1")};
  auto s = build_network(c);
  const auto mn1 = s.index("MN1");
  while (s.week <= 40) {
    const auto r = step_in_place(s, follow(s));
    if (r.week >= 28 && r.week <= 33) {
      EXPECT_EQ(r.agents[mn1].capacity, 7);  // floor(0.05 * 150)
      EXPECT_LE(r.agents[mn1].orders_placed, 7);
    } else {
      EXPECT_EQ(r.agents[mn1].capacity, 150);
    }
  }
}

TEST(Step, MissingOrSpuriousDecisionIsRejected) {
  auto s = build_network(default_scenario());
  EXPECT_THROW(step(s, std::nullopt), StepError);
  EXPECT_THROW(step(s, ExternalDecision{-1, std::nullopt}), StepError);
  auto a = build_network(standalone(default_scenario()));
  EXPECT_THROW(step(a, ExternalDecision{0, std::nullopt}), StepError);
}

TEST(Step, ShortStockRequiresAllocation) {
  auto c = default_scenario();
  c.disruptions = {standard_disruption("MN1")};
  auto s = build_network(c);
  while (!observe(s).needs_allocation) step_in_place(s, follow(s));
  const auto v = observe(s);
  EXPECT_THROW(step(s, ExternalDecision{v.suggestion, std::nullopt}), StepError);
  ManualAllocation bad{{v.on_hand, 0}};
  bad.units[0] = std::min(v.on_hand, v.due[0]) - 1;
  EXPECT_THROW(step(s, ExternalDecision{0, Allocation{bad}}), StepError);
  ManualAllocation ok{{std::min(v.on_hand, v.due[0]), 0}};
  ok.units[1] = v.on_hand - ok.units[0];
  auto [next, r] = step(s, ExternalDecision{0, Allocation{ok}});
  EXPECT_EQ(r.agents[s.index("WS1")].shipped_to, ok.units);
}

TEST(Suggestion, HandComputedCases) {
  EXPECT_EQ(order_up_to_suggestion({40, 20, 10, 10}, 100), 40);
  EXPECT_EQ(order_up_to_suggestion({100, 0, 0, 0}, 100), 0);
  EXPECT_EQ(order_up_to_suggestion({150, 20, 0, 0}, 100), 0);
}

TEST(Split, EqualAndTrustShares) {
  TrustState equal{{1.0, 1.0}};
  EXPECT_EQ(split_demand(100, SplitRule::Equal, equal), (std::vector<Units>{50, 50}));
  EXPECT_EQ(split_demand(100, SplitRule::Trust, equal), (std::vector<Units>{50, 50}));
  TrustState skew{{0.25, 0.75}};
  EXPECT_EQ(split_demand(100, SplitRule::Trust, skew), (std::vector<Units>{25, 75}));
  EXPECT_EQ(split_demand(101, SplitRule::Equal, equal), (std::vector<Units>{51, 50}));
}

TEST(Trust, EmaAndFixedPoints) {
  TrustState t{{1.0}};
  const double half[] = {0.5};
  EXPECT_DOUBLE_EQ(trust_update(t, half).scores[0], 0.9);
  const double one[] = {1.0}, zero[] = {0.0};
  TrustState up{{0.3}}, down{{1.0}};
  for (int k = 0; k < 200; ++k) {
    up = trust_update(up, one);
    down = trust_update(down, zero);
  }
  EXPECT_NEAR(up.scores[0], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(down.scores[0], 0.05);
  const double bad[] = {1.5};
  EXPECT_THROW(trust_update(t, bad), std::invalid_argument);
}

TEST(Allocate, PriorityAndProportional) {
  const Units demands[] = {60, 40};
  EXPECT_EQ(allocate(80, demands, AllocationPolicy::Hc1First), (std::vector<Units>{60, 20}));
  EXPECT_EQ(allocate(80, demands, AllocationPolicy::Hc2First), (std::vector<Units>{40, 40}));
  EXPECT_EQ(allocate(80, demands, AllocationPolicy::Proportional), (std::vector<Units>{48, 32}));
  EXPECT_EQ(allocate(79, demands, AllocationPolicy::Proportional), (std::vector<Units>{47, 32}));
  EXPECT_EQ(allocate(200, demands, AllocationPolicy::Proportional), (std::vector<Units>{60, 40}));
}

TEST(LargestRemainder, SumsExactly) {
  const double shares[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto v = largest_remainder(100, std::span<const double>(shares));
  EXPECT_EQ(v[0] + v[1] + v[2], 100);
  EXPECT_EQ(v, (std::vector<Units>{34, 33, 33}));
}

TEST(Dynamics, DisruptionShiftsHc1OrdersDuringShortage) {
  auto window = [](const char* target) {
    auto c = default_scenario();
    if (target) c.disruptions = {standard_disruption(target)};
    auto s = build_network(c);
    const auto hc1 = s.index("HC1");
    const auto slot = slot_of(s, hc1, "WS1");
    Units sum = 0;
    while (s.week <= 55) {
      const auto r = step_in_place(s, follow(s));
      if (r.week >= 32 && r.week <= 36) sum += r.agents[hc1].ordered_from[slot];
    }
    return sum;
  };
  const auto base = window(nullptr);
  EXPECT_LT(window("MN1"), base);
  EXPECT_GT(window("MN2"), base);
}

TEST(Properties, FuzzedRunKeepsInvariants) {
  const auto out = gamette::testing::fuzz_run(11, 2000);
  EXPECT_EQ(out.failure, "");
  EXPECT_GT(out.shortage_weeks, 20u);  // the run must exercise rationing
}

TEST(Properties, SeededRunsAreIdentical) {
  const auto a = gamette::testing::fuzz_run(5, 500);
  const auto b = gamette::testing::fuzz_run(5, 500);
  EXPECT_EQ(a.reports, b.reports);
  EXPECT_EQ(a.final_state, b.final_state);
}

TEST(Scenario, JsonRoundTripAndBundledFiles) {
  auto c = default_scenario();
  c.disruptions = {standard_disruption("MN2")};
  EXPECT_EQ(scenario_from_json(to_json(c)), c);
  const std::string dir = GAMETTE_DATA_DIR "/scenarios/";
  EXPECT_EQ(load_scenario(dir + "default.json"), default_scenario());
  EXPECT_EQ(load_scenario(dir + "mn1.json").disruptions, std::vector<DisruptionEvent>{standard_disruption("MN1")});
  EXPECT_EQ(load_scenario(dir + "mn2.json").disruptions, std::vector<DisruptionEvent>{standard_disruption("MN2")});
  for (const auto& a : zero_scenario().topology.agents) EXPECT_EQ(a.demand, 0);
  auto j = to_json(c);
  j["schema_version"] = 99;
  EXPECT_THROW(scenario_from_json(j), ConfigError);
}
