#include <gtest/gtest.h>

#include <map>

#include "gamette/protocol/condition.hpp"
#include "gamette/protocol/incentives.hpp"
#include "gamette/protocol/info_panel.hpp"
#include "gamette/protocol/review.hpp"
#include "gamette/protocol/schedule.hpp"
#include "gamette/sim/engine.hpp"

using namespace gamette;
using namespace gamette::protocol;

TEST(Schedule, MeetingsAndPhases) {
  const auto s = standard_schedule();
  EXPECT_EQ(s.meeting_weeks(), (std::vector<Week>{24, 28, 32, 36, 40, 44, 48, 52}));
  EXPECT_EQ(s.gameplay_weeks(), 35);
  EXPECT_TRUE(s.is_tutorial(17));
  EXPECT_TRUE(s.is_tutorial(20));
  EXPECT_FALSE(s.is_tutorial(21));
  EXPECT_FALSE(s.is_meeting_week(56));
  EXPECT_FALSE(s.is_meeting_week(26));
  EXPECT_EQ(kBubblePrompt, "How do you think we are doing Kate?");
}

TEST(Conditions, Study1IsRoughlyUniform) {
  const int n = 60000;
  std::map<std::pair<std::string, InfoLevel>, int> counts;
  for (int i = 0; i < n; ++i) {
    const auto c = assign_condition(42, static_cast<std::uint64_t>(i), Study::Study1);
    ASSERT_TRUE(is_valid(c));
    ++counts[{c.disrupted, c.info}];
  }
  ASSERT_EQ(counts.size(), 6u);
  // Each cell is Binomial(n, 1/6): sd ~ 91; allow 5 sd.
  for (const auto& [k, v] : counts) EXPECT_NEAR(v, n / 6.0, 460.0);
}

TEST(Conditions, Study2OnlyMn1NoneOrPartial) {
  std::map<InfoLevel, int> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto c = assign_condition(7, i, "study2");
    EXPECT_EQ(c.disrupted, "MN1");
    EXPECT_NE(c.info, InfoLevel::Complete);
    ++seen[c.info];
  }
  EXPECT_EQ(seen.size(), 2u);
  EXPECT_THROW(assign_condition(7, 0, "study3"), std::invalid_argument);
}

TEST(Conditions, SeededStreamsReplay) {
  ConditionAssigner a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 50; ++i) {
    const auto x = a.next(Study::Study1);
    EXPECT_EQ(x, b.next(Study::Study1));
    differs |= !(x == c.next(Study::Study1));
  }
  EXPECT_TRUE(differs);
}

namespace {

sim::SimState state_with_mn1_inventory(sim::Units inv) {
  auto s = sim::build_network(sim::default_scenario());
  s.agents[s.index("MN1")].on_hand = inv;
  return s;
}

}  // namespace

TEST(InfoPanel, NoneIsEmpty) {
  const auto s = state_with_mn1_inventory(120);
  EXPECT_TRUE(visible_info({"MN1", InfoLevel::None}, s).empty());
}

TEST(InfoPanel, PartialShowsOnlyManufacturerInventory) {
  const auto p = visible_info({"MN1", InfoLevel::Partial}, state_with_mn1_inventory(120));
  ASSERT_TRUE(p.manufacturer_inventory);
  EXPECT_EQ(*p.manufacturer_inventory, 120);
  EXPECT_FALSE(p.delivery_rates);
  EXPECT_FALSE(p.customer_behavior);
}

TEST(InfoPanel, CompleteAddsDeliveryRatesAndBehavior) {
  auto s = state_with_mn1_inventory(120);
  s.delivery_rate[s.index("WS1")] = {0.5, 1.0};
  const auto p = visible_info({"MN2", InfoLevel::Complete}, s);
  ASSERT_TRUE(p.manufacturer_inventory && p.delivery_rates && p.customer_behavior);
  EXPECT_EQ(*p.manufacturer_inventory, 120);  // WS1's own supplier regardless of the disrupted plant
  ASSERT_EQ(p.delivery_rates->size(), 2u);
  EXPECT_EQ((*p.delivery_rates)[0], (std::pair<std::string, double>{"HC1", 0.5}));
  EXPECT_EQ((*p.delivery_rates)[1], (std::pair<std::string, double>{"HC2", 1.0}));
  EXPECT_NE((*p.customer_behavior)[0].behavior, (*p.customer_behavior)[1].behavior);
}

TEST(Review, SeriesLengthMatchesHistory) {
  auto s = sim::build_network(sim::standalone(sim::default_scenario()));
  std::vector<sim::WeekReport> h;
  for (int k = 0; k < 4; ++k) h.push_back(sim::step_in_place(s, std::nullopt));
  const auto r = performance_review(h, s.index("WS1"));
  EXPECT_EQ(r.weeks, (std::vector<Week>{17, 18, 19, 20}));
  EXPECT_EQ(r.profit.size(), 4u);
  EXPECT_EQ(r.inventory.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(r.profit[k], r.revenue[k] - r.holding_cost[k] - r.stockout_cost[k]);
    EXPECT_EQ(r.demand[k], 100);  // 50 from each health center
  }
  EXPECT_THROW(performance_review({}, 0), std::invalid_argument);
}

TEST(Review, AllZeroFlowsGiveZeroSeries) {
  auto c = sim::standalone(sim::default_scenario());
  for (auto& a : c.topology.agents) a.demand = a.order_up_to = 0;
  auto s = sim::build_network(c);
  std::vector<sim::WeekReport> h;
  for (int k = 0; k < 4; ++k) h.push_back(sim::step_in_place(s, std::nullopt));
  const auto r = performance_review(h, s.index("WS1"));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(r.profit[k], 0);
    EXPECT_EQ(r.inventory[k], 0);
    EXPECT_EQ(r.orders[k], 0);
  }
}

TEST(Raffle, FloorRule) {
  EXPECT_EQ(raffle_tickets(5000, 5000), 1);
  EXPECT_EQ(raffle_tickets(7500, 5000), 3);
  EXPECT_EQ(raffle_tickets(2000, 5000), 1);
  EXPECT_EQ(raffle_tickets(5999.99, 5000), 1);
}

TEST(ScenarioFor, AppliesConditionDisruption) {
  const auto c = scenario_for(sim::default_scenario(), {"MN2", InfoLevel::Partial}, standard_schedule());
  ASSERT_EQ(c.disruptions.size(), 1u);
  EXPECT_EQ(c.disruptions[0], sim::standard_disruption("MN2"));
  EXPECT_EQ(c.start_week, 17);
}
