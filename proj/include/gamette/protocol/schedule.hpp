#pragma once

#include <algorithm>
#include <string_view>
#include <vector>

#include "gamette/protocol/condition.hpp"
#include "gamette/sim/scenario.hpp"

namespace gamette::protocol {

using sim::Week;

inline constexpr std::string_view kBubblePrompt = "How do you think we are doing Kate?";

struct Schedule {
  Week tutorial_start = 17;
  Week gameplay_start = 21;
  Week gameplay_end = 55;
  Week first_meeting = 24;
  Week meeting_interval = 4;
  int meeting_count = 8;
  Week notification_week = 28;
  Week disruption_start = 28;
  Week disruption_end = 33;
  Week shortage_start = 32;
  Week shortage_end = 36;
  double capacity_fraction = 0.05;
  friend bool operator==(const Schedule&, const Schedule&) = default;

  std::vector<Week> meeting_weeks() const {
    std::vector<Week> out;
    for (int k = 0; k < meeting_count; ++k) out.push_back(first_meeting + k * meeting_interval);
    return out;
  }
  bool is_meeting_week(Week w) const {
    if (w < first_meeting || (w - first_meeting) % meeting_interval != 0) return false;
    return (w - first_meeting) / meeting_interval < meeting_count;
  }
  bool is_tutorial(Week w) const { return w >= tutorial_start && w < gameplay_start; }
  bool is_gameplay(Week w) const { return w >= gameplay_start && w <= gameplay_end; }
  int gameplay_weeks() const { return gameplay_end - gameplay_start + 1; }
};

inline Schedule standard_schedule() { return {}; }

// The base scenario with the condition's disruption applied over the
// schedule's window. Existing disruptions in the base are replaced.
inline sim::ScenarioConfig scenario_for(sim::ScenarioConfig base, const Condition& c, const Schedule& s) {
  base.disruptions = {{c.disrupted, s.disruption_start, s.disruption_end, s.capacity_fraction}};
  base.start_week = s.tutorial_start;
  return base;
}

}  // namespace gamette::protocol
