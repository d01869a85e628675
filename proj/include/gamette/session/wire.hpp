#pragma once

#include <string>

#include "gamette/protocol/condition.hpp"
#include "gamette/protocol/info_panel.hpp"
#include "gamette/protocol/review.hpp"
#include "gamette/protocol/schedule.hpp"
#include "gamette/session/event.hpp"
#include "gamette/sim/engine.hpp"

// JSON encodings shared by the event log and the wire replies.
namespace gamette::session {

inline Json to_json(const protocol::Condition& c) {
  Json j;
  j["disrupted"] = c.disrupted;
  j["info"] = std::string(protocol::to_string(c.info));
  j["study"] = std::string(protocol::to_string(c.study));
  return j;
}

inline protocol::Condition condition_from_json(const Json& j) {
  protocol::Condition c;
  c.disrupted = j.at("disrupted").get<std::string>();
  auto info = protocol::parse_info_level(j.at("info").get<std::string>());
  auto study = protocol::parse_study(j.at("study").get<std::string>());
  if (!info || !study) throw ReplayError("malformed condition");
  c.info = *info;
  c.study = *study;
  return c;
}

inline Json to_json(const protocol::Schedule& s) {
  Json j;
  j["tutorial_start"] = s.tutorial_start;
  j["gameplay_start"] = s.gameplay_start;
  j["gameplay_end"] = s.gameplay_end;
  j["first_meeting"] = s.first_meeting;
  j["meeting_interval"] = s.meeting_interval;
  j["meeting_count"] = s.meeting_count;
  j["notification_week"] = s.notification_week;
  j["disruption_start"] = s.disruption_start;
  j["disruption_end"] = s.disruption_end;
  j["shortage_start"] = s.shortage_start;
  j["shortage_end"] = s.shortage_end;
  j["capacity_fraction"] = s.capacity_fraction;
  return j;
}

inline protocol::Schedule schedule_from_json(const Json& j) {
  protocol::Schedule s;
  s.tutorial_start = j.at("tutorial_start").get<int>();
  s.gameplay_start = j.at("gameplay_start").get<int>();
  s.gameplay_end = j.at("gameplay_end").get<int>();
  s.first_meeting = j.at("first_meeting").get<int>();
  s.meeting_interval = j.at("meeting_interval").get<int>();
  s.meeting_count = j.at("meeting_count").get<int>();
  s.notification_week = j.at("notification_week").get<int>();
  s.disruption_start = j.at("disruption_start").get<int>();
  s.disruption_end = j.at("disruption_end").get<int>();
  s.shortage_start = j.at("shortage_start").get<int>();
  s.shortage_end = j.at("shortage_end").get<int>();
  s.capacity_fraction = j.at("capacity_fraction").get<double>();
  return s;
}

inline Json to_json(const sim::Ledger& l) {
  return Json{{"revenue", l.revenue}, {"holding_cost", l.holding_cost}, {"stockout_cost", l.stockout_cost},
              {"profit", l.profit()}};
}

inline Json to_json(const protocol::InfoPanel& p) {
  Json j = Json::object();
  if (p.manufacturer_inventory) j["manufacturer_inventory"] = *p.manufacturer_inventory;
  if (p.delivery_rates) {
    Json rates = Json::object();
    for (const auto& [hc, r] : *p.delivery_rates) rates[hc] = r;
    j["delivery_rates"] = rates;
  }
  if (p.customer_behavior) {
    Json notes = Json::object();
    for (const auto& n : *p.customer_behavior) notes[n.customer] = n.behavior;
    j["customer_behavior"] = notes;
  }
  return j;
}

inline Json to_json(const sim::StateView& v) {
  Json j;
  j["week"] = v.week;
  j["on_hand"] = v.on_hand;
  j["receipts"] = v.receipts;
  j["customers"] = v.customers;
  j["demand"] = v.demand;
  j["backlog"] = v.backlog;
  j["due"] = v.due;
  j["total_due"] = v.total_due;
  j["needs_allocation"] = v.needs_allocation;
  j["pipeline"] = v.pipeline;
  j["outstanding"] = v.outstanding;
  j["suggestion"] = v.suggestion;
  j["ledger"] = to_json(v.ledger);
  return j;
}

inline Json to_json(const protocol::ReviewData& r) {
  Json j;
  j["weeks"] = r.weeks;
  j["profit"] = r.profit;
  j["revenue"] = r.revenue;
  j["holding_cost"] = r.holding_cost;
  j["stockout_cost"] = r.stockout_cost;
  j["inventory"] = r.inventory;
  j["demand"] = r.demand;
  j["backlog"] = r.backlog;
  j["receipts"] = r.receipts;
  j["orders"] = r.orders;
  return j;
}

}  // namespace gamette::session
