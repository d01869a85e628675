#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace gamette::session {

using Json = nlohmann::ordered_json;

inline constexpr int kEventSchemaVersion = 1;

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EventKind {
  Joined,
  Acknowledged,
  StateViewed,
  AllocationSubmitted,
  OrderSubmitted,
  MeetingShown,
  BubbleAnswered,
  SurveyAnswered,
  Debriefed,
};

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Joined: return "joined";
    case EventKind::Acknowledged: return "acknowledged";
    case EventKind::StateViewed: return "state-viewed";
    case EventKind::AllocationSubmitted: return "allocation-submitted";
    case EventKind::OrderSubmitted: return "order-submitted";
    case EventKind::MeetingShown: return "meeting-shown";
    case EventKind::BubbleAnswered: return "bubble-answered";
    case EventKind::SurveyAnswered: return "survey-answered";
    case EventKind::Debriefed: return "debriefed";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::Joined, EventKind::Acknowledged, EventKind::StateViewed, EventKind::AllocationSubmitted,
                 EventKind::OrderSubmitted, EventKind::MeetingShown, EventKind::BubbleAnswered,
                 EventKind::SurveyAnswered, EventKind::Debriefed})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct SessionEvent {
  std::string session;
  std::uint64_t seq = 0;
  int week = 0;
  EventKind kind = EventKind::Joined;
  Json payload = Json::object();
  std::string timestamp;  // wall clock, ISO-8601 UTC; ignored by replay

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

// One record per line, fields in this fixed order:
// {"v":1,"session":..,"seq":..,"week":..,"kind":..,"payload":{..},"ts":..}
inline std::string to_line(const SessionEvent& e) {
  Json j;
  j["v"] = kEventSchemaVersion;
  j["session"] = e.session;
  j["seq"] = e.seq;
  j["week"] = e.week;
  j["kind"] = std::string(to_string(e.kind));
  j["payload"] = e.payload;
  j["ts"] = e.timestamp;
  return j.dump();
}

inline SessionEvent from_line(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::exception& ex) {
    throw ReplayError(std::string("malformed event record: ") + ex.what());
  }
  try {
    const int v = j.at("v").get<int>();
    if (v != kEventSchemaVersion) throw ReplayError("event schema version mismatch: " + std::to_string(v));
    SessionEvent e;
    e.session = j.at("session").get<std::string>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.week = j.at("week").get<int>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw ReplayError("unknown event kind " + j.at("kind").get<std::string>());
    e.kind = *kind;
    e.payload = j.at("payload");
    e.timestamp = j.value("ts", std::string{});
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ReplayError(std::string("malformed event record: ") + ex.what());
  }
}

}  // namespace gamette::session
