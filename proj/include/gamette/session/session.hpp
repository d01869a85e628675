#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gamette/protocol/condition.hpp"
#include "gamette/protocol/info_panel.hpp"
#include "gamette/protocol/review.hpp"
#include "gamette/protocol/schedule.hpp"
#include "gamette/session/event.hpp"
#include "gamette/session/wire.hpp"
#include "gamette/sim/engine.hpp"

namespace gamette::session {

enum class Phase {
  Briefing,
  Tutorial,
  AwaitReview,
  AwaitAllocation,
  AwaitOrder,
  MeetingPrompt,
  Survey,
  Debrief,
  Complete,
};

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Briefing: return "Briefing";
    case Phase::Tutorial: return "Tutorial";
    case Phase::AwaitReview: return "AwaitReview";
    case Phase::AwaitAllocation: return "AwaitAllocation";
    case Phase::AwaitOrder: return "AwaitOrder";
    case Phase::MeetingPrompt: return "MeetingPrompt";
    case Phase::Survey: return "Survey";
    case Phase::Debrief: return "Debrief";
    case Phase::Complete: return "Complete";
  }
  return "?";
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  for (auto p : {Phase::Briefing, Phase::Tutorial, Phase::AwaitReview, Phase::AwaitAllocation, Phase::AwaitOrder,
                 Phase::MeetingPrompt, Phase::Survey, Phase::Debrief, Phase::Complete})
    if (to_string(p) == s) return p;
  return std::nullopt;
}

// Rejection of a client message. `code` is one of out_of_phase, malformed,
// unknown_session, storage_unavailable.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, std::string message, std::optional<Phase> expected = std::nullopt)
      : std::runtime_error(message), code_(std::move(code)), expected_(expected) {}
  const std::string& code() const { return code_; }
  std::optional<Phase> expected() const { return expected_; }

 private:
  std::string code_;
  std::optional<Phase> expected_;
};

struct ThoughtBubbleRecord {
  int week = 0;
  std::string prompt;
  std::string response;
  double response_time = 0;  // seconds
  friend bool operator==(const ThoughtBubbleRecord&, const ThoughtBubbleRecord&) = default;
};

struct OrderRecord {
  int week = 0;
  sim::Units quantity = 0;
  sim::Units suggestion = 0;
  std::optional<sim::AllocationPolicy> allocation;
  friend bool operator==(const OrderRecord&, const OrderRecord&) = default;
};

// State of one play-through. Built only by applying events, so a live
// session and a replayed log are the same value.
class Session {
 public:
  static Session start(const SessionEvent& joined) {
    if (joined.kind != EventKind::Joined) throw ReplayError("log must start with a joined event");
    if (joined.seq != 0) throw ReplayError("joined event must have seq 0");
    Session s;
    try {
      s.id_ = joined.session;
      s.condition_ = condition_from_json(joined.payload.at("condition"));
      s.schedule_ = schedule_from_json(joined.payload.at("schedule"));
      s.sim_ = sim::build_network(sim::scenario_from_json(joined.payload.at("scenario")));
    } catch (const nlohmann::json::exception& e) {
      throw ReplayError(std::string("malformed joined payload: ") + e.what());
    } catch (const sim::ConfigError& e) {
      throw ReplayError(std::string("invalid scenario in joined payload: ") + e.what());
    }
    if (!s.sim_.controlled()) throw ReplayError("session scenario has no controlled agent");
    s.agent_ = *s.sim_.controlled();
    s.phase_ = Phase::Briefing;
    s.next_seq_ = 1;
    return s;
  }

  // Payload of the joined event for a new session.
  static Json joined_payload(const protocol::Condition& c, const protocol::Schedule& sched,
                             const sim::ScenarioConfig& scenario, std::uint64_t seed, std::uint64_t draw) {
    Json p;
    p["study"] = std::string(protocol::to_string(c.study));
    p["seed"] = seed;
    p["draw"] = draw;
    p["condition"] = to_json(c);
    p["schedule"] = to_json(sched);
    p["scenario"] = sim::to_json(protocol::scenario_for(scenario, c, sched));
    return p;
  }

  // Validates a client message and returns the events it produces, in
  // order. Does not mutate the session.
  std::vector<SessionEvent> plan(const Json& message, const std::string& timestamp) const {
    if (!message.is_object() || !message.contains("kind") || !message.at("kind").is_string())
      throw ProtocolError("malformed", "message must be an object with a string 'kind'", phase_);
    const auto kind = message.at("kind").get<std::string>();
    std::vector<SessionEvent> out;
    // Meeting events carry the meeting's week wherever they fall in the log.
    auto make = [&](EventKind k, Json payload, int week = 0) {
      SessionEvent e;
      e.session = id_;
      e.seq = next_seq_ + out.size();
      e.week = week ? week : sim_.week;
      e.kind = k;
      e.payload = std::move(payload);
      e.timestamp = timestamp;
      out.push_back(std::move(e));
    };
    auto require = [&](std::initializer_list<Phase> allowed) {
      for (auto p : allowed)
        if (p == phase_) return;
      throw ProtocolError("out_of_phase",
                          "message '" + kind + "' rejected; session expects a message for phase " +
                              std::string(to_string(phase_)),
                          phase_);
    };

    if (kind == "acknowledge") {
      require({Phase::Briefing, Phase::Tutorial, Phase::Debrief});
      if (phase_ == Phase::Debrief) {
        make(EventKind::Debriefed, Json{{"profit", ledger().profit()}});
      } else {
        make(EventKind::Acknowledged, Json{{"phase", phase_ == Phase::Briefing ? "briefing" : "tutorial"}});
      }
    } else if (kind == "view_state") {
      require({Phase::AwaitReview});
      make(EventKind::StateViewed, Json::object());
    } else if (kind == "submit_allocation") {
      require({Phase::AwaitAllocation});
      const auto policy = message.value("policy", std::string{});
      if (!sim::parse_allocation_policy(policy))
        throw ProtocolError("malformed", "policy must be hc1_first, hc2_first or proportional", phase_);
      make(EventKind::AllocationSubmitted, Json{{"policy", policy}});
    } else if (kind == "submit_order") {
      require({Phase::AwaitOrder});
      if (!message.contains("quantity") || !message.at("quantity").is_number_integer())
        throw ProtocolError("malformed", "quantity must be an integer", phase_);
      const auto q = message.at("quantity").get<std::int64_t>();
      if (q < 0) throw ProtocolError("malformed", "quantity must be >= 0", phase_);
      make(EventKind::OrderSubmitted, Json{{"quantity", q}, {"suggestion", view().suggestion}});
      if (schedule_.is_meeting_week(sim_.week))
        make(EventKind::MeetingShown, meeting_marker(sim_.week), sim_.week);
    } else if (kind == "answer_bubble") {
      require({Phase::MeetingPrompt});
      if (!message.contains("text") || !message.at("text").is_string())
        throw ProtocolError("malformed", "text must be a string (may be empty)", phase_);
      double rt = 0;
      if (message.contains("response_time")) {
        if (!message.at("response_time").is_number()) throw ProtocolError("malformed", "response_time must be a number", phase_);
        rt = message.at("response_time").get<double>();
        if (!(rt >= 0) || !std::isfinite(rt)) throw ProtocolError("malformed", "response_time must be >= 0", phase_);
      }
      if (!meeting_shown_) make(EventKind::MeetingShown, meeting_marker(meeting_week_), meeting_week_);
      make(EventKind::BubbleAnswered, Json{{"text", message.at("text").get<std::string>()}, {"response_time", rt}},
           meeting_week_);
    } else if (kind == "answer_survey") {
      require({Phase::Survey});
      Json answers = message.value("answers", Json::object());
      if (!answers.is_object()) throw ProtocolError("malformed", "answers must be an object", phase_);
      make(EventKind::SurveyAnswered, Json{{"answers", answers}});
    } else {
      throw ProtocolError("malformed", "unknown message kind '" + kind + "'", phase_);
    }
    return out;
  }

  // Applies one event. Throws ReplayError when the event is not legal here.
  void apply(const SessionEvent& e) {
    if (e.session != id_) throw ReplayError("event belongs to another session");
    if (e.seq != next_seq_)
      throw ReplayError("sequence gap: expected " + std::to_string(next_seq_) + ", got " + std::to_string(e.seq));
    auto expect = [&](std::initializer_list<Phase> allowed) {
      for (auto p : allowed)
        if (p == phase_) return;
      throw ReplayError(std::string(to_string(e.kind)) + " event illegal in phase " + std::string(to_string(phase_)));
    };
    try {
      switch (e.kind) {
        case EventKind::Joined:
          throw ReplayError("duplicate joined event");
        case EventKind::Acknowledged:
          expect({Phase::Briefing, Phase::Tutorial});
          phase_ = phase_ == Phase::Briefing ? Phase::Tutorial : Phase::AwaitReview;
          break;
        case EventKind::StateViewed:
          expect({Phase::AwaitReview});
          pending_allocation_.reset();
          phase_ = view().needs_allocation ? Phase::AwaitAllocation : Phase::AwaitOrder;
          break;
        case EventKind::AllocationSubmitted: {
          expect({Phase::AwaitAllocation});
          auto p = sim::parse_allocation_policy(e.payload.at("policy").get<std::string>());
          if (!p) throw ReplayError("unknown allocation policy in log");
          pending_allocation_ = *p;
          phase_ = Phase::AwaitOrder;
          break;
        }
        case EventKind::OrderSubmitted:
          expect({Phase::AwaitOrder});
          apply_order(e);
          break;
        case EventKind::MeetingShown:
          expect({Phase::MeetingPrompt});
          if (meeting_shown_) throw ReplayError("meeting shown twice");
          if (e.payload.at("week").get<int>() != meeting_week_ || e.week != meeting_week_)
            throw ReplayError("meeting shown for the wrong week");
          meeting_shown_ = true;
          break;
        case EventKind::BubbleAnswered: {
          expect({Phase::MeetingPrompt});
          if (!meeting_shown_) throw ReplayError("bubble answered before the meeting was shown");
          if (e.week != meeting_week_) throw ReplayError("bubble answered for the wrong week");
          ThoughtBubbleRecord rec;
          rec.week = meeting_week_;
          rec.prompt = std::string(protocol::kBubblePrompt);
          rec.response = e.payload.at("text").get<std::string>();
          rec.response_time = e.payload.value("response_time", 0.0);
          bubbles_.push_back(std::move(rec));
          meeting_shown_ = false;
          last_meeting_ = meeting_week_;
          phase_ = after_week(meeting_week_);
          break;
        }
        case EventKind::SurveyAnswered:
          expect({Phase::Survey});
          survey_ = e.payload.at("answers");
          phase_ = Phase::Debrief;
          break;
        case EventKind::Debriefed:
          expect({Phase::Debrief});
          phase_ = Phase::Complete;
          break;
      }
    } catch (const nlohmann::json::exception& ex) {
      throw ReplayError(std::string("malformed payload: ") + ex.what());
    }
    ++next_seq_;
  }

  // Reply body describing the phase the client must act in next.
  Json reply() const {
    Json r;
    r["session"] = id_;
    r["phase"] = std::string(to_string(phase_));
    r["week"] = sim_.week;
    r["condition"] = to_json(condition_);
    switch (phase_) {
      case Phase::Briefing:
        r["briefing"] = Json{{"role", sim_.spec(agent_).id},
                             {"lead_time_weeks", 2},
                             {"costs", Json{{"holding", sim_.config.costs.holding},
                                            {"stockout", sim_.config.costs.stockout},
                                            {"revenue", sim_.config.costs.revenue}}}};
        break;
      case Phase::Tutorial: {
        Json t = Json{{"weeks", Json::array({schedule_.tutorial_start, schedule_.gameplay_start - 1})}};
        const auto panel = protocol::visible_info(condition_, sim_, agent_);
        if (panel.customer_behavior) t["customer_behavior"] = to_json(panel)["customer_behavior"];
        r["tutorial"] = t;
        break;
      }
      case Phase::AwaitReview:
      case Phase::AwaitAllocation:
      case Phase::AwaitOrder: {
        Json v = to_json(view());
        v["info"] = to_json(protocol::visible_info(condition_, sim_, agent_));
        v["notification"] = sim_.week == schedule_.notification_week
                                ? Json("Manufacturer " + condition_.disrupted + " has shut down production.")
                                : Json(nullptr);
        r["view"] = v;
        if (phase_ == Phase::AwaitAllocation)
          r["allocation_policies"] = Json::array({"hc1_first", "hc2_first", "proportional"});
        break;
      }
      case Phase::MeetingPrompt:
        r["meeting"] = meeting_payload(meeting_week_);
        break;
      case Phase::Survey:
        r["survey"] = Json{{"questions", Json::array({"age", "gender", "experience", "comments"})}, {"optional", true}};
        break;
      case Phase::Debrief:
      case Phase::Complete:
        r["debrief"] = Json{{"profit", ledger().profit()},
                            {"ledger", to_json(ledger())},
                            {"disrupted", condition_.disrupted},
                            {"info", std::string(protocol::to_string(condition_.info))}};
        break;
    }
    return r;
  }

  // Accessors.
  const std::string& id() const { return id_; }
  Phase phase() const { return phase_; }
  std::uint64_t next_seq() const { return next_seq_; }
  const sim::SimState& sim() const { return sim_; }
  const protocol::Condition& condition() const { return condition_; }
  const protocol::Schedule& schedule() const { return schedule_; }
  const std::vector<ThoughtBubbleRecord>& bubbles() const { return bubbles_; }
  const std::vector<OrderRecord>& orders() const { return orders_; }
  const std::vector<sim::WeekReport>& history() const { return history_; }
  const Json& survey() const { return survey_; }
  const sim::Ledger& ledger() const { return sim_.agents[agent_].ledger; }
  std::size_t agent() const { return agent_; }
  bool meeting_pending_display() const { return phase_ == Phase::MeetingPrompt && !meeting_shown_; }
  int pending_meeting_week() const { return meeting_week_; }
  sim::StateView view() const { return sim::observe(sim_, agent_); }

  friend bool operator==(const Session&, const Session&) = default;

 private:
  Json meeting_marker(int week) const {
    const auto weeks = schedule_.meeting_weeks();
    Json m;
    m["index"] = static_cast<int>(std::find(weeks.begin(), weeks.end(), week) - weeks.begin()) + 1;
    m["week"] = week;
    m["prompt"] = std::string(protocol::kBubblePrompt);
    return m;
  }

  Json meeting_payload(int week) const {
    Json m = meeting_marker(week);
    m["review"] = to_json(protocol::performance_review(review_window(week), agent_));
    return m;
  }

  std::vector<sim::WeekReport> review_window(int week) const {
    std::vector<sim::WeekReport> out;
    for (const auto& r : history_)
      if (r.week > last_meeting_ && r.week <= week) out.push_back(r);
    return out;
  }

  Phase after_week(int week) const { return week >= schedule_.gameplay_end ? Phase::Survey : Phase::AwaitReview; }

  void apply_order(const SessionEvent& e) {
    const auto q = e.payload.at("quantity").get<sim::Units>();
    if (q < 0) throw ReplayError("negative order in log");
    const auto shown = view();
    if (e.payload.contains("suggestion") && e.payload.at("suggestion").get<sim::Units>() != shown.suggestion)
      throw ReplayError("logged suggestion disagrees with the reconstructed state");
    if (shown.needs_allocation && !pending_allocation_) throw ReplayError("order on a short week without allocation");

    sim::ExternalDecision d;
    d.order = q;
    if (pending_allocation_) d.allocation = sim::Allocation{*pending_allocation_};
    const int week = sim_.week;
    auto report = sim::step_in_place(sim_, d);
    orders_.push_back({week, q, shown.suggestion, pending_allocation_});
    pending_allocation_.reset();
    if (sim_.week == schedule_.gameplay_start) {
      // Tutorial money does not count toward the game.
      sim_.reset_ledgers();
      history_.clear();
    } else if (schedule_.is_gameplay(week)) {
      history_.push_back(std::move(report));
    }
    if (schedule_.is_meeting_week(week)) {
      meeting_week_ = week;
      meeting_shown_ = false;
      phase_ = Phase::MeetingPrompt;
    } else {
      phase_ = after_week(week);
    }
  }

  std::string id_;
  protocol::Condition condition_;
  protocol::Schedule schedule_;
  sim::SimState sim_;
  std::size_t agent_ = 0;
  Phase phase_ = Phase::Briefing;
  std::uint64_t next_seq_ = 0;
  std::optional<sim::AllocationPolicy> pending_allocation_;
  int meeting_week_ = 0;
  int last_meeting_ = 0;
  bool meeting_shown_ = false;
  std::vector<ThoughtBubbleRecord> bubbles_;
  std::vector<OrderRecord> orders_;
  std::vector<sim::WeekReport> history_;
  Json survey_ = Json::object();
};

struct ReplayResult {
  Session session;
  sim::Money profit = 0;
  std::size_t bubble_count = 0;
  bool complete = false;
};

// Rebuilds a session from its log. A truncated log yields the state as of
// its last event.
inline ReplayResult replay(std::span<const SessionEvent> events) {
  if (events.empty()) throw ReplayError("empty event log");
  Session s = Session::start(events.front());
  for (std::size_t i = 1; i < events.size(); ++i) s.apply(events[i]);
  ReplayResult r{s, s.ledger().profit(), s.bubbles().size(), s.phase() == Phase::Complete};
  return r;
}

}  // namespace gamette::session
