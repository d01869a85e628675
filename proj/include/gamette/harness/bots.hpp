#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamette/analysis/dataset.hpp"
#include "gamette/session/client.hpp"

// Scripted players that drive sessions through the wire protocol.
namespace gamette::harness {

enum class BubbleStyle { Silent, Template };

struct BotSpec {
  analysis::BehaviorProfile profile = analysis::BehaviorProfile::Follower;
  double multiplier = 1.5;  // order = multiplier x suggestion once active
  int start_week = 21;      // first over-ordering week (hoarder: gameplay start, reactor: notification)
  sim::AllocationPolicy allocation = sim::AllocationPolicy::Proportional;
  BubbleStyle bubbles = BubbleStyle::Template;
  double noise = 0.0;  // chance per week of a +-15% perturbation
  std::optional<int> outlier_week;  // one extreme order (1000 x suggestion) at this week
  std::optional<int> abandon_week;  // stop playing once this week is reached
  std::uint64_t seed = 0;
};

inline BotSpec follower_bot() { return {}; }
inline BotSpec hoarder_bot(double multiplier = 1.5, int start = 21) {
  BotSpec b;
  b.profile = analysis::BehaviorProfile::Hoarder;
  b.multiplier = multiplier;
  b.start_week = start;
  return b;
}
inline BotSpec reactor_bot(double multiplier = 1.5, int trigger = 28) {
  BotSpec b;
  b.profile = analysis::BehaviorProfile::Reactor;
  b.multiplier = multiplier;
  b.start_week = trigger;
  return b;
}

inline void validate(const BotSpec& b, const protocol::Schedule& s = protocol::standard_schedule()) {
  if (!(b.multiplier >= 1)) throw std::invalid_argument("bot multiplier must be >= 1");
  if (b.start_week < s.gameplay_start || b.start_week > s.gameplay_end)
    throw std::invalid_argument("bot start week must lie in the gameplay window");
  if (!(b.noise >= 0 && b.noise <= 1)) throw std::invalid_argument("bot noise must be in [0, 1]");
}

class Bot {
 public:
  explicit Bot(BotSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) { validate(spec_); }

  std::int64_t order(const session::Json& view) {
    const int week = view.at("week").get<int>();
    const auto suggestion = view.at("suggestion").get<std::int64_t>();
    if (spec_.outlier_week && week == *spec_.outlier_week)
      return 1000 * std::max<std::int64_t>(1, suggestion);
    double q = static_cast<double>(suggestion);
    if (spec_.profile != analysis::BehaviorProfile::Follower && week >= spec_.start_week) q *= spec_.multiplier;
    if (spec_.noise > 0 && week >= 21 && std::uniform_real_distribution<>(0, 1)(rng_) < spec_.noise)
      q *= std::uniform_real_distribution<>(0.85, 1.15)(rng_);
    return std::max<std::int64_t>(0, std::llround(q));
  }

  std::string bubble(const session::Json& meeting) {
    if (spec_.bubbles == BubbleStyle::Silent) return "";
    static const char* moods[] = {"We are doing fine.", "Things look uncertain.", "Backlog worries me.",
                                  "Inventory is building up.", "Demand seems steady."};
    const auto& review = meeting.at("review");
    const auto& inv = review.at("inventory");
    const auto& back = review.at("backlog");
    std::string text = "Inventory is " + std::to_string(inv.empty() ? 0 : inv.back().get<std::int64_t>()) +
                       " and backlog is " + std::to_string(back.empty() ? 0 : back.back().get<std::int64_t>()) + ". ";
    text += moods[std::uniform_int_distribution<int>(0, 4)(rng_)];
    return text;
  }

  const BotSpec& spec() const { return spec_; }

 private:
  BotSpec spec_;
  std::mt19937_64 rng_;
};

struct PlayResult {
  std::string session;
  protocol::Condition condition;
  bool complete = false;
  std::size_t meetings = 0;
  std::string error;  // empty on success
};

// Plays one session from join to debrief (or until the bot abandons).
inline PlayResult play_session(session::SessionClient& client, const BotSpec& spec, protocol::Study study,
                               std::optional<std::uint64_t> seed) {
  Bot bot(spec);
  PlayResult out;
  try {
    auto created = client.create(study, seed);
    out.session = created.id;
    out.condition = created.condition;
    session::Json r = created.reply;
    for (int guard = 0; guard < 10000; ++guard) {
      const auto phase = r.at("phase").get<std::string>();
      session::Json msg;
      if (spec.abandon_week && r.at("week").get<int>() >= *spec.abandon_week) return out;
      if (phase == "Briefing" || phase == "Tutorial" || phase == "Debrief") {
        msg = {{"kind", "acknowledge"}};
      } else if (phase == "AwaitReview") {
        msg = {{"kind", "view_state"}};
      } else if (phase == "AwaitAllocation") {
        msg = {{"kind", "submit_allocation"}, {"policy", std::string(sim::to_string(spec.allocation))}};
      } else if (phase == "AwaitOrder") {
        msg = {{"kind", "submit_order"}, {"quantity", bot.order(r.at("view"))}};
      } else if (phase == "MeetingPrompt") {
        ++out.meetings;
        msg = {{"kind", "answer_bubble"}, {"text", bot.bubble(r.at("meeting"))}, {"response_time", 12.5}};
      } else if (phase == "Survey") {
        msg = {{"kind", "answer_survey"}, {"answers", session::Json::object()}};
      } else if (phase == "Complete") {
        out.complete = true;
        return out;
      } else {
        throw std::runtime_error("unexpected phase " + phase);
      }
      r = client.send(out.session, msg);
    }
    throw std::runtime_error("session did not finish");
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace gamette::harness
