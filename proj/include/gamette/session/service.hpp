#pragma once

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "gamette/protocol/condition.hpp"
#include "gamette/protocol/schedule.hpp"
#include "gamette/session/session.hpp"
#include "gamette/session/store.hpp"

namespace gamette::session {

struct ServiceConfig {
  sim::ScenarioConfig scenario = sim::default_scenario();
  protocol::Schedule schedule = protocol::standard_schedule();
  std::uint64_t seed = 0;  // drives session ids and condition draws without an explicit seed
  std::chrono::seconds idle_timeout{1800};
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

inline std::string iso8601(std::chrono::system_clock::time_point tp) {
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(tp);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp - secs).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

// Session ids double as file names, so only [A-Za-z0-9_-] is accepted.
inline bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) return false;
  return true;
}

struct CreatedSession {
  std::string id;
  protocol::Condition condition;
  Json reply;
};

// Hosts sessions: assigns conditions, validates messages against the phase
// machine, persists every event before replying. Sessions idle longer than
// the timeout are dropped from memory and resumed from their log on demand.
class SessionService {
 public:
  SessionService(ServiceConfig config, std::shared_ptr<EventStore> store,
                 Clock clock = [] { return std::chrono::system_clock::now(); })
      : config_(std::move(config)), store_(std::move(store)), clock_(std::move(clock)), assigner_(config_.seed) {
    sim::validate(config_.scenario);
    if (config_.scenario.topology.controlled.empty())
      throw sim::ConfigError("service scenario needs an externally controlled agent");
  }

  CreatedSession create_session(protocol::Study study, std::optional<std::uint64_t> seed = std::nullopt) {
    std::unique_lock lock(mu_);
    protocol::Condition condition;
    std::uint64_t used_seed = 0, draw = 0;
    if (seed) {
      used_seed = *seed;
      condition = protocol::assign_condition(*seed, 0, study);
    } else {
      used_seed = config_.seed;
      draw = assigner_.draws();
      condition = assigner_.next(study);
    }
    // Ids are reproducible: from the explicit seed, else from the service
    // seed and creation order.
    std::uint64_t h = seed ? protocol::mix64(*seed ^ 0x5e5510f1d5eedULL)
                           : protocol::mix64(config_.seed ^ protocol::mix64(++id_counter_));
    std::string id;
    for (;;) {
      char buf[24];
      std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(h));
      id = buf;
      if (!live_.count(id) && !store_->exists(id)) break;
      h = protocol::mix64(h);
    }

    SessionEvent joined;
    joined.session = id;
    joined.seq = 0;
    joined.week = config_.schedule.tutorial_start;
    joined.kind = EventKind::Joined;
    joined.payload = Session::joined_payload(condition, config_.schedule, config_.scenario, used_seed, draw);
    joined.timestamp = iso8601(clock_());
    // Validate before persisting so a bad scenario never reaches the log.
    Session s = Session::start(joined);
    try {
      store_->append(joined);
    } catch (const StorageError& e) {
      throw ProtocolError("storage_unavailable", e.what());
    }
    auto entry = std::make_shared<Entry>();
    entry->session = std::move(s);
    entry->last_active = clock_();
    live_[id] = entry;
    return {id, condition, entry->session.reply()};
  }

  // Handles one client message. Throws ProtocolError on rejection; the
  // session is unchanged in that case.
  Json handle_message(const std::string& id, const Json& message) {
    auto entry = lookup(id);
    std::lock_guard guard(entry->mu);
    const auto now = clock_();
    auto events = entry->session.plan(message, iso8601(now));
    Session next = entry->session;
    for (const auto& e : events) next.apply(e);
    for (const auto& e : events) {
      try {
        store_->append(e);
      } catch (const StorageError& err) {
        // Earlier events of this batch may be on disk; resume from the log.
        std::lock_guard lock(mu_);
        live_.erase(id);
        throw ProtocolError("storage_unavailable", err.what());
      }
    }
    entry->session = std::move(next);
    entry->last_active = now;
    return entry->session.reply();
  }

  // Current reply for a session without changing it.
  Json status(const std::string& id) {
    auto entry = lookup(id);
    std::lock_guard guard(entry->mu);
    return entry->session.reply();
  }

  std::vector<SessionEvent> events(const std::string& id) const {
    if (!valid_session_id(id) || !store_->exists(id)) throw ProtocolError("unknown_session", "no session " + id);
    try {
      return store_->load(id);
    } catch (const StorageError& e) {
      throw ProtocolError("storage_unavailable", e.what());
    } catch (const ReplayError& e) {
      throw ProtocolError("storage_unavailable", std::string("session log unreadable: ") + e.what());
    }
  }

  // Drops idle sessions from memory; their logs stay in the store.
  std::size_t expire_idle() {
    std::lock_guard lock(mu_);
    const auto now = clock_();
    std::size_t n = 0;
    for (auto it = live_.begin(); it != live_.end();) {
      if (now - it->second->last_active > config_.idle_timeout) {
        it = live_.erase(it);
        ++n;
      } else {
        ++it;
      }
    }
    return n;
  }

  std::size_t live_sessions() const {
    std::lock_guard lock(mu_);
    return live_.size();
  }
  const ServiceConfig& config() const { return config_; }
  EventStore& store() { return *store_; }

 private:
  struct Entry {
    Session session;
    std::chrono::system_clock::time_point last_active;
    std::mutex mu;
  };

  std::shared_ptr<Entry> lookup(const std::string& id) {
    if (!valid_session_id(id)) throw ProtocolError("unknown_session", "no session " + id);
    std::lock_guard lock(mu_);
    if (auto it = live_.find(id); it != live_.end()) return it->second;
    if (!store_->exists(id)) throw ProtocolError("unknown_session", "no session " + id);
    auto entry = std::make_shared<Entry>();
    try {
      entry->session = replay(store_->load(id)).session;
    } catch (const StorageError& e) {
      throw ProtocolError("storage_unavailable", e.what());
    } catch (const ReplayError& e) {
      throw ProtocolError("storage_unavailable", std::string("session log unreadable: ") + e.what());
    }
    entry->last_active = clock_();
    live_[id] = entry;
    return entry;
  }

  ServiceConfig config_;
  std::shared_ptr<EventStore> store_;
  Clock clock_;
  mutable std::mutex mu_;
  protocol::ConditionAssigner assigner_;
  std::uint64_t id_counter_ = 0;
  std::map<std::string, std::shared_ptr<Entry>> live_;
};

}  // namespace gamette::session
