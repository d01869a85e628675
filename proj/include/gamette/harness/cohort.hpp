#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "gamette/harness/bots.hpp"
#include "gamette/sim/policies.hpp"

namespace gamette::harness {

// Relative weights of bot profiles in a cohort.
struct BotMix {
  double follower = 1, hoarder = 0, reactor = 0;
};

// Parses "follower=2,hoarder=1,reactor=1" (weights; omitted profiles are 0).
inline BotMix parse_mix(const std::string& text) {
  BotMix m{0, 0, 0};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bot mix item '" + item + "' is not name=weight");
    const auto name = item.substr(0, eq);
    double w = 0;
    try {
      w = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bot mix weight for '" + name + "' is not a number");
    }
    if (!(w >= 0)) throw std::invalid_argument("bot mix weights must be >= 0");
    auto p = analysis::parse_profile(name);
    if (!p) throw std::invalid_argument("unknown bot profile '" + name + "'");
    (*p == analysis::BehaviorProfile::Follower ? m.follower : *p == analysis::BehaviorProfile::Hoarder ? m.hoarder
                                                                                                        : m.reactor) = w;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (m.follower + m.hoarder + m.reactor <= 0) throw std::invalid_argument("bot mix has no positive weight");
  return m;
}

struct CohortSpec {
  std::size_t sessions = 12;  // regular bots, split by `mix`
  protocol::Study study = protocol::Study::Study1;
  BotMix mix;
  std::size_t outliers = 0;   // extra sessions with one extreme order
  std::size_t abandoned = 0;  // extra sessions that stop mid-game
  double noise = 0.1;
  double multiplier = 1.5;
  BubbleStyle bubbles = BubbleStyle::Template;
  std::uint64_t seed = 1;
  std::size_t threads = 4;
};

struct CohortEntry {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  BotSpec bot;
  bool planted_outlier = false;
  bool planted_abandon = false;
  PlayResult result;
};

struct Manifest {
  CohortSpec spec;
  std::vector<CohortEntry> entries;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += !e.result.error.empty();
    return n;
  }

  session::Json to_json() const {
    session::Json j;
    j["study"] = std::string(protocol::to_string(spec.study));
    j["seed"] = spec.seed;
    j["sessions"] = spec.sessions;
    j["outliers"] = spec.outliers;
    j["abandoned"] = spec.abandoned;
    j["noise"] = spec.noise;
    j["multiplier"] = spec.multiplier;
    session::Json list = session::Json::array();
    for (const auto& e : entries) {
      session::Json s;
      s["index"] = e.index;
      s["session"] = e.result.session;
      s["seed"] = e.seed;
      s["profile"] = std::string(analysis::to_string(e.bot.profile));
      s["planted_outlier"] = e.planted_outlier;
      s["planted_abandon"] = e.planted_abandon;
      if (!e.result.session.empty()) s["condition"] = session::to_json(e.result.condition);
      s["complete"] = e.result.complete;
      s["meetings"] = e.result.meetings;
      if (!e.result.error.empty()) s["error"] = e.result.error;
      list.push_back(s);
    }
    j["entries"] = list;
    return j;
  }
};

// Deterministic roster: bot profiles by largest remainder over the mix,
// then the planted extras. Seeds depend only on the cohort seed and index.
inline std::vector<CohortEntry> cohort_roster(const CohortSpec& spec) {
  const std::vector<double> weights{spec.mix.follower, spec.mix.hoarder, spec.mix.reactor};
  const auto counts = sim::largest_remainder(static_cast<sim::Units>(spec.sessions), std::span<const double>(weights));
  std::vector<CohortEntry> out;
  auto add = [&](BotSpec b) {
    CohortEntry e;
    e.index = out.size();
    e.seed = protocol::mix64(spec.seed * 0x100000001b3ULL + e.index);
    b.seed = e.seed;
    b.noise = spec.noise;
    b.bubbles = spec.bubbles;
    e.bot = b;
    out.push_back(std::move(e));
    return &out.back();
  };
  for (std::size_t k = 0; k < 3; ++k)
    for (sim::Units i = 0; i < counts[k]; ++i) {
      if (k == 0) add(follower_bot());
      if (k == 1) add(hoarder_bot(spec.multiplier));
      if (k == 2) add(reactor_bot(spec.multiplier));
    }
  for (std::size_t i = 0; i < spec.outliers; ++i) {
    auto b = follower_bot();
    b.outlier_week = 21 + static_cast<int>(i % 35);
    add(b)->planted_outlier = true;
  }
  for (std::size_t i = 0; i < spec.abandoned; ++i) {
    auto b = follower_bot();
    b.abandon_week = 30 + static_cast<int>(i % 20);
    add(b)->planted_abandon = true;
  }
  return out;
}

using ClientFactory = std::function<std::unique_ptr<session::SessionClient>()>;

// Plays the roster on `threads` workers. Failures are recorded per session
// and do not stop the run.
inline Manifest run_cohort(const CohortSpec& spec, const ClientFactory& make_client) {
  Manifest m{spec, cohort_roster(spec)};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::unique_ptr<session::SessionClient> client;
    try {
      client = make_client();
    } catch (const std::exception& e) {
      for (std::size_t i; (i = next++) < m.entries.size();) m.entries[i].result.error = e.what();
      return;
    }
    for (std::size_t i; (i = next++) < m.entries.size();) {
      auto& e = m.entries[i];
      e.result = play_session(*client, e.bot, spec.study, e.seed);
    }
  };
  const auto n = std::max<std::size_t>(1, std::min(spec.threads, m.entries.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return m;
}

// Embedded service writing logs under `dir`, plus the manifest.
inline Manifest run_cohort_embedded(const CohortSpec& spec, const std::filesystem::path& dir,
                                    session::ServiceConfig config = {}) {
  auto store = std::make_shared<session::FileEventStore>(dir);
  session::SessionService service(std::move(config), store);
  auto m = run_cohort(spec, [&] { return std::make_unique<session::LocalClient>(service); });
  return m;
}

inline void write_manifest(const Manifest& m, const std::filesystem::path& path, const session::Json& provenance) {
  auto j = m.to_json();
  j["provenance"] = provenance;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace gamette::harness
