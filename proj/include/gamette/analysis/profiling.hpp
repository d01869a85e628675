#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gamette/analysis/dataset.hpp"
#include "gamette/analysis/hmm.hpp"
#include "gamette/session/session.hpp"
#include "gamette/session/store.hpp"

namespace gamette::analysis {

struct OrderPoint {
  int week = 0;
  std::int64_t order = 0;
  std::int64_t suggestion = 0;
};

struct DecisionLog {
  std::string player;
  protocol::Condition condition;
  bool complete = false;
  std::vector<OrderPoint> orders;  // gameplay weeks only
};

// Ordering decisions as recorded in a session's event log.
inline DecisionLog decision_log(std::span<const session::SessionEvent> events,
                                const protocol::Schedule& schedule = protocol::standard_schedule()) {
  if (events.empty()) throw SchemaError("empty event log");
  DecisionLog log;
  log.player = events.front().session;
  if (events.front().kind != session::EventKind::Joined) throw SchemaError("event log does not start with joined");
  log.condition = session::condition_from_json(events.front().payload.at("condition"));
  for (const auto& e : events) {
    if (e.kind == session::EventKind::OrderSubmitted && schedule.is_gameplay(e.week))
      log.orders.push_back({e.week, e.payload.at("quantity").get<std::int64_t>(),
                            e.payload.at("suggestion").get<std::int64_t>()});
    if (e.kind == session::EventKind::Debriefed) log.complete = true;
  }
  return log;
}

// Every `*.jsonl` log under a directory, in file-name order.
inline std::vector<DecisionLog> load_decision_logs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw SchemaError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<DecisionLog> out;
  for (const auto& f : files) {
    try {
      const auto events = session::read_event_log(f);
      out.push_back(decision_log(events));
    } catch (const session::ReplayError& e) {
      throw SchemaError(f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

struct Exclusion {
  std::string player;
  std::string reason;
};

struct OutlierReport {
  std::vector<DecisionLog> retained;
  std::vector<Exclusion> excluded;
};

inline constexpr double kOutlierFactor = 10.0;

// Drops incomplete sessions and players who ever ordered more than
// 10 x max(1, suggestion).
inline OutlierReport filter_outliers(const std::vector<DecisionLog>& logs, double factor = kOutlierFactor) {
  OutlierReport rep;
  for (const auto& log : logs) {
    if (!log.complete) {
      rep.excluded.push_back({log.player, "incomplete session"});
      continue;
    }
    auto bad = std::find_if(log.orders.begin(), log.orders.end(), [&](const OrderPoint& o) {
      return static_cast<double>(o.order) > factor * static_cast<double>(std::max<std::int64_t>(1, o.suggestion));
    });
    if (bad != log.orders.end()) {
      rep.excluded.push_back({log.player, "order " + std::to_string(bad->order) + " at week " + std::to_string(bad->week) +
                                              " exceeds " + std::to_string(static_cast<int>(factor)) +
                                              "x suggestion " + std::to_string(bad->suggestion)});
      continue;
    }
    rep.retained.push_back(log);
  }
  return rep;
}

enum class Mode { Under = 0, Follow = 1, Over = 2 };
inline constexpr double kFollowBand = 0.05;

inline double relative_deviation(const OrderPoint& o) {
  return static_cast<double>(o.order - o.suggestion) / static_cast<double>(std::max<std::int64_t>(1, o.suggestion));
}

inline Mode discretize(double deviation, double band = kFollowBand) {
  if (deviation > band) return Mode::Over;
  if (deviation < -band) return Mode::Under;
  return Mode::Follow;
}

inline char mode_char(Mode m) { return m == Mode::Under ? 'U' : m == Mode::Over ? 'O' : 'F'; }

struct ProfileOptions {
  std::size_t clusters = 3;
  std::size_t min_weeks = 20;
  double follow_threshold = 0.8;    // cluster follow fraction that makes a Follower
  double early_over_threshold = 0.3;  // pre-notification over fraction that makes a Hoarder
  int notification_week = 28;
  int max_iter = 200;
};

struct PlayerProfile {
  std::string player;
  std::string modes;  // decoded mode per ordering week, U/F/O
  std::size_t cluster = 0;
  BehaviorProfile profile = BehaviorProfile::Follower;
};

struct ClusterSummary {
  std::string medoid;
  std::size_t size = 0;
  double follow_fraction = 0, early_over_fraction = 0, late_over_fraction = 0;
  BehaviorProfile profile = BehaviorProfile::Follower;
};

struct ProfileResult {
  std::vector<PlayerProfile> players;
  std::vector<ClusterSummary> clusters;
  std::vector<Exclusion> skipped;  // too few ordering weeks
  Hmm model;
  FitReport fit;
  std::vector<Mode> state_mode;  // mode each hidden state stands for
  bool degenerate = false;
  std::string degenerate_reason;
};

inline std::size_t hamming(const std::string& a, const std::string& b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t d = std::max(a.size(), b.size()) - n;
  for (std::size_t i = 0; i < n; ++i) d += a[i] != b[i];
  return d;
}

// Partitioning around medoids: greedy BUILD then best-improvement SWAP.
// Ties resolve to the lowest index, so the result is deterministic.
inline std::vector<std::size_t> k_medoids(const std::vector<std::vector<double>>& dist, std::size_t k,
                                          std::vector<std::size_t>* medoids_out = nullptr) {
  const auto n = dist.size();
  k = std::min(k, n);
  std::vector<std::size_t> medoids;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  auto cost_with = [&](const std::vector<std::size_t>& ms) {
    double c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (auto m : ms) best = std::min(best, dist[i][m]);
      c += best;
    }
    return c;
  };
  while (medoids.size() < k) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t cand = 0; cand < n; ++cand) {
      if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
      double c = 0;
      for (std::size_t i = 0; i < n; ++i) c += std::min(nearest[i], dist[i][cand]);
      if (c < best - 1e-12) {
        best = c;
        arg = cand;
      }
    }
    medoids.push_back(arg);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dist[i][arg]);
  }
  double cost = cost_with(medoids);
  for (bool improved = true; improved;) {
    improved = false;
    double best = cost;
    std::pair<std::size_t, std::size_t> swap{0, 0};
    for (std::size_t mi = 0; mi < medoids.size(); ++mi)
      for (std::size_t cand = 0; cand < n; ++cand) {
        if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
        auto trial = medoids;
        trial[mi] = cand;
        const double c = cost_with(trial);
        if (c < best - 1e-12) {
          best = c;
          swap = {mi, cand};
          improved = true;
        }
      }
    if (improved) {
      medoids[swap.first] = swap.second;
      cost = best;
    }
  }
  std::vector<std::size_t> assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < medoids.size(); ++m)
      if (dist[i][medoids[m]] < best) {
        best = dist[i][medoids[m]];
        assign[i] = m;
      }
  }
  if (medoids_out) *medoids_out = medoids;
  return assign;
}

// Deviation sequences -> 3-state HMM -> decoded response modes -> k-medoids
// on mode sequences -> cluster labels from mode frequencies.
inline ProfileResult profile_players(const std::vector<DecisionLog>& logs, const ProfileOptions& opt = {}) {
  ProfileResult res;
  std::vector<const DecisionLog*> usable;
  std::vector<Sequence> data;
  for (const auto& log : logs) {
    if (log.orders.size() < opt.min_weeks) {
      res.skipped.push_back({log.player, "only " + std::to_string(log.orders.size()) + " ordering weeks"});
      continue;
    }
    Sequence s;
    for (const auto& o : log.orders) s.push_back(static_cast<int>(discretize(relative_deviation(o))));
    usable.push_back(&log);
    data.push_back(std::move(s));
  }
  if (usable.empty()) {
    res.degenerate = true;
    res.degenerate_reason = "no player has enough ordering weeks";
    return res;
  }

  res.model = diagonal_hmm(3);
  res.fit = baum_welch(res.model, data, opt.max_iter);
  if (!std::isfinite(res.fit.log_likelihood)) {
    res.degenerate = true;
    res.degenerate_reason = "likelihood is not finite";
    return res;
  }
  for (const auto& row : res.model.b)
    res.state_mode.push_back(static_cast<Mode>(std::max_element(row.begin(), row.end()) - row.begin()));

  std::vector<std::string> modes;
  std::vector<bool> used_state(3, false), seen_symbol(3, false);
  for (const auto& s : data) {
    for (int sym : s) seen_symbol[static_cast<std::size_t>(sym)] = true;
    std::string m;
    for (int st : viterbi(res.model, s)) {
      used_state[static_cast<std::size_t>(st)] = true;
      m += mode_char(res.state_mode[static_cast<std::size_t>(st)]);
    }
    modes.push_back(std::move(m));
  }
  const auto states_used = std::count(used_state.begin(), used_state.end(), true);
  const auto symbols_seen = std::count(seen_symbol.begin(), seen_symbol.end(), true);
  if (states_used < 2 && symbols_seen >= 2) {
    res.degenerate = true;
    res.degenerate_reason = "fit collapsed to a single state although the data show several response modes";
    return res;
  }

  const auto n = modes.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = static_cast<double>(hamming(modes[i], modes[j]));
  std::vector<std::size_t> medoids;
  const auto assign = k_medoids(dist, opt.clusters, &medoids);

  res.clusters.resize(medoids.size());
  std::vector<double> early_total(medoids.size(), 0), late_total(medoids.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = res.clusters[assign[i]];
    ++c.size;
    const auto& orders = usable[i]->orders;
    double follow = 0, early = 0, early_n = 0, late = 0, late_n = 0;
    for (std::size_t t = 0; t < modes[i].size(); ++t) {
      const char m = modes[i][t];
      follow += m == 'F';
      if (orders[t].week < opt.notification_week) {
        early += m == 'O';
        ++early_n;
      } else {
        late += m == 'O';
        ++late_n;
      }
    }
    c.follow_fraction += follow / static_cast<double>(modes[i].size());
    c.early_over_fraction += early_n > 0 ? early / early_n : 0;
    c.late_over_fraction += late_n > 0 ? late / late_n : 0;
  }
  for (std::size_t k = 0; k < res.clusters.size(); ++k) {
    auto& c = res.clusters[k];
    c.medoid = usable[medoids[k]]->player;
    const double sz = static_cast<double>(std::max<std::size_t>(1, c.size));
    c.follow_fraction /= sz;
    c.early_over_fraction /= sz;
    c.late_over_fraction /= sz;
    if (c.follow_fraction >= opt.follow_threshold)
      c.profile = BehaviorProfile::Follower;
    else if (c.early_over_fraction >= opt.early_over_threshold)
      c.profile = BehaviorProfile::Hoarder;
    else
      c.profile = BehaviorProfile::Reactor;
  }
  for (std::size_t i = 0; i < n; ++i)
    res.players.push_back({usable[i]->player, modes[i], assign[i], res.clusters[assign[i]].profile});
  return res;
}

}  // namespace gamette::analysis
