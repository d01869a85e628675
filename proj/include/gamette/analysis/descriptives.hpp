#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gamette/analysis/contingency.hpp"
#include "gamette/analysis/stats.hpp"

namespace gamette::analysis {

// Per-week SA-code counts of one group, and the same divided by group size.
struct RatioSeries {
  std::vector<int> weeks;
  std::int64_t group_size = 0;
  std::vector<std::vector<std::int64_t>> counts;  // [level][week]
  std::vector<std::vector<double>> ratios;        // [level][week]
};

inline std::map<std::string, RatioSeries> count_ratio_series(
    const CodedDataset& data, Grouping g, const protocol::Schedule& schedule = protocol::standard_schedule()) {
  const auto weeks = schedule.meeting_weeks();
  const auto sizes = group_sizes(data, g);
  std::map<std::string, RatioSeries> out;
  auto series_for = [&](const std::string& label) -> RatioSeries& {
    auto [it, fresh] = out.try_emplace(label);
    if (fresh) {
      auto size = sizes.find(label);
      if (size == sizes.end() || size->second <= 0) throw SchemaError("group '" + label + "' has no players");
      it->second.weeks = weeks;
      it->second.group_size = size->second;
      it->second.counts.assign(kSaLevels.size(), std::vector<std::int64_t>(weeks.size(), 0));
    }
    return it->second;
  };
  for (const auto& [id, p] : data.players) series_for(group_label(p, g));
  for (const auto& c : data.comments) {
    auto player = data.players.find(c.player);
    if (player == data.players.end()) throw SchemaError("comment from unknown player " + c.player);
    auto& s = series_for(group_label(player->second, g));
    const auto w = std::find(weeks.begin(), weeks.end(), c.week);
    if (w == weeks.end()) throw SchemaError("comment week " + std::to_string(c.week) + " is not a meeting week");
    for (const auto& code : c.codes) ++s.counts[static_cast<std::size_t>(code.level)][w - weeks.begin()];
  }
  for (auto& [label, s] : out) {
    s.ratios.assign(s.counts.size(), std::vector<double>(weeks.size(), 0.0));
    for (std::size_t l = 0; l < s.counts.size(); ++l)
      for (std::size_t k = 0; k < weeks.size(); ++k)
        s.ratios[l][k] = static_cast<double>(s.counts[l][k]) / static_cast<double>(s.group_size);
  }
  return out;
}

inline std::size_t word_count(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string tok; in >> tok;) ++n;
  return n;
}

// Quantile with linear interpolation between order statistics (the common
// "type 7" definition).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct WordStats {
  std::size_t comments = 0;
  double mean = 0, median = 0, q1 = 0, q3 = 0, iqr = 0;
  double unanswered_rate = 0;
  std::map<int, double> per_week_mean;
};

// Word counts over all prompts; an unanswered prompt counts as zero words.
inline WordStats word_stats(const std::vector<CodedComment>& comments) {
  WordStats s;
  s.comments = comments.size();
  if (comments.empty()) return s;
  std::vector<double> counts;
  std::map<int, std::pair<double, int>> weekly;
  std::size_t empty = 0;
  for (const auto& c : comments) {
    const auto n = static_cast<double>(word_count(c.text));
    if (n == 0) ++empty;
    counts.push_back(n);
    weekly[c.week].first += n;
    ++weekly[c.week].second;
  }
  s.mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
  s.median = quantile(counts, 0.5);
  s.q1 = quantile(counts, 0.25);
  s.q3 = quantile(counts, 0.75);
  s.iqr = s.q3 - s.q1;
  s.unanswered_rate = static_cast<double>(empty) / static_cast<double>(comments.size());
  for (const auto& [w, acc] : weekly) s.per_week_mean[w] = acc.first / acc.second;
  return s;
}

// Rater agreement on SA-level presence: one item per (response, level),
// categories {absent, present}. Items rated by a different number of raters
// than the rest make the matrix unusable for Fleiss' kappa, which reports it.
inline std::vector<std::vector<std::int64_t>> sa_presence_ratings(const std::vector<CodedComment>& raw) {
  std::map<std::pair<std::string, int>, std::vector<const CodedComment*>> by_item;
  for (const auto& c : raw) by_item[{c.player, c.week}].push_back(&c);
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& [key, ratings] : by_item)
    for (auto level : kSaLevels) {
      std::int64_t present = 0;
      for (const auto* r : ratings)
        if (std::any_of(r->codes.begin(), r->codes.end(), [&](const SACode& c) { return c.level == level; }))
          ++present;
      out.push_back({static_cast<std::int64_t>(ratings.size()) - present, present});
    }
  return out;
}

}  // namespace gamette::analysis
