#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamette/analysis/dataset.hpp"

namespace gamette::analysis {

struct ContingencyTable {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<std::int64_t>> counts;

  static ContingencyTable make(std::vector<std::string> rows, std::vector<std::string> cols,
                               std::vector<std::vector<std::int64_t>> counts) {
    if (counts.size() != rows.size()) throw std::invalid_argument("contingency table: row count mismatch");
    for (const auto& r : counts) {
      if (r.size() != cols.size()) throw std::invalid_argument("contingency table: column count mismatch");
      for (auto v : r)
        if (v < 0) throw std::invalid_argument("contingency table: negative count");
    }
    return {std::move(rows), std::move(cols), std::move(counts)};
  }

  std::size_t r() const { return rows.size(); }
  std::size_t c() const { return cols.size(); }
  std::int64_t row_total(std::size_t i) const {
    std::int64_t s = 0;
    for (auto v : counts[i]) s += v;
    return s;
  }
  std::int64_t col_total(std::size_t j) const {
    std::int64_t s = 0;
    for (const auto& row : counts) s += row[j];
    return s;
  }
  std::int64_t total() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < r(); ++i) s += row_total(i);
    return s;
  }
  double expected(std::size_t i, std::size_t j) const {
    return static_cast<double>(row_total(i)) * static_cast<double>(col_total(j)) / static_cast<double>(total());
  }
  std::size_t row_index(const std::string& label) const {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i] == label) return i;
    throw std::out_of_range("no row " + label);
  }
  // Table restricted to the named rows, in the given order.
  ContingencyTable subtable(const std::vector<std::string>& labels) const {
    ContingencyTable t{labels, cols, {}};
    for (const auto& l : labels) t.counts.push_back(counts[row_index(l)]);
    return t;
  }
};

enum class Grouping { Disruption, Info, Profile, ProfileInfo };

inline std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::Disruption: return "disruption";
    case Grouping::Info: return "info";
    case Grouping::Profile: return "profile";
    case Grouping::ProfileInfo: return "profile-info";
  }
  return "?";
}

inline std::optional<Grouping> parse_grouping(std::string_view s) {
  for (auto g : {Grouping::Disruption, Grouping::Info, Grouping::Profile, Grouping::ProfileInfo})
    if (to_string(g) == s) return g;
  return std::nullopt;
}

// Info-level label. The second study contrasts only sharing vs. not sharing.
inline std::string info_label(const PlayerRecord& p) {
  if (p.study == protocol::Study::Study2) return p.info == protocol::InfoLevel::None ? "No-Info" : "Info";
  switch (p.info) {
    case protocol::InfoLevel::Complete: return "Complete";
    case protocol::InfoLevel::Partial: return "Partial";
    case protocol::InfoLevel::None: return "No-Info";
  }
  return "?";
}

inline std::string group_label(const PlayerRecord& p, Grouping g) {
  switch (g) {
    case Grouping::Disruption: return p.disrupted;
    case Grouping::Info: return info_label(p);
    case Grouping::Profile:
    case Grouping::ProfileInfo:
      if (!p.profile) throw SchemaError("player " + p.player + " has no behavior profile");
      return g == Grouping::Profile ? std::string(to_string(*p.profile))
                                    : std::string(to_string(*p.profile)) + "/" + info_label(p);
  }
  return "?";
}

namespace detail {
// Canonical row order; labels absent from the data are dropped.
inline std::vector<std::string> canonical_rows(Grouping g) {
  switch (g) {
    case Grouping::Disruption: return {"MN1", "MN2"};
    case Grouping::Info: return {"Complete", "Partial", "Info", "No-Info"};
    case Grouping::Profile: return {"Hoarder", "Reactor", "Follower"};
    case Grouping::ProfileInfo: {
      std::vector<std::string> out;
      for (auto p : kProfiles)
        for (const char* i : {"Complete", "Partial", "Info", "No-Info"})
          out.push_back(std::string(to_string(p)) + "/" + i);
      return out;
    }
  }
  return {};
}
}  // namespace detail

// Counts SA-code tuples per (group, level).
inline ContingencyTable build_contingency(const CodedDataset& data, Grouping g) {
  if (data.comments.empty()) throw SchemaError("empty dataset");
  std::map<std::string, std::vector<std::int64_t>> tally;
  for (const auto& c : data.comments) {
    auto it = data.players.find(c.player);
    if (it == data.players.end()) throw SchemaError("comment from unknown player " + c.player);
    auto& row = tally[group_label(it->second, g)];
    row.resize(kSaLevels.size(), 0);
    for (const auto& code : c.codes) ++row[static_cast<std::size_t>(code.level)];
  }
  ContingencyTable t;
  for (auto l : kSaLevels) {
    std::string name(to_string(l));
    name[0] = static_cast<char>(std::toupper(name[0]));
    t.cols.push_back(name);
  }
  for (const auto& label : detail::canonical_rows(g))
    if (auto it = tally.find(label); it != tally.end()) {
      t.rows.push_back(label);
      t.counts.push_back(it->second);
    }
  return t;
}

// Distinct players per group, for ratio denominators.
inline std::map<std::string, std::int64_t> group_sizes(const CodedDataset& data, Grouping g) {
  std::map<std::string, std::int64_t> out;
  for (const auto& [id, p] : data.players) ++out[group_label(p, g)];
  return out;
}

}  // namespace gamette::analysis
