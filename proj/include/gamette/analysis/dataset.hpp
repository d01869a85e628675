#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gamette/analysis/codebook.hpp"
#include "gamette/protocol/condition.hpp"
#include "gamette/protocol/schedule.hpp"

namespace gamette::analysis {

// Input does not match the expected table layout or vocabulary.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BehaviorProfile { Hoarder, Reactor, Follower };
inline constexpr std::array kProfiles{BehaviorProfile::Hoarder, BehaviorProfile::Reactor, BehaviorProfile::Follower};

inline std::string_view to_string(BehaviorProfile p) {
  switch (p) {
    case BehaviorProfile::Hoarder: return "Hoarder";
    case BehaviorProfile::Reactor: return "Reactor";
    case BehaviorProfile::Follower: return "Follower";
  }
  return "?";
}

inline std::optional<BehaviorProfile> parse_profile(std::string_view s) {
  for (auto p : kProfiles) {
    const auto name = to_string(p);
    if (s.size() == name.size() &&
        std::equal(s.begin(), s.end(), name.begin(), [](char a, char b) { return std::tolower(a) == std::tolower(b); }))
      return p;
  }
  return std::nullopt;
}

// One rater's coding of one thought-bubble response. No codes means the
// response was empty or carried no codable content.
struct CodedComment {
  std::string player;
  int week = 0;
  std::string text;
  std::string rater;
  std::vector<SACode> codes;
};

struct PlayerRecord {
  std::string player;
  protocol::Study study = protocol::Study::Study1;
  std::string disrupted = "MN1";
  protocol::InfoLevel info = protocol::InfoLevel::None;
  std::optional<BehaviorProfile> profile;
};

struct CodedDataset {
  std::vector<CodedComment> comments;  // one per (player, week) after rater resolution
  std::map<std::string, PlayerRecord> players;
};

// RFC 4180 records: quoted fields may hold commas, quotes ("") and newlines.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw SchemaError("unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace detail {
inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Maps header names to column indices; every required column must exist.
inline std::map<std::string, std::size_t> header_index(const std::vector<std::string>& header,
                                                       std::initializer_list<const char*> required,
                                                       const std::string& what) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < header.size(); ++i) idx[header[i]] = i;
  for (const char* r : required)
    if (!idx.count(r)) throw SchemaError(what + ": missing column '" + r + "'");
  return idx;
}
}  // namespace detail

// Rows: player,week,text,rater,level,topic,description — one row per code
// tuple; a row with an empty level records an uncoded response.
inline std::vector<CodedComment> parse_coded_comments(const std::string& csv,
                                                      const protocol::Schedule& schedule = protocol::standard_schedule()) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) return {};
  const auto idx = detail::header_index(rows[0], {"player", "week", "text", "rater", "level", "topic", "description"},
                                        "coded comments");
  std::map<std::tuple<std::string, int, std::string>, std::size_t> slot;
  std::vector<CodedComment> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto where = "coded comments line " + std::to_string(r + 1);
    if (row.size() != rows[0].size()) throw SchemaError(where + ": expected " + std::to_string(rows[0].size()) + " fields");
    const auto& player = row[idx.at("player")];
    if (player.empty()) throw SchemaError(where + ": empty player");
    int week = 0;
    try {
      std::size_t used = 0;
      week = std::stoi(row[idx.at("week")], &used);
      if (used != row[idx.at("week")].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw SchemaError(where + ": week is not an integer");
    }
    if (!schedule.is_meeting_week(week)) throw SchemaError(where + ": week " + std::to_string(week) + " is not a meeting week");
    const auto& rater = row[idx.at("rater")];
    auto key = std::make_tuple(player, week, rater);
    auto [it, fresh] = slot.emplace(key, out.size());
    if (fresh) out.push_back({player, week, row[idx.at("text")], rater, {}});
    auto& comment = out[it->second];

    const auto& level = row[idx.at("level")];
    if (level.empty()) continue;
    auto l = parse_sa_level(level);
    auto t = parse_topic(row[idx.at("topic")]);
    auto d = parse_description(row[idx.at("description")]);
    if (!l || !t || !d) throw SchemaError(where + ": unknown level, topic or description");
    SACode code{*l, *t, *d};
    if (!in_codebook(code))
      throw SchemaError(where + ": <" + level + ", " + row[idx.at("topic")] + ", " + row[idx.at("description")] +
                        "> is not in the codebook");
    comment.codes.push_back(code);
  }
  return out;
}

inline std::vector<CodedComment> read_coded_comments(const std::filesystem::path& path,
                                                     const protocol::Schedule& schedule = protocol::standard_schedule()) {
  return parse_coded_comments(detail::read_file(path), schedule);
}

// Rows: player,study,disrupted,info[,profile].
inline std::map<std::string, PlayerRecord> parse_players(const std::string& csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) return {};
  const auto idx = detail::header_index(rows[0], {"player", "study", "disrupted", "info"}, "players");
  std::map<std::string, PlayerRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto where = "players line " + std::to_string(r + 1);
    if (row.size() != rows[0].size()) throw SchemaError(where + ": wrong field count");
    PlayerRecord p;
    p.player = row[idx.at("player")];
    auto study = protocol::parse_study(row[idx.at("study")]);
    auto info = protocol::parse_info_level(row[idx.at("info")]);
    if (!study || !info) throw SchemaError(where + ": unknown study or info level");
    p.study = *study;
    p.info = *info;
    p.disrupted = row[idx.at("disrupted")];
    if (p.disrupted != "MN1" && p.disrupted != "MN2") throw SchemaError(where + ": disrupted must be MN1 or MN2");
    if (auto it = idx.find("profile"); it != idx.end() && !row[it->second].empty()) {
      p.profile = parse_profile(row[it->second]);
      if (!p.profile) throw SchemaError(where + ": unknown profile '" + row[it->second] + "'");
    }
    if (!out.emplace(p.player, p).second) throw SchemaError(where + ": duplicate player " + p.player);
  }
  return out;
}

inline std::map<std::string, PlayerRecord> read_players(const std::filesystem::path& path) {
  return parse_players(detail::read_file(path));
}

// Collapses several raters' codings of the same response into one comment.
// A tuple is kept when a strict majority of the raters assigned it; a tuple
// assigned m times by a rater counts toward multiplicity m.
inline std::vector<CodedComment> resolve_majority(const std::vector<CodedComment>& raw) {
  std::map<std::pair<std::string, int>, std::vector<const CodedComment*>> by_item;
  std::vector<std::pair<std::string, int>> order;
  for (const auto& c : raw) {
    auto key = std::make_pair(c.player, c.week);
    auto& v = by_item[key];
    if (v.empty()) order.push_back(key);
    v.push_back(&c);
  }
  std::vector<CodedComment> out;
  for (const auto& key : order) {
    const auto& ratings = by_item.at(key);
    const std::size_t k = ratings.size();
    std::map<SACode, std::vector<int>> counts;
    for (std::size_t r = 0; r < k; ++r)
      for (const auto& code : ratings[r]->codes) {
        auto& v = counts[code];
        v.resize(k, 0);
        ++v[r];
      }
    CodedComment merged{key.first, key.second, ratings.front()->text, k == 1 ? ratings.front()->rater : "majority", {}};
    for (auto& [code, per_rater] : counts) {
      std::sort(per_rater.begin(), per_rater.end(), std::greater<>());
      // Largest m such that more than k/2 raters gave it at least m times.
      const int m = per_rater[k / 2];
      for (int i = 0; i < m; ++i) merged.codes.push_back(code);
    }
    out.push_back(std::move(merged));
  }
  return out;
}

inline CodedDataset load_dataset(const std::filesystem::path& comments, const std::filesystem::path& players) {
  return {resolve_majority(read_coded_comments(comments)), read_players(players)};
}

}  // namespace gamette::analysis
