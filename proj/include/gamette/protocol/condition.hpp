#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gamette/sim/scenario.hpp"

namespace gamette::protocol {

enum class Study { Study1, Study2 };
enum class InfoLevel { None, Partial, Complete };

struct Condition {
  std::string disrupted = "MN1";  // manufacturer whose capacity is cut
  InfoLevel info = InfoLevel::None;
  Study study = Study::Study1;
  friend bool operator==(const Condition&, const Condition&) = default;
};

inline std::string_view to_string(Study s) { return s == Study::Study1 ? "study1" : "study2"; }

inline std::optional<Study> parse_study(std::string_view s) {
  if (s == "study1") return Study::Study1;
  if (s == "study2") return Study::Study2;
  return std::nullopt;
}

inline std::string_view to_string(InfoLevel i) {
  switch (i) {
    case InfoLevel::None: return "none";
    case InfoLevel::Partial: return "partial";
    case InfoLevel::Complete: return "complete";
  }
  return "?";
}

inline std::optional<InfoLevel> parse_info_level(std::string_view s) {
  if (s == "none") return InfoLevel::None;
  if (s == "partial") return InfoLevel::Partial;
  if (s == "complete") return InfoLevel::Complete;
  return std::nullopt;
}

// Conditions in table order: disruption varies fastest.
inline std::vector<Condition> conditions_for(Study study) {
  if (study == Study::Study2)
    return {{"MN1", InfoLevel::None, Study::Study2}, {"MN1", InfoLevel::Partial, Study::Study2}};
  std::vector<Condition> out;
  for (auto info : {InfoLevel::None, InfoLevel::Partial, InfoLevel::Complete})
    for (const char* mn : {"MN1", "MN2"}) out.push_back({mn, info, Study::Study1});
  return out;
}

inline bool is_valid(const Condition& c) {
  for (const auto& k : conditions_for(c.study))
    if (k == c) return true;
  return false;
}

// splitmix64 finalizer; a fixed, platform-independent mixing function.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform draw in [0, n) as a pure function of (seed, index).
inline std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t index, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = mix64(seed ^ mix64(index));
  while (x >= limit) x = mix64(x);
  return x % n;
}

inline Condition assign_condition(std::uint64_t seed, std::uint64_t draw_index, Study study) {
  const auto set = conditions_for(study);
  return set[uniform_index(seed, draw_index, set.size())];
}

inline Condition assign_condition(std::uint64_t seed, std::uint64_t draw_index, std::string_view study_tag) {
  auto s = parse_study(study_tag);
  if (!s) throw std::invalid_argument("unknown study tag " + std::string(study_tag));
  return assign_condition(seed, draw_index, *s);
}

// Seeded stream of assignments.
class ConditionAssigner {
 public:
  explicit ConditionAssigner(std::uint64_t seed) : seed_(seed) {}
  Condition next(Study study) { return assign_condition(seed_, counter_++, study); }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace gamette::protocol
