#include <gtest/gtest.h>

#include <algorithm>

#include "cohort_driver.hpp"
#include "gamette/analysis/hmm.hpp"
#include "gamette/analysis/profiling.hpp"

using namespace gamette;
using namespace gamette::analysis;

namespace {

DecisionLog synthetic(const std::string& id, double early, double late) {
  DecisionLog log{id, {"MN1", protocol::InfoLevel::None}, true, {}};
  for (int w = 21; w <= 55; ++w) {
    const double f = w < 28 ? early : late;
    log.orders.push_back({w, static_cast<std::int64_t>(100 * f), 100});
  }
  return log;
}

harness::CohortSpec mixed_cohort(std::size_t per_profile, std::uint64_t seed) {
  harness::CohortSpec s;
  s.sessions = 3 * per_profile;
  s.mix = {1, 1, 1};
  s.study = protocol::Study::Study2;
  s.seed = seed;
  s.bubbles = harness::BubbleStyle::Silent;
  return s;
}

}  // namespace

TEST(Hmm, ForwardMatchesEnumeration) {
  Hmm m = diagonal_hmm(2, 0.7, 0.9);
  const Sequence o{0, 1, 1};
  double total = 0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        total += m.pi[a] * m.b[a][o[0]] * m.a[a][b] * m.b[b][o[1]] * m.a[b][c] * m.b[c][o[2]];
  EXPECT_NEAR(log_likelihood(m, {o}), std::log(total), 1e-12);
}

TEST(Hmm, BaumWelchNeverDecreasesLikelihood) {
  const std::vector<Sequence> data{{0, 0, 1, 1, 2, 2, 2}, {1, 1, 1, 0, 0, 2}, {2, 2, 2, 2, 1}};
  Hmm m = diagonal_hmm(3);
  double prev = log_likelihood(m, data);
  for (int i = 0; i < 20; ++i) {
    baum_welch(m, data, 1);
    const double ll = log_likelihood(m, data);
    EXPECT_GE(ll, prev - 1e-9);
    prev = ll;
  }
}

TEST(Hmm, ViterbiFollowsCleanSignal) {
  const Hmm m = diagonal_hmm(3, 0.9, 0.95);
  const Sequence o{0, 0, 0, 2, 2, 2, 1, 1};
  EXPECT_EQ(viterbi(m, o), (std::vector<int>{0, 0, 0, 2, 2, 2, 1, 1}));
}

TEST(Modes, DeviationBand) {
  EXPECT_EQ(discretize(0.05), Mode::Follow);
  EXPECT_EQ(discretize(-0.05), Mode::Follow);
  EXPECT_EQ(discretize(0.051), Mode::Over);
  EXPECT_EQ(discretize(-0.2), Mode::Under);
  EXPECT_DOUBLE_EQ(relative_deviation({21, 5, 0}), 5.0);  // suggestion floored at one
}

TEST(Medoids, SeparatedGroups) {
  const std::vector<std::string> s{"FFFF", "FFFO", "OOOO", "OOOF", "UUUU"};
  std::vector<std::vector<double>> d(s.size(), std::vector<double>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) d[i][j] = static_cast<double>(hamming(s[i], s[j]));
  const auto a = k_medoids(d, 3);
  EXPECT_EQ(a[0], a[1]);
  EXPECT_EQ(a[2], a[3]);
  EXPECT_NE(a[0], a[2]);
  EXPECT_NE(a[4], a[0]);
  EXPECT_NE(a[4], a[2]);
}

TEST(Profiles, SyntheticArchetypes) {
  std::vector<DecisionLog> logs;
  for (int i = 0; i < 6; ++i) {
    logs.push_back(synthetic("f" + std::to_string(i), 1.0, 1.0));
    logs.push_back(synthetic("h" + std::to_string(i), 1.5, 1.5));
    logs.push_back(synthetic("r" + std::to_string(i), 1.0, 1.5));
  }
  const auto res = profile_players(logs);
  ASSERT_FALSE(res.degenerate) << res.degenerate_reason;
  ASSERT_EQ(res.players.size(), logs.size());
  for (const auto& p : res.players) {
    const auto want = p.player[0] == 'f'   ? BehaviorProfile::Follower
                      : p.player[0] == 'h' ? BehaviorProfile::Hoarder
                                           : BehaviorProfile::Reactor;
    EXPECT_EQ(p.profile, want) << p.player << " " << p.modes;
  }
}

TEST(Profiles, SingleFollowerIsFollower) {
  const auto res = profile_players({synthetic("only", 1.0, 1.0)});
  ASSERT_FALSE(res.degenerate) << res.degenerate_reason;
  ASSERT_EQ(res.players.size(), 1u);
  EXPECT_EQ(res.players[0].profile, BehaviorProfile::Follower);
}

TEST(Profiles, ShortLogsAreSkipped) {
  auto log = synthetic("short", 1.0, 1.0);
  log.orders.resize(5);
  const auto res = profile_players({log});
  EXPECT_TRUE(res.degenerate);
  ASSERT_EQ(res.skipped.size(), 1u);
  EXPECT_EQ(res.skipped[0].player, "short");
}

TEST(Outliers, CleanCohortKeepsEveryone) {
  std::vector<DecisionLog> logs{synthetic("a", 1.0, 1.0), synthetic("b", 1.5, 1.5), synthetic("c", 0.0, 0.0)};
  EXPECT_TRUE(filter_outliers(logs).excluded.empty());
}

TEST(Outliers, ExtremeOrderAndIncompleteSessionExcluded) {
  auto wild = synthetic("wild", 1.0, 1.0);
  wild.orders[10].order = 100000;
  auto quit = synthetic("quit", 1.0, 1.0);
  quit.complete = false;
  auto edge = synthetic("edge", 1.0, 1.0);
  edge.orders[3].order = 1000;  // exactly ten times the suggestion is kept
  const auto rep = filter_outliers({wild, quit, edge});
  ASSERT_EQ(rep.excluded.size(), 2u);
  EXPECT_EQ(rep.excluded[0].player, "wild");
  EXPECT_NE(rep.excluded[0].reason.find("week 31"), std::string::npos);
  EXPECT_EQ(rep.excluded[1].reason, "incomplete session");
  ASSERT_EQ(rep.retained.size(), 1u);
  EXPECT_EQ(rep.retained[0].player, "edge");
}

TEST(Outliers, PlantedExtremesExactlyExcluded) {
  auto spec = mixed_cohort(40, 17);
  spec.sessions = 121;
  spec.outliers = 14;
  const auto run = gamette::testing::run_memory_cohort(spec);
  ASSERT_EQ(run.manifest.failures(), 0u);
  ASSERT_EQ(run.logs.size(), 135u);
  std::vector<std::string> planted, excluded;
  for (const auto& e : run.manifest.entries)
    if (e.planted_outlier) planted.push_back(e.result.session);
  for (const auto& x : filter_outliers(run.logs).excluded) excluded.push_back(x.player);
  std::sort(planted.begin(), planted.end());
  std::sort(excluded.begin(), excluded.end());
  EXPECT_EQ(excluded, planted);
}

TEST(Profiles, BotCohortRecovery) {
  const auto run = gamette::testing::run_memory_cohort(mixed_cohort(20, 5));
  ASSERT_EQ(run.manifest.failures(), 0u);
  const auto rec = gamette::testing::score_recovery(run);
  ASSERT_EQ(rec.failure, "");
  EXPECT_TRUE(rec.excluded.empty());
  EXPECT_EQ(rec.total, 60u);
  EXPECT_GE(rec.rate(), 0.9);
}

TEST(Profiles, DecisionLogFromEvents) {
  auto spec = mixed_cohort(1, 2);
  spec.sessions = 1;
  spec.mix = {1, 0, 0};
  const auto run = gamette::testing::run_memory_cohort(spec);
  ASSERT_EQ(run.logs.size(), 1u);
  const auto& log = run.logs[0];
  EXPECT_TRUE(log.complete);
  EXPECT_EQ(log.orders.size(), 35u);
  EXPECT_EQ(log.orders.front().week, 21);
  EXPECT_EQ(log.orders.back().week, 55);
  EXPECT_THROW(decision_log(std::vector<session::SessionEvent>{}), SchemaError);
}
