#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gamette/harness/analyze.hpp"
#include "gamette/harness/cohort.hpp"
#include "gamette/harness/standalone.hpp"
#include "gamette/sim/scenario.hpp"

using namespace gamette;
namespace fs = std::filesystem;

namespace {

const std::string kData = GAMETTE_DATA_DIR;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("gamette_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(GAMETTE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST(Standalone, UndisruptedRunIsStationary) {
  const auto reports = harness::run_standalone(sim::default_scenario(), 39);
  ASSERT_EQ(reports.size(), 39u);
  EXPECT_EQ(reports.front().week, 17);
  for (const auto& r : reports) EXPECT_TRUE(r.same_flows(reports.front())) << "week " << r.week;
}

TEST(Standalone, DisruptionDipsWholesalerReceipts) {
  const auto c = sim::load_scenario(kData + "/scenarios/mn1.json");
  const auto s = sim::build_network(sim::standalone(c));
  const auto ws1 = s.index("WS1"), ws2 = s.index("WS2");
  const auto reports = harness::run_standalone(c, 39);
  sim::Units low = 1 << 30;
  for (const auto& r : reports) {
    if (r.week < 28) {
      EXPECT_EQ(r.agents[ws1].receipts, 100) << "week " << r.week;
    }
    if (r.week >= 30 && r.week <= 36) low = std::min(low, r.agents[ws1].receipts);
  }
  EXPECT_LT(low, 50);
  EXPECT_EQ(reports.back().agents[ws2].backlog_after, 0);
}

TEST(Standalone, TrajectoryCsv) {
  std::ostringstream out;
  const auto c = sim::load_scenario(kData + "/scenarios/zero-demand.json");
  harness::write_trajectory(out, c, harness::run_standalone(c, 3));
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 17), "week,agent,role,i");
  std::size_t rows = 0;
  while (std::getline(in, row)) ++rows;
  EXPECT_EQ(rows, 3u * 6u);
  EXPECT_THROW(harness::run_standalone(c, -1), std::invalid_argument);
}

TEST(Cohort, FollowersWriteLogsAndManifest) {
  const auto dir = scratch("cohort");
  harness::CohortSpec spec;
  spec.sessions = 12;
  spec.threads = 3;
  const auto m = harness::run_cohort_embedded(spec, dir);
  EXPECT_EQ(m.failures(), 0u);
  std::size_t logs = 0, bubbles = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".jsonl") continue;
    ++logs;
    for (const auto& ev : session::read_event_log(e.path())) bubbles += ev.kind == session::EventKind::BubbleAnswered;
  }
  EXPECT_EQ(logs, 12u);
  EXPECT_EQ(bubbles, 96u);
  const auto j = m.to_json();
  ASSERT_EQ(j.at("entries").size(), 12u);
  for (const auto& e : j.at("entries")) {
    EXPECT_EQ(e.at("profile"), "Follower");
    EXPECT_TRUE(e.at("complete").get<bool>());
    EXPECT_EQ(e.at("meetings"), 8);
  }
  fs::remove_all(dir);
}

TEST(Cohort, RosterIsDeterministic) {
  harness::CohortSpec spec;
  spec.sessions = 10;
  spec.mix = harness::parse_mix("follower=1,hoarder=2,reactor=2");
  spec.outliers = 2;
  spec.abandoned = 1;
  const auto a = harness::cohort_roster(spec), b = harness::cohort_roster(spec);
  ASSERT_EQ(a.size(), 13u);
  std::map<analysis::BehaviorProfile, int> n;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seed, b[i].seed);
    if (!a[i].planted_outlier && !a[i].planted_abandon) ++n[a[i].bot.profile];
  }
  EXPECT_EQ(n[analysis::BehaviorProfile::Follower], 2);
  EXPECT_EQ(n[analysis::BehaviorProfile::Hoarder], 4);
  EXPECT_EQ(n[analysis::BehaviorProfile::Reactor], 4);
  EXPECT_THROW(harness::parse_mix("follower=0"), std::invalid_argument);
  EXPECT_THROW(harness::parse_mix("shouter=1"), std::invalid_argument);
}

TEST(Cohort, AbandonedSessionsAreIncomplete) {
  const auto dir = scratch("abandon");
  harness::CohortSpec spec;
  spec.sessions = 2;
  spec.abandoned = 1;
  const auto m = harness::run_cohort_embedded(spec, dir);
  EXPECT_EQ(m.failures(), 0u);
  EXPECT_FALSE(m.entries.back().result.complete);
  const auto rep = analysis::filter_outliers(analysis::load_decision_logs(dir));
  ASSERT_EQ(rep.excluded.size(), 1u);
  EXPECT_EQ(rep.excluded[0].reason, "incomplete session");
  fs::remove_all(dir);
}

TEST(Analyze, EmptyInputIsSchemaError) {
  const auto dir = scratch("empty");
  harness::AnalysisInputs in;
  in.logs = dir.string();
  try {
    harness::run_analysis(in);
    FAIL() << "expected SchemaError";
  } catch (const analysis::SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("no data"), std::string::npos);
  }
  EXPECT_THROW(harness::run_analysis({}), analysis::SchemaError);
  fs::remove_all(dir);
}

TEST(Analyze, LogsDirectoryProfiles) {
  const auto dir = scratch("profile");
  harness::CohortSpec spec;
  spec.sessions = 30;
  spec.mix = {1, 1, 1};
  spec.study = protocol::Study::Study2;
  spec.outliers = 2;
  const auto m = harness::run_cohort_embedded(spec, dir);
  ASSERT_EQ(m.failures(), 0u);
  harness::AnalysisInputs in;
  in.logs = dir.string();
  const auto rep = harness::run_analysis(in);
  ASSERT_TRUE(rep.outliers);
  EXPECT_EQ(rep.outliers->excluded.size(), 2u);
  ASSERT_TRUE(rep.profiles);
  EXPECT_EQ(rep.profiles->players.size(), 30u);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const auto counts = kData + "/fixtures/study1_counts.csv";
  EXPECT_EQ(cli("analyze --counts " + counts + " --expect disruption=12.047 --expect info=19.172"), 0);
  EXPECT_EQ(cli("analyze --counts " + counts + " --expect disruption=13"), 2);
  EXPECT_EQ(cli("analyze --counts /nonexistent.csv"), 1);
  EXPECT_EQ(cli("analyze"), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("simulate --scenario /nonexistent.json"), 1);
}

TEST(Cli, SimulateAndCohortOutputs) {
  const auto dir = scratch("cli");
  EXPECT_EQ(cli("simulate --weeks 5 -o " + (dir / "t.csv").string()), 0);
  EXPECT_EQ(count_lines(dir / "t.csv"), 1u + 1u + 5u * 6u);  // provenance, header, rows
  EXPECT_EQ(cli("cohort -n 3 --seed 4 -o " + (dir / "c").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "c" / "manifest.json"));
  EXPECT_EQ(cli("analyze --logs " + (dir / "c").string() + " -o " + (dir / "r").string()), 0);
  EXPECT_FALSE(fs::is_empty(dir / "r"));
  fs::remove_all(dir);
}
