// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "cohort_driver.hpp"
#include "gamette/analysis/stats.hpp"
#include "gamette/harness/analyze.hpp"
#include "session_driver.hpp"
#include "sim_properties.hpp"

using namespace gamette;

namespace {

const std::string kFixtures = GAMETTE_DATA_DIR "/fixtures/";

// Collects failed checks; an empty list means the criterion holds.
struct Checks {
  std::vector<std::string> failed;
  std::vector<std::string> notes;  // measured values shown on PASS lines too
  void near(const std::string& what, double got, double want, double tol) {
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream s;
      s << what << " = " << got << ", want " << want << " +- " << tol;
      failed.push_back(s.str());
    }
  }
  void expect(const std::string& what, bool ok) {
    if (!ok) failed.push_back(what);
  }
};

std::map<std::string, analysis::ContingencyTable> tables(const std::string& file) {
  std::map<std::string, analysis::ContingencyTable> out;
  for (auto& t : harness::read_count_tables(kFixtures + file)) out.emplace(t.name, t.table);
  return out;
}

std::string flags(const analysis::ContingencyTable& t) {
  std::string out;
  for (const auto& row : analysis::posthoc_bonferroni(t).cells) {
    for (const auto& c : row) out += c.level == 2 ? "**" : c.level == 1 ? "*" : "-";
    out += '|';
  }
  return out;
}

void statistics_oracle(Checks& c) {
  const auto all = tables("study1_counts.csv");
  const auto d = analysis::chi_square_independence(all.at("disruption"));
  const auto i = analysis::chi_square_independence(all.at("info"));
  c.near("disruption chi2", d.chi2, 12.047, 0.01);
  c.expect("disruption df 2", d.df == 2);
  c.near("info chi2", i.chi2, 19.172, 0.01);
  c.expect("info df 4", i.df == 4);
  c.near("disruption V", d.cramers_v, 0.109, 0.001);
  c.near("info V", i.cramers_v, 0.097, 0.001);
  c.expect("disruption flags " + flags(all.at("disruption")), flags(all.at("disruption")) == "-***|-***|");
  c.expect("info flags " + flags(all.at("info")), flags(all.at("info")) == "---|***-|****-|");
}

void study2_oracle(Checks& c) {
  const auto all = tables("study2_counts.csv");
  const std::vector<std::tuple<std::string, double, double>> want{
      {"profile", 18.132, .092}, {"Hoarder", 21.216, .200}, {"Reactor", 14.122, .180}, {"Follower", 1.085, .103}};
  for (const auto& [name, chi2, v] : want) {
    const auto r = analysis::chi_square_independence(all.at(name));
    c.near(name + " chi2", r.chi2, chi2, 0.01);
    c.near(name + " V", r.cramers_v, v, 0.001);
  }
  c.expect("profile df 4", analysis::chi_square_independence(all.at("profile")).df == 4);
  const auto f = analysis::fisher_exact(all.at("Follower"));
  c.near("Follower Fisher p", f.p, 0.65, 0.02);
}

void simulation_properties(Checks& c) {
  const auto a = gamette::testing::fuzz_run(2024, 10000);
  c.expect("fuzzed run: " + a.failure, a.failure.empty());
  c.expect("fuzzed run exercises rationing", a.shortage_weeks > 100);
  const auto b = gamette::testing::fuzz_run(2024, 10000);
  c.expect("seeded runs bit-identical", a.reports == b.reports && a.final_state == b.final_state);

  // A single extra order placed at week t arrives at week t + 2.
  auto s = sim::build_network(sim::default_scenario());
  const auto ws1 = s.index("WS1");
  auto follow = [&] { return sim::ExternalDecision{sim::observe(s).suggestion, sim::AllocationPolicy::Proportional}; };
  for (int k = 0; k < 3; ++k) sim::step_in_place(s, follow());
  auto d = follow();
  d.order += 37;
  sim::step_in_place(s, d);
  sim::step_in_place(s, follow());
  c.expect("order arrives two weeks later", sim::step_in_place(s, follow()).agents[ws1].receipts == d.order);

  auto cfg = sim::default_scenario();
  cfg.disruptions = {sim::standard_disruption("MN1")};
  auto t = sim::build_network(cfg);
  const auto mn1 = t.index("MN1");
  bool clamp = true;
  while (t.week <= 40) {
    const auto r = sim::step_in_place(t, sim::ExternalDecision{sim::observe(t).suggestion, sim::AllocationPolicy::Proportional});
    const bool disrupted = r.week >= 28 && r.week <= 33;
    clamp &= r.agents[mn1].capacity == (disrupted ? 7 : 150) && r.agents[mn1].orders_placed <= r.agents[mn1].capacity;
  }
  c.expect("disruption clamps capacity to 5%", clamp);
}

sim::Units hc1_window(const char* disrupted) {
  auto cfg = sim::default_scenario();
  if (disrupted) cfg.disruptions = {sim::standard_disruption(disrupted)};
  auto s = sim::build_network(cfg);
  const auto hc1 = s.index("HC1");
  const auto& sup = s.network.suppliers[hc1];
  const auto slot = static_cast<std::size_t>(std::find(sup.begin(), sup.end(), s.index("WS1")) - sup.begin());
  sim::Units sum = 0;
  while (s.week <= 55) {
    const auto r = sim::step_in_place(s, sim::ExternalDecision{sim::observe(s).suggestion, sim::AllocationPolicy::Proportional});
    if (r.week >= 32 && r.week <= 36) sum += r.agents[hc1].ordered_from[slot];
  }
  return sum;
}

void emergent_dynamics(Checks& c) {
  const auto base = hc1_window(nullptr), mn1 = hc1_window("MN1"), mn2 = hc1_window("MN2");
  std::ostringstream s;
  s << "MN1 " << mn1 << " < baseline " << base << " < MN2 " << mn2;
  c.expect(s.str(), mn1 < base && base < mn2);
  c.notes.push_back(s.str());
}

void protocol_suite(Checks& c) {
  for (auto study : {protocol::Study::Study1, protocol::Study::Study2})
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      session::SessionService svc(gamette::testing::test_config(), std::make_shared<session::MemoryEventStore>());
      const auto run = gamette::testing::run_scripted(svc, study, seed, true);
      c.expect("scripted session: " + run.failure, run.failure.empty());
      c.expect("meeting prompts at 24..52",
               run.meeting_weeks == std::vector<int>{24, 28, 32, 36, 40, 44, 48, 52});
    }
  std::size_t restarts = 0;
  const auto replay = gamette::testing::kill_and_replay(protocol::Study::Study1, 9, &restarts);
  c.expect("kill and replay: " + replay, replay.empty());
  c.expect("restarted after every event", restarts > 90);
}

void profiling_recovery(Checks& c) {
  harness::CohortSpec spec;
  spec.sessions = 60;
  spec.mix = {1, 1, 1};
  spec.study = protocol::Study::Study2;
  spec.outliers = 6;
  spec.seed = 2024;
  spec.bubbles = harness::BubbleStyle::Silent;
  const auto run = gamette::testing::run_memory_cohort(spec);
  c.expect("cohort sessions complete", run.manifest.failures() == 0);
  const auto rec = gamette::testing::score_recovery(run);
  c.expect("profiling: " + rec.failure, rec.failure.empty());
  std::ostringstream s;
  s << "recovered " << rec.correct << "/" << rec.total << " labels (need >= 90% of 60)";
  c.expect(s.str(), rec.total == 60 && rec.rate() >= 0.9);
  c.notes.push_back(s.str());
  std::vector<std::string> planted;
  for (const auto& e : run.manifest.entries)
    if (e.planted_outlier) planted.push_back(e.result.session);
  auto excluded = rec.excluded;
  std::sort(planted.begin(), planted.end());
  std::sort(excluded.begin(), excluded.end());
  c.expect("exactly the planted outliers are excluded", planted.size() == 6 && excluded == planted);
}

void fleiss(Checks& c) {
  c.expect("perfect agreement is 1.0", analysis::fleiss_kappa({{3, 0, 0}, {0, 3, 0}, {0, 0, 3}, {3, 0, 0}}) == 1.0);
  c.near("3-rater fixture", analysis::fleiss_kappa({{3, 0, 0}, {0, 3, 0}, {1, 2, 0}, {0, 1, 2}, {1, 1, 1}, {2, 0, 1}}),
         8.0 / 35.0, 1e-9);
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<void(Checks&)> run;
    double budget_s;  // 0: no runtime bound
  };
  const std::vector<Criterion> criteria{
      {"statistics oracle", statistics_oracle, 1},
      {"study-2 oracle", study2_oracle, 5},
      {"simulation properties", simulation_properties, 10},
      {"emergent dynamics", emergent_dynamics, 0},
      {"protocol suite", protocol_suite, 0},
      {"profiling recovery", profiling_recovery, 0},
      {"fleiss kappa", fleiss, 0},
  };
  int failures = 0;
  for (const auto& k : criteria) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      k.run(c);
    } catch (const std::exception& e) {
      c.failed.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (k.budget_s > 0 && secs > k.budget_s)
      c.failed.push_back("took " + std::to_string(secs) + " s, limit " + std::to_string(k.budget_s) + " s");
    std::ostringstream line;
    line << (c.failed.empty() ? "PASS " : "FAIL ") << k.name << " (" << std::fixed;
    line.precision(3);
    line << secs << " s)";
    for (const auto& f : c.failed) line << "; " << f;
    if (c.failed.empty())
      for (const auto& n : c.notes) line << "; " << n;
    std::cout << line.str() << std::endl;
    failures += !c.failed.empty();
  }
  return failures ? 1 : 0;
}
