#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gamette/analysis/profiling.hpp"
#include "gamette/harness/cohort.hpp"

// Runs bot cohorts against an in-memory service and scores how well the
// profiling pipeline recovers the bots' scripted behaviour.
namespace gamette::testing {

struct CohortRun {
  harness::Manifest manifest;
  std::vector<analysis::DecisionLog> logs;
};

inline CohortRun run_memory_cohort(const harness::CohortSpec& spec) {
  session::ServiceConfig cfg;
  cfg.seed = spec.seed;
  session::SessionService svc(cfg, std::make_shared<session::MemoryEventStore>());
  CohortRun out{harness::run_cohort(spec, [&] { return std::make_unique<session::LocalClient>(svc); }), {}};
  for (const auto& e : out.manifest.entries)
    if (!e.result.session.empty()) out.logs.push_back(analysis::decision_log(svc.events(e.result.session)));
  return out;
}

struct Recovery {
  std::size_t correct = 0, total = 0;
  std::vector<std::string> excluded;  // players dropped as outliers or incomplete
  std::string failure;                // empty unless the pipeline itself failed
  double rate() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};

inline Recovery score_recovery(const CohortRun& run) {
  Recovery rec;
  const auto filtered = analysis::filter_outliers(run.logs);
  for (const auto& x : filtered.excluded) rec.excluded.push_back(x.player);
  const auto prof = analysis::profile_players(filtered.retained);
  if (prof.degenerate) {
    rec.failure = prof.degenerate_reason;
    return rec;
  }
  for (const auto& p : prof.players)
    for (const auto& e : run.manifest.entries)
      if (e.result.session == p.player) {
        ++rec.total;
        rec.correct += e.bot.profile == p.profile;
      }
  return rec;
}

}  // namespace gamette::testing
