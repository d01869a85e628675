// gamette: simulate, drive bot cohorts, serve sessions, analyze coded data.
#include <csignal>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gamette/harness/analyze.hpp"
#include "gamette/harness/cohort.hpp"
#include "gamette/harness/standalone.hpp"
#include "gamette/session/http.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gamette;

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kCheckFailed = 2;

std::string provenance(const std::string&, const std::vector<std::string>& args) {
  std::string p = "gamette " GAMETTE_VERSION;
  for (const auto& a : args) p += " " + a;
  return p;
}

sim::ScenarioConfig scenario_or_default(const std::string& path) {
  return path.empty() ? sim::default_scenario() : sim::load_scenario(path);
}

int cmd_simulate(const std::string& scenario_path, int weeks, const std::string& out_path,
                 const std::vector<std::string>& args) {
  const auto scenario = scenario_or_default(scenario_path);
  const auto reports = harness::run_standalone(scenario, weeks);
  if (out_path.empty() || out_path == "-") {
    std::cout << "# " << provenance("simulate", args) << "\n";
    harness::write_trajectory(std::cout, scenario, reports);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "# " << provenance("simulate", args) << "\n";
    harness::write_trajectory(out, scenario, reports);
    std::cerr << "wrote " << reports.size() << " weeks to " << out_path << "\n";
  }
  return kOk;
}

struct CohortArgs {
  harness::CohortSpec spec;
  std::string study = "study1", mix = "follower=1", out = "cohort", server, scenario, bubbles = "template";
};

int cmd_cohort(CohortArgs a, const std::vector<std::string>& args) {
  auto study = protocol::parse_study(a.study);
  if (!study) throw std::invalid_argument("unknown study tag '" + a.study + "'");
  a.spec.study = *study;
  a.spec.mix = harness::parse_mix(a.mix);
  if (a.bubbles != "template" && a.bubbles != "silent") throw std::invalid_argument("--bubbles must be template or silent");
  a.spec.bubbles = a.bubbles == "silent" ? harness::BubbleStyle::Silent : harness::BubbleStyle::Template;
  fs::create_directories(a.out);

  harness::Manifest m;
  if (a.server.empty()) {
    session::ServiceConfig cfg;
    cfg.scenario = scenario_or_default(a.scenario);
    cfg.seed = a.spec.seed;
    m = harness::run_cohort_embedded(a.spec, a.out, cfg);
  } else {
    const auto colon = a.server.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("--server must be host:port");
    const auto host = a.server.substr(0, colon);
    const int port = std::stoi(a.server.substr(colon + 1));
    m = harness::run_cohort(a.spec, [&] { return std::make_unique<session::HttpClient>(host, port); });
  }
  harness::write_manifest(m, fs::path(a.out) / "manifest.json", provenance("cohort", args));
  std::size_t complete = 0, meetings = 0;
  for (const auto& e : m.entries) {
    complete += e.result.complete;
    meetings += e.result.meetings;
    if (!e.result.error.empty()) std::cerr << "session " << e.index << " failed: " << e.result.error << "\n";
  }
  std::cout << "sessions=" << m.entries.size() << " complete=" << complete << " bubbles=" << meetings
            << " failures=" << m.failures() << " dir=" << a.out << "\n";
  return m.failures() == 0 ? kOk : kCheckFailed;
}

struct AnalyzeArgs {
  std::string counts, comments, players, logs, out;
  std::vector<std::string> expect;  // table=chi2
};

int cmd_analyze(const AnalyzeArgs& a, const std::vector<std::string>& args) {
  harness::AnalysisInputs in;
  if (!a.counts.empty()) in.counts = a.counts;
  if (!a.comments.empty()) in.comments = a.comments;
  if (!a.players.empty()) in.players = a.players;
  if (!a.logs.empty()) in.logs = a.logs;
  const auto rep = harness::run_analysis(in);
  std::cout << "# " << provenance("analyze", args) << "\n";
  harness::print_summary(std::cout, rep);
  if (!a.out.empty()) harness::write_report(rep, a.out, provenance("analyze", args));

  int status = kOk;
  for (const auto& e : a.expect) {
    const auto eq = e.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--expect takes table=chi2");
    const auto name = e.substr(0, eq);
    const double want = std::stod(e.substr(eq + 1));
    auto it = std::find_if(rep.tables.begin(), rep.tables.end(), [&](const auto& t) { return t.name == name; });
    if (it == rep.tables.end()) {
      std::cout << "CHECK FAIL " << name << ": no such table\n";
      status = kCheckFailed;
    } else if (std::fabs(it->test.chi2 - want) > 0.01) {
      std::cout << "CHECK FAIL " << name << ": chi2 " << it->test.chi2 << " != " << want << "\n";
      status = kCheckFailed;
    } else {
      std::cout << "CHECK PASS " << name << ": chi2 " << harness::fmt(it->test.chi2, 3) << "\n";
    }
  }
  return status;
}

session::HttpServer* g_server = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& scenario, const std::string& data_dir,
              std::uint64_t seed, int idle) {
  session::ServiceConfig cfg;
  cfg.scenario = scenario_or_default(scenario);
  cfg.seed = seed;
  cfg.idle_timeout = std::chrono::seconds(idle);
  session::SessionService service(cfg, std::make_shared<session::FileEventStore>(data_dir));
  session::HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::atomic<bool> running{true};
  std::thread reaper([&] {
    while (running) {
      for (int i = 0; i < 50 && running; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      service.expire_idle();
    }
  });
  std::cerr << "serving on " << host << ":" << port << ", logs in " << data_dir << "\n";
  const bool ok = server.listen(host, port);
  running = false;
  reaper.join();
  g_server = nullptr;
  if (!ok) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gamette: supply-chain experiment platform"};
  app.set_version_flag("--version", GAMETTE_VERSION);
  app.require_subcommand(1);
  std::vector<std::string> args(argv + 1, argv + argc);

  std::string scenario, out;
  int weeks = 39;
  auto* simulate = app.add_subcommand("simulate", "run the network with every agent automated");
  simulate->add_option("--scenario", scenario, "scenario JSON (default: built-in calibration)");
  simulate->add_option("--weeks", weeks, "weeks to simulate")->check(CLI::NonNegativeNumber);
  simulate->add_option("-o,--out", out, "trajectory CSV path (default: stdout)");

  CohortArgs cohort_args;
  auto* cohort = app.add_subcommand("cohort", "play scripted bot sessions and store their event logs");
  cohort->add_option("-n,--sessions", cohort_args.spec.sessions, "regular bot sessions");
  cohort->add_option("--study", cohort_args.study, "study1 or study2");
  cohort->add_option("--mix", cohort_args.mix, "profile weights, e.g. follower=1,hoarder=1,reactor=1");
  cohort->add_option("--outliers", cohort_args.spec.outliers, "extra sessions with one extreme order");
  cohort->add_option("--abandoned", cohort_args.spec.abandoned, "extra sessions that stop mid-game");
  cohort->add_option("--noise", cohort_args.spec.noise, "per-week perturbation probability")->check(CLI::Range(0.0, 1.0));
  cohort->add_option("--multiplier", cohort_args.spec.multiplier, "over-ordering multiplier")->check(CLI::Range(1.0, 100.0));
  cohort->add_option("--bubbles", cohort_args.bubbles, "template or silent");
  cohort->add_option("--seed", cohort_args.spec.seed, "cohort seed");
  cohort->add_option("--threads", cohort_args.spec.threads, "parallel sessions")->check(CLI::PositiveNumber);
  cohort->add_option("-o,--out", cohort_args.out, "output directory for logs and manifest.json");
  cohort->add_option("--server", cohort_args.server, "host:port of a running service (default: embedded)");
  cohort->add_option("--scenario", cohort_args.scenario, "scenario JSON for the embedded service");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "contingency tests, reliability, series and profiling");
  analyze->add_option("--counts", analyze_args.counts, "count tables CSV");
  analyze->add_option("--comments", analyze_args.comments, "coded comments CSV");
  analyze->add_option("--players", analyze_args.players, "players CSV for --comments");
  analyze->add_option("--logs", analyze_args.logs, "directory of session event logs to profile");
  analyze->add_option("-o,--out", analyze_args.out, "directory for result files");
  analyze->add_option("--expect", analyze_args.expect, "table=chi2 check (exit 2 when off by more than 0.01)");

  std::string host = "127.0.0.1", data_dir = "sessions";
  int port = 8080, idle = 1800;
  std::uint64_t seed = 1;
  auto* serve = app.add_subcommand("serve", "host sessions over HTTP");
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port");
  serve->add_option("--scenario", scenario, "scenario JSON (default: built-in calibration)");
  serve->add_option("--data-dir", data_dir, "event log directory");
  serve->add_option("--seed", seed, "condition assignment seed");
  serve->add_option("--idle-timeout", idle, "seconds before an idle session is unloaded")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (*simulate) return cmd_simulate(scenario, weeks, out, args);
    if (*cohort) return cmd_cohort(cohort_args, args);
    if (*analyze) return cmd_analyze(analyze_args, args);
    if (*serve) return cmd_serve(host, port, scenario, data_dir, seed, idle);
  } catch (const analysis::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const sim::ConfigError& e) {
    std::cerr << "error: scenario: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
