#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gamette/analysis/descriptives.hpp"
#include "gamette/analysis/profiling.hpp"
#include "gamette/analysis/stats.hpp"

// End-to-end analysis: contingency tests, post-hoc flags, reliability and
// descriptive series, written as delimited files.
namespace gamette::harness {

struct NamedTable {
  std::string name;
  analysis::ContingencyTable table;
};

struct TableAnalysis {
  std::string name;
  analysis::ContingencyTable table;
  analysis::TestResult test;
  analysis::Posthoc posthoc;
  std::optional<analysis::FisherResult> fisher;  // run when some expected count is below 5
};

inline TableAnalysis analyze_table(const NamedTable& t, analysis::BonferroniFamily family = analysis::BonferroniFamily::Row) {
  TableAnalysis a{t.name, t.table, analysis::chi_square_independence(t.table),
                  analysis::posthoc_bonferroni(t.table, 0.05, 0.01, family), std::nullopt};
  if (a.test.assumption_violated()) a.fisher = analysis::fisher_exact(t.table);
  return a;
}

// Count tables: table,row,[players,]perception,comprehension,projection.
inline std::vector<NamedTable> parse_count_tables(const std::string& csv) {
  const auto rows = analysis::parse_csv(csv);
  if (rows.size() < 2) throw analysis::SchemaError("no data: count table file has no rows");
  const auto idx =
      analysis::detail::header_index(rows[0], {"table", "row", "perception", "comprehension", "projection"}, "counts");
  std::vector<NamedTable> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) throw analysis::SchemaError("counts line " + std::to_string(r + 1) + ": wrong field count");
    const auto& name = row[idx.at("table")];
    if (out.empty() || out.back().name != name) {
      for (const auto& t : out)
        if (t.name == name) throw analysis::SchemaError("counts: rows of table '" + name + "' are not contiguous");
      out.push_back({name, {{}, {"Perception", "Comprehension", "Projection"}, {}}});
    }
    std::vector<std::int64_t> counts;
    for (const char* col : {"perception", "comprehension", "projection"}) {
      try {
        std::size_t used = 0;
        const auto v = std::stoll(row[idx.at(col)], &used);
        if (used != row[idx.at(col)].size() || v < 0) throw std::invalid_argument("bad");
        counts.push_back(v);
      } catch (const std::exception&) {
        throw analysis::SchemaError("counts line " + std::to_string(r + 1) + ": '" + col + "' is not a count");
      }
    }
    out.back().table.rows.push_back(row[idx.at("row")]);
    out.back().table.counts.push_back(counts);
  }
  return out;
}

inline std::vector<NamedTable> read_count_tables(const std::filesystem::path& path) {
  return parse_count_tables(analysis::detail::read_file(path));
}

// Tables implied by a coded dataset: by condition when no player carries a
// behavior profile, otherwise by profile and by info level within profile.
inline std::vector<NamedTable> dataset_tables(const analysis::CodedDataset& data) {
  bool profiled = !data.players.empty();
  for (const auto& [id, p] : data.players) profiled = profiled && p.profile.has_value();
  std::vector<NamedTable> out;
  if (!profiled) {
    out.push_back({"disruption", analysis::build_contingency(data, analysis::Grouping::Disruption)});
    out.push_back({"info", analysis::build_contingency(data, analysis::Grouping::Info)});
    return out;
  }
  out.push_back({"profile", analysis::build_contingency(data, analysis::Grouping::Profile)});
  const auto split = analysis::build_contingency(data, analysis::Grouping::ProfileInfo);
  for (auto p : analysis::kProfiles) {
    const std::string prefix = std::string(analysis::to_string(p)) + "/";
    NamedTable t{std::string(analysis::to_string(p)), {{}, split.cols, {}}};
    for (std::size_t i = 0; i < split.r(); ++i)
      if (split.rows[i].rfind(prefix, 0) == 0) {
        t.table.rows.push_back(split.rows[i].substr(prefix.size()));
        t.table.counts.push_back(split.counts[i]);
      }
    if (t.table.r() >= 2) out.push_back(std::move(t));
  }
  return out;
}

struct AnalysisReport {
  std::vector<TableAnalysis> tables;
  std::optional<double> kappa;  // SA-level presence agreement, multi-rater input only
  std::optional<analysis::WordStats> words;
  std::map<std::string, std::map<std::string, analysis::RatioSeries>> series;  // grouping -> group -> series
  std::optional<analysis::OutlierReport> outliers;
  std::optional<analysis::ProfileResult> profiles;
};

inline std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(prec) << v;
  return s.str();
}

inline std::string p_text(double p) { return p < 0.001 ? "<.001" : fmt(p, 4); }

inline void print_summary(std::ostream& out, const AnalysisReport& rep) {
  for (const auto& t : rep.tables) {
    out << t.name << ": chi2=" << fmt(t.test.chi2, 3) << " df=" << t.test.df << " p=" << p_text(t.test.p)
        << " V=" << fmt(t.test.cramers_v, 3) << " N=" << t.test.n;
    if (t.test.assumption_violated()) out << " (" << t.test.low_expected_cells << " cells with E<5)";
    if (t.fisher) out << " fisher_p=" << fmt(t.fisher->p, 4) << (t.fisher->exact ? "" : " (Monte Carlo)");
    out << "\n";
    for (std::size_t i = 0; i < t.table.r(); ++i) {
      out << "  " << std::left << std::setw(10) << t.table.rows[i] << std::right;
      for (std::size_t j = 0; j < t.table.c(); ++j) {
        const int lvl = t.posthoc.cells[i][j].level;
        out << std::setw(7) << t.table.counts[i][j] << std::left << std::setw(2) << (lvl == 2 ? "**" : lvl == 1 ? "*" : "")
            << std::right << " (" << fmt(t.table.expected(i, j), 1) << ")";
      }
      out << "\n";
    }
  }
  if (rep.kappa) out << "fleiss_kappa(sa-level presence)=" << fmt(*rep.kappa, 4) << "\n";
  if (rep.words)
    out << "words: mean=" << fmt(rep.words->mean, 2) << " median=" << fmt(rep.words->median, 2)
        << " iqr=" << fmt(rep.words->iqr, 2) << " unanswered=" << fmt(100 * rep.words->unanswered_rate, 1) << "%\n";
  if (rep.outliers) out << "outliers excluded: " << rep.outliers->excluded.size() << "\n";
  if (rep.profiles) {
    if (rep.profiles->degenerate) {
      out << "profiling: degenerate fit: " << rep.profiles->degenerate_reason << "\n";
    } else {
      std::map<std::string, int> n;
      for (const auto& p : rep.profiles->players) ++n[std::string(analysis::to_string(p.profile))];
      out << "profiles:";
      for (const auto& [k, v] : n) out << " " << k << "=" << v;
      out << "\n";
    }
  }
}

namespace detail {
inline std::ofstream open_output(const std::filesystem::path& path, const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# " << provenance << "\n";
  return out;
}
}  // namespace detail

// Writes one delimited file per output family under `dir`.
inline void write_report(const AnalysisReport& rep, const std::filesystem::path& dir, const std::string& provenance) {
  std::filesystem::create_directories(dir);
  {
    auto out = detail::open_output(dir / "tests.csv", provenance);
    out << "table,chi2,df,p,cramers_v,n,low_expected_cells,fisher_p,fisher_exact\n";
    for (const auto& t : rep.tables)
      out << t.name << ',' << fmt(t.test.chi2, 6) << ',' << t.test.df << ',' << fmt(t.test.p, 8) << ','
          << fmt(t.test.cramers_v, 6) << ',' << t.test.n << ',' << t.test.low_expected_cells << ','
          << (t.fisher ? fmt(t.fisher->p, 8) : "") << ',' << (t.fisher ? (t.fisher->exact ? "true" : "false") : "")
          << '\n';
  }
  {
    auto out = detail::open_output(dir / "cells.csv", provenance);
    out << "table,row,level,count,expected,adjusted_residual,p,flag\n";
    for (const auto& t : rep.tables)
      for (std::size_t i = 0; i < t.table.r(); ++i)
        for (std::size_t j = 0; j < t.table.c(); ++j) {
          const auto& c = t.posthoc.cells[i][j];
          out << t.name << ',' << t.table.rows[i] << ',' << t.table.cols[j] << ',' << t.table.counts[i][j] << ','
              << fmt(t.table.expected(i, j), 4) << ',' << fmt(c.residual, 4) << ',' << fmt(c.p, 8) << ','
              << (c.level == 2 ? "**" : c.level == 1 ? "*" : "") << '\n';
        }
  }
  for (const auto& [grouping, groups] : rep.series) {
    auto out = detail::open_output(dir / ("count_ratio_" + grouping + ".csv"), provenance);
    out << "group,level,week,count,group_size,ratio\n";
    for (const auto& [label, s] : groups)
      for (std::size_t l = 0; l < s.counts.size(); ++l)
        for (std::size_t k = 0; k < s.weeks.size(); ++k)
          out << label << ',' << analysis::to_string(analysis::kSaLevels[l]) << ',' << s.weeks[k] << ','
              << s.counts[l][k] << ',' << s.group_size << ',' << fmt(s.ratios[l][k], 6) << '\n';
  }
  if (rep.words) {
    auto out = detail::open_output(dir / "word_stats.csv", provenance);
    out << "scope,comments,mean,median,q1,q3,iqr,unanswered_rate\n";
    const auto& w = *rep.words;
    out << "all," << w.comments << ',' << fmt(w.mean, 4) << ',' << fmt(w.median, 4) << ',' << fmt(w.q1, 4) << ','
        << fmt(w.q3, 4) << ',' << fmt(w.iqr, 4) << ',' << fmt(w.unanswered_rate, 4) << '\n';
    auto weekly = detail::open_output(dir / "word_weekly.csv", provenance);
    weekly << "week,mean_words\n";
    for (const auto& [week, mean] : w.per_week_mean) weekly << week << ',' << fmt(mean, 4) << '\n';
  }
  if (rep.kappa) {
    auto out = detail::open_output(dir / "reliability.csv", provenance);
    out << "measure,value\nfleiss_kappa_sa_presence," << fmt(*rep.kappa, 6) << '\n';
  }
  if (rep.outliers) {
    auto out = detail::open_output(dir / "exclusions.csv", provenance);
    out << "player,reason\n";
    for (const auto& e : rep.outliers->excluded) out << e.player << ',' << analysis::csv_escape(e.reason) << '\n';
  }
  if (rep.profiles) {
    auto out = detail::open_output(dir / "profiles.csv", provenance);
    if (rep.profiles->degenerate) {
      out << "# degenerate fit: " << rep.profiles->degenerate_reason << "\n";
    }
    out << "player,profile,cluster,modes\n";
    for (const auto& p : rep.profiles->players)
      out << p.player << ',' << analysis::to_string(p.profile) << ',' << p.cluster << ',' << p.modes << '\n';
  }
}

struct AnalysisInputs {
  std::optional<std::filesystem::path> counts;    // published-style count tables
  std::optional<std::filesystem::path> comments;  // coded comments
  std::optional<std::filesystem::path> players;   // player table for the comments
  std::optional<std::filesystem::path> logs;      // directory of session event logs
};

// Runs every analysis the inputs allow. Throws SchemaError on unusable input,
// including an input that holds no data.
inline AnalysisReport run_analysis(const AnalysisInputs& in) {
  AnalysisReport rep;
  if (!in.counts && !in.comments && !in.logs) throw analysis::SchemaError("no inputs given");
  if (in.counts)
    for (const auto& t : read_count_tables(*in.counts)) rep.tables.push_back(analyze_table(t));
  if (in.comments) {
    if (!in.players) throw analysis::SchemaError("coded comments need a players table");
    const auto raw = analysis::read_coded_comments(*in.comments);
    if (raw.empty()) throw analysis::SchemaError("no data: coded comments file has no rows");
    std::map<std::pair<std::string, int>, std::size_t> raters;
    for (const auto& c : raw) ++raters[{c.player, c.week}];
    bool multi = false;
    for (const auto& [k, v] : raters) multi = multi || v > 1;
    analysis::CodedDataset data{analysis::resolve_majority(raw), analysis::read_players(*in.players)};
    for (const auto& t : dataset_tables(data)) rep.tables.push_back(analyze_table(t));
    if (multi) rep.kappa = analysis::fleiss_kappa(analysis::sa_presence_ratings(raw));
    rep.words = analysis::word_stats(data.comments);
    const bool profiled = dataset_tables(data).front().name == "profile";
    for (auto g : profiled ? std::vector{analysis::Grouping::Profile, analysis::Grouping::ProfileInfo}
                           : std::vector{analysis::Grouping::Disruption, analysis::Grouping::Info})
      rep.series[std::string(analysis::to_string(g))] = analysis::count_ratio_series(data, g);
  }
  if (in.logs) {
    const auto logs = analysis::load_decision_logs(*in.logs);
    if (logs.empty()) throw analysis::SchemaError("no data: no event logs in " + in.logs->string());
    rep.outliers = analysis::filter_outliers(logs);
    rep.profiles = analysis::profile_players(rep.outliers->retained);
  }
  return rep;
}

}  // namespace gamette::harness
