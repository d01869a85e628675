#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "gamette/analysis/contingency.hpp"

namespace gamette::analysis {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Regularized upper incomplete gamma Q(a, x): power series for P below
// x = a + 1, modified Lentz continued fraction for Q above.
inline double gamma_q(double a, double x) {
  if (!(a > 0) || !(x >= 0)) throw std::domain_error("gamma_q: need a > 0, x >= 0");
  if (x == 0) return 1.0;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10000;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1) {
    double ap = a, term = 1.0 / a, sum = term;
    for (int n = 0; n < max_iter; ++n) {
      ap += 1;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * eps) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  constexpr double tiny = 1e-300;
  double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1) < eps) break;
  }
  return std::exp(log_prefix) * h;
}

// Upper tail of the chi-squared distribution.
inline double chi2_sf(double x, int df) {
  if (df < 1) throw std::domain_error("chi2_sf: df must be >= 1");
  if (x <= 0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

inline double cramers_v(double chi2, std::int64_t n, std::size_t r, std::size_t c) {
  if (n <= 0 || std::min(r, c) < 2) throw StatsError("cramers_v: need N > 0 and at least a 2x2 table");
  return std::sqrt(chi2 / (static_cast<double>(n) * static_cast<double>(std::min(r, c) - 1)));
}

struct TestResult {
  double chi2 = 0;
  int df = 0;
  double p = 1;
  std::int64_t n = 0;
  double cramers_v = 0;
  std::size_t low_expected_cells = 0;  // cells with E < 5
  bool assumption_violated() const { return low_expected_cells > 0; }
};

inline void check_table(const ContingencyTable& t) {
  if (t.r() < 2 || t.c() < 2) throw StatsError("need at least a 2x2 table");
  if (t.total() <= 0) throw StatsError("table is empty");
  for (std::size_t i = 0; i < t.r(); ++i)
    if (t.row_total(i) == 0) throw StatsError("zero marginal in row '" + t.rows[i] + "'");
  for (std::size_t j = 0; j < t.c(); ++j)
    if (t.col_total(j) == 0) throw StatsError("zero marginal in column '" + t.cols[j] + "'");
}

// Pearson's test of independence.
inline TestResult chi_square_independence(const ContingencyTable& t) {
  check_table(t);
  TestResult res;
  res.n = t.total();
  for (std::size_t i = 0; i < t.r(); ++i)
    for (std::size_t j = 0; j < t.c(); ++j) {
      const double e = t.expected(i, j);
      const double d = static_cast<double>(t.counts[i][j]) - e;
      res.chi2 += d * d / e;
      if (e < 5) ++res.low_expected_cells;
    }
  res.df = static_cast<int>((t.r() - 1) * (t.c() - 1));
  res.p = chi2_sf(res.chi2, res.df);
  res.cramers_v = cramers_v(res.chi2, res.n, t.r(), t.c());
  return res;
}

// Bonferroni family for the cell-wise post-hoc tests: each row's cells, or
// every cell of the table.
enum class BonferroniFamily { Row, Table };

struct PosthocCell {
  double residual = 0;  // adjusted standardized residual
  double p = 1;         // two-sided, unadjusted
  int level = 0;        // 0 none, 1 significant at alpha, 2 at strict_alpha
};

struct Posthoc {
  std::vector<std::vector<PosthocCell>> cells;
  double alpha = 0.05, strict_alpha = 0.01;
  std::size_t divisor = 1;
};

inline double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

inline Posthoc posthoc_bonferroni(const ContingencyTable& t, double alpha = 0.05, double strict_alpha = 0.01,
                                  BonferroniFamily family = BonferroniFamily::Row) {
  check_table(t);
  Posthoc out;
  out.alpha = alpha;
  out.strict_alpha = strict_alpha;
  out.divisor = family == BonferroniFamily::Row ? t.c() : t.r() * t.c();
  const double n = static_cast<double>(t.total());
  out.cells.assign(t.r(), std::vector<PosthocCell>(t.c()));
  for (std::size_t i = 0; i < t.r(); ++i)
    for (std::size_t j = 0; j < t.c(); ++j) {
      const double e = t.expected(i, j);
      const double se = std::sqrt(e * (1 - t.row_total(i) / n) * (1 - t.col_total(j) / n));
      auto& cell = out.cells[i][j];
      cell.residual = se > 0 ? (static_cast<double>(t.counts[i][j]) - e) / se : 0.0;
      cell.p = normal_two_sided_p(cell.residual);
      const double d = static_cast<double>(out.divisor);
      cell.level = cell.p < strict_alpha / d ? 2 : cell.p < alpha / d ? 1 : 0;
    }
  return out;
}

struct FisherOptions {
  std::uint64_t budget = 50'000'000;  // tables enumerated before giving up on the exact path
  bool monte_carlo = true;
  std::uint64_t draws = 1'000'000;
  std::uint64_t seed = 20240101;
};

struct FisherResult {
  double p = 1;
  bool exact = true;
  std::uint64_t tables = 0;  // tables enumerated, or draws sampled
};

namespace detail {

inline double log_factorial(std::int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

struct FisherEnum {
  std::size_t r, c;
  std::vector<std::int64_t> rr, cr;  // remaining row and column totals
  std::vector<std::int64_t> suffix;  // suffix[j] = sum of cr[j..] for the current row
  double log_const = 0, log_obs = 0, tol = 0;
  double p = 0;
  std::uint64_t visited = 0, budget = 0;
  bool exceeded = false;

  // Fills cell (i, j); the last column and the last row are implied.
  void cell(std::size_t i, std::size_t j, double acc) {
    if (exceeded) return;
    if (i == r - 1) {
      double a = acc;
      for (std::size_t k = 0; k < c; ++k) a -= log_factorial(cr[k]);
      if (++visited > budget) {
        exceeded = true;
        return;
      }
      if (log_const + a <= log_obs + tol) p += std::exp(log_const + a);
      return;
    }
    if (j == c - 1) {
      const auto x = rr[i];
      if (x > cr[j]) return;
      cr[j] -= x;
      cell(i + 1, 0, acc - log_factorial(x));
      cr[j] += x;
      return;
    }
    std::int64_t later = 0;
    for (std::size_t k = j + 1; k < c; ++k) later += cr[k];
    const auto lo = std::max<std::int64_t>(0, rr[i] - later);
    const auto hi = std::min(rr[i], cr[j]);
    for (auto x = lo; x <= hi; ++x) {
      rr[i] -= x;
      cr[j] -= x;
      cell(i, j + 1, acc - log_factorial(x));
      rr[i] += x;
      cr[j] += x;
      if (exceeded) return;
    }
  }
};

inline double table_log_prob(const std::vector<std::vector<std::int64_t>>& cells, double log_const) {
  double a = log_const;
  for (const auto& row : cells)
    for (auto v : row) a -= log_factorial(v);
  return a;
}

}  // namespace detail

// Fisher's exact test for an r x c table: the probability, under fixed
// margins, of a table no more likely than the observed one.
inline FisherResult fisher_exact(const ContingencyTable& t, const FisherOptions& opt = {}) {
  check_table(t);
  const auto n = t.total();
  std::vector<std::int64_t> rows(t.r()), cols(t.c());
  for (std::size_t i = 0; i < t.r(); ++i) rows[i] = t.row_total(i);
  for (std::size_t j = 0; j < t.c(); ++j) cols[j] = t.col_total(j);
  double log_const = -detail::log_factorial(n);
  for (auto v : rows) log_const += detail::log_factorial(v);
  for (auto v : cols) log_const += detail::log_factorial(v);
  const double log_obs = detail::table_log_prob(t.counts, log_const);
  const double tol = 1e-7;  // relative slack so ties count as "as extreme"

  detail::FisherEnum e{t.r(), t.c(), rows, cols, {}, log_const, log_obs, tol, 0, 0, opt.budget, false};
  e.cell(0, 0, 0.0);
  if (!e.exceeded) return {std::min(1.0, e.p), true, e.visited};
  if (!opt.monte_carlo) throw StatsError("fisher_exact: enumeration budget exceeded and Monte Carlo disabled");

  // Random tables with the observed margins: shuffle column labels over the
  // N units and cut them into rows.
  std::mt19937_64 rng(opt.seed);
  std::vector<std::size_t> units;
  units.reserve(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < t.c(); ++j) units.insert(units.end(), static_cast<std::size_t>(cols[j]), j);
  std::vector<std::vector<std::int64_t>> cells(t.r(), std::vector<std::int64_t>(t.c()));
  std::uint64_t hits = 0;
  for (std::uint64_t d = 0; d < opt.draws; ++d) {
    std::shuffle(units.begin(), units.end(), rng);
    for (auto& row : cells) std::fill(row.begin(), row.end(), 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < t.r(); ++i)
      for (std::int64_t u = 0; u < rows[i]; ++u) ++cells[i][units[k++]];
    if (detail::table_log_prob(cells, log_const) <= log_obs + tol) ++hits;
  }
  return {static_cast<double>(hits + 1) / static_cast<double>(opt.draws + 1), false, opt.draws};
}

// Fleiss' kappa from an item x category matrix of rater counts; every item
// must be rated by the same number (>= 2) of raters.
inline double fleiss_kappa(const std::vector<std::vector<std::int64_t>>& ratings) {
  if (ratings.empty() || ratings.front().empty()) throw StatsError("fleiss_kappa: empty rating matrix");
  const std::size_t k = ratings.front().size();
  std::int64_t n = -1;
  for (const auto& item : ratings) {
    if (item.size() != k) throw StatsError("fleiss_kappa: ragged rating matrix");
    std::int64_t s = 0;
    for (auto v : item) {
      if (v < 0) throw StatsError("fleiss_kappa: negative count");
      s += v;
    }
    if (n < 0) n = s;
    if (s != n) throw StatsError("fleiss_kappa: inconsistent rater counts across items");
  }
  if (n < 2) throw StatsError("fleiss_kappa: need at least two raters per item");
  const double items = static_cast<double>(ratings.size());
  const double nd = static_cast<double>(n);
  double p_bar = 0;
  std::vector<double> pj(k, 0.0);
  for (const auto& item : ratings) {
    double sq = 0;
    for (std::size_t j = 0; j < k; ++j) {
      sq += static_cast<double>(item[j] * item[j]);
      pj[j] += static_cast<double>(item[j]);
    }
    p_bar += (sq - nd) / (nd * (nd - 1));
  }
  p_bar /= items;
  double pe = 0;
  for (auto& v : pj) {
    v /= items * nd;
    pe += v * v;
  }
  // Every rating in one category: agreement is perfect but chance-level.
  if (1 - pe < 1e-15) return p_bar >= 1 - 1e-15 ? 1.0 : 0.0;
  return (p_bar - pe) / (1 - pe);
}

}  // namespace gamette::analysis
