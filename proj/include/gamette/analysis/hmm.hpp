#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

// Discrete-emission hidden Markov model: Baum-Welch over many sequences
// (scaled forward-backward) and Viterbi decoding in log space.
namespace gamette::analysis {

struct Hmm {
  std::vector<double> pi;              // [state]
  std::vector<std::vector<double>> a;  // [from][to]
  std::vector<std::vector<double>> b;  // [state][symbol]

  std::size_t states() const { return pi.size(); }
  std::size_t symbols() const { return b.empty() ? 0 : b.front().size(); }
};

// Deterministic start: state s prefers symbol s and tends to persist.
inline Hmm diagonal_hmm(std::size_t n, double stay = 0.8, double match = 0.8) {
  Hmm m;
  m.pi.assign(n, 1.0 / static_cast<double>(n));
  m.a.assign(n, std::vector<double>(n, (1 - stay) / static_cast<double>(n - 1)));
  m.b.assign(n, std::vector<double>(n, (1 - match) / static_cast<double>(n - 1)));
  for (std::size_t s = 0; s < n; ++s) {
    m.a[s][s] = stay;
    m.b[s][s] = match;
  }
  return m;
}

struct FitReport {
  double log_likelihood = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

using Sequence = std::vector<int>;

namespace detail {

// Scaled forward pass; returns log P(obs) and fills alpha, scale.
inline double forward(const Hmm& m, const Sequence& o, std::vector<std::vector<double>>& alpha,
                      std::vector<double>& scale) {
  const auto n = m.states(), t_len = o.size();
  alpha.assign(t_len, std::vector<double>(n, 0.0));
  scale.assign(t_len, 0.0);
  double ll = 0;
  for (std::size_t t = 0; t < t_len; ++t) {
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0;
      if (t == 0) {
        v = m.pi[j];
      } else {
        for (std::size_t i = 0; i < n; ++i) v += alpha[t - 1][i] * m.a[i][j];
      }
      alpha[t][j] = v * m.b[j][static_cast<std::size_t>(o[t])];
      sum += alpha[t][j];
    }
    if (!(sum > 0)) return -std::numeric_limits<double>::infinity();
    scale[t] = sum;
    for (auto& v : alpha[t]) v /= sum;
    ll += std::log(sum);
  }
  return ll;
}

inline void backward(const Hmm& m, const Sequence& o, const std::vector<double>& scale,
                     std::vector<std::vector<double>>& beta) {
  const auto n = m.states(), t_len = o.size();
  beta.assign(t_len, std::vector<double>(n, 1.0));
  for (std::size_t t = t_len - 1; t-- > 0;) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0;
      for (std::size_t j = 0; j < n; ++j) v += m.a[i][j] * m.b[j][static_cast<std::size_t>(o[t + 1])] * beta[t + 1][j];
      beta[t][i] = v / scale[t + 1];
    }
  }
}

}  // namespace detail

inline double log_likelihood(const Hmm& m, const std::vector<Sequence>& data) {
  std::vector<std::vector<double>> alpha;
  std::vector<double> scale;
  double ll = 0;
  for (const auto& o : data)
    if (!o.empty()) ll += detail::forward(m, o, alpha, scale);
  return ll;
}

// Expectation-maximization on pooled sequences. A small floor keeps
// probabilities off zero so no symbol becomes impossible.
inline FitReport baum_welch(Hmm& m, const std::vector<Sequence>& data, int max_iter = 200, double tol = 1e-8,
                            double floor = 1e-6) {
  const auto n = m.states(), k = m.symbols();
  for (const auto& o : data)
    for (int s : o)
      if (s < 0 || static_cast<std::size_t>(s) >= k) throw std::invalid_argument("baum_welch: symbol out of range");
  FitReport rep;
  std::vector<std::vector<double>> alpha, beta;
  std::vector<double> scale;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> pi_acc(n, 0.0), a_den(n, 0.0), b_den(n, 0.0);
    std::vector<std::vector<double>> a_num(n, std::vector<double>(n, 0.0)), b_num(n, std::vector<double>(k, 0.0));
    double ll = 0;
    for (const auto& o : data) {
      if (o.empty()) continue;
      ll += detail::forward(m, o, alpha, scale);
      detail::backward(m, o, scale, beta);
      for (std::size_t t = 0; t < o.size(); ++t) {
        double norm = 0;
        std::vector<double> gamma(n);
        for (std::size_t i = 0; i < n; ++i) norm += gamma[i] = alpha[t][i] * beta[t][i];
        for (std::size_t i = 0; i < n; ++i) {
          const double g = gamma[i] / norm;
          if (t == 0) pi_acc[i] += g;
          b_num[i][static_cast<std::size_t>(o[t])] += g;
          b_den[i] += g;
          if (t + 1 < o.size()) {
            a_den[i] += g;
            for (std::size_t j = 0; j < n; ++j)
              a_num[i][j] += alpha[t][i] * m.a[i][j] * m.b[j][static_cast<std::size_t>(o[t + 1])] * beta[t + 1][j] /
                             scale[t + 1];
          }
        }
      }
    }
    if (!std::isfinite(ll)) {
      rep.log_likelihood = ll;
      return rep;
    }
    auto normalize = [floor](std::vector<double>& v) {
      double s = 0;
      for (auto& x : v) s += x = std::max(x, floor);
      for (auto& x : v) x /= s;
    };
    const double pi_total = std::accumulate(pi_acc.begin(), pi_acc.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      m.pi[i] = pi_total > 0 ? pi_acc[i] / pi_total : 1.0 / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) m.a[i][j] = a_den[i] > 0 ? a_num[i][j] / a_den[i] : m.a[i][j];
      for (std::size_t s = 0; s < k; ++s) m.b[i][s] = b_den[i] > 0 ? b_num[i][s] / b_den[i] : m.b[i][s];
      normalize(m.a[i]);
      normalize(m.b[i]);
    }
    normalize(m.pi);
    rep.iterations = it + 1;
    const bool done = std::fabs(ll - rep.log_likelihood) < tol * std::max(1.0, std::fabs(ll));
    rep.log_likelihood = ll;
    if (done) {
      rep.converged = true;
      break;
    }
  }
  rep.log_likelihood = log_likelihood(m, data);
  return rep;
}

// Most likely state path.
inline std::vector<int> viterbi(const Hmm& m, const Sequence& o) {
  const auto n = m.states(), t_len = o.size();
  if (t_len == 0) return {};
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  auto lg = [](double p) { return p > 0 ? std::log(p) : -std::numeric_limits<double>::infinity(); };
  std::vector<std::vector<double>> delta(t_len, std::vector<double>(n, ninf));
  std::vector<std::vector<int>> back(t_len, std::vector<int>(n, 0));
  for (std::size_t j = 0; j < n; ++j) delta[0][j] = lg(m.pi[j]) + lg(m.b[j][static_cast<std::size_t>(o[0])]);
  for (std::size_t t = 1; t < t_len; ++t)
    for (std::size_t j = 0; j < n; ++j) {
      double best = ninf;
      int arg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = delta[t - 1][i] + lg(m.a[i][j]);
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      delta[t][j] = best + lg(m.b[j][static_cast<std::size_t>(o[t])]);
      back[t][j] = arg;
    }
  std::vector<int> path(t_len);
  double best = ninf;
  for (std::size_t j = 0; j < n; ++j)
    if (delta[t_len - 1][j] > best) {
      best = delta[t_len - 1][j];
      path[t_len - 1] = static_cast<int>(j);
    }
  for (std::size_t t = t_len - 1; t > 0; --t) path[t - 1] = back[t][static_cast<std::size_t>(path[t])];
  return path;
}

}  // namespace gamette::analysis
