#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smexp/model.hpp"

namespace smexp {

class SingularSystem : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pointwise instantiation of a model at a concrete eps: exact rational
/// matrices of transition probabilities and sojourn expectations, indexed by
/// position in the (sorted) state list. `exact` marks a model whose declared
/// remainders are all identically zero, so the matrices are the true values.
struct NumericModel {
  Rational eps;
  std::vector<int> states;
  std::vector<std::vector<Rational>> p;
  std::vector<std::vector<Rational>> e;
  bool exact = false;

  int index_of(int state) const {
    auto it = std::lower_bound(states.begin(), states.end(), state);
    if (it == states.end() || *it != state)
      throw std::invalid_argument("NumericModel: unknown state");
    return static_cast<int>(it - states.begin());
  }
};

namespace detail {

inline bool all_exact(const SemiMarkovModel& m) {
  for (const auto& [key, entry] : m.entries()) {
    if (!entry.p.bound() || entry.p.bound()->G != 0.0) return false;
    if (!entry.e.bound() || entry.e.bound()->G != 0.0) return false;
  }
  return true;
}

}  // namespace detail

inline NumericModel instantiate(const SemiMarkovModel& m, const Rational& eps) {
  if (!(eps > 0)) throw std::invalid_argument("instantiate: eps must be positive");
  NumericModel nm;
  nm.eps = eps;
  nm.states = m.states();
  nm.exact = detail::all_exact(m);
  const int n = m.n_states();
  nm.p.assign(n, std::vector<Rational>(n, Rational(0)));
  nm.e.assign(n, std::vector<Rational>(n, Rational(0)));
  for (const auto& [key, entry] : m.entries()) {
    int i = nm.index_of(key.first);
    int j = nm.index_of(key.second);
    nm.p[i][j] = evaluate(entry.p, eps);
    nm.e[i][j] = evaluate(entry.e, eps);
  }
  for (int i = 0; i < n; ++i) {
    Rational row(0);
    for (int j = 0; j < n; ++j) {
      if (nm.p[i][j] < 0 || nm.p[i][j] > 1)
        throw ModelError("instantiate: probability outside [0, 1] at eps = " + to_string(eps));
      row += nm.p[i][j];
    }
    if (nm.exact && row != 1)
      throw ModelError("instantiate: row " + std::to_string(nm.states[i]) +
                       " sums to " + to_string(row) + ", not 1");
  }
  return nm;
}

namespace detail {

// Exact Gaussian elimination with partial pivoting on magnitude.
inline std::vector<Rational> solve_linear(std::vector<std::vector<Rational>> a,
                                          std::vector<Rational> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (rat_abs(a[r][col]) > rat_abs(a[pivot][col])) pivot = r;
    if (a[pivot][col] == 0) throw SingularSystem("solve_linear: singular system");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (int r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(static_cast<size_t>(n), Rational(0));
  for (int r = n - 1; r >= 0; --r) {
    Rational s = b[static_cast<size_t>(r)];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[static_cast<size_t>(c)];
    x[static_cast<size_t>(r)] = s / a[r][r];
  }
  return x;
}

}  // namespace detail

/// Stationary distribution at the instantiated eps: the embedded-chain
/// stationary vector rho (rho P = rho, sum 1) weighted by the expected
/// sojourn times, pi_i = rho_i e_i / sum_j rho_j e_j. All arithmetic exact.
inline std::vector<Rational> numeric_stationary(const NumericModel& nm) {
  const int n = static_cast<int>(nm.states.size());
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
  std::vector<Rational> b(static_cast<size_t>(n), Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = nm.p[j][i] - Rational(i == j ? 1 : 0);
  for (int j = 0; j < n; ++j) a[n - 1][j] = Rational(1);
  b[static_cast<size_t>(n - 1)] = Rational(1);
  std::vector<Rational> rho = detail::solve_linear(std::move(a), std::move(b));

  std::vector<Rational> weighted(static_cast<size_t>(n), Rational(0));
  Rational total(0);
  for (int i = 0; i < n; ++i) {
    Rational e_i(0);
    for (int j = 0; j < n; ++j) e_i += nm.e[i][j];
    weighted[static_cast<size_t>(i)] = rho[static_cast<size_t>(i)] * e_i;
    total += weighted[static_cast<size_t>(i)];
  }
  if (total == 0) throw SingularSystem("numeric_stationary: zero total sojourn weight");
  for (Rational& w : weighted) w /= total;
  return weighted;
}

/// Exact expected return time to state i by first-step analysis:
/// h_j = e_j + sum_{k != i} p_jk h_k solved over the other states, then
/// E_ii = e_i + sum_{j != i} p_ij h_j.
inline Rational numeric_hitting(const NumericModel& nm, int state) {
  const int n = static_cast<int>(nm.states.size());
  const int i = nm.index_of(state);
  auto row_e = [&](int r) {
    Rational s(0);
    for (int j = 0; j < n; ++j) s += nm.e[r][j];
    return s;
  };
  std::vector<int> rest;
  for (int r = 0; r < n; ++r)
    if (r != i) rest.push_back(r);
  const int mlen = static_cast<int>(rest.size());
  std::vector<std::vector<Rational>> a(mlen, std::vector<Rational>(mlen, Rational(0)));
  std::vector<Rational> b(static_cast<size_t>(mlen), Rational(0));
  for (int r = 0; r < mlen; ++r) {
    for (int c = 0; c < mlen; ++c)
      a[r][c] = Rational(r == c ? 1 : 0) - nm.p[rest[r]][rest[c]];
    b[static_cast<size_t>(r)] = row_e(rest[r]);
  }
  std::vector<Rational> h =
      mlen == 0 ? std::vector<Rational>{} : detail::solve_linear(std::move(a), std::move(b));
  Rational out = row_e(i);
  for (int r = 0; r < mlen; ++r) out += nm.p[i][rest[r]] * h[static_cast<size_t>(r)];
  return out;
}

/// Pointwise phase-space reduction at fixed eps, mirroring reduce_state but
/// in exact scalar arithmetic (no truncation). Hitting times among the
/// surviving states are preserved exactly.
inline NumericModel censor(const NumericModel& nm, int state) {
  const int n = static_cast<int>(nm.states.size());
  if (n < 2) throw std::invalid_argument("censor: model has a single state");
  const int r = nm.index_of(state);
  Rational bar = Rational(1) - nm.p[r][r];
  if (bar == 0) throw SingularSystem("censor: state is absorbing at this eps");

  NumericModel out;
  out.eps = nm.eps;
  out.exact = nm.exact;
  for (int s = 0; s < n; ++s)
    if (s != r) out.states.push_back(nm.states[s]);
  const int m = n - 1;
  out.p.assign(m, std::vector<Rational>(m, Rational(0)));
  out.e.assign(m, std::vector<Rational>(m, Rational(0)));
  auto old_index = [&](int pos) { return pos < r ? pos : pos + 1; };
  for (int i = 0; i < m; ++i) {
    const int oi = old_index(i);
    for (int j = 0; j < m; ++j) {
      const int oj = old_index(j);
      Rational q_rj = nm.p[r][oj] / bar;
      Rational q_ir = nm.p[oi][r] / bar;
      out.p[i][j] = nm.p[oi][oj] + nm.p[oi][r] * q_rj;
      out.e[i][j] = nm.e[oi][oj] + nm.e[oi][r] * q_rj + nm.e[r][r] * q_ir * q_rj +
                    nm.e[r][oj] * q_ir;
    }
  }
  return out;
}

/// One probe of a certified expansion against an externally supplied
/// function value.
struct CertificationSample {
  Rational eps;
  double truth = 0.0;
  double value = 0.0;
  double residual = 0.0;    // |truth - value|
  double normalized = 0.0;  // residual / eps^(k + delta)
};

struct CertificationReport {
  double max_normalized = 0.0;
  double g_limit = 0.0;  // G * (1 + 1e-9)
  bool pass = false;
  std::vector<CertificationSample> samples;
};

/// Checks |truth - retained value| <= G * eps^(k + delta) * (1 + 1e-9) at
/// every supplied sample. All samples must lie within the bound's radius.
inline CertificationReport certify(const LaurentExpansion& expansion,
                                   std::span<const std::pair<Rational, double>> truth) {
  if (!expansion.bound()) throw std::invalid_argument("certify: expansion carries no bound");
  const RemainderBound& b = *expansion.bound();
  CertificationReport report;
  report.g_limit = b.G * (1.0 + 1e-9);
  for (const auto& [eps, f] : truth) {
    if (!(eps > 0) || to_double(eps) > b.eps_bar)
      throw std::invalid_argument("certify: sample outside (0, eps_bar]");
    CertificationSample s;
    s.eps = eps;
    s.truth = f;
    s.value = to_double(evaluate(expansion, eps));
    s.residual = std::fabs(s.truth - s.value);
    s.normalized =
        s.residual / std::pow(to_double(eps), to_double(Rational(expansion.k()) + b.delta));
    report.max_normalized = std::max(report.max_normalized, s.normalized);
    report.samples.push_back(std::move(s));
  }
  report.pass = report.max_normalized <= report.g_limit;
  return report;
}

}  // namespace smexp
