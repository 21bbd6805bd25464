#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smexp/expansion.hpp"

namespace smexp {

// Malformed or internally inconsistent model data.
class ModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One (from, to) pair: transition probability p (Taylor, h >= 0) and
/// expected sojourn time e (Laurent, h may be negative). Both must have a
/// positive leading coefficient.
struct TransitionEntry {
  LaurentExpansion p;
  LaurentExpansion e;
};

/// Finite-state semi-Markov model parameterized by eps in (0, eps0].
/// Absent (i, j) pairs are identically zero; the keys present for a row i
/// form its transition set Y_i. States keep their original labels across
/// reductions, so the state set need not be contiguous.
class SemiMarkovModel {
 public:
  SemiMarkovModel(std::vector<int> states, double eps0,
                  std::map<std::pair<int, int>, TransitionEntry> entries)
      : states_(std::move(states)), eps0_(eps0), entries_(std::move(entries)) {
    if (states_.empty()) throw ModelError("model: empty state set");
    std::sort(states_.begin(), states_.end());
    if (std::adjacent_find(states_.begin(), states_.end()) != states_.end())
      throw ModelError("model: duplicate state label");
    if (!(eps0_ > 0.0) || eps0_ > 1.0) throw ModelError("model: eps0 must lie in (0, 1]");
    std::set<int> with_out;
    for (const auto& [key, entry] : entries_) {
      const auto [i, j] = key;
      if (!has_state(i) || !has_state(j))
        throw ModelError("model: entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") refers to an unknown state");
      if (entry.p.h() < 0)
        throw ModelError("model: probability entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") has a negative power");
      if (entry.p.coeffs().front() <= 0 || entry.e.coeffs().front() <= 0)
        throw ModelError("model: entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") has a nonpositive leading coefficient");
      for (const auto* exp : {&entry.p, &entry.e})
        if (exp->bound() && exp->bound()->eps_bar > eps0_)
          throw ModelError("model: entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") has eps_bar above eps0");
      with_out.insert(i);
    }
    for (int s : states_)
      if (!with_out.count(s))
        throw ModelError("model: state " + std::to_string(s) + " has an empty transition set");
  }

  const std::vector<int>& states() const { return states_; }
  int n_states() const { return static_cast<int>(states_.size()); }
  double eps0() const { return eps0_; }
  bool has_state(int s) const {
    return std::binary_search(states_.begin(), states_.end(), s);
  }
  bool has(int i, int j) const { return entries_.count({i, j}) != 0; }
  const TransitionEntry& entry(int i, int j) const {
    auto it = entries_.find({i, j});
    if (it == entries_.end())
      throw ModelError("model: no entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    return it->second;
  }
  const std::map<std::pair<int, int>, TransitionEntry>& entries() const { return entries_; }

  /// Y_i, ascending.
  std::vector<int> transition_set(int i) const {
    std::vector<int> ys;
    for (auto it = entries_.lower_bound({i, std::numeric_limits<int>::min()});
         it != entries_.end() && it->first.first == i; ++it)
      ys.push_back(it->first.second);
    return ys;
  }

 private:
  std::vector<int> states_;
  double eps0_;
  std::map<std::pair<int, int>, TransitionEntry> entries_;
};

/// Minimal remainder exponents over the model's declared bounds:
/// delta_circ over probability bounds, delta_star over probability and
/// expectation bounds together. Entries without bounds do not contribute;
/// the empty minimum is 1.
struct DeltaFloors {
  Rational delta_circ{1};
  Rational delta_star{1};
};

inline DeltaFloors delta_floors(const SemiMarkovModel& m) {
  DeltaFloors f;
  for (const auto& [key, entry] : m.entries()) {
    if (entry.p.bound()) {
      f.delta_circ = std::min(f.delta_circ, entry.p.bound()->delta);
      f.delta_star = std::min(f.delta_star, entry.p.bound()->delta);
    }
    if (entry.e.bound()) f.delta_star = std::min(f.delta_star, entry.e.bound()->delta);
  }
  return f;
}

struct ConditionFFailure {
  int state;
  int power;
  Rational sum;
};

struct ValidationReport {
  bool strongly_connected = true;
  std::vector<std::pair<int, int>> unreachable_pairs;
  // For every source of a failing pair: the set of states it can reach,
  // as the certificate of failure.
  std::map<int, std::vector<int>> reachable_sets;
  std::vector<ConditionFFailure> coefficient_sum_failures;
  std::vector<int> rows_with_nonzero_floor;  // rows where min_j h(p_ij) != 0
  std::vector<std::pair<int, int>> nonpivotal_entries;
  DeltaFloors floors;

  bool ok() const {
    return strongly_connected && coefficient_sum_failures.empty() &&
           rows_with_nonzero_floor.empty() && nonpivotal_entries.empty();
  }
};

/// Checks the structural conditions: every ordered pair of states connected
/// by a chain of at least one transition, row coefficient sums equal to
/// 1 at power 0 and 0 above (up to the common retained order), row power
/// floors at zero, pivotal positive leading coefficients. Verdicts are
/// data, not exceptions.
inline ValidationReport validate_conditions(const SemiMarkovModel& m) {
  ValidationReport report;
  const std::vector<int>& states = m.states();

  for (int src : states) {
    std::set<int> seen;
    std::vector<int> frontier = m.transition_set(src);
    for (int s : frontier) seen.insert(s);
    while (!frontier.empty()) {
      int cur = frontier.back();
      frontier.pop_back();
      for (int nxt : m.transition_set(cur))
        if (seen.insert(nxt).second) frontier.push_back(nxt);
    }
    bool failed = false;
    for (int dst : states)
      if (!seen.count(dst)) {
        report.unreachable_pairs.emplace_back(src, dst);
        failed = true;
      }
    if (failed) {
      report.strongly_connected = false;
      report.reachable_sets[src] = std::vector<int>(seen.begin(), seen.end());
    }
  }

  for (int i : states) {
    std::vector<int> ys = m.transition_set(i);
    int k_common = std::numeric_limits<int>::max();
    int h_min = std::numeric_limits<int>::max();
    for (int j : ys) {
      k_common = std::min(k_common, m.entry(i, j).p.k());
      h_min = std::min(h_min, m.entry(i, j).p.h());
    }
    if (h_min != 0) report.rows_with_nonzero_floor.push_back(i);
    for (int l = 0; l <= k_common; ++l) {
      Rational s(0);
      for (int j : ys) s += m.entry(i, j).p.coeff(l);
      Rational expected = l == 0 ? Rational(1) : Rational(0);
      if (s != expected) report.coefficient_sum_failures.push_back({i, l, s});
    }
    for (int j : ys) {
      const TransitionEntry& entry = m.entry(i, j);
      if (entry.p.coeffs().front() <= 0 || entry.e.coeffs().front() <= 0)
        report.nonpivotal_entries.emplace_back(i, j);
    }
  }

  report.floors = delta_floors(m);
  return report;
}

/// The per-row state whose probability remainder is forced by stochasticity:
/// the smallest j attaining the minimal retained order of the row.
inline std::map<int, int> designated_targets(const SemiMarkovModel& m) {
  std::map<int, int> designated;
  for (int i : m.states()) {
    int best = -1;
    int kmin = std::numeric_limits<int>::max();
    for (int j : m.transition_set(i)) {
      int kj = m.entry(i, j).p.k();
      if (kj < kmin) {
        kmin = kj;
        best = j;
      }
    }
    designated[i] = best;
  }
  return designated;
}

/// Fills the designated entry's probability bound of every row from the
/// other entries of that row: the row sums to one identically, so the
/// designated remainder is minus the sum of the other tails and remainders.
/// delta and eps_bar are the minima over the other entries; G accumulates
/// their tail coefficients (eps0 powers) and rescaled G values. Requires
/// bounds on every non-designated probability entry.
inline SemiMarkovModel complete_remainders(const SemiMarkovModel& m) {
  std::map<int, int> designated = designated_targets(m);
  std::map<std::pair<int, int>, TransitionEntry> entries = m.entries();
  const double eps0 = m.eps0();

  for (int i : m.states()) {
    const int ji = designated.at(i);
    const int k_des = m.entry(i, ji).p.k();
    std::vector<int> others;
    for (int j : m.transition_set(i))
      if (j != ji) others.push_back(j);

    Rational delta(1);
    double eps = eps0;
    bool first = true;
    for (int j : others) {
      const auto& b = m.entry(i, j).p.bound();
      if (!b)
        throw ModelError("complete_remainders: entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") carries no bound");
      if (first || b->delta < delta) delta = b->delta;
      eps = std::min(eps, b->eps_bar);
      first = false;
    }
    std::vector<double> terms;
    for (int j : others) {
      const LaurentExpansion& p = m.entry(i, j).p;
      const RemainderBound& b = *p.bound();
      for (int l = k_des + 1; l <= p.k(); ++l)
        terms.push_back(detail::abs_d(p.coeff(l)) *
                        detail::checked_pow(eps0, Rational(l - k_des) - delta));
      terms.push_back(b.G *
                      detail::checked_pow(eps0, Rational(p.k() - k_des) + b.delta - delta));
    }
    double g = detail::sorted_sum(std::move(terms));

    TransitionEntry& des = entries.at({i, ji});
    des.p = LaurentExpansion(des.p.h(), des.p.k(), des.p.coeffs(),
                             RemainderBound{delta, g, eps});
  }
  return SemiMarkovModel(m.states(), eps0, std::move(entries));
}

/// Radii below which every transition probability and sojourn expectation is
/// certified positive (with margin factor 1 - 2*alpha on the leading term).
struct PositivityThresholds {
  double eps_prime0 = 0.0;
  double eps_double_prime0 = 0.0;
  double eps_tilde0 = 0.0;
  std::map<std::pair<int, int>, double> eps_alpha_p;
  std::map<std::pair<int, int>, double> eps_alpha_e;
};

inline PositivityThresholds positivity_thresholds(
    const SemiMarkovModel& m, const std::map<std::pair<int, int>, Rational>& alpha) {
  PositivityThresholds out;
  const double eps0 = m.eps0();
  double prime0 = eps0;
  double dprime0 = eps0;

  for (const auto& [key, entry] : m.entries()) {
    auto a_it = alpha.find(key);
    if (a_it == alpha.end())
      throw ModelError("positivity_thresholds: missing alpha for entry (" +
                       std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    const Rational& al = a_it->second;
    if (!(al > 0) || !(al < Rational(1, 2)))
      throw std::invalid_argument("positivity_thresholds: alpha must lie in (0, 1/2)");

    // Returns (eps_alpha, eps_alpha'): the radius where the remainder stays
    // below alpha times the leading coefficient, then the tightening where
    // the retained tail does too.
    auto side = [&](const LaurentExpansion& x) -> std::pair<double, double> {
      if (!x.bound())
        throw ModelError("positivity_thresholds: entry (" + std::to_string(key.first) + "," +
                         std::to_string(key.second) + ") carries no bound");
      const RemainderBound& b = *x.bound();
      const double lead = detail::abs_d(x.coeffs().front());
      double eps_alpha = b.eps_bar;
      if (b.G > 0.0)
        eps_alpha = std::min(eps_alpha, std::pow(to_double(al) * lead / b.G,
                                                 to_double(Rational(1) / b.delta)));
      double tail = 0.0;
      for (int l = x.h() + 1; l <= x.k(); ++l)
        tail += detail::abs_d(x.coeff(l)) * std::pow(eps0, double(l - x.h() - 1));
      double eps_prime = tail > 0.0 ? std::min(eps_alpha, to_double(al) * lead / tail)
                                    : eps_alpha;
      return {eps_alpha, eps_prime};
    };

    auto [ep, epp] = side(entry.p);
    auto [ee, eep] = side(entry.e);
    out.eps_alpha_p[key] = ep;
    out.eps_alpha_e[key] = ee;
    prime0 = std::min(prime0, epp);
    dprime0 = std::min(dprime0, eep);
  }
  out.eps_prime0 = prime0;
  out.eps_double_prime0 = dprime0;
  out.eps_tilde0 = std::min(prime0, dprime0);
  return out;
}

/// Uniform-alpha convenience overload.
inline PositivityThresholds positivity_thresholds(const SemiMarkovModel& m,
                                                  const Rational& alpha) {
  std::map<std::pair<int, int>, Rational> full;
  for (const auto& [key, entry] : m.entries()) full[key] = alpha;
  return positivity_thresholds(m, full);
}

}  // namespace smexp
