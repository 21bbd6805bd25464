#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "smexp/model.hpp"

namespace smexp {

/// Non-absorption probability 1 - p_rr of state r, merged from its two
/// representations: 1 - p_rr and the sum of the off-diagonal row entries.
/// When r has no self-loop the probability is identically one.
inline LaurentExpansion non_absorption(const SemiMarkovModel& m, int r) {
  if (!m.has_state(r)) throw ModelError("non_absorption: unknown state");
  std::vector<int> ys = m.transition_set(r);
  const bool self = m.has(r, r);
  std::vector<LaurentExpansion> others;
  for (int j : ys)
    if (j != r) others.push_back(m.entry(r, j).p);
  if (!self) return embed_constant(Rational(1), 0, 0);
  if (others.empty())
    throw ModelError("non_absorption: state " + std::to_string(r) +
                     " is absorbing (no exit transitions)");
  const LaurentExpansion& prr = m.entry(r, r).p;
  LaurentExpansion complement =
      add(embed_constant(Rational(1), 0, prr.k()), scale(Rational(-1), prr));
  LaurentExpansion row_sum = sum_many(std::span<const LaurentExpansion>(others));
  return combine_representations(complement, row_sum);
}

/// One step of phase-space reduction: state r excluded, every surviving pair
/// rewritten through r's non-absorption probability.
struct ReductionStep {
  int excluded;
  LaurentExpansion bar_p;
  SemiMarkovModel model;
};

/// Excludes state r. For surviving i, j:
///   p'_ij = p_ij + p_ir * (p_rj / bar_p)
///   e'_ij = e_ij + e_ir * (p_rj / bar_p)
///          + e_rr * (p_ir / bar_p) * (p_rj / bar_p) + e_rj * (p_ir / bar_p)
/// with divisions performed first, then products (the three-factor term via
/// the multi-factor rule), then the sums. Terms whose factors are
/// identically zero are dropped rather than represented as zero expansions.
inline ReductionStep reduce_state(const SemiMarkovModel& m, int r) {
  if (!m.has_state(r)) throw ModelError("reduce_state: unknown state");
  if (m.n_states() < 2) throw ModelError("reduce_state: model has a single state");

  LaurentExpansion bar = non_absorption(m, r);
  if (!bar.is_pivotal())
    throw ModelError("reduce_state: non-absorption probability of state " +
                     std::to_string(r) + " is not pivotal");
  const bool self = m.has(r, r);
  auto over_bar = [&](const LaurentExpansion& x) {
    return self ? div(x, bar) : x;
  };

  std::vector<int> from_r;
  for (int j : m.transition_set(r))
    if (j != r) from_r.push_back(j);
  std::map<int, LaurentExpansion> q_rj;  // p_rj / bar_p
  for (int j : from_r) q_rj.emplace(j, over_bar(m.entry(r, j).p));

  std::vector<int> survivors;
  for (int s : m.states())
    if (s != r) survivors.push_back(s);

  std::map<std::pair<int, int>, TransitionEntry> entries;
  for (int i : survivors) {
    const bool to_r = m.has(i, r);
    std::optional<LaurentExpansion> q_ir;  // p_ir / bar_p
    if (to_r) q_ir = over_bar(m.entry(i, r).p);

    std::set<int> targets;
    for (int j : m.transition_set(i))
      if (j != r) targets.insert(j);
    if (to_r)
      for (int j : from_r) targets.insert(j);

    for (int j : targets) {
      const bool direct = m.has(i, j);
      const bool via_r = to_r && m.has(r, j);

      std::vector<LaurentExpansion> p_terms;
      if (direct) p_terms.push_back(m.entry(i, j).p);
      if (via_r) p_terms.push_back(mul(m.entry(i, r).p, q_rj.at(j)));
      LaurentExpansion p =
          p_terms.size() == 1 ? p_terms[0] : add(p_terms[0], p_terms[1]);

      std::vector<LaurentExpansion> e_terms;
      if (direct) e_terms.push_back(m.entry(i, j).e);
      if (via_r) {
        e_terms.push_back(mul(m.entry(i, r).e, q_rj.at(j)));
        if (self)
          e_terms.push_back(prod_many({m.entry(r, r).e, *q_ir, q_rj.at(j)}));
        e_terms.push_back(mul(m.entry(r, j).e, *q_ir));
      }
      LaurentExpansion e = sum_many(std::span<const LaurentExpansion>(e_terms));

      entries.emplace(std::pair<int, int>{i, j}, TransitionEntry{std::move(p), std::move(e)});
    }
  }
  SemiMarkovModel reduced(survivors, m.eps0(), std::move(entries));
  return ReductionStep{r, std::move(bar), std::move(reduced)};
}

/// Expected return time to state i obtained by excluding every other state.
struct HittingResult {
  int target;
  std::vector<int> exclusion_order;
  LaurentExpansion expansion;
  /// The expansion rewritten at the model-wide floor exponent delta_star,
  /// present when the expansion carries a bound.
  std::optional<LaurentExpansion> rebased;
};

namespace detail {

inline void check_exclusion_order(const SemiMarkovModel& m, int target,
                                  const std::vector<int>& order) {
  std::vector<int> expected;
  for (int s : m.states())
    if (s != target) expected.push_back(s);
  std::vector<int> got = order;
  std::sort(got.begin(), got.end());
  if (got != expected)
    throw std::invalid_argument(
        "exclusion order must be a permutation of the states other than the target");
}

}  // namespace detail

/// Sequentially excludes every state except i (default order: ascending
/// labels) and reads the surviving self-entry expectation. The coefficients
/// are invariant under the choice of order; the bound parameters need not be.
inline HittingResult hitting_time(const SemiMarkovModel& m, int i,
                                  std::vector<int> order = {}) {
  if (!m.has_state(i)) throw ModelError("hitting_time: unknown state");
  if (order.empty()) {
    for (int s : m.states())
      if (s != i) order.push_back(s);
  } else {
    detail::check_exclusion_order(m, i, order);
  }
  DeltaFloors floors = delta_floors(m);
  SemiMarkovModel cur = m;
  for (int r : order) cur = reduce_state(cur, r).model;
  LaurentExpansion e_ii = cur.entry(i, i).e;
  std::optional<LaurentExpansion> rebased;
  if (e_ii.bound() && floors.delta_star <= e_ii.bound()->delta)
    rebased = rebase_delta(e_ii, floors.delta_star);
  return HittingResult{i, std::move(order), std::move(e_ii), std::move(rebased)};
}

/// Expected hitting times among a pair of states {i, j}: all other states are
/// excluded (ascending), then the two-state closed forms apply:
///   E_{u->v} = e_u / (1 - p_uu)    with e_u = e_uu + e_uv
///   E_{v->v} = e_v + e_u * p_vu / (1 - p_uu)
/// Keys of the returned map are (source, target).
inline std::map<std::pair<int, int>, LaurentExpansion> pairwise_hitting(
    const SemiMarkovModel& m, int i, int j) {
  if (i == j) throw std::invalid_argument("pairwise_hitting: states must differ");
  if (!m.has_state(i) || !m.has_state(j)) throw ModelError("pairwise_hitting: unknown state");
  SemiMarkovModel cur = m;
  for (int s : m.states())
    if (s != i && s != j) cur = reduce_state(cur, s).model;

  auto row_expectation = [&](int u) {
    std::vector<LaurentExpansion> es;
    for (int t : cur.transition_set(u)) es.push_back(cur.entry(u, t).e);
    return sum_many(std::span<const LaurentExpansion>(es));
  };

  std::map<std::pair<int, int>, LaurentExpansion> out;
  for (auto [u, v] : {std::pair<int, int>{i, j}, std::pair<int, int>{j, i}}) {
    LaurentExpansion e_u = row_expectation(u);
    LaurentExpansion e_v = row_expectation(v);
    const bool u_self = cur.has(u, u);
    LaurentExpansion to_v = u_self ? div(e_u, non_absorption(cur, u)) : e_u;
    out.emplace(std::pair<int, int>{u, v}, to_v);
    LaurentExpansion e_vv = e_v;
    if (cur.has(v, u)) {
      LaurentExpansion back =
          u_self ? div(cur.entry(v, u).p, non_absorption(cur, u)) : cur.entry(v, u).p;
      e_vv = add(e_v, mul(e_u, back));
    }
    out.emplace(std::pair<int, int>{v, v}, std::move(e_vv));
  }
  return out;
}

}  // namespace smexp
