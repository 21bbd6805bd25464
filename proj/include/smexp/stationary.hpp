#pragma once

#include <map>
#include <optional>
#include <vector>

#include "smexp/reduction.hpp"

namespace smexp {

/// Expected sojourn time of state i: the sum of its row expectations.
inline LaurentExpansion sojourn_expectation(const SemiMarkovModel& m, int i) {
  if (!m.has_state(i)) throw ModelError("sojourn_expectation: unknown state");
  std::vector<LaurentExpansion> es;
  for (int j : m.transition_set(i)) es.push_back(m.entry(i, j).e);
  return sum_many(std::span<const LaurentExpansion>(es));
}

/// Stationary probability pi_i = e_i / E_ii, expanded by sequential state
/// exclusion. Coefficients are invariant to the exclusion order.
inline LaurentExpansion stationary(const SemiMarkovModel& m, int i,
                                   std::vector<int> order = {}) {
  LaurentExpansion e_i = sojourn_expectation(m, i);
  HittingResult hit = hitting_time(m, i, std::move(order));
  return div(e_i, hit.expansion);
}

/// Cross-state diagnostics for a full stationary computation: the zero-order
/// coefficients must sum to one and every higher shared order to zero; one
/// state is also recomputed as one minus the others and compared.
struct ConsistencyReport {
  Rational zero_order_sum{0};
  std::map<int, Rational> higher_order_sums;
  bool sums_ok = false;
  int complement_state = 0;
  bool complement_ok = false;
};

struct StationaryResult {
  std::map<int, LaurentExpansion> per_state;
  std::map<int, LaurentExpansion> rebased;  // present where bounds exist
  std::map<int, std::vector<int>> exclusion_orders;
  Rational delta_star{1};
  ConsistencyReport consistency;
};

inline StationaryResult stationary_all(
    const SemiMarkovModel& m, const std::map<int, std::vector<int>>& orders = {}) {
  StationaryResult out;
  out.delta_star = delta_floors(m).delta_star;
  for (int i : m.states()) {
    std::vector<int> order;
    if (auto it = orders.find(i); it != orders.end()) order = it->second;
    LaurentExpansion pi = stationary(m, i, order);
    if (order.empty())
      for (int s : m.states())
        if (s != i) order.push_back(s);
    if (pi.bound() && out.delta_star <= pi.bound()->delta)
      out.rebased.emplace(i, rebase_delta(pi, out.delta_star));
    out.per_state.emplace(i, std::move(pi));
    out.exclusion_orders.emplace(i, std::move(order));
  }

  ConsistencyReport& rep = out.consistency;
  int k_common = std::numeric_limits<int>::max();
  for (const auto& [i, pi] : out.per_state) k_common = std::min(k_common, pi.k());
  for (const auto& [i, pi] : out.per_state) rep.zero_order_sum += pi.coeff(0);
  rep.sums_ok = rep.zero_order_sum == 1;
  for (int l = 1; l <= k_common; ++l) {
    Rational s(0);
    for (const auto& [i, pi] : out.per_state) s += pi.coeff(l);
    rep.higher_order_sums[l] = s;
    if (s != 0) rep.sums_ok = false;
  }

  // Complement route for the smallest state: 1 - sum of the other
  // probabilities must reproduce its coefficients on the shared range.
  rep.complement_state = m.states().front();
  std::vector<LaurentExpansion> others;
  for (const auto& [i, pi] : out.per_state)
    if (i != rep.complement_state) others.push_back(pi);
  const LaurentExpansion& direct = out.per_state.at(rep.complement_state);
  rep.complement_ok = true;
  if (!others.empty()) {
    LaurentExpansion osum = sum_many(std::span<const LaurentExpansion>(others));
    LaurentExpansion complement =
        add(embed_constant(Rational(1), 0, osum.k()), scale(Rational(-1), osum));
    const int lo = std::min(direct.h(), complement.h());
    const int hi = std::min(direct.k(), complement.k());
    for (int l = lo; l <= hi; ++l)
      if (direct.coeff(l) != complement.coeff(l)) rep.complement_ok = false;
  }
  return out;
}

}  // namespace smexp
