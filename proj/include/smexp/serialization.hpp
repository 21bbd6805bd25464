#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smexp/model.hpp"
#include "smexp/oracle.hpp"
#include "smexp/reduction.hpp"
#include "smexp/stationary.hpp"

namespace smexp {

using Json = nlohmann::json;

// --- expansions ------------------------------------------------------------
//
// {"h": int, "k": int, "coeffs": ["p/q", ...],
//  "bound": {"delta": "p/q", "G": number, "epsBar": number} | null}
// Rationals travel as strings and round-trip bit-exactly.

inline Json expansion_to_json(const LaurentExpansion& a) {
  Json j;
  j["h"] = a.h();
  j["k"] = a.k();
  Json coeffs = Json::array();
  for (const Rational& c : a.coeffs()) coeffs.push_back(to_string(c));
  j["coeffs"] = std::move(coeffs);
  if (a.bound()) {
    j["bound"] = Json{{"delta", to_string(a.bound()->delta)},
                      {"G", a.bound()->G},
                      {"epsBar", a.bound()->eps_bar}};
  } else {
    j["bound"] = nullptr;
  }
  return j;
}

inline LaurentExpansion expansion_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("h") || !j.contains("k") || !j.contains("coeffs"))
    throw ModelError("expansion: need h, k and coeffs");
  if (!j["h"].is_number_integer() || !j["k"].is_number_integer() || !j["coeffs"].is_array())
    throw ModelError("expansion: malformed h/k/coeffs");
  int h = j["h"].get<int>();
  int k = j["k"].get<int>();
  std::vector<Rational> coeffs;
  for (const Json& c : j["coeffs"]) {
    if (!c.is_string()) throw ModelError("expansion: coefficients must be rational strings");
    coeffs.push_back(parse_rational(c.get<std::string>()));
  }
  if (j.contains("bound") && !j["bound"].is_null()) {
    const Json& b = j["bound"];
    if (!b.is_object() || !b.contains("delta") || !b.contains("G") || !b.contains("epsBar"))
      throw ModelError("expansion: bound needs delta, G and epsBar");
    RemainderBound bound{parse_rational(b["delta"].get<std::string>()),
                         b["G"].get<double>(), b["epsBar"].get<double>()};
    try {
      return LaurentExpansion::normalized(h, k, std::move(coeffs), std::move(bound));
    } catch (const std::invalid_argument& err) {
      throw ModelError(std::string("expansion: ") + err.what());
    }
  }
  try {
    return LaurentExpansion(h, k, std::move(coeffs));
  } catch (const std::invalid_argument& err) {
    throw ModelError(std::string("expansion: ") + err.what());
  }
}

// --- models ----------------------------------------------------------------
//
// {"N": int, "eps0": number, "entries": [{"from": i, "to": j,
//   "p": <expansion>, "e": <expansion>}, ...]}
// "states": [labels...] is accepted in place of "N" (reduced models keep
// their original, possibly non-contiguous labels). eps0 defaults to 1.

inline SemiMarkovModel model_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("entries"))
    throw ModelError("model: need an object with entries");
  std::vector<int> states;
  if (j.contains("N")) {
    if (!j["N"].is_number_integer() || j["N"].get<int>() < 1)
      throw ModelError("model: N must be a positive integer");
    for (int s = 1; s <= j["N"].get<int>(); ++s) states.push_back(s);
  } else if (j.contains("states")) {
    for (const Json& s : j["states"]) states.push_back(s.get<int>());
  } else {
    throw ModelError("model: need N or states");
  }
  double eps0 = 1.0;
  if (j.contains("eps0")) {
    if (!j["eps0"].is_number()) throw ModelError("model: eps0 must be a number");
    eps0 = j["eps0"].get<double>();
  }
  std::map<std::pair<int, int>, TransitionEntry> entries;
  for (const Json& ej : j["entries"]) {
    if (!ej.is_object() || !ej.contains("from") || !ej.contains("to") ||
        !ej.contains("p") || !ej.contains("e"))
      throw ModelError("model: every entry needs from, to, p and e");
    int from = ej["from"].get<int>();
    int to = ej["to"].get<int>();
    if (entries.count({from, to}))
      throw ModelError("model: duplicate entry (" + std::to_string(from) + "," +
                       std::to_string(to) + ")");
    entries.emplace(std::pair<int, int>{from, to},
                    TransitionEntry{expansion_from_json(ej["p"]),
                                    expansion_from_json(ej["e"])});
  }
  return SemiMarkovModel(std::move(states), eps0, std::move(entries));
}

inline SemiMarkovModel parse_model(const std::string& bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& err) {
    throw ModelError(std::string("model: invalid JSON: ") + err.what());
  }
  return model_from_json(j);
}

inline Json model_to_json(const SemiMarkovModel& m) {
  Json j;
  bool contiguous = m.states().front() == 1 && m.states().back() == m.n_states();
  if (contiguous)
    j["N"] = m.n_states();
  else
    j["states"] = m.states();
  j["eps0"] = m.eps0();
  Json entries = Json::array();
  for (const auto& [key, entry] : m.entries()) {
    entries.push_back(Json{{"from", key.first},
                           {"to", key.second},
                           {"p", expansion_to_json(entry.p)},
                           {"e", expansion_to_json(entry.e)}});
  }
  j["entries"] = std::move(entries);
  return j;
}

// --- reports ---------------------------------------------------------------

inline Json validation_report_to_json(const ValidationReport& r) {
  Json j;
  j["ok"] = r.ok();
  j["stronglyConnected"] = r.strongly_connected;
  Json pairs = Json::array();
  for (auto [a, b] : r.unreachable_pairs) pairs.push_back(Json::array({a, b}));
  j["unreachablePairs"] = std::move(pairs);
  Json reach = Json::object();
  for (const auto& [src, set] : r.reachable_sets) reach[std::to_string(src)] = set;
  j["reachableSets"] = std::move(reach);
  Json sums = Json::array();
  for (const ConditionFFailure& f : r.coefficient_sum_failures)
    sums.push_back(Json{{"state", f.state}, {"power", f.power}, {"sum", to_string(f.sum)}});
  j["coefficientSumFailures"] = std::move(sums);
  j["rowsWithNonzeroFloor"] = r.rows_with_nonzero_floor;
  Json np = Json::array();
  for (auto [a, b] : r.nonpivotal_entries) np.push_back(Json::array({a, b}));
  j["nonpivotalEntries"] = std::move(np);
  j["deltaCirc"] = to_string(r.floors.delta_circ);
  j["deltaStar"] = to_string(r.floors.delta_star);
  return j;
}

inline Json thresholds_to_json(const PositivityThresholds& t) {
  Json j;
  j["epsPrime0"] = t.eps_prime0;
  j["epsDoublePrime0"] = t.eps_double_prime0;
  j["epsTilde0"] = t.eps_tilde0;
  Json p = Json::array();
  for (const auto& [key, v] : t.eps_alpha_p)
    p.push_back(Json{{"from", key.first}, {"to", key.second}, {"epsAlpha", v}});
  j["perEntryP"] = std::move(p);
  Json e = Json::array();
  for (const auto& [key, v] : t.eps_alpha_e)
    e.push_back(Json{{"from", key.first}, {"to", key.second}, {"epsAlpha", v}});
  j["perEntryE"] = std::move(e);
  return j;
}

inline Json reduction_step_to_json(const ReductionStep& s) {
  return Json{{"excluded", s.excluded},
              {"barP", expansion_to_json(s.bar_p)},
              {"model", model_to_json(s.model)}};
}

inline Json reduction_trace_to_json(const std::vector<ReductionStep>& steps) {
  Json j = Json::array();
  for (const ReductionStep& s : steps) j.push_back(reduction_step_to_json(s));
  return j;
}

inline Json hitting_result_to_json(const HittingResult& h) {
  Json j;
  j["target"] = h.target;
  j["exclusionOrder"] = h.exclusion_order;
  j["expansion"] = expansion_to_json(h.expansion);
  j["rebased"] = h.rebased ? expansion_to_json(*h.rebased) : Json(nullptr);
  return j;
}

inline Json stationary_result_to_json(const StationaryResult& r) {
  Json j;
  Json per = Json::object();
  for (const auto& [i, pi] : r.per_state) per[std::to_string(i)] = expansion_to_json(pi);
  j["perState"] = std::move(per);
  Json reb = Json::object();
  for (const auto& [i, pi] : r.rebased) reb[std::to_string(i)] = expansion_to_json(pi);
  j["rebased"] = std::move(reb);
  Json orders = Json::object();
  for (const auto& [i, o] : r.exclusion_orders) orders[std::to_string(i)] = o;
  j["exclusionOrders"] = std::move(orders);
  j["deltaStar"] = to_string(r.delta_star);
  Json cons;
  cons["zeroOrderSum"] = to_string(r.consistency.zero_order_sum);
  Json higher = Json::object();
  for (const auto& [l, s] : r.consistency.higher_order_sums)
    higher[std::to_string(l)] = to_string(s);
  cons["higherOrderSums"] = std::move(higher);
  cons["sumsOk"] = r.consistency.sums_ok;
  cons["complementState"] = r.consistency.complement_state;
  cons["complementOk"] = r.consistency.complement_ok;
  j["consistency"] = std::move(cons);
  return j;
}

inline Json numeric_model_to_json(const NumericModel& nm) {
  Json j;
  j["eps"] = to_string(nm.eps);
  j["states"] = nm.states;
  j["exact"] = nm.exact;
  auto matrix = [](const std::vector<std::vector<Rational>>& mat) {
    Json rows = Json::array();
    for (const auto& row : mat) {
      Json r = Json::array();
      for (const Rational& v : row) r.push_back(to_string(v));
      rows.push_back(std::move(r));
    }
    return rows;
  };
  j["p"] = matrix(nm.p);
  j["e"] = matrix(nm.e);
  return j;
}

inline Json certification_to_json(const CertificationReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["maxNormalized"] = r.max_normalized;
  j["gLimit"] = r.g_limit;
  Json samples = Json::array();
  for (const CertificationSample& s : r.samples)
    samples.push_back(Json{{"eps", to_string(s.eps)},
                           {"truth", s.truth},
                           {"value", s.value},
                           {"residual", s.residual},
                           {"normalized", s.normalized}});
  j["samples"] = std::move(samples);
  return j;
}

// --- text rendering ---------------------------------------------------------

inline std::string format_expansion(const LaurentExpansion& a) {
  std::string out;
  for (int l = a.h(); l <= a.k(); ++l) {
    const Rational c = a.coeff(l);
    if (out.empty()) {
      out += to_string(c);
    } else {
      out += c < 0 ? " - " : " + ";
      out += to_string(rat_abs(c));
    }
    if (l == 1)
      out += " eps";
    else if (l != 0)
      out += " eps^" + std::to_string(l);
  }
  if (a.k() == 0)
    out += " + o(1)";
  else if (a.k() == 1)
    out += " + o(eps)";
  else
    out += " + o(eps^" + std::to_string(a.k()) + ")";
  if (a.bound()) {
    out += "  {delta=" + to_string(a.bound()->delta) + ", G=" + std::to_string(a.bound()->G) +
           ", epsBar=" + std::to_string(a.bound()->eps_bar) + "}";
  }
  return out;
}

}  // namespace smexp
