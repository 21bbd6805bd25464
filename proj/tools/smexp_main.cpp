// Command-line front end: validation, remainder completion, positivity
// thresholds, phase-space reduction, hitting times, stationary distributions,
// pointwise evaluation and bound certification for semi-Markov model files.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "smexp/smexp.hpp"

namespace {

using namespace smexp;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SemiMarkovModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Usage("cannot read file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Usage("malformed state list: '" + text + "'");
    }
  }
  if (out.empty()) throw Usage("empty state list");
  return out;
}

Rational parse_rational_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw Usage("malformed rational for " + flag + ": '" + text + "'");
  }
}

void emit(bool json, const Json& payload, const std::string& text) {
  if (json)
    std::cout << payload.dump(2) << "\n";
  else
    std::cout << text;
}

int cmd_validate(const std::string& file, bool json) {
  SemiMarkovModel m = load_model(file);
  ValidationReport report = validate_conditions(m);
  std::ostringstream text;
  text << (report.ok() ? "valid" : "INVALID") << "\n";
  if (!report.strongly_connected) {
    text << "  unreachable pairs:";
    for (auto [a, b] : report.unreachable_pairs) text << " (" << a << "," << b << ")";
    text << "\n";
  }
  for (const ConditionFFailure& f : report.coefficient_sum_failures)
    text << "  row " << f.state << ": coefficient sum at power " << f.power << " is "
         << to_string(f.sum) << "\n";
  for (int i : report.rows_with_nonzero_floor)
    text << "  row " << i << ": lowest probability power is not zero\n";
  for (auto [a, b] : report.nonpivotal_entries)
    text << "  entry (" << a << "," << b << "): nonpositive leading coefficient\n";
  text << "  delta_circ = " << to_string(report.floors.delta_circ)
       << ", delta_star = " << to_string(report.floors.delta_star) << "\n";
  emit(json, validation_report_to_json(report), text.str());
  return report.ok() ? kExitOk : kExitFailure;
}

int cmd_complete(const std::string& file, const std::string& out_path, bool json) {
  SemiMarkovModel completed = complete_remainders(load_model(file));
  Json j = model_to_json(completed);
  std::ofstream out(out_path);
  if (!out) throw Usage("cannot write file: " + out_path);
  out << j.dump(2) << "\n";
  std::ostringstream text;
  text << "completed model written to " << out_path << "\n";
  for (auto [i, ji] : designated_targets(completed)) {
    const auto& b = completed.entry(i, ji).p.bound();
    text << "  row " << i << ": designated entry (" << i << "," << ji << ") bound delta="
         << to_string(b->delta) << " G=" << b->G << " epsBar=" << b->eps_bar << "\n";
  }
  emit(json, Json{{"written", out_path}, {"model", j}}, text.str());
  return kExitOk;
}

int cmd_thresholds(const std::string& file, const std::string& alpha_text, bool json) {
  Rational alpha = parse_rational_flag(alpha_text, "--alpha");
  if (!(alpha > 0) || !(alpha < Rational(1, 2)))
    throw Usage("--alpha must lie strictly between 0 and 1/2");
  PositivityThresholds t = positivity_thresholds(load_model(file), alpha);
  std::ostringstream text;
  text << "eps'_0  = " << t.eps_prime0 << "\n"
       << "eps''_0 = " << t.eps_double_prime0 << "\n"
       << "eps~_0  = " << t.eps_tilde0 << "\n";
  emit(json, thresholds_to_json(t), text.str());
  return kExitOk;
}

std::string render_model(const SemiMarkovModel& m) {
  std::ostringstream text;
  for (const auto& [key, entry] : m.entries()) {
    text << "  p[" << key.first << "," << key.second << "] = "
         << format_expansion(entry.p) << "\n";
    text << "  e[" << key.first << "," << key.second << "] = "
         << format_expansion(entry.e) << "\n";
  }
  return text.str();
}

int cmd_reduce(const std::string& file, int exclude, bool trace, bool json) {
  ReductionStep step = reduce_state(load_model(file), exclude);
  Json j;
  j["excluded"] = step.excluded;
  j["model"] = model_to_json(step.model);
  if (trace) j["trace"] = reduction_trace_to_json({step});
  std::ostringstream text;
  text << "excluded state " << step.excluded << "\n";
  if (trace) text << "  bar_p = " << format_expansion(step.bar_p) << "\n";
  text << render_model(step.model);
  emit(json, j, text.str());
  return kExitOk;
}

int cmd_hitting(const std::string& file, int target, const std::string& order_text,
                bool json) {
  std::vector<int> order;
  if (!order_text.empty()) order = parse_int_list(order_text);
  HittingResult h = hitting_time(load_model(file), target, std::move(order));
  std::ostringstream text;
  text << "E[" << h.target << "," << h.target << "] = " << format_expansion(h.expansion)
       << "\n";
  if (h.rebased) text << "  rebased: " << format_expansion(*h.rebased) << "\n";
  emit(json, hitting_result_to_json(h), text.str());
  return kExitOk;
}

int cmd_pairwise(const std::string& file, const std::string& pair_text, bool json) {
  std::vector<int> pair = parse_int_list(pair_text);
  if (pair.size() != 2) throw Usage("--pair expects exactly two states, e.g. 2,3");
  auto result = pairwise_hitting(load_model(file), pair[0], pair[1]);
  Json j = Json::array();
  std::ostringstream text;
  for (const auto& [key, expansion] : result) {
    j.push_back(Json{{"from", key.first},
                     {"to", key.second},
                     {"expansion", expansion_to_json(expansion)}});
    text << "E[" << key.first << "," << key.second << "] = " << format_expansion(expansion)
         << "\n";
  }
  emit(json, j, text.str());
  return kExitOk;
}

int cmd_stationary(const std::string& file, int state, const std::string& order_text,
                   bool rebase, bool json) {
  SemiMarkovModel m = load_model(file);
  std::vector<int> order;
  if (!order_text.empty()) order = parse_int_list(order_text);
  if (state != 0) {
    LaurentExpansion pi = stationary(m, state, order);
    Json j{{"state", state}, {"expansion", expansion_to_json(pi)}};
    std::ostringstream text;
    text << "pi[" << state << "] = " << format_expansion(pi) << "\n";
    if (rebase && pi.bound()) {
      LaurentExpansion reb = rebase_delta(pi, delta_floors(m).delta_star);
      j["rebased"] = expansion_to_json(reb);
      text << "  rebased: " << format_expansion(reb) << "\n";
    }
    emit(json, j, text.str());
    return kExitOk;
  }
  std::map<int, std::vector<int>> orders;
  if (!order.empty())
    throw Usage("--order needs --state (per-state orders differ)");
  StationaryResult r = stationary_all(m);
  std::ostringstream text;
  for (const auto& [i, pi] : r.per_state) {
    text << "pi[" << i << "] = " << format_expansion(pi) << "\n";
    if (rebase && r.rebased.count(i))
      text << "  rebased: " << format_expansion(r.rebased.at(i)) << "\n";
  }
  text << "sum of constant terms: " << to_string(r.consistency.zero_order_sum)
       << (r.consistency.sums_ok ? " (consistent)" : " (INCONSISTENT)") << "\n";
  emit(json, stationary_result_to_json(r), text.str());
  return kExitOk;
}

int cmd_eval(const std::string& file, const std::string& eps_text, bool json) {
  Rational eps = parse_rational_flag(eps_text, "--epsilon");
  if (!(eps > 0)) throw Usage("--epsilon must be positive");
  SemiMarkovModel m = load_model(file);
  NumericModel nm = instantiate(m, eps);
  std::vector<Rational> pi = numeric_stationary(nm);
  Json j = numeric_model_to_json(nm);
  Json pij = Json::array();
  std::ostringstream text;
  text << "eps = " << to_string(eps) << (nm.exact ? " (exact model)" : " (approximate)")
       << "\n";
  for (size_t i = 0; i < nm.states.size(); ++i) {
    pij.push_back(to_string(pi[i]));
    text << "pi[" << nm.states[i] << "] = " << to_string(pi[i]) << "\n";
  }
  Json hit = Json::array();
  for (int s : nm.states) {
    Rational e = numeric_hitting(nm, s);
    hit.push_back(to_string(e));
    text << "E[" << s << "," << s << "] = " << to_string(e) << "\n";
  }
  j["stationary"] = std::move(pij);
  j["hitting"] = std::move(hit);
  emit(json, j, text.str());
  return kExitOk;
}

int cmd_certify(const std::string& file, int samples, const std::string& eps_max_text,
                bool json) {
  if (samples < 1) throw Usage("--samples must be at least 1");
  Rational eps_max = parse_rational_flag(eps_max_text, "--eps-max");
  if (!(eps_max > 0) || eps_max > 1) throw Usage("--eps-max must lie in (0, 1]");
  SemiMarkovModel m = load_model(file);
  for (const auto& [key, entry] : m.entries())
    if (!entry.p.bound() || entry.p.bound()->G != 0.0 || !entry.e.bound() ||
        entry.e.bound()->G != 0.0)
      throw ModelError(
          "certify needs a model whose remainders are identically zero (G = 0 bounds); "
          "ground truth is undefined otherwise");

  StationaryResult r = stationary_all(m);
  bool all_pass = true;
  Json j = Json::object();
  std::ostringstream text;
  for (const auto& [i, pi] : r.per_state) {
    if (!pi.bound()) throw ModelError("stationary expansion carries no bound");
    Rational top = std::min(eps_max, Rational(1));
    while (to_double(top) > pi.bound()->eps_bar) top /= 2;
    std::vector<std::pair<Rational, double>> truth;
    Rational eps = top;
    for (int s = 0; s < samples; ++s, eps /= 2) {
      NumericModel nm = instantiate(m, eps);
      truth.emplace_back(eps, to_double(numeric_stationary(nm)[static_cast<size_t>(
                                  nm.index_of(i))]));
    }
    CertificationReport rep = certify(pi, truth);
    all_pass = all_pass && rep.pass;
    j[std::to_string(i)] = certification_to_json(rep);
    text << "pi[" << i << "]: " << (rep.pass ? "PASS" : "FAIL")
         << "  max|truth-value|/eps^(k+delta) = " << rep.max_normalized
         << "  limit = " << rep.g_limit << "\n";
  }
  emit(json, j, text.str());
  return all_pass ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laurent expansions with certified remainder bounds for perturbed "
               "semi-Markov models"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));

  std::string file, out_path, alpha = "1/4", order_text, pair_text, eps_text, eps_max = "1/4";
  int exclude = 0, target = 0, state = 0, samples = 8;
  bool trace = false, rebase = false;

  CLI::App* validate = app.add_subcommand("validate", "Check model conditions");
  validate->add_option("file", file)->required();

  CLI::App* complete = app.add_subcommand("complete", "Fill designated remainder bounds");
  complete->add_option("file", file)->required();
  complete->add_option("-o,--output", out_path, "Output model file")->required();

  CLI::App* thresholds = app.add_subcommand("thresholds", "Positivity radii");
  thresholds->add_option("file", file)->required();
  thresholds->add_option("--alpha", alpha, "Margin parameter in (0, 1/2)");

  CLI::App* reduce = app.add_subcommand("reduce", "Exclude one state");
  reduce->add_option("file", file)->required();
  reduce->add_option("--exclude", exclude, "State to exclude")->required();
  reduce->add_flag("--trace", trace, "Include the reduction trace");

  CLI::App* hitting = app.add_subcommand("hitting", "Expected return time expansion");
  hitting->add_option("file", file)->required();
  hitting->add_option("--target", target, "Return state")->required();
  hitting->add_option("--order", order_text, "Comma list exclusion order");

  CLI::App* pairwise = app.add_subcommand("pairwise", "Hitting times between two states");
  pairwise->add_option("file", file)->required();
  pairwise->add_option("--pair", pair_text, "Two states, e.g. 2,3")->required();

  CLI::App* stat = app.add_subcommand("stationary", "Stationary distribution expansions");
  stat->add_option("file", file)->required();
  stat->add_option("--state", state, "Single state (default: all)");
  stat->add_option("--order", order_text, "Comma list exclusion order");
  stat->add_flag("--rebase-delta-star", rebase, "Also print the delta_star form");

  CLI::App* eval = app.add_subcommand("eval", "Exact pointwise evaluation");
  eval->add_option("file", file)->required();
  eval->add_option("--epsilon", eps_text, "Evaluation point, rational")->required();

  CLI::App* certify_cmd = app.add_subcommand("certify", "Check bounds against the oracle");
  certify_cmd->add_option("file", file)->required();
  certify_cmd->add_option("--samples", samples, "Number of dyadic samples");
  certify_cmd->add_option("--eps-max", eps_max, "Largest sample point, rational");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  const bool json = format == "json";
  try {
    if (app.got_subcommand(validate)) return cmd_validate(file, json);
    if (app.got_subcommand(complete)) return cmd_complete(file, out_path, json);
    if (app.got_subcommand(thresholds)) return cmd_thresholds(file, alpha, json);
    if (app.got_subcommand(reduce)) return cmd_reduce(file, exclude, trace, json);
    if (app.got_subcommand(hitting)) return cmd_hitting(file, target, order_text, json);
    if (app.got_subcommand(pairwise)) return cmd_pairwise(file, pair_text, json);
    if (app.got_subcommand(stat)) return cmd_stationary(file, state, order_text, rebase, json);
    if (app.got_subcommand(eval)) return cmd_eval(file, eps_text, json);
    if (app.got_subcommand(certify_cmd)) return cmd_certify(file, samples, eps_max, json);
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
