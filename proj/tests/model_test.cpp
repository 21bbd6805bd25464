#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

#include "test_support.hpp"

using namespace smexp;
using namespace testutil;
using Catch::Matchers::WithinRel;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixture_path(const char* name) {
  return std::string(EXAMPLES_DIR) + "/" + name;
}

SemiMarkovModel load_fixture(const char* name) {
  return parse_model(read_file(fixture_path(name)));
}

// Replaces every entry bound in a model built from fixture coefficients.
SemiMarkovModel with_uniform_bounds(const SemiMarkovModel& m, const Rational& delta,
                                    double g, double eps_bar, double eps0) {
  std::map<std::pair<int, int>, TransitionEntry> entries;
  for (const auto& [key, entry] : m.entries()) {
    RemainderBound b{delta, g, eps_bar};
    entries.emplace(key,
                    TransitionEntry{LaurentExpansion(entry.p.h(), entry.p.k(),
                                                     entry.p.coeffs(), b),
                                    LaurentExpansion(entry.e.h(), entry.e.k(),
                                                     entry.e.coeffs(), b)});
  }
  return SemiMarkovModel(m.states(), eps0, std::move(entries));
}

}  // namespace

TEST_CASE("the shipped three-state fixture parses with the expected structure") {
  SemiMarkovModel m = load_fixture("silvestrov-3state.json");
  CHECK(m.n_states() == 3);
  CHECK(m.transition_set(1) == std::vector<int>{1, 2});
  CHECK(m.transition_set(2) == std::vector<int>{1, 2, 3});
  CHECK(m.transition_set(3) == std::vector<int>{1, 2});
  CHECK(m.entry(2, 1).p.coeffs() == rats({"1/2", "1/2", "-1"}));
  CHECK(m.entry(3, 1).e.h() == -1);
  CHECK_FALSE(m.entry(2, 2).p.bound());
  CHECK(m.entry(2, 1).p.bound());
}

TEST_CASE("single-state self-loop model is valid") {
  Json j{{"N", 1},
         {"entries",
          Json::array({Json{{"from", 1},
                            {"to", 1},
                            {"p", Json{{"h", 0}, {"k", 0}, {"coeffs", {"1"}}, {"bound", nullptr}}},
                            {"e", Json{{"h", 0}, {"k", 0}, {"coeffs", {"1"}}, {"bound", nullptr}}}}})}};
  SemiMarkovModel m = model_from_json(j);
  CHECK(m.n_states() == 1);
}

TEST_CASE("parse rejects malformed models") {
  auto entry = [](int from, int to, Json p, Json e) {
    return Json{{"from", from}, {"to", to}, {"p", std::move(p)}, {"e", std::move(e)}};
  };
  Json good_exp{{"h", 0}, {"k", 0}, {"coeffs", {"1"}}, {"bound", nullptr}};

  SECTION("empty transition set") {
    Json j{{"N", 2}, {"entries", Json::array({entry(1, 2, good_exp, good_exp)})}};
    CHECK_THROWS_WITH(model_from_json(j), Catch::Matchers::ContainsSubstring("empty transition set"));
  }
  SECTION("duplicate pair") {
    Json j{{"N", 1},
           {"entries", Json::array({entry(1, 1, good_exp, good_exp),
                                    entry(1, 1, good_exp, good_exp)})}};
    CHECK_THROWS_WITH(model_from_json(j), Catch::Matchers::ContainsSubstring("duplicate"));
  }
  SECTION("negative power in a probability entry") {
    Json bad{{"h", -1}, {"k", 0}, {"coeffs", {"1", "1"}}, {"bound", nullptr}};
    Json j{{"N", 1}, {"entries", Json::array({entry(1, 1, bad, good_exp)})}};
    CHECK_THROWS_WITH(model_from_json(j), Catch::Matchers::ContainsSubstring("negative power"));
  }
  SECTION("nonpositive leading coefficient") {
    Json bad{{"h", 0}, {"k", 1}, {"coeffs", {"0", "1"}}, {"bound", nullptr}};
    Json j{{"N", 1}, {"entries", Json::array({entry(1, 1, bad, good_exp)})}};
    CHECK_THROWS_WITH(model_from_json(j),
                      Catch::Matchers::ContainsSubstring("leading coefficient"));
  }
  SECTION("malformed rational") {
    Json bad{{"h", 0}, {"k", 0}, {"coeffs", {"1/x"}}, {"bound", nullptr}};
    Json j{{"N", 1}, {"entries", Json::array({entry(1, 1, bad, good_exp)})}};
    CHECK_THROWS_AS(model_from_json(j), std::exception);
  }
  SECTION("zero denominator") {
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  }
  SECTION("invalid JSON bytes") {
    CHECK_THROWS_AS(parse_model("{ not json"), ModelError);
  }
  SECTION("unknown state in entry") {
    Json j{{"N", 1}, {"entries", Json::array({entry(1, 2, good_exp, good_exp)})}};
    CHECK_THROWS_WITH(model_from_json(j), Catch::Matchers::ContainsSubstring("unknown state"));
  }
}

TEST_CASE("model JSON round-trips bit-exactly") {
  SemiMarkovModel m = load_fixture("silvestrov-3state.json");
  SemiMarkovModel again = parse_model(model_to_json(m).dump());
  CHECK(again.states() == m.states());
  CHECK(again.eps0() == m.eps0());
  for (const auto& [key, entry] : m.entries()) {
    CHECK(again.entry(key.first, key.second).p == entry.p);
    CHECK(again.entry(key.first, key.second).e == entry.e);
  }

  std::mt19937_64 rng(20240810);
  for (int trial = 0; trial < 10; ++trial) {
    SemiMarkovModel r = random_exact_model(rng, 4);
    SemiMarkovModel back = parse_model(model_to_json(r).dump());
    for (const auto& [key, entry] : r.entries()) {
      CHECK(back.entry(key.first, key.second).p == entry.p);
      CHECK(back.entry(key.first, key.second).e == entry.e);
    }
  }
}

TEST_CASE("expansion JSON keeps rationals and doubles exact") {
  LaurentExpansion e = lx(-2, {"-7/3", "0", "22/7"}, "2/3", 0.1234567890123456789, 0.725);
  LaurentExpansion back = expansion_from_json(expansion_to_json(e));
  CHECK(back == e);
  // delta > 1 in a file is normalized on load
  Json j{{"h", 0},
         {"k", 0},
         {"coeffs", {"1"}},
         {"bound", Json{{"delta", "3/2"}, {"G", 1.0}, {"epsBar", 0.5}}}};
  LaurentExpansion n = expansion_from_json(j);
  CHECK(n.k() == 1);
  CHECK(n.bound()->delta == parse_rational("1/2"));
}

TEST_CASE("validate_conditions on the fixture") {
  SemiMarkovModel m = load_fixture("silvestrov-3state.json");
  ValidationReport r = validate_conditions(m);
  CHECK(r.ok());
  CHECK(r.strongly_connected);
  CHECK(r.coefficient_sum_failures.empty());
  CHECK(r.rows_with_nonzero_floor.empty());
  // row 1 retains powers up to 3 and the sums cancel there
  CHECK(m.entry(1, 1).p.coeff(2) + m.entry(1, 2).p.coeff(2) == 0);
  CHECK(m.entry(1, 1).p.coeff(3) + m.entry(1, 2).p.coeff(3) == 0);
  // all present deltas are 1
  CHECK(r.floors.delta_circ == 1);
  CHECK(r.floors.delta_star == 1);
}

TEST_CASE("validate_conditions reports a broken coefficient sum with its location") {
  SemiMarkovModel m = load_fixture("silvestrov-3state.json");
  std::map<std::pair<int, int>, TransitionEntry> entries = m.entries();
  TransitionEntry& p11 = entries.at({1, 1});
  std::vector<Rational> c = p11.p.coeffs();
  c[0] = parse_rational("9/10");
  p11.p = LaurentExpansion(p11.p.h(), p11.p.k(), std::move(c));
  SemiMarkovModel mutated(m.states(), m.eps0(), std::move(entries));
  ValidationReport r = validate_conditions(mutated);
  CHECK_FALSE(r.ok());
  REQUIRE_FALSE(r.coefficient_sum_failures.empty());
  CHECK(r.coefficient_sum_failures.front().state == 1);
  CHECK(r.coefficient_sum_failures.front().power == 0);
  CHECK(r.coefficient_sum_failures.front().sum == parse_rational("9/10"));
}

TEST_CASE("validate_conditions reports unreachable pairs") {
  // 1 -> 1 only; 2 -> 1: state 2 is unreachable
  Json exp1{{"h", 0}, {"k", 0}, {"coeffs", {"1"}}, {"bound", nullptr}};
  Json j{{"N", 2},
         {"entries",
          Json::array({Json{{"from", 1}, {"to", 1}, {"p", exp1}, {"e", exp1}},
                       Json{{"from", 2}, {"to", 1}, {"p", exp1}, {"e", exp1}}})}};
  ValidationReport r = validate_conditions(model_from_json(j));
  CHECK_FALSE(r.strongly_connected);
  REQUIRE_FALSE(r.unreachable_pairs.empty());
  CHECK(r.unreachable_pairs.front() == std::pair<int, int>{1, 2});
  CHECK(r.reachable_sets.at(1) == std::vector<int>{1});
}

TEST_CASE("complete_remainders fills the designated bounds of the fixture") {
  SemiMarkovModel m = load_fixture("silvestrov-3state.json");
  std::map<int, int> designated = designated_targets(m);
  CHECK(designated.at(1) == 1);  // smallest index among ties at order 3
  CHECK(designated.at(2) == 2);  // min(3, 2, 3) attained at j = 2
  CHECK(designated.at(3) == 1);

  SemiMarkovModel done = complete_remainders(m);
  const auto& b22 = done.entry(2, 2).p.bound();
  REQUIRE(b22);
  CHECK(b22->delta == 1);
  CHECK(b22->eps_bar == 0.5);
  // tails beyond power 2: |-1| from (2,1) and |2| from (2,3); both G = 1,
  // every eps0 power equals one since eps0 = 1
  CHECK_THAT(b22->G, WithinRel(5.0, 1e-12));

  const auto& b11 = done.entry(1, 1).p.bound();
  REQUIRE(b11);
  CHECK_THAT(b11->G, WithinRel(1.0, 1e-12));
  // non-designated bounds are untouched
  CHECK(done.entry(2, 1).p.bound()->G == 1.0);
}

TEST_CASE("complete_remainders degenerate and error cases") {
  auto exp = [](int h, std::vector<std::string> cs, Json bound) {
    Json j{{"h", h}, {"k", h + int(cs.size()) - 1}, {"bound", std::move(bound)}};
    j["coeffs"] = cs;
    return j;
  };
  Json exact{{"delta", "1"}, {"G", 0.0}, {"epsBar", 1.0}};
  Json g1{{"delta", "1"}, {"G", 1.0}, {"epsBar", 1.0}};

  SECTION("single-entry rows get the exact bound") {
    Json j{{"N", 2},
           {"entries",
            Json::array({Json{{"from", 1}, {"to", 2}, {"p", exp(0, {"1"}, nullptr)},
                              {"e", exp(0, {"1"}, exact)}},
                         Json{{"from", 2}, {"to", 1}, {"p", exp(0, {"1"}, nullptr)},
                              {"e", exp(0, {"1"}, exact)}}})}};
    SemiMarkovModel done = complete_remainders(model_from_json(j));
    CHECK(done.entry(1, 2).p.bound()->G == 0.0);
    CHECK(done.entry(1, 2).p.bound()->delta == 1);
    CHECK(done.entry(1, 2).p.bound()->eps_bar == 1.0);
  }
  SECTION("one tail coefficient of size two plus a unit G gives three") {
    Json j{{"N", 2},
           {"entries",
            Json::array(
                {Json{{"from", 1}, {"to", 2}, {"p", exp(0, {"1"}, nullptr)},
                      {"e", exp(0, {"1"}, exact)}},
                 Json{{"from", 2}, {"to", 1}, {"p", exp(1, {"1/2", "2"}, g1)},
                      {"e", exp(0, {"1"}, exact)}},
                 Json{{"from", 2}, {"to", 2}, {"p", exp(0, {"1", "-1/2"}, nullptr)},
                      {"e", exp(0, {"1"}, exact)}}})}};
    SemiMarkovModel done = complete_remainders(model_from_json(j));
    const auto& b = done.entry(2, 2).p.bound();
    REQUIRE(b);
    CHECK_THAT(b->G, WithinRel(3.0, 1e-12));
    CHECK(b->delta == 1);
    CHECK(b->eps_bar == 1.0);
  }
  SECTION("missing bounds on non-designated entries") {
    Json j{{"N", 2},
           {"entries",
            Json::array(
                {Json{{"from", 1}, {"to", 2}, {"p", exp(0, {"1"}, nullptr)},
                      {"e", exp(0, {"1"}, exact)}},
                 Json{{"from", 2}, {"to", 1}, {"p", exp(1, {"1/2", "2"}, nullptr)},
                      {"e", exp(0, {"1"}, exact)}},
                 Json{{"from", 2}, {"to", 2}, {"p", exp(0, {"1", "-1/2"}, nullptr)},
                      {"e", exp(0, {"1"}, exact)}}})}};
    CHECK_THROWS_WITH(complete_remainders(model_from_json(j)),
                      Catch::Matchers::ContainsSubstring("carries no bound"));
  }
}

TEST_CASE("the completed designated bound covers the forced remainder") {
  // Row 2 of the fixture: the designated remainder is minus the sum of the
  // other entries' tails and remainders. With worst-case synthetic
  // remainders c * eps^(k + delta), |c| = G, the completed bound must cover
  // the resulting function on (0, eps_bar].
  SemiMarkovModel done = complete_remainders(load_fixture("silvestrov-3state.json"));
  const RemainderBound& des = *done.entry(2, 2).p.bound();
  const LaurentExpansion& p21 = done.entry(2, 1).p;
  const LaurentExpansion& p23 = done.entry(2, 3).p;
  const int k_des = done.entry(2, 2).p.k();
  for (double c21 : {-1.0, 1.0}) {
    for (double c23 : {-1.0, 1.0}) {
      for (int s = 1; s <= 10; ++s) {
        double eps = des.eps_bar * s / 10.0;
        double forced = 0.0;  // -(tails + remainders) of the other entries
        for (int l = k_des + 1; l <= p21.k(); ++l)
          forced -= to_double(p21.coeff(l)) * std::pow(eps, l);
        for (int l = k_des + 1; l <= p23.k(); ++l)
          forced -= to_double(p23.coeff(l)) * std::pow(eps, l);
        forced -= c21 * p21.bound()->G *
                  std::pow(eps, to_double(Rational(p21.k()) + p21.bound()->delta));
        forced -= c23 * p23.bound()->G *
                  std::pow(eps, to_double(Rational(p23.k()) + p23.bound()->delta));
        double budget = des.G * std::pow(eps, to_double(Rational(k_des) + des.delta));
        CHECK(std::fabs(forced) <= budget * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("models with explicit state labels parse") {
  Json one{{"h", 0}, {"k", 0}, {"coeffs", {"1"}}, {"bound", nullptr}};
  Json j{{"states", Json::array({2, 5})},
         {"entries",
          Json::array({Json{{"from", 2}, {"to", 5}, {"p", one}, {"e", one}},
                       Json{{"from", 5}, {"to", 2}, {"p", one}, {"e", one}}})}};
  SemiMarkovModel m = model_from_json(j);
  CHECK(m.states() == std::vector<int>{2, 5});
  SemiMarkovModel back = parse_model(model_to_json(m).dump());
  CHECK(back.states() == m.states());
}

TEST_CASE("positivity thresholds follow the leading-coefficient margins") {
  auto exp = [](int h, std::vector<std::string> cs, Json bound) {
    Json j{{"h", h}, {"k", h + int(cs.size()) - 1}, {"bound", std::move(bound)}};
    j["coeffs"] = cs;
    return j;
  };
  Json g1{{"delta", "1"}, {"G", 1.0}, {"epsBar", 1.0}};

  SECTION("leading 1/2 against unit G at alpha = 1/4 gives 1/8") {
    Json j{{"N", 2},
           {"entries",
            Json::array({Json{{"from", 1}, {"to", 1}, {"p", exp(0, {"1/2"}, g1)},
                              {"e", exp(0, {"1/2"}, g1)}},
                         Json{{"from", 1}, {"to", 2}, {"p", exp(0, {"1/2"}, g1)},
                              {"e", exp(0, {"1/2"}, g1)}},
                         Json{{"from", 2}, {"to", 1}, {"p", exp(0, {"1"}, g1)},
                              {"e", exp(0, {"1"}, g1)}}})}};
    PositivityThresholds t =
        positivity_thresholds(model_from_json(j), parse_rational("1/4"));
    CHECK_THAT(t.eps_alpha_p.at({1, 1}), WithinRel(1.0 / 8.0, 1e-12));
    CHECK_THAT(t.eps_alpha_p.at({2, 1}), WithinRel(1.0 / 4.0, 1e-12));
    CHECK(t.eps_tilde0 > 0.0);
  }
  SECTION("exact single-coefficient entries keep the full radius") {
    Json exact{{"delta", "1"}, {"G", 0.0}, {"epsBar", 1.0}};
    Json j{{"N", 2},
           {"entries",
            Json::array({Json{{"from", 1}, {"to", 2}, {"p", exp(0, {"1"}, exact)},
                              {"e", exp(0, {"2"}, exact)}},
                         Json{{"from", 2}, {"to", 1}, {"p", exp(0, {"1"}, exact)},
                              {"e", exp(0, {"3"}, exact)}}})}};
    PositivityThresholds t =
        positivity_thresholds(model_from_json(j), parse_rational("1/4"));
    CHECK(t.eps_prime0 == 1.0);
    CHECK(t.eps_double_prime0 == 1.0);
    CHECK(t.eps_tilde0 == 1.0);
  }
  SECTION("alpha out of range") {
    SemiMarkovModel m = load_fixture("three-state-polynomial.json");
    CHECK_THROWS_AS(positivity_thresholds(m, parse_rational("1/2")), std::invalid_argument);
    CHECK_THROWS_AS(positivity_thresholds(m, Rational(0)), std::invalid_argument);
  }
  SECTION("fixture coefficients with synthetic bounds: positivity holds below the radius") {
    SemiMarkovModel base = load_fixture("three-state-polynomial.json");
    SemiMarkovModel m = with_uniform_bounds(base, Rational(1), 1.0, 0.5, 0.5);
    PositivityThresholds t = positivity_thresholds(m, parse_rational("1/4"));
    REQUIRE(t.eps_tilde0 > 0.0);
    // sample the retained polynomial parts across (0, eps_tilde0]
    for (int s = 1; s <= 20; ++s) {
      Rational eps = Rational(s, 20) * Rational(static_cast<long>(t.eps_tilde0 * (1 << 20)),
                                                1 << 20);
      if (!(eps > 0)) continue;
      for (const auto& [key, entry] : m.entries()) {
        CHECK(evaluate(entry.p, eps) > 0);
        CHECK(evaluate(entry.e, eps) > 0);
      }
    }
  }
}

TEST_CASE("delta floors take the minimum over declared bounds") {
  SemiMarkovModel base = load_fixture("three-state-polynomial.json");
  std::map<std::pair<int, int>, TransitionEntry> entries = base.entries();
  TransitionEntry& t21 = entries.at({2, 1});
  t21.p = LaurentExpansion(t21.p.h(), t21.p.k(), t21.p.coeffs(),
                           RemainderBound{parse_rational("1/2"), 0.5, 0.5});
  TransitionEntry& t32 = entries.at({3, 2});
  t32.e = LaurentExpansion(t32.e.h(), t32.e.k(), t32.e.coeffs(),
                           RemainderBound{parse_rational("1/3"), 0.5, 0.5});
  SemiMarkovModel m(base.states(), base.eps0(), std::move(entries));
  DeltaFloors f = delta_floors(m);
  CHECK(f.delta_circ == parse_rational("1/2"));
  CHECK(f.delta_star == parse_rational("1/3"));
}
