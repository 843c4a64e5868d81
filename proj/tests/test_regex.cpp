#include <doctest.h>

#include <algorithm>
#include <functional>

#include "sentrack/error.hpp"
#include "sentrack/lexicon.hpp"
#include "sentrack/regex.hpp"
#include "support/reference.hpp"

using namespace sentrack;

namespace {

Regex A(Pred p) { return Regex::atom_of(Atom{p, 0, Vec2::Zero()}); }

// Valid state paths enumerated outright.
bool brute_accepts(const Recognizer& rec, int T, const AtomOracle& truth) {
  const int K = rec.num_states();
  std::vector<int> path(static_cast<std::size_t>(T), 0);
  std::function<bool(int)> go = [&](int t) {
    if (t == T) return rec.is_final(path[static_cast<std::size_t>(T - 1)]);
    for (int k = 0; k < K; ++k) {
      if (t == 0 ? !rec.is_initial(k) : !rec.allows(path[static_cast<std::size_t>(t - 1)], k)) continue;
      if (!truth(t, rec.atom(k))) continue;
      path[static_cast<std::size_t>(t)] = k;
      if (go(t + 1)) return true;
    }
    return false;
  };
  return go(0);
}

}  // namespace

TEST_CASE("parse") {
  CHECK(parse_regex("PERSON+") == Regex::plus(A(Pred::Person)));
  CHECK(parse_regex("(BACKPACK|CHAIR|TRASHCAN)+") ==
        Regex::plus(Regex::alt({A(Pred::Backpack), A(Pred::Chair), A(Pred::Trashcan)})));
  CHECK(parse_regex("PERSON[2,]") == Regex::noisy_at_least(2, A(Pred::Person)));
  CHECK(parse_regex("PERSON{2,}") == Regex::at_least(2, A(Pred::Person)));
  CHECK(parse_regex("[PERSON]") == Regex::optional(A(Pred::Person)));
  // closure binds tighter than concatenation, which binds tighter than union
  CHECK(parse_regex("PERSON CHAIR* | RED") ==
        Regex::alt({Regex::concat({A(Pred::Person), Regex::star(A(Pred::Chair))}), A(Pred::Red)}));
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_regex("PERSON (CHAIR");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_regex("LEVITATING+"), ParseError);
  CHECK_THROWS_AS(parse_regex("PERSON{0,}"), ParseError);
}

TEST_CASE("to_string round-trips") {
  for (const auto& [lemma, e] : builtin_lexicon().entries())
    if (e.regex) CHECK(parse_regex(to_string(*e.regex)) == *e.regex);
}

TEST_CASE("desugar") {
  const Regex a = A(Pred::Person);
  CHECK(desugar(Regex::plus(a)) == Regex::concat({a, Regex::star(a)}));
  CHECK(desugar(Regex::optional(a)) == Regex::alt({a, Regex::epsilon()}));
  const Regex r2 = desugar(Regex::at_least(2, a));
  // a a a*, however the concatenation is nested
  auto accepts_len = [&](const Regex& r, int n) {
    return ref::nfa_accepts(r, n, [](int, const Atom&) { return true; });
  };
  CHECK_FALSE(accepts_len(r2, 1));
  CHECK(accepts_len(r2, 2));
  CHECK(accepts_len(r2, 5));
  const Regex noisy = desugar(Regex::noisy_at_least(2, a));
  const Regex spelled = desugar(Regex::at_least(2, Regex::concat({a, Regex::optional(A(Pred::True))})));
  CHECK(noisy == spelled);
}

TEST_CASE("static recognizers") {
  int statics = 0;
  for (const auto& [lemma, e] : builtin_lexicon().entries()) {
    if (!e.regex || e.pos == Pos::V || e.pos == Pos::PM || e.pos == Pos::Adv) continue;
    const Recognizer& r = e.recognizer();
    INFO(lemma);
    // a union of three atoms needs one state per atom
    const int K = lemma == "object" ? 3 : 1;
    REQUIRE(r.num_states() == K);
    for (int a = 0; a < K; ++a) {
      CHECK(r.is_initial(a));
      CHECK(r.is_final(a));
      for (int b = 0; b < K; ++b) CHECK(r.allows(a, b));
    }
    ++statics;
  }
  CHECK(statics == 9);
}

TEST_CASE("accepts") {
  const Recognizer person = compile_regex(parse_regex("PERSON+"));
  CHECK(accepts(person, 4, [](int, const Atom&) { return true; }));
  CHECK_FALSE(accepts(person, 4, [](int t, const Atom&) { return t != 2; }));

  const Recognizer quickly = compile_regex(parse_regex("TRUE+ QUICK[3,] TRUE+"));
  auto middle = [](int t, const Atom& a) { return a.pred == Pred::True || (t >= 2 && t <= 4); };
  CHECK(accepts(quickly, 7, middle));
  CHECK_FALSE(accepts(quickly, 7, [](int t, const Atom& a) { return a.pred == Pred::True || t <= 2; }));
  // a single noisy frame between repetitions is tolerated
  CHECK(accepts(quickly, 8, [](int t, const Atom& a) { return a.pred == Pred::True || t == 2 || t == 4 || t == 5; }));
}

TEST_CASE("TRUE states never reject") {
  const Recognizer r = compile_regex(parse_regex("TRUE+ PERSON TRUE+"));
  CHECK_FALSE(accepts(r, 5, [](int, const Atom& a) { return a.pred == Pred::True; }));
  const Recognizer t = compile_regex(parse_regex("TRUE+ [PERSON] TRUE+"));
  CHECK(accepts(t, 5, [](int, const Atom& a) { return a.pred == Pred::True; }));
}

TEST_CASE("empty language is rejected") {
  CHECK_THROWS_AS(compile(Regex::epsilon()), ValidationError);
}

TEST_CASE("merge_equivalent_states") {
  const Recognizer r = compile_regex(parse_regex("PERSON PERSON*"));
  CHECK(r.num_states() == 1);
  const Recognizer approached = builtin_lexicon().at("approached").recognizer();
  CHECK(approached.num_states() <= 2 + 2 * 3 + 1);
}

TEST_CASE("accepts equals path enumeration on random recognizers") {
  Rng rng(77);
  const std::vector<Pred> pool{Pred::True, Pred::Person, Pred::Chair, Pred::Quick};
  int agreeing = 0, accepted = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int K = rng.uniform_int(1, 8), T = rng.uniform_int(1, 6);
    std::vector<Atom> atoms;
    std::vector<std::uint8_t> init(static_cast<std::size_t>(K)), fin(static_cast<std::size_t>(K)),
        tr(static_cast<std::size_t>(K * K));
    for (int k = 0; k < K; ++k) {
      atoms.push_back(Atom{pool[static_cast<std::size_t>(rng.uniform_int(0, 3))], 0, Vec2::Zero()});
      init[static_cast<std::size_t>(k)] = rng.bernoulli(0.5);
      fin[static_cast<std::size_t>(k)] = rng.bernoulli(0.5);
    }
    for (auto& x : tr) x = rng.bernoulli(0.4);
    const Recognizer rec(atoms, init, fin, tr);
    std::vector<std::vector<bool>> table(static_cast<std::size_t>(T), std::vector<bool>(4));
    for (auto& row : table)
      for (std::size_t i = 0; i < 4; ++i) row[i] = i == 0 || rng.bernoulli(0.7);
    auto truth = [&](int t, const Atom& a) {
      const auto i = static_cast<std::size_t>(std::find(pool.begin(), pool.end(), a.pred) - pool.begin());
      return static_cast<bool>(table[static_cast<std::size_t>(t)][i]);
    };
    const bool want = brute_accepts(rec, T, truth);
    agreeing += accepts(rec, T, truth) == want ? 1 : 0;
    accepted += want ? 1 : 0;
  }
  CHECK(agreeing == 300);
  CHECK(accepted > 30);
}

TEST_CASE("built-in recognizers match NFA simulation") {
  const auto r = ref::fsm_differential(builtin_lexicon(), 1000, 31);
  INFO(r.first);
  CHECK(r.checks == 17000);
  CHECK(r.divergences == 0);
  CHECK(r.accepted > 1000);
}
