#include "doctest.h"
#include "fixtures.hpp"
#include "kterm/decide.hpp"
#include "kterm/random_terms.hpp"

using namespace kterm;

namespace {
TermPtr P(const std::string& s) { return parse(s); }
}

TEST_CASE("decide on the worked examples") {
  Verdict v = decide(P(fixtures::kF1), P(fixtures::kF1Canon));
  CHECK(v.equal);
  CHECK(*v.canon_equal);
  CHECK(*v.root_equal);
  Verdict w = decide(P(fixtures::kF2), P(fixtures::kF2Canon));
  CHECK(w.equal);
}

TEST_CASE("decide the defining identity") {
  Verdict v = decide(P("(a^[w]ba^[w])^[w]"), P("a^[w]"));
  CHECK(v.equal);
}

TEST_CASE("decide separations") {
  Verdict v = decide(P("a^[w]"), P("a^[w+1]"));
  CHECK_FALSE(v.equal);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->semigroup == "Z2");
  CHECK(v.witness->assignment.at('a') == 1);

  Verdict w = decide(P("ab"), P("ba"));
  CHECK_FALSE(w.equal);
  CHECK_FALSE(*w.root_equal);

  Verdict x = decide(P("ab"), P("ab"));
  CHECK(x.equal);

  // a word never equals a genuinely infinite term
  Verdict y = decide(P("ab"), P("(ab)^[w+1]"));
  CHECK_FALSE(y.equal);
}

TEST_CASE("decide is reflexive and symmetric on samples") {
  TermGen gen(5);
  for (int i = 0; i < 10; ++i) {
    TermPtr t = gen.term(2);
    CHECK(decide(t, t).equal);
    TermPtr u = gen.term(2);
    CHECK(decide(t, u).equal == decide(u, t).equal);
  }
}

TEST_CASE("perturbed pairs stay equal") {
  TermGen gen(11);
  for (int i = 0; i < 25; ++i) {
    TermPtr t = gen.term(3);
    TermPtr u = gen.perturb(t, 4);
    CAPTURE(print(t));
    CAPTURE(print(u));
    CHECK(battery_equal(t, u));
    Verdict v = decide(t, u);
    CHECK(v.equal);
  }
}

TEST_CASE("self consistency smoke run") {
  SelfTestReport rep = self_consistency(30, 1);
  CAPTURE(rep.first_failure);
  CHECK(rep.pairs == 30);
  CHECK(rep.failures == 0);
  CHECK(rep.equal_pairs >= 15);  // every perturbed pair at least
}
