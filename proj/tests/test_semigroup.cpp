#include <numeric>

#include "doctest.h"
#include "kterm/semigroup.hpp"

using namespace kterm;

namespace {
const FiniteSemigroup& member(const std::string& name) {
  for (const auto& s : builtin_battery())
    if (s.name() == name) return s;
  throw std::runtime_error("no battery member " + name);
}
}  // namespace

TEST_CASE("construction checks associativity") {
  CHECK_THROWS_AS(FiniteSemigroup(2, {1, 1, 1, 0}, "bad"), precondition_error);
  FiniteSemigroup z2(2, {0, 1, 1, 0}, "Z2");  // x+y mod 2 is fine
}

TEST_CASE("index and period") {
  const auto& z4 = member("Z4");
  auto [i1, p1] = z4.index_period(1);
  CHECK(i1 == 1);
  CHECK(p1 == 4);
  auto [i2, p2] = z4.index_period(2);
  CHECK(p2 == 2);
  const auto& n3 = member("N3");
  auto [i, p] = n3.index_period(1);
  CHECK(i == 3);
  CHECK(p == 1);
}

TEST_CASE("omega power") {
  const auto& z3 = member("Z3");
  CHECK(z3.omega_power(1, 0) == 0);
  CHECK(z3.omega_power(1, 1) == 1);
  CHECK(z3.omega_power(1, -1) == 2);
  const auto& n2 = member("N2");
  CHECK(n2.omega_power(1, 0) == 0);
  const auto& z4 = member("Z4");
  CHECK(z4.omega_power(2, -1) == 2);  // inverse of 2 in {0,2}
}

TEST_CASE("omega power invariants") {
  for (const auto& s : builtin_battery()) {
    for (unsigned e = 0; e < s.size(); ++e) {
      unsigned w = s.omega_power(e, 0);
      CHECK(s.is_idempotent(w));
      for (long long q : {-3, -1, 1, 2, 5})
        CHECK(s.mul(s.omega_power(e, q), s.omega_power(e, -q)) == w);
    }
  }
}

TEST_CASE("eval") {
  const auto& z3 = member("Z3");
  CHECK(eval(parse("a^[w+1]"), z3, {{'a', 1}}) == 1);
  const auto& lz = member("LZ2");
  CHECK(eval(parse("ab"), lz, {{'a', 0}, {'b', 1}}) == 0);
  CHECK_THROWS_AS(eval(parse("ab"), z3, {{'a', 1}}), precondition_error);
  // the defining local-group identity evaluates equal everywhere
  TermPtr lhs = parse("(a^[w]ba^[w])^[w]");
  TermPtr rhs = parse("a^[w]");
  for (const auto& s : builtin_battery()) {
    auto v = identity_holds(lhs, rhs, s);
    CHECK(v.holds);
  }
}

TEST_CASE("eval respects large finite expansions") {
  // replacing w+q by k+q with k a multiple of every period beyond every index
  TermPtr t = parse("b(ab)^[w-5]c");
  for (const auto& s : builtin_battery()) {
    long long l = 1;
    long long maxi = 1;
    for (unsigned e = 0; e < s.size(); ++e) {
      auto [i, p] = s.index_period(e);
      l = std::lcm(l, static_cast<long long>(p));
      maxi = std::max(maxi, static_cast<long long>(i));
    }
    long long k = l;
    while (k < maxi + 7) k += l;
    TermPtr finite = parse("b(ab)^" + std::to_string(k - 5) + "c");
    Assignment a{{'a', 1 % s.size()}, {'b', s.size() > 2 ? 2u : 0u}, {'c', 0}};
    CHECK(eval(t, s, a) == eval(finite, s, a));
  }
}

TEST_CASE("local groups") {
  for (const auto& s : builtin_battery()) {
    CHECK(is_local_group(s));
    CHECK(satisfies_lg_identity(s));
  }
  CHECK_FALSE(is_local_group(semilattice2()));
  CHECK_FALSE(satisfies_lg_identity(semilattice2()));
  CHECK_FALSE(is_local_group(brandt_b2()));
  CHECK_FALSE(satisfies_lg_identity(brandt_b2()));
}

TEST_CASE("identity_holds verdicts") {
  const auto& z2 = member("Z2");
  auto v = identity_holds(parse("a^[w]"), parse("a^[w+1]"), z2);
  REQUIRE_FALSE(v.holds);
  CHECK((*v.witness).at('a') == 1);
  auto w = identity_holds(parse("ab"), parse("ab"), z2);
  CHECK(w.holds);
}

TEST_CASE("battery witness") {
  auto w = battery_witness(parse("a^[w]"), parse("a^[w+1]"));
  REQUIRE(w.has_value());
  CHECK(w->semigroup == "Z2");
  CHECK(w->assignment.at('a') == 1);
  CHECK(battery_equal(parse("(ab)^[w+1]a"), parse("a(ba)^[w+1]")));
}

TEST_CASE("semigroup file parsing") {
  FiniteSemigroup s = parse_semigroup("# left zero\n2\n0 0\n1 1\n", "lz");
  CHECK(s.size() == 2);
  CHECK(s.mul(0, 1) == 0);
  CHECK_THROWS_AS(parse_semigroup("2\n0 0\n1", "bad"), parse_error);
  CHECK_THROWS_AS(parse_semigroup("2\n0 0\n1 9\n", "bad"), parse_error);
}
