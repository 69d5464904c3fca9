#include "doctest.h"
#include "fixtures.hpp"
#include "kterm/term.hpp"

using namespace kterm;

TEST_CASE("parse basics") {
  CHECK(print(parse("a")) == "a");
  CHECK(parse("a")->kind() == Kind::word);
  TermPtr t = parse("(ab)^[w-5]");
  REQUIRE(t->kind() == Kind::power);
  CHECK(t->shift() == -5);
  CHECK(t->base()->letters() == "ab");
  CHECK(print(parse("a^[w]")) == "a^[w]");
  CHECK(print(parse("a^[w+0]")) == "a^[w]");
  CHECK(print(parse("a b  c")) == "abc");
}

TEST_CASE("finite powers are sugar") {
  CHECK(print(parse("a^2")) == "aa");
  CHECK(print(parse("(ab)^3")) == "ababab");
  CHECK(print(parse("(a^[w]b)^2")) == "a^[w]ba^[w]b");
  CHECK_THROWS_AS(parse("a^1"), parse_error);
  CHECK_THROWS_AS(parse("a^0"), parse_error);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse(""), parse_error);
  CHECK_THROWS_AS(parse("(ab"), parse_error);
  CHECK_THROWS_AS(parse("a^["), parse_error);
  CHECK_THROWS_AS(parse("A"), parse_error);
  CHECK_THROWS_AS(parse("a^[w+9999999999]"), overflow_error);
  CHECK_THROWS_AS(parse("(ab)"), parse_error);
}

TEST_CASE("normalization invariants") {
  TermPtr t = concat({word("a"), word("b"), limit(word("c"), 1), word("d")});
  REQUIRE(t->kind() == Kind::product);
  CHECK(t->children().size() == 3);
  CHECK(t->children()[0]->letters() == "ab");
  TermPtr u = concat({t, t});
  for (const auto& c : u->children()) CHECK(c->kind() != Kind::product);
  CHECK(term_eq(parse(print(u)), u));
}

TEST_CASE("rank") {
  CHECK(rank(parse("abc")) == 0);
  CHECK(rank(parse("a^[w]")) == 1);
  CHECK(rank(parse(fixtures::kF3)) == 2);
  CHECK(rank(parse(fixtures::kF1)) == 2);
}

TEST_CASE("rank configuration") {
  auto cfg = rank_configuration(parse("a^[w-1]"));
  CHECK(cfg.length() == 1);
  CHECK(is_empty(cfg.rho[0]));
  CHECK(is_empty(cfg.rho[1]));
  CHECK(cfg.shifts[0] == -1);
  CHECK(print(cfg.pi[0]) == "a");

  auto f2 = rank_configuration(parse(fixtures::kF2));
  CHECK(f2.length() == 2);
  CHECK(print(f2.rho[0]) == "d^[w]b");
  CHECK(print(f2.pi[0]) == "ad^[w-1]cd^[w+3]bad^[w]b");
  CHECK(print(f2.pi[1]) == "ab(cd)^[w-2]a");
  CHECK(f2.shifts[0] == -1);
  CHECK(f2.shifts[1] == -1);
  CHECK(is_empty(f2.rho[1]));
  CHECK(is_empty(f2.rho[2]));

  auto f3 = rank_configuration(parse(fixtures::kF3));
  CHECK(f3.length() == 2);
  CHECK(print(f3.rho[0]) == "b");
  CHECK(print(f3.pi[0]) == "ab^[w]a");
  CHECK(print(f3.rho[1]) == "bc");
  CHECK(print(f3.pi[1]) == "c^[w-1]aa(bc)^[w-2]");
  CHECK(print(f3.rho[2]) == "a^[w+1]");

  CHECK(term_eq(f2.reassemble(), parse(fixtures::kF2)));
  CHECK_THROWS_AS(rank_configuration(parse("abc")), precondition_error);
}

TEST_CASE("p expansion") {
  CHECK(print(p_expansion(parse("a^[w-1]"), 2)) == "aa");
  CHECK(print(p_expansion(parse("(ab)^[w]"), 3)) == "ababab");
  TermPtr f3 = parse(fixtures::kF3);
  TermPtr e = p_expansion(f3, 2);
  CHECK(rank(e) == 1);
  CHECK(print(e) ==
        "bab^[w]aab^[w]abcc^[w-1]aa(bc)^[w-2]c^[w-1]aa(bc)^[w-2]a^[w+1]");
  for (long long p : {2, 3, 5}) {
    CHECK(rank(p_expansion(parse(fixtures::kF1), p)) == 1);
  }
}

TEST_CASE("omega portions") {
  auto p3 = omega_portions(parse(fixtures::kF3));
  CHECK(print(p3.initial) == "bab^[w]");
  CHECK(print(p3.final) == "a^[w]");
  REQUIRE(p3.crucial.size() == 5);
  CHECK(print(p3.crucial[0]) == "b^[w]aab^[w]");
  CHECK(print(p3.crucial[1]) == "b^[w]abcc^[w]");
  CHECK(print(p3.crucial[2]) == "c^[w]aa(bc)^[w]");
  CHECK(print(p3.crucial[3]) == "(bc)^[w]c^[w]");
  CHECK(print(p3.crucial[4]) == "(bc)^[w]a^[w]");

  auto pa = omega_portions(parse("a^[w-1]"));
  CHECK(print(pa.initial) == "a^[w]");
  CHECK(print(pa.final) == "a^[w]");
  CHECK(pa.crucial.empty());

  auto pc = omega_portions(parse("(ab)^[w]c(ab)^[w]"));
  REQUIRE(pc.crucial.size() == 1);
  CHECK(print(pc.crucial[0]) == "(ab)^[w]c(ab)^[w]");

  CHECK_THROWS_AS(omega_portions(parse("abc")), precondition_error);
}

TEST_CASE("final omega2 portion") {
  auto t = final_omega2_portion(parse("a^[w]bc^[w]d"));
  REQUIRE(t.has_value());
  CHECK(print(*t) == "a^[w]bc^[w]d");
  CHECK_FALSE(final_omega2_portion(parse("a^[w]bc^[w+1]d")).has_value());
  CHECK_FALSE(final_omega2_portion(parse("a^[w]b")).has_value());
}

TEST_CASE("positions and slices") {
  TermPtr t = parse("ab(cd)^[w]ef");
  REQUIRE(t->kind() == Kind::product);
  CHECK(unit_count(t) == 5);
  CHECK(print(subterm_at(t, Pos::span({}, 0, 2))) == "ab");
  CHECK(print(subterm_at(t, Pos::span({}, 1, 4))) == "b(cd)^[w]e");
  CHECK(print(subterm_at(t, Pos::node({1}))) == "(cd)^[w]");
  CHECK(print(subterm_at(t, Pos::node({1, 0}))) == "cd");
  TermPtr r = replace_at(t, Pos::span({}, 1, 4), parse("xy"));
  CHECK(print(r) == "axyf");
  // spans merge on the boundaries
  TermPtr r2 = replace_at(t, Pos::node({1}), parse("zz"));
  CHECK(print(r2) == "abzzef");
  REQUIRE(r2->kind() == Kind::word);
}

TEST_CASE("position io") {
  Pos p = Pos::span({2, 0}, 1, 4);
  CHECK(pos_to_string(p) == "/2/0[1-4]");
  CHECK(pos_eq(pos_from_string("/2/0[1-4]"), p));
  CHECK(pos_eq(pos_from_string("/"), Pos::root()));
}

TEST_CASE("atoms roundtrip") {
  TermPtr t = parse("ab(cd)^[w-2]ea^[w]");
  auto seq = atoms_of(t);
  REQUIRE(seq.size() == 5);
  CHECK(seq[2].is_limit());
  CHECK(seq[2].base == "cd");
  CHECK(seq[2].shift == -2);
  CHECK(term_eq(atoms_term(seq), t));
}

TEST_CASE("repetition helpers") {
  CHECK(repetition_count(parse("abab"), parse("ab")) == 2);
  CHECK(repetition_count(parse("a^[w]ba^[w]b"), parse("a^[w]b")) == 2);
  CHECK_FALSE(repetition_count(parse("aba"), parse("ab")).has_value());
  auto [root, n] = primitive_decomposition(parse("a^[w]ba^[w]b"));
  CHECK(n == 2);
  CHECK(print(root) == "a^[w]b");
}

TEST_CASE("alphabet") {
  Alphabet a = alphabet_of({parse(fixtures::kF2)});
  CHECK(a.letters() == "abcd");
  CHECK(a.contains('c'));
  CHECK_FALSE(a.contains('z'));
}
