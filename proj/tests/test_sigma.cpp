#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "kterm/region.hpp"
#include "kterm/rewriter.hpp"
#include "kterm/semigroup.hpp"
#include "kterm/sigma.hpp"

using namespace kterm;

namespace {

Bindings bind_terms(std::initializer_list<std::pair<const char*, const char*>> ts,
                    std::initializer_list<std::pair<const char*, long long>> is = {}) {
  Bindings b;
  for (auto& [k, v] : ts) b.term(k, parse(v));
  for (auto& [k, v] : is) b.num(k, v);
  return b;
}

// sample bindings for every rule; terms are small and generic enough to
// exercise each schema
std::vector<Bindings> sample_bindings(RuleId r, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  std::uniform_int_distribution<int> n(1, 3);
  auto q = [&] { return static_cast<long long>(d(rng)); };
  const char* xs[] = {"a", "ab", "ba", "a^[w]b", "abc"};
  const char* ys[] = {"b", "c", "bc", "b^[w-1]", "cb"};
  std::uniform_int_distribution<int> pick(0, 4);
  auto xt = [&] { return parse(xs[pick(rng)]); };
  auto yt = [&] { return parse(ys[pick(rng)]); };
  std::vector<Bindings> out;
  for (int i = 0; i < 6; ++i) {
    Bindings b;
    switch (r) {
      case RuleId::R2_1:
      case RuleId::R2_3:
        b.term("x", xt()).num("p", q()).num("q", q());
        break;
      case RuleId::R2_2:
      case RuleId::R2_4a:
      case RuleId::R2_4b:
        b.term("x", xt()).num("n", n(rng)).num("q", q());
        break;
      case RuleId::R2_5:
        b.term("x", xt()).term("y", yt()).num("q", q());
        break;
      case RuleId::R_LG:
        b.term("x", xt()).term("y", yt());
        break;
      case RuleId::D3_1:
        b.term("x", xt()).num("q", q());
        if (i % 2) b.term("u", yt());
        if (i % 3) b.term("v", yt());
        break;
      case RuleId::D3_2:
      case RuleId::D3_3a:
      case RuleId::D3_3b:
        b.term("x", xt()).term("y", yt()).num("p", q()).num("q", q());
        break;
      case RuleId::D3_4:
        b.term("x", parse("a")).term("z", parse("b")).term("y", yt());
        b.term("w", parse("c"));
        b.num("p", q()).num("q", q()).num("r", q()).num("s", q());
        break;
      case RuleId::D3_5:
        b.term("x", xt()).term("y", yt());
        b.num("p", q()).num("q", q()).num("r", q());
        break;
      case RuleId::D3_6:
        b.term("x", parse("a")).term("y", yt()).term("z", parse("cb"));
        b.num("p", q()).num("q", q()).num("r", q());
        break;
      case RuleId::C3_2_1:
      case RuleId::C3_2_2:
      case RuleId::C3_2_3: {
        // share initial and final portions by construction
        long long a = q(), c = q();
        std::string mid1 = i % 2 ? "c" : "cb";
        std::string mid2 = i % 3 ? "cc" : "b";
        std::string u = i % 2 ? "b" : "";
        std::string v = i % 3 ? "c" : "";
        b.term("sigma",
               parse(u + "a^[w" + (a >= 0 ? "+" : "") + std::to_string(a) +
                     "]" + mid1 + "b^[w]" + v));
        b.term("tau",
               parse(u + "a^[w" + (c >= 0 ? "+" : "") + std::to_string(c) +
                     "]" + mid2 + "b^[w]" + v));
        break;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

TEST_CASE("rule instantiation basics") {
  Bindings b = bind_terms({{"x", "a"}}, {{"p", 2}, {"q", 3}});
  CHECK(print(rule_lhs(RuleId::R2_3, b)) == "a^[w+2]a^[w+3]");
  CHECK(print(rule_rhs(RuleId::R2_3, b)) == "a^[w+5]");
  Bindings b5 = bind_terms({{"x", "a"}, {"y", "b"}}, {{"q", 1}});
  CHECK(print(rule_lhs(RuleId::R2_5, b5)) == "(ab)^[w+1]a");
  CHECK(print(rule_rhs(RuleId::R2_5, b5)) == "a(ba)^[w+1]");
}

TEST_CASE("match_rule examples") {
  auto m = match_rule(parse("a^[w+2]a^[w+3]"), RuleId::R2_3, Dir::fwd, Pos::root());
  REQUIRE(m.has_value());
  CHECK(m->ints.at("p") == 2);
  CHECK(m->ints.at("q") == 3);
  CHECK(print(m->terms.at("x")) == "a");

  auto m5 = match_rule(parse("(ab)^[w+1]a"), RuleId::R2_5, Dir::fwd, Pos::root());
  REQUIRE(m5.has_value());
  CHECK(print(m5->terms.at("x")) == "a");
  CHECK(print(m5->terms.at("y")) == "b");
  CHECK(m5->ints.at("q") == 1);

  CHECK_FALSE(match_rule(parse("a^[w]b"), RuleId::R_LG, Dir::fwd,
                         Pos::span({}, 0, 2))
                  .has_value());
  auto mlg = match_rule(parse("(a^[w]ba^[w])^[w]"), RuleId::R_LG, Dir::fwd,
                        Pos::root());
  REQUIRE(mlg.has_value());
  CHECK(print(mlg->terms.at("x")) == "a");
}

TEST_CASE("apply_step examples") {
  RewriteStep s1{RuleId::R2_1, Dir::fwd, Pos::root(),
                 bind_terms({{"x", "a"}}, {{"p", 0}, {"q", 0}})};
  CHECK(print(apply_step(parse("(a^[w])^[w]"), s1)) == "a^[w]");

  RewriteStep s2{RuleId::D3_5, Dir::fwd, Pos::root(),
                 bind_terms({{"x", "a"}, {"y", "b"}},
                            {{"p", 1}, {"q", 0}, {"r", 0}})};
  CHECK(print(apply_step(parse("a^[w+1]b(a^[w]b)^[w-1]a^[w]"), s2)) ==
        "a^[w+1]");

  RewriteStep s3{RuleId::R_LG, Dir::fwd, Pos::root(),
                 bind_terms({{"x", "a"}, {"y", "b"}})};
  CHECK(print(apply_step(parse("(a^[w]ba^[w])^[w]"), s3)) == "a^[w]");
  // mismatching bindings are rejected
  RewriteStep bad = s3;
  bad.bind = bind_terms({{"x", "b"}, {"y", "b"}});
  CHECK_THROWS_AS(apply_step(parse("(a^[w]ba^[w])^[w]"), bad),
                  precondition_error);
}

TEST_CASE("verify_derivation replay") {
  Derivation d;
  d.source = parse("ab");
  d.target = parse("ab");
  CHECK(verify_derivation(d));
  d.target = parse("ba");
  CHECK_FALSE(verify_derivation(d));

  Rewriter rw(parse("a^[w+2]a^[w+3]b"));
  Region r = Region::whole(rw);
  em_merge(r, 0);
  Derivation d2 = rw.derivation();
  CHECK(print(d2.target) == "a^[w+5]b");
  CHECK(verify_derivation(d2));
  // corrupt a binding
  d2.steps[0].bind.ints["p"] = 1;
  CHECK_FALSE(verify_derivation(d2));
}

TEST_CASE("trace roundtrip") {
  Rewriter rw(parse("(ab)^[w+1]ac"));
  Region r = Region::whole(rw);
  em_shift_right(r, 0, 1);
  Derivation d = rw.derivation();
  std::string text = derivation_to_text(d);
  Derivation back = derivation_from_text(text);
  CHECK(verify_derivation(back));
  CHECK(term_eq(back.source, d.source));
  CHECK(term_eq(back.target, d.target));
}

TEST_CASE("rule soundness on the battery") {
  std::mt19937_64 rng(41);
  for (RuleId r : all_rules()) {
    auto samples = sample_bindings(r, rng);
    for (const auto& b : samples) {
      TermPtr lhs, rhs;
      try {
        lhs = rule_lhs(r, b);
        rhs = rule_rhs(r, b);
      } catch (const overflow_error&) {
        continue;
      }
      for (const auto& s : builtin_battery()) {
        auto v = identity_holds(lhs, rhs, s);
        if (!v.holds) {
          CAPTURE(rule_name(r));
          CAPTURE(print(lhs));
          CAPTURE(print(rhs));
          CAPTURE(s.name());
        }
        REQUIRE(v.holds);
      }
    }
  }
}

TEST_CASE("macro coherence: expansions replay lhs to rhs") {
  std::mt19937_64 rng(17);
  for (RuleId r : all_rules()) {
    if (!is_macro(r)) continue;
    auto samples = sample_bindings(r, rng);
    for (const auto& b : samples) {
      TermPtr lhs = rule_lhs(r, b);
      TermPtr rhs = rule_rhs(r, b);
      RewriteStep step{r, Dir::fwd, Pos::root(), b};
      auto steps = expand_macro(lhs, step);
      TermPtr cur = lhs;
      for (const auto& s : steps) {
        CHECK_FALSE(is_macro(s.rule));
        cur = apply_step(cur, s);
      }
      CAPTURE(rule_name(r));
      CAPTURE(print(lhs));
      CHECK(term_eq(cur, rhs));
      // reverse direction as well
      RewriteStep rstep{r, Dir::rev, Pos::root(), b};
      auto rsteps = expand_macro(rhs, rstep);
      TermPtr rcur = rhs;
      for (const auto& s : rsteps) rcur = apply_step(rcur, s);
      CHECK(term_eq(rcur, lhs));
    }
  }
}

TEST_CASE("macro expansion works at inner positions") {
  // the pattern sits inside a larger product and under a power
  Bindings b = bind_terms({{"x", "a"}, {"y", "b"}},
                          {{"p", 1}, {"q", 0}, {"r", 0}});
  TermPtr lhs_inst = rule_lhs(RuleId::D3_5, b);
  TermPtr whole = concat({parse("cc"), lhs_inst, parse("c^[w]")});
  int inner = unit_count(lhs_inst);
  RewriteStep step{RuleId::D3_5, Dir::fwd, Pos::span({}, 2, 2 + inner), b};
  TermPtr expect = apply_step(whole, step);
  auto steps = expand_macro(whole, step);
  TermPtr cur = whole;
  for (const auto& s : steps) cur = apply_step(cur, s);
  CHECK(term_eq(cur, expect));

  Derivation d{whole, {step}, expect};
  Derivation flat = flatten(d);
  CHECK(verify_derivation(flat));
  for (const auto& s : flat.steps) CHECK_FALSE(is_macro(s.rule));
}

TEST_CASE("step inversion") {
  TermPtr t = parse("a^[w+2]a^[w+3]b");
  RewriteStep step{RuleId::R2_3, Dir::fwd, Pos::span({}, 0, 2),
                   bind_terms({{"x", "a"}}, {{"p", 2}, {"q", 3}})};
  TermPtr after = apply_step(t, step);
  RewriteStep inv = invert_step(t, step);
  CHECK(term_eq(apply_step(after, inv), t));
}

TEST_CASE("apply_step at slices keeps the rest intact") {
  TermPtr t = parse("xya^[w+2]a^[w+3]zw");
  RewriteStep step{RuleId::R2_3, Dir::fwd, Pos::span({}, 2, 4),
                   bind_terms({{"x", "a"}}, {{"p", 2}, {"q", 3}})};
  CHECK(print(apply_step(t, step)) == "xya^[w+5]zw");
}
