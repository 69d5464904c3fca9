#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "kterm/outline.hpp"

using namespace kterm;

namespace {
TermPtr P(const std::string& s) { return parse(s); }
}

TEST_CASE("q parameter") {
  CHECK(q_param(P(fixtures::kF1)) == 6);
  CHECK(q_param(P("abc")) == 1);
  CHECK(q_param(P("a^[w]")) == 1);
  CHECK(q_param(P("a^[w-7]b^[w+2]")) == 8);
}

TEST_CASE("outline of simple terms") {
  CHECK(outline_to_text(outline(P("a^[w]"))) == "i{_,a} b{a}^(q) t{a,_}");
  CHECK(outline_to_text(outline(P("b(ab)^[w-5]"))) ==
        "i{b,ab} b{ab}^(q-5) t{ab,_}");
  CHECK(outline_to_text(outline(P("a^[w]bc^[w-1]d"))) ==
        "i{_,a} b{a}^(q) c{a,b,c} b{c}^(q-1) t{c,d}");
  CHECK_THROWS_AS(outline(P("ab")), precondition_error);
  CHECK_THROWS_AS(outline(P("(ba)^[w]")), precondition_error);
}

TEST_CASE("golden: outline of the first worked example") {
  // the displayed q-outline of the rank-2 semi-canonical term
  std::string expect =
      "i{b,ab} b{ab}^(q-5) c{ab,cb,ab} b{ab}^(q+2) c{ab,cb,ab} "
      "c{ab,cb,ab}^-1 b{ab}^(-q-2) c{ab,cb,ab}^-1 "
      "c{ab,ca,c} b{c}^(q-3) c{c,_,b} "
      "c{a,c,b}^-1 b{a}^(-q+1) c{b,_,a}^-1 b{b}^(-q) c{a,c,b}^-1 "
      "c{a,c,b} b{b}^(q) c{b,_,a} b{a}^(q+1) c{a,c,b} "
      "c{a,c,b}^-1 b{a}^(-q-4) c{b,ac,a}^-1 b{b}^(-q+2) c{a,c,b}^-1 "
      "c{a,c,b} b{b}^(q+1) t{b,_}";
  CHECK(outline_to_text(outline(P(fixtures::kF1))) == expect);
}

TEST_CASE("golden: root of the first worked example") {
  std::string expect_root =
      "i{b,ab} b{ab}^(q-5) c{ab,ca,c} b{c}^(q-3) c{c,_,b} "
      "c{a,c,b}^-1 b{a}^(-q-2) c{b,ac,a}^-1 b{b}^3 t{b,_}";
  OutlineWord r1 = q_root(P(fixtures::kF1));
  CHECK(outline_to_text(r1) == expect_root);
  // the normal form has the same root
  OutlineWord r2 = q_root(P(fixtures::kF1Canon), r1.qmin);
  CHECK(outline_to_text(r2) == expect_root);
  CHECK(outline_eq(r1, r2));
  // and its own outline reduces in one cancellation
  std::string expect_canon_outline =
      "i{b,ab} b{ab}^(q-5) c{ab,ca,c} b{c}^(q-3) c{c,_,b} "
      "c{a,c,b}^-1 b{a}^(-q-2) c{b,ac,a}^-1 b{b}^(-q) c{a,c,b}^-1 "
      "c{a,c,b} b{b}^(q+3) t{b,_}";
  CHECK(outline_to_text(outline(P(fixtures::kF1Canon), r1.qmin)) ==
        expect_canon_outline);
}

TEST_CASE("rank-1 roots are fixed points") {
  for (const char* s : {"a^[w]", "b(ab)^[w-5]", "a^[w]bc^[w-1]d"}) {
    OutlineWord w = outline(P(s));
    CHECK(outline_eq(w, reduce_free(w)));
  }
}

TEST_CASE("free reduction basics") {
  OutlineWord w = outline(P(fixtures::kF1));
  OutlineWord r = reduce_free(w);
  CHECK(outline_eq(r, reduce_free(r)));  // idempotent
  // a word times its inverse reduces to nothing
  OutlineWord wi = w;
  for (auto it = w.runs.rbegin(); it != w.runs.rend(); ++it)
    wi.runs.push_back({it->var, aff_neg(it->exp)});
  CHECK(reduce_free(wi).runs.empty());
}

TEST_CASE("instantiation commutes with reduction") {
  for (const std::string& s :
       {fixtures::kF1, fixtures::kF1Canon, fixtures::kF2Canon,
        std::string("a^[w]bc^[w-1]d")}) {
    OutlineWord w = outline(P(s));
    OutlineWord r = reduce_free(w);
    for (long long dq : {0, 1, 7}) {
      long long qv = w.qmin + dq;
      OutlineWord a = instantiate(r, qv);
      OutlineWord b = reduce_free(instantiate(w, qv));
      CAPTURE(s);
      CAPTURE(qv);
      CHECK(outline_eq(a, b));
    }
  }
  CHECK_THROWS_AS(instantiate(outline(P(fixtures::kF1)), 3),
                  precondition_error);
}

TEST_CASE("constant runs are fixed by instantiation") {
  OutlineWord r = q_root(P(fixtures::kF1));
  bool saw_constant = false;
  for (const Run& run : r.runs)
    if (run.var.kind == VVar::Kind::base && run.exp.coef == 0) {
      saw_constant = true;
      CHECK(run.exp.offset == 3);
    }
  CHECK(saw_constant);
}

TEST_CASE("block analysis of the first normal form") {
  BlockAnalysis ba = block_analysis(P(fixtures::kF1Canon));
  REQUIRE(ba.blocks.size() == 3);
  CHECK_FALSE(ba.blocks[0].negative);
  CHECK(ba.blocks[1].negative);
  CHECK_FALSE(ba.blocks[2].negative);
  const auto& nb = ba.blocks[1];
  CHECK(nb.d_left == 0);
  CHECK(nb.d_right == 1);
  CHECK(nb.d() == 1);
  REQUIRE(nb.remainder.size() == 3);
  CHECK(nb.remainder[0].var.kind == VVar::Kind::crucial);
  CHECK(nb.remainder[1].var.kind == VVar::Kind::base);
  CHECK(nb.remainder[1].var.x == "a");
  CHECK(nb.remainder[1].exp.coef == -1);
  CHECK(nb.remainder[1].exp.offset == -2);
  CHECK(nb.remainder[2].var.kind == VVar::Kind::crucial);
  CHECK(crucial_length(nb.remainder) == 2);
  // remainders concatenate to the root
  OutlineWord root = q_root(P(fixtures::kF1Canon));
  REQUIRE(ba.root.size() == root.runs.size());
  for (std::size_t i = 0; i < root.runs.size(); ++i)
    CHECK(run_eq(ba.root[i], root.runs[i]));
  CHECK_THROWS_AS(block_analysis(P(fixtures::kF1)), precondition_error);
}

TEST_CASE("block count equals the 2-length") {
  for (const std::string& s : {fixtures::kF1Canon, fixtures::kF2Canon}) {
    TermPtr t = P(s);
    BlockAnalysis ba = block_analysis(t);
    int m = rank_configuration(t).length();
    int negs = 0;
    for (const auto& b : ba.blocks)
      if (b.negative && !b.remainder.empty()) ++negs;
    CHECK(negs == m);
    for (std::size_t j = 1; j + 1 < ba.blocks.size(); ++j)
      CHECK(crucial_length(ba.blocks[j].remainder) >= 1);
    for (std::size_t j = 1; j < ba.blocks.size(); ++j)
      CHECK(ba.blocks[j - 1].d_right == ba.blocks[j].d_left);
    for (const auto& b : ba.blocks)
      if (b.negative) {
        CHECK(b.d_left <= 2);
        CHECK(b.d_right <= 1);
        CHECK(b.d() <= 2);
      }
  }
}
