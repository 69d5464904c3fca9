// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>

#include "fixtures.hpp"
#include "kterm/decide.hpp"
#include "kterm/random_terms.hpp"

using namespace kterm;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name,
               const std::function<std::string()>& body) {
  auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  try {
    detail = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  if (!detail.empty() && detail.rfind("FAIL", 0) == 0) ok = false;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                                  t0)
                .count();
  std::cout << (ok ? "PASS" : "FAIL") << " " << number << ": " << name << " ("
            << ms << " ms)";
  if (!detail.empty() && detail != "ok") std::cout << " -- " << detail;
  std::cout << "\n";
  if (!ok) ++g_failures;
}

std::string expect_eq(const std::string& got, const std::string& want,
                      const std::string& what) {
  if (got != want)
    return "FAIL " + what + ": got " + got + " want " + want;
  return "ok";
}

TermPtr P(const std::string& s) { return parse(s); }

// exponent samples for one rule schema
std::vector<Bindings> rule_samples(RuleId r, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  std::uniform_int_distribution<int> nn(1, 3);
  auto q = [&] { return static_cast<long long>(d(rng)); };
  const char* xs[] = {"a", "ab", "a^[w]b", "ba"};
  const char* ys[] = {"b", "bc", "b^[w-1]", "c"};
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<Bindings> out;
  for (int i = 0; i < 8; ++i) {
    Bindings b;
    auto xt = [&] { return P(xs[pick(rng)]); };
    auto yt = [&] { return P(ys[pick(rng)]); };
    switch (r) {
      case RuleId::R2_1:
      case RuleId::R2_3:
        b.term("x", xt()).num("p", q()).num("q", q());
        break;
      case RuleId::R2_2:
      case RuleId::R2_4a:
      case RuleId::R2_4b:
        b.term("x", xt()).num("n", nn(rng)).num("q", q());
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
        b.term("x", P("a")).term("z", P("b")).term("y", yt()).term("w", P("c"));
        b.num("p", q()).num("q", q()).num("r", q()).num("s", q());
        break;
      case RuleId::D3_5:
        b.term("x", xt()).term("y", yt());
        b.num("p", q()).num("q", q()).num("r", q());
        break;
      case RuleId::D3_6:
        b.term("x", P("a")).term("y", yt()).term("z", P("cb"));
        b.num("p", q()).num("q", q()).num("r", q());
        break;
      case RuleId::C3_2_1:
      case RuleId::C3_2_2:
      case RuleId::C3_2_3: {
        long long a1 = q(), a2 = q();
        std::string u = i % 2 ? "b" : "";
        std::string v = i % 3 ? "c" : "";
        auto power = [&](long long e, const std::string& mid) {
          std::string s = u + "a^[w";
          if (e > 0) s += "+" + std::to_string(e);
          if (e < 0) s += std::to_string(e);
          s += "]" + mid + "b^[w]" + v;
          return s;
        };
        b.term("sigma", P(power(a1, i % 2 ? "c" : "cb")));
        b.term("tau", P(power(a2, i % 3 ? "cc" : "b")));
        break;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "normal form of the first worked example", [] {
    return expect_eq(print(canonicalize_LG(P(fixtures::kF1)).output),
                     fixtures::kF1Canon, "canon");
  });

  criterion(2, "normal form of the second worked example", [] {
    return expect_eq(print(canonicalize_LG(P(fixtures::kF2)).output),
                     fixtures::kF2Canon, "canon");
  });

  criterion(3, "outline and root golden values", [] {
    std::string o1 = outline_to_text(outline(P(fixtures::kF1)));
    std::string want_o1 =
        "i{b,ab} b{ab}^(q-5) c{ab,cb,ab} b{ab}^(q+2) c{ab,cb,ab} "
        "c{ab,cb,ab}^-1 b{ab}^(-q-2) c{ab,cb,ab}^-1 "
        "c{ab,ca,c} b{c}^(q-3) c{c,_,b} "
        "c{a,c,b}^-1 b{a}^(-q+1) c{b,_,a}^-1 b{b}^(-q) c{a,c,b}^-1 "
        "c{a,c,b} b{b}^(q) c{b,_,a} b{a}^(q+1) c{a,c,b} "
        "c{a,c,b}^-1 b{a}^(-q-4) c{b,ac,a}^-1 b{b}^(-q+2) c{a,c,b}^-1 "
        "c{a,c,b} b{b}^(q+1) t{b,_}";
    std::string s = expect_eq(o1, want_o1, "outline");
    if (s != "ok") return s;
    std::string want_root =
        "i{b,ab} b{ab}^(q-5) c{ab,ca,c} b{c}^(q-3) c{c,_,b} "
        "c{a,c,b}^-1 b{a}^(-q-2) c{b,ac,a}^-1 b{b}^3 t{b,_}";
    OutlineWord r1 = q_root(P(fixtures::kF1));
    s = expect_eq(outline_to_text(r1), want_root, "root");
    if (s != "ok") return s;
    std::string want_o2 =
        "i{b,ab} b{ab}^(q-5) c{ab,ca,c} b{c}^(q-3) c{c,_,b} "
        "c{a,c,b}^-1 b{a}^(-q-2) c{b,ac,a}^-1 b{b}^(-q) c{a,c,b}^-1 "
        "c{a,c,b} b{b}^(q+3) t{b,_}";
    s = expect_eq(outline_to_text(outline(P(fixtures::kF1Canon), r1.qmin)),
                  want_o2, "normal-form outline");
    if (s != "ok") return s;
    OutlineWord r2 = q_root(P(fixtures::kF1Canon), r1.qmin);
    if (!outline_eq(r1, r2)) return std::string("FAIL roots differ");
    return std::string("ok");
  });

  criterion(4, "intermediate stage snapshots", [] {
    auto stages = [](const std::string& input) {
      std::map<std::string, std::string> m;
      for (auto& [k, v] : canonicalize_LG(P(input)).stage_log)
        m[k] = print(v);
      return m;
    };
    auto s1 = stages(fixtures::kF1);
    std::string s = expect_eq(s1.at("step1"), fixtures::kF1Step1, "F1 step1");
    if (s != "ok") return s;
    s = expect_eq(s1.at("step2"), fixtures::kF1Step2, "F1 step2");
    if (s != "ok") return s;
    s = expect_eq(s1.at("step3"), fixtures::kF1Canon, "F1 step3");
    if (s != "ok") return s;
    auto s2 = stages(fixtures::kF2);
    s = expect_eq(s2.at("step1"), fixtures::kF2, "F2 step1");
    if (s != "ok") return s;
    s = expect_eq(s2.at("step2"), fixtures::kF2Step2, "F2 step2");
    if (s != "ok") return s;
    return expect_eq(s2.at("step3"), fixtures::kF2Canon, "F2 step3");
  });

  criterion(5, "catalog soundness on the battery", [] {
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (RuleId r : all_rules()) {
      for (const Bindings& b : rule_samples(r, rng)) {
        TermPtr lhs, rhs;
        try {
          lhs = rule_lhs(r, b);
          rhs = rule_rhs(r, b);
        } catch (const overflow_error&) {
          continue;
        }
        for (const auto& s : builtin_battery()) {
          auto v = identity_holds(lhs, rhs, s);
          ++checked;
          if (!v.holds)
            return std::string("FAIL ") + rule_name(r) + " fails in " +
                   s.name() + " at " + print(lhs) + " = " + print(rhs);
        }
      }
    }
    return "checked " + std::to_string(checked) + " rule/semigroup pairs";
  });

  criterion(6, "derivation validity and battery equality, 500 random terms",
            [] {
              TermGen gen(101);
              for (int i = 0; i < 500; ++i) {
                TermPtr t = gen.term(3);
                CanonReport rep = canonicalize_LG(t);
                if (!verify_derivation(rep.derivation))
                  return "FAIL derivation replay on " + print(t);
                if (!battery_equal(t, rep.output))
                  return "FAIL battery separation on " + print(t);
              }
              return std::string("ok");
            });

  criterion(7, "idempotence on the same corpus", [] {
    TermGen gen(101);
    for (int i = 0; i < 500; ++i) {
      TermPtr t = gen.term(3);
      TermPtr c = canonicalize_LG(t).output;
      TermPtr cc = canonicalize_LG(c).output;
      if (!term_eq(c, cc))
        return "FAIL " + print(t) + " -> " + print(c) + " -> " + print(cc);
    }
    return std::string("ok");
  });

  criterion(8, "cross-path agreement on 1000 pairs", [] {
    TermGen gen(202);
    int equal_pairs = 0;
    for (int i = 0; i < 1000; ++i) {
      TermPtr a = gen.term(3);
      TermPtr b = i % 2 ? gen.term(3) : gen.perturb(a, 3);
      Verdict v = decide(a, b, DecideMethod::both);
      if (!v.canon_equal || !v.root_equal || *v.canon_equal != *v.root_equal)
        return "FAIL disagreement on " + print(a) + " vs " + print(b);
      if (i % 2 == 0 && !v.equal)
        return "FAIL perturbed pair unequal: " + print(a) + " vs " + print(b);
      if (v.equal) ++equal_pairs;
    }
    return "agreed on 1000 pairs, " + std::to_string(equal_pairs) + " equal";
  });

  criterion(9, "block invariants on 200 rank-2 normal forms", [] {
    TermGen gen(303);
    int done = 0, guard = 0;
    while (done < 200 && ++guard < 20000) {
      TermPtr t = gen.term(2);
      TermPtr c = canonicalize_LG(t).output;
      if (rank(c) != 2) continue;
      ++done;
      BlockAnalysis ba = block_analysis(c);
      int m = rank_configuration(c).length();
      int negs = 0;
      for (const auto& blk : ba.blocks)
        if (blk.negative && !blk.remainder.empty()) ++negs;
      if (negs != m)
        return "FAIL negative block count on " + print(c);
      for (std::size_t j = 1; j + 1 < ba.blocks.size(); ++j)
        if (crucial_length(ba.blocks[j].remainder) < 1)
          return "FAIL empty interior remainder on " + print(c);
      for (std::size_t j = 0; j < ba.blocks.size(); ++j) {
        const auto& blk = ba.blocks[j];
        if (blk.negative && (blk.d_left > 2 || blk.d_right > 1 || blk.d() > 2))
          return "FAIL cancellation bounds on " + print(c);
        if (j > 0 && ba.blocks[j - 1].d_right != blk.d_left)
          return "FAIL local influence on " + print(c);
      }
    }
    if (done < 200) return std::string("FAIL not enough rank-2 forms");
    return std::string("ok");
  });

  criterion(10, "rank reduction on 200 rank-3/4 terms", [] {
    TermGen gen(404);
    for (int i = 0; i < 200; ++i) {
      TermPtr t = gen.term_of_rank(3 + i % 2);
      Rewriter rw(t);
      TermPtr r = reduce_to_rank_le2(t);
      if (rank(r) > 2) return "FAIL rank " + std::to_string(rank(r));
      if (!battery_equal(t, r)) return "FAIL battery separation on " + print(t);
      CanonReport rep = canonicalize_LG(t);
      if (!verify_derivation(rep.derivation))
        return "FAIL derivation replay on " + print(t);
    }
    return std::string("ok");
  });

  criterion(11, "parameter independence of instantiated roots", [] {
    TermGen gen(505);
    int done = 0, guard = 0;
    while (done < 200 && ++guard < 20000) {
      TermPtr t = gen.term(2);
      TermPtr c = canonicalize_LG(t).output;
      if (rank(c) < 1) continue;
      ++done;
      OutlineWord w = outline(c);
      OutlineWord r = reduce_free(w);
      for (long long dq : {0LL, 7LL}) {
        long long qv = w.qmin + dq;
        if (!outline_eq(instantiate(r, qv), reduce_free(instantiate(w, qv))))
          return "FAIL at q=" + std::to_string(qv) + " on " + print(c);
      }
    }
    if (done < 200) return std::string("FAIL not enough terms");
    return std::string("ok");
  });

  criterion(12, "oracle verdicts", [] {
    for (const auto& s : builtin_battery())
      if (!is_local_group(s) || !satisfies_lg_identity(s))
        return "FAIL battery member " + s.name();
    if (is_local_group(semilattice2())) return std::string("FAIL semilattice");
    if (is_local_group(brandt_b2())) return std::string("FAIL B2");
    if (satisfies_lg_identity(semilattice2()) ||
        satisfies_lg_identity(brandt_b2()))
      return std::string("FAIL identity check");
    return std::string("ok");
  });

  std::cout << (g_failures ? "ACCEPTANCE: FAIL" : "ACCEPTANCE: PASS") << " ("
            << g_failures << " failing)\n";
  return g_failures ? 1 : 0;
}
