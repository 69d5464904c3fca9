#include "kterm/decide.hpp"

#include "kterm/random_terms.hpp"

namespace kterm {

Verdict decide(const TermPtr& lhs, const TermPtr& rhs, DecideMethod method,
               std::uint64_t seed) {
  if (!lhs || !rhs) throw precondition_error("decide needs non-empty terms");
  Alphabet a = alphabet_of({lhs, rhs});
  Verdict v;
  v.lhs_report = canonicalize_LG(lhs, a);
  v.rhs_report = canonicalize_LG(rhs, a);
  const TermPtr& c1 = v.lhs_report.output;
  const TermPtr& c2 = v.rhs_report.output;
  if (method == DecideMethod::canon || method == DecideMethod::both)
    v.canon_equal = term_eq(c1, c2);
  if (method == DecideMethod::root || method == DecideMethod::both) {
    if (rank(c1) == 0 || rank(c2) == 0) {
      // a finite word equals only itself over these semigroups
      v.root_equal = rank(c1) == 0 && rank(c2) == 0 && term_eq(c1, c2);
    } else {
      long long q = std::max(q_param(c1), q_param(c2));
      v.lhs_root = q_root(c1, q);
      v.rhs_root = q_root(c2, q);
      v.root_equal = outline_eq(*v.lhs_root, *v.rhs_root);
    }
  }
  if (v.canon_equal && v.root_equal && *v.canon_equal != *v.root_equal)
    throw internal_error("normal-form and root comparisons disagree");
  v.equal = v.canon_equal ? *v.canon_equal : *v.root_equal;
  if (!v.equal) v.witness = battery_witness(lhs, rhs, seed);
  return v;
}

SelfTestReport self_consistency(int corpus_size, std::uint64_t seed) {
  SelfTestReport rep;
  TermGen gen(seed);
  auto fail = [&](const TermPtr& a, const TermPtr& b, const std::string& why) {
    ++rep.failures;
    if (rep.first_failure.empty())
      rep.first_failure = why + ": " + print(a) + "  vs  " + print(b);
  };
  for (int i = 0; i < corpus_size; ++i) {
    TermPtr a = gen.term(3);
    TermPtr b = i % 2 ? gen.term(3) : gen.perturb(a, 3);
    ++rep.pairs;
    try {
      Verdict v = decide(a, b, DecideMethod::both, seed);
      if (v.equal) ++rep.equal_pairs;
      if (v.canon_equal != v.root_equal) {
        fail(a, b, "path disagreement");
        continue;
      }
      if (v.equal && !battery_equal(a, b, seed)) {
        fail(a, b, "equal pair separated by the battery");
        continue;
      }
      if (i % 2 == 0 && !v.equal) {
        fail(a, b, "perturbed pair declared unequal");
        continue;
      }
      if (v.witness) {
        const FiniteSemigroup* sg = nullptr;
        for (const auto& s : builtin_battery())
          if (s.name() == v.witness->semigroup) sg = &s;
        if (!sg || eval(a, *sg, v.witness->assignment) ==
                       eval(b, *sg, v.witness->assignment))
          fail(a, b, "witness does not separate");
      }
    } catch (const std::exception& e) {
      fail(a, b, std::string("exception: ") + e.what());
    }
  }
  return rep;
}

}  // namespace kterm
