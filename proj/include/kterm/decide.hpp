#pragma once

// The word-problem decision for local groups: compare normal forms, compare
// roots, or both, with a finite-semigroup battery as a soundness cross-check.

#include "kterm/outline.hpp"
#include "kterm/semigroup.hpp"

namespace kterm {

enum class DecideMethod { canon, root, both };

struct Verdict {
  bool equal = false;
  std::optional<bool> canon_equal;
  std::optional<bool> root_equal;
  std::optional<BatteryWitness> witness;  // set on some refuted pairs
  CanonReport lhs_report, rhs_report;
  std::optional<OutlineWord> lhs_root, rhs_root;
};

// the two paths must agree when both run; disagreement raises internal_error
Verdict decide(const TermPtr& lhs, const TermPtr& rhs,
               DecideMethod method = DecideMethod::both,
               std::uint64_t seed = 0x5eed);

struct SelfTestReport {
  int pairs = 0;
  int equal_pairs = 0;
  int failures = 0;
  std::string first_failure;
};

// random pairs and identity-perturbed pairs decided with both methods, with
// oracle consistency asserted; deterministic per seed
SelfTestReport self_consistency(int corpus_size, std::uint64_t seed);

}  // namespace kterm
