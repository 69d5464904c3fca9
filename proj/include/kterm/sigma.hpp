#pragma once

// The rewriting catalog: the five base identity schemas R2.1-R2.5 plus the
// local-group identity R.LG, the derived identities D3.1-D3.6 and the
// conditional identities C3.2.1-C3.2.3.  Derived/conditional rules are
// macros: each expands into a chain of base-rule steps (see rewriter.hpp).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kterm/term.hpp"

namespace kterm {

enum class RuleId {
  R2_1,   // (x^(w+p))^(w+q) = x^(w+pq)
  R2_2,   // (x^n)^(w+q) = x^(w+nq), n >= 1
  R2_3,   // x^(w+p) x^(w+q) = x^(w+p+q)
  R2_4a,  // x^(w+q) x^n = x^(w+q+n), n >= 1
  R2_4b,  // x^n x^(w+q) = x^(w+q+n)
  R2_5,   // (xy)^(w+q) x = x (yx)^(w+q)
  R_LG,   // (x^w y x^w)^w = x^w
  D3_1,   // pi^(w+1) = pi, pi of rank >= 1
  D3_2,   // x^(w+p) (y x^(w+q))^w = x^(w+p)
  D3_3a,  // x^(w+p) (y x^(w+q))^(w-1) = x^(w+p-q) (y x^w)^(w-1)
  D3_3b,  // (x^(w+q) y)^(w-1) x^(w+p) = (x^w y)^(w-1) x^(w+p-q)
  D3_4,   // x^(w+p) y (z^(w+q) w x^(w+r) y)^(w-1) z^(w+s)
          //   = x^(w+p-r) (z^w w x^w)^(w-1) z^(w+s-q)
  D3_5,   // x^(w+p) y (x^(w+q) y)^(w-1) x^(w+r) = x^(w+p-q+r)
  D3_6,   // (x^(w+p) y)^(w-1) x^(w+q) (z x^(w+r))^(w-1)
          //   = (x^w z x^(w+p-q+r) y x^w)^(w-1)
  C3_2_1,  // sigma (tau sigma)^(w-1) = tau^(w-1)        [LI |= tau = sigma]
  C3_2_2,  // sigma^(w-1) tau^(w-1) = (tau tau sigma)^(w-1) tau   [K |= ...]
  C3_2_3,  // sigma^(w-1) tau^(w-1) = sigma (tau sigma sigma)^(w-1) [D |= ...]
};

enum class Dir { fwd, rev };  // fwd: left-to-right (contraction side)

const char* rule_name(RuleId r);
std::optional<RuleId> rule_from_name(const std::string& name);
const std::vector<RuleId>& all_rules();
bool is_macro(RuleId r);

struct Bindings {
  std::map<std::string, TermPtr> terms;
  std::map<std::string, long long> ints;

  Bindings& term(const std::string& k, TermPtr v) {
    if (v) terms[k] = std::move(v);
    return *this;
  }
  Bindings& num(const std::string& k, long long v) {
    ints[k] = v;
    return *this;
  }
};

bool bindings_eq(const Bindings& a, const Bindings& b);

// instantiate a rule side; throws precondition_error when a required binding
// is missing or a side constraint (n >= 1, rank requirement, portion
// equality for the conditional rules) fails
TermPtr rule_lhs(RuleId r, const Bindings& b);
TermPtr rule_rhs(RuleId r, const Bindings& b);
void check_rule_constraints(RuleId r, const Bindings& b);

struct RewriteStep {
  RuleId rule;
  Dir dir;
  Pos pos;
  Bindings bind;
};

struct Derivation {
  TermPtr source;
  std::vector<RewriteStep> steps;
  TermPtr target;
};

// Search for bindings making the dir-side of the rule match the subterm at
// pos.  Reverse directions with free parameters (pure expansions) yield no
// match here; apply_step with explicit bindings covers those.
std::optional<Bindings> match_rule(const TermPtr& t, RuleId r, Dir d,
                                   const Pos& pos);

// Apply one fully specified step: the step's bindings must instantiate the
// source side to exactly the subterm at step.pos.
TermPtr apply_step(const TermPtr& t, const RewriteStep& step);

bool verify_derivation(const Derivation& d);

// line-oriented trace format:
//   source <term>
//   target <term>
//   <rule> <fwd|rev> <pos> [name={term}|name=int ...]
std::string derivation_to_text(const Derivation& d);
Derivation derivation_from_text(const std::string& text);

}  // namespace kterm
