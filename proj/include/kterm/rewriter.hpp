#pragma once

// Step-recording rewriting.  A Rewriter holds the current term and the list
// of applied steps; every transformation in the normalization pipeline goes
// through it, so the emitted derivation is validated at emission time.
//
// Macro rules expand into base-rule chains: expand_macro replays a macro
// step as base steps (positions relative to the step's source term), and
// flatten rewrites a whole derivation into base steps only.

#include "kterm/sigma.hpp"

namespace kterm {

class Rewriter {
 public:
  explicit Rewriter(TermPtr start) : source_(start), cur_(std::move(start)) {}

  const TermPtr& term() const { return cur_; }
  const TermPtr& source() const { return source_; }
  const std::vector<RewriteStep>& steps() const { return steps_; }
  std::size_t step_count() const { return steps_.size(); }

  Derivation derivation() const { return {source_, steps_, cur_}; }

  // apply + record; returns the unit span the replacement occupies
  Pos apply(RuleId rule, Dir dir, const Pos& pos, const Bindings& bind);
  Pos apply(const RewriteStep& step);

 private:
  TermPtr source_;
  TermPtr cur_;
  std::vector<RewriteStep> steps_;
};

// Rewrite positions in unit-span form.  A span stays valid across word
// merging and product collapse, which plain child paths do not.
Pos span_of(const TermPtr& root, const Pos& pos);
// the span the step's replacement occupies in apply_step(before, step)
Pos step_result_span(const TermPtr& before, const RewriteStep& step);

// Inverse of a step: direction flipped, anchored at the written region.
// `before` is the term the step was applied to.
RewriteStep invert_step(const TermPtr& before, const RewriteStep& step);

// Emit the base-rule chain realizing one macro application at `span` of
// rw.term() (span must hold the dir-side instance of the rule).
void emit_macro_steps(Rewriter& rw, const Pos& span, RuleId rule, Dir dir,
                      const Bindings& bind);

// base-rule chain realizing one macro step, relative to `term`
std::vector<RewriteStep> expand_macro(const TermPtr& term,
                                      const RewriteStep& step);

// rewrite every macro step into its base-rule expansion
Derivation flatten(const Derivation& d);

}  // namespace kterm
