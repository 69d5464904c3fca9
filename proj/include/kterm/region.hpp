#pragma once

// A Region is a unit span of the current term seen through a Rewriter; the
// emit helpers apply one catalog step each, computing bindings from the live
// content and keeping the span length in sync.  The normalization pipeline
// and the macro expansions are written as straight-line programs over these.

#include "kterm/rewriter.hpp"

namespace kterm {

struct Region {
  Rewriter* rw = nullptr;
  std::vector<int> path;  // anchor: root or the base of a power
  int b = 0;              // first unit (stable under rewrites inside)
  int len = 0;

  static Region whole(Rewriter& rw);
  static Region of(Rewriter& rw, const Pos& pos);  // span_of + wrap

  Pos pos() const { return Pos::span(path, b, b + len); }
  Pos at(int i, int j) const { return Pos::span(path, b + i, b + j); }
  TermPtr term() const { return subterm_at(rw->term(), pos()); }
  std::vector<TermPtr> units() const { return content_units(term()); }
  TermPtr unit(int i) const;
  TermPtr slice_term(int i, int j) const;
  Region sub(int i, int j) const { return Region{rw, path, b + i, j - i}; }
  // region over the base of the power at relative unit u
  Region base_region(int u) const;
  std::vector<int> power_path(int u) const;

  // apply at relative units [i, j); adjusts len; returns replacement width
  int apply(RuleId r, Dir d, int i, int j, const Bindings& bind);
  // apply inside the base of the power at relative unit u
  void apply_in_base(RuleId r, Dir d, int u, int i, int j, const Bindings& bind);
};

// power at i with shift s: x^(w+s) -> x^(w+p) x^(w+s-p)
void em_split(Region& r, int i, long long p);
// adjacent powers of one base at i, i+1 -> merged
void em_merge(Region& r, int i);
// x^(w+s) -> x^(w+s-n) x^n   /  x^n x^(w+s-n)
void em_peel_right(Region& r, int i, long long n);
void em_peel_left(Region& r, int i, long long n);
// [x^(w+s) at i, x^n content up to j) -> x^(w+s+n); the mirrored form
void em_fold_right(Region& r, int i, int j, long long n);
void em_fold_left(Region& r, int i, int j, long long n);
// [X at [xi,xi+k), (YX)^(w+q) at xi+k] -> [(XY)^(w+q), X]
void em_shift_left(Region& r, int xi, int k);
// [(XY)^(w+q) at pu, X at (pu, pu+1+k)] -> [X, (YX)^(w+q)]
void em_shift_right(Region& r, int pu, int k);
void em_rlg(Region& r, int i);                      // (x^w y x^w)^w -> x^w
void em_rlg_rev(Region& r, int i, const TermPtr& y);
void em_r21(Region& r, int i);                      // (x^(w+p))^(w+q) -> x^(w+pq)
void em_r22(Region& r, int i, long long n);         // (x^n)^(w+q) -> x^(w+nq)
void em_r22_rev(Region& r, int i, long long n);
void em_split_in_base(Region& r, int u, int bi, long long p);
void em_merge_in_base(Region& r, int u, int bi);

// derived two-sided chains (base steps only); i is the pattern start
void chain_absorb_left(Region& r, int i);   // x^w (x^(w+p) y)^(w+q) -> power
void chain_absorb_left_rev(Region& r, int i);
void chain_absorb_right(Region& r, int i);  // (y x^(w+p))^(w+q) x^w -> power
void chain_absorb_right_rev(Region& r, int i);
void chain_pull_right(Region& r, int i);    // (x^(w+p) y)^(w+q) x^w -> (x^(w+p) y x^w)^(w+q)
void chain_pull_right_rev(Region& r, int i);
void chain_pull_left(Region& r, int i);     // x^w (y x^(w+p))^(w+q) -> (x^w y x^(w+p))^(w+q)
void chain_pull_left_rev(Region& r, int i);
// (x^(w+q) y)^w x^(w+p) -> x^(w+p), and the insertion reverse
void chain_collapse_left(Region& r, int i);
void chain_collapse_left_rev(Region& r, int i, const TermPtr& y, long long q);
// x^(w+p) (y x^(w+q))^w -> x^(w+p), and the insertion reverse
void chain_collapse_right(Region& r, int i);
void chain_collapse_right_rev(Region& r, int i, const TermPtr& y, long long q);

// emit a macro (or base) step over the sub-span [i, j) of r
void emit_rule(Region& r, int i, int j, RuleId rule, Dir dir,
               const Bindings& bind);

}  // namespace kterm
