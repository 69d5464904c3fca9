#pragma once

// Encoding of rank-1 canonical / rank-2 semi-canonical terms as words over
// the portion-variable alphabet: one initial and one final variable, crucial
// connectors, and base variables with exponents affine in a parameter q.
// The root is the reduced form of the outline in the free group over the
// variables.

#include "kterm/canonical.hpp"

namespace kterm {

struct VVar {
  enum class Kind { initial, final_, crucial, base };
  Kind kind = Kind::base;
  std::string x;  // initial: base after u; final: base before v; crucial:
                  // left base; base: the base itself
  std::string u;  // initial: leading word; final: trailing word; crucial:
                  // middle word
  std::string y;  // crucial: right base
};

bool vvar_eq(const VVar& a, const VVar& b);

struct AffineExp {
  long long coef = 0;  // coefficient of the parameter
  long long offset = 0;
  bool is_zero() const { return coef == 0 && offset == 0; }
};

AffineExp aff(long long coef, long long offset);
AffineExp aff_add(const AffineExp& a, const AffineExp& b);
AffineExp aff_neg(const AffineExp& a);
// sign valid for every admissible parameter value >= qmin; throws on a run
// whose sign could flip
int aff_sign(const AffineExp& a, long long qmin);

struct Run {
  VVar var;
  AffineExp exp;
};

bool run_eq(const Run& a, const Run& b);

struct OutlineWord {
  std::vector<Run> runs;
  long long qmin = 1;
};

bool outline_eq(const OutlineWord& a, const OutlineWord& b);

// 1 + max |q| over the limit exponents occurring in the term (1 when none)
long long q_param(const TermPtr& t);

// requires a rank-1 canonical term or a rank-2 semi-canonical term with all
// rank-2 exponents w-1; the word is emitted unreduced
OutlineWord outline(const TermPtr& t);
OutlineWord outline(const TermPtr& t, long long qmin);

// unique reduced form in the free group over the variables
OutlineWord reduce_free(const OutlineWord& w);
inline OutlineWord q_root(const TermPtr& t) { return reduce_free(outline(t)); }
inline OutlineWord q_root(const TermPtr& t, long long qmin) {
  return reduce_free(outline(t, qmin));
}

// replace every exponent kq+c by k*qval+c; requires qval >= w.qmin
OutlineWord instantiate(const OutlineWord& w, long long qval);

// printed form: i{u,x} b{x}^(q-5) c{x,u,y} c{x,u,y}^-1 t{y,v}; empty word
// fields print as _
std::string outline_to_text(const OutlineWord& w);

int crucial_length(const std::vector<Run>& runs);

struct BlockAnalysis {
  struct Block {
    bool negative = false;
    std::vector<Run> runs;
    std::vector<Run> remainder;
    std::vector<Run> cancelled_prefix;  // eaten by material on the left
    std::vector<Run> cancelled_suffix;
    int d_left = 0;   // crucial occurrences cancelled from the left
    int d_right = 0;
    int d() const { return d_left + d_right; }
  };
  std::vector<Block> blocks;  // 2m+1, alternating positive/negative
  long long qmin = 1;
  std::vector<Run> root;  // concatenation of the remainders
};

// leftmost-spur reduction bookkeeping per block; requires a rank-2 term in
// normal form
BlockAnalysis block_analysis(const TermPtr& t);

}  // namespace kterm
