#pragma once

// Terms over a finite alphabet built from letters, concatenation and unary
// (w+q)-powers ("limit terms").  Values are immutable and shared; the empty
// term exists only as a null TermPtr at API boundaries, never as a subterm.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kterm/errors.hpp"

namespace kterm {

class Term;
using TermPtr = std::shared_ptr<const Term>;

enum class Kind { word, product, power };

class Term {
 public:
  Kind kind() const { return kind_; }

  // word
  const std::string& letters() const { return letters_; }
  // product: >= 2 children, none a product, adjacent words merged
  const std::vector<TermPtr>& children() const { return children_; }
  // power: base^(w+shift)
  const TermPtr& base() const { return base_; }
  long long shift() const { return shift_; }

  // construction goes through the free functions below
  struct Private {};
  Term(Private, std::string w) : kind_(Kind::word), letters_(std::move(w)) {}
  Term(Private, std::vector<TermPtr> cs)
      : kind_(Kind::product), children_(std::move(cs)) {}
  Term(Private, TermPtr b, long long q)
      : kind_(Kind::power), base_(std::move(b)), shift_(q) {}

 private:
  Kind kind_;
  std::string letters_;
  std::vector<TermPtr> children_;
  TermPtr base_;
  long long shift_ = 0;
};

// --- constructors (normalizing) ---------------------------------------

TermPtr word(std::string letters);          // non-empty
TermPtr limit(TermPtr base, long long q);   // base non-empty
TermPtr concat(std::vector<TermPtr> parts); // null parts dropped; may return null
TermPtr concat2(const TermPtr& a, const TermPtr& b);
TermPtr repeat(const TermPtr& t, long long n);  // n >= 0; n = 0 gives null

bool term_eq(const TermPtr& a, const TermPtr& b);  // null == null
inline bool is_empty(const TermPtr& t) { return t == nullptr; }

// top-level factor view: product -> children, else the singleton list
std::vector<TermPtr> factors(const TermPtr& t);

// --- grammar ----------------------------------------------------------
//   term   := factor { factor }
//   factor := letter | letter power | "(" term ")" power
//   power  := "^[" "w" [("+"|"-") nat] "]" | "^" nat        (nat >= 2)
// Finite powers are sugar and expand at parse time.
TermPtr parse(const std::string& text);
std::string print(const TermPtr& t);  // empty string for the empty term

// --- structure --------------------------------------------------------

int rank(const TermPtr& t);  // 0 for null/words

struct RankConfig {
  std::vector<TermPtr> rho;       // n+1 contexts, entries may be null
  std::vector<TermPtr> pi;        // n bases, rank exactly r-1
  std::vector<long long> shifts;  // n exponents
  int r = 0;                      // rank of the whole term
  int length() const { return static_cast<int>(pi.size()); }
  TermPtr reassemble() const;
};

RankConfig rank_configuration(const TermPtr& t);  // rank >= 1

TermPtr p_expansion(const TermPtr& t, long long p);  // rank >= 1, p >= 1

struct OmegaPortions {
  TermPtr initial;               // rho0 . pi1^w
  std::vector<TermPtr> crucial;  // pij^w . rhoj . pij+1^w
  TermPtr final;                 // pin^w . rhon
};

OmegaPortions omega_portions(const TermPtr& t);  // rank 1 or 2

// x_{n-1}^w u_{n-1} x_n^w u_n when the rank-1 configuration has n > 1 and
// q_n = 0; absent otherwise.
std::optional<TermPtr> final_omega2_portion(const TermPtr& t);

// --- alphabet ---------------------------------------------------------

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::string letters);  // sorted, deduplicated
  const std::string& letters() const { return letters_; }
  bool contains(char c) const;
  std::size_t size() const { return letters_.size(); }

 private:
  std::string letters_;
};

Alphabet alphabet_of(const std::vector<TermPtr>& terms);
void collect_letters(const TermPtr& t, std::string& out);

// --- flat rank-<=1 view ------------------------------------------------
// A rank-<=1 term flattens to a sequence of atoms: single letters and
// limit terms with word bases.

struct Atom {
  char letter = 0;    // valid when base is empty
  std::string base;   // non-empty marks a limit atom
  long long shift = 0;
  bool is_limit() const { return !base.empty(); }
};
bool atom_eq(const Atom& a, const Atom& b);

using AtomSeq = std::vector<Atom>;

AtomSeq atoms_of(const TermPtr& t);      // rank(t) <= 1
TermPtr atoms_term(const AtomSeq& seq);  // normalized rebuild; may be null
AtomSeq atoms_slice(const AtomSeq& s, std::size_t b, std::size_t e);
AtomSeq atoms_cat(const AtomSeq& a, const AtomSeq& b);
bool atoms_eq(const AtomSeq& a, const AtomSeq& b);

// --- content units & positions -----------------------------------------
// A position names a node by a root-to-node path (child index in a product,
// 0 for the base of a power) plus, optionally, a span of the node's content
// units.  A unit is one letter of a word child or one non-word child.

struct Pos {
  std::vector<int> path;
  bool whole = true;
  int ub = 0, ue = 0;  // unit span [ub, ue) when !whole

  static Pos root() { return Pos{}; }
  static Pos span(std::vector<int> path, int b, int e) {
    Pos p;
    p.path = std::move(path);
    p.whole = false;
    p.ub = b;
    p.ue = e;
    return p;
  }
  static Pos node(std::vector<int> path) {
    Pos p;
    p.path = std::move(path);
    return p;
  }
};

bool pos_eq(const Pos& a, const Pos& b);
std::string pos_to_string(const Pos& p);
Pos pos_from_string(const std::string& s);

int unit_count(const TermPtr& node);
// the node's content as mini-terms: one per letter, one per non-word factor
std::vector<TermPtr> content_units(const TermPtr& t);
// n such that t = x^n, if any
std::optional<long long> repetition_count(const TermPtr& t, const TermPtr& x);
// maximal decomposition t = x^n (n maximal, x the primitive root of t)
std::pair<TermPtr, long long> primitive_decomposition(const TermPtr& t);
TermPtr subterm_at(const TermPtr& root, const Pos& pos);
// Replace the addressed region with repl (repl may be null only if the
// result stays non-empty).  Normalizes along the path.
TermPtr replace_at(const TermPtr& root, const Pos& pos, const TermPtr& repl);

}  // namespace kterm
