#pragma once

// The normalization pipeline: rank reduction to <= 2, rank-1 canonical
// forms, rank-2 semi-canonical forms, and the rank-2 normal form computed by
// eliminations/agglutinations, extended shifts right and shortenings.
// Every transformation is recorded as a derivation over the rule catalog.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kterm/region.hpp"
#include "kterm/words.hpp"

namespace kterm {

struct CanonReport {
  TermPtr input;
  TermPtr output;
  Derivation derivation;
  std::vector<std::pair<std::string, TermPtr>> stage_log;
};

// one "<stage>: <term>" line per snapshot
std::string report_to_text(const CanonReport& r);

// rank-1 canonical form conditions: Lyndon bases, no base a suffix of the
// word before it, no base a prefix of the word after it extended by powers
// of the next base
bool is_canonical_rank1(const TermPtr& t);  // requires rank <= 1
TermPtr canonicalize_rank1(const TermPtr& t);

// all rank-2 exponents w-1 and the 2-expansion in rank-1 canonical form;
// the result may collapse to rank <= 1
TermPtr semicanonicalize_rank2(const TermPtr& t);  // requires rank == 2

TermPtr step1_eliminations_agglutinations(const TermPtr& t);
TermPtr step2_extended_shifts(const TermPtr& t);
TermPtr step3_shortenings(const TermPtr& t, const Alphabet& a);

TermPtr reduce_to_rank_le2(const TermPtr& t);

enum class Variety { K, D, LI };
// equality over K / D / LI via the initial and final portions of the
// normal forms; requires rank >= 1 inputs
bool variety_equal(const TermPtr& tau, const TermPtr& sigma, Variety v);

struct Separator {
  long long k = 0;
  std::string u;
  long long l = 0;
};
// decomposition x^(w+k) u z^(w+l) of the normal form of x^w z^w; for x = z
// the least letter of the alphabet distinct from x's first letter
Separator separator_word(const std::string& x, const std::string& z,
                         const Alphabet& a);

bool is_canonical_LG(const TermPtr& t);
bool is_canonical_LG(const TermPtr& t, const Alphabet& a);

CanonReport canonicalize_LG(const TermPtr& t);
CanonReport canonicalize_LG(const TermPtr& t, const Alphabet& a);

}  // namespace kterm
