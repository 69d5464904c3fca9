#pragma once

// Seeded random terms and random catalog-identity perturbations, used by the
// self-test command and the property suites.

#include <random>

#include "kterm/sigma.hpp"

namespace kterm {

class TermGen {
 public:
  explicit TermGen(std::uint64_t seed, std::string letters = "abc")
      : rng_(seed), letters_(std::move(letters)) {}

  // random term of rank <= max_rank, modest size
  TermPtr term(int max_rank);
  // random term of rank exactly r
  TermPtr term_of_rank(int r);
  // apply `steps` random catalog identities (expansions, shifts, wraps);
  // the result stays equal to t over every local group
  TermPtr perturb(const TermPtr& t, int steps);

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::string letters_;
  int pick(int lo, int hi);  // inclusive
  std::string rand_word(int maxlen);
  TermPtr gen(int rank_budget, int breadth);
};

}  // namespace kterm
