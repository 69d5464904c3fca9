#pragma once

// Finite semigroups as Cayley tables, evaluation of terms through
// index/period omega powers, local-group tests and the builtin battery used
// as a soundness oracle.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kterm/term.hpp"

namespace kterm {

class FiniteSemigroup {
 public:
  // table is row-major: table[s * n + t] = s * t.  Associativity is checked
  // on construction; orders are capped at 200.
  FiniteSemigroup(unsigned n, std::vector<unsigned> table, std::string name);

  unsigned size() const { return n_; }
  const std::string& name() const { return name_; }
  unsigned mul(unsigned a, unsigned b) const { return table_[a * n_ + b]; }
  unsigned pow(unsigned s, long long k) const;  // k >= 1
  // s^(w+q): the element s^e with e = q (mod period), e >= index
  unsigned omega_power(unsigned s, long long q) const;
  const std::vector<unsigned>& idempotents() const { return idempotents_; }
  std::pair<unsigned, unsigned> index_period(unsigned s) const {
    return ip_[s];
  }
  bool is_idempotent(unsigned s) const { return mul(s, s) == s; }

 private:
  unsigned n_;
  std::vector<unsigned> table_;
  std::string name_;
  std::vector<unsigned> idempotents_;
  std::vector<std::pair<unsigned, unsigned>> ip_;
};

using Assignment = std::map<char, unsigned>;

unsigned eval(const TermPtr& t, const FiniteSemigroup& s, const Assignment& a);

// eSe is a group for every idempotent e
bool is_local_group(const FiniteSemigroup& s);
// the same property checked through the defining identity
// (x^w y x^w)^w = x^w over all element pairs
bool satisfies_lg_identity(const FiniteSemigroup& s);

// local groups used as the cross-check battery: cyclic groups, S3, nilpotent,
// left/right-zero and Rees matrix semigroups over Z2/Z3
const std::vector<FiniteSemigroup>& builtin_battery();

// non-members used by tests and `check-sg`
FiniteSemigroup semilattice2();
FiniteSemigroup brandt_b2();

struct HoldsVerdict {
  bool holds = true;
  std::optional<Assignment> witness;  // set when holds is false
};

// Exhaustive over all |S|^k assignments when that count is <= 10^4, else
// 10^4 seeded uniform samples.
HoldsVerdict identity_holds(const TermPtr& lhs, const TermPtr& rhs,
                            const FiniteSemigroup& s,
                            std::uint64_t seed = 0x5eed);

struct BatteryWitness {
  std::string semigroup;
  Assignment assignment;
};

// first battery member falsifying lhs = rhs, if any
std::optional<BatteryWitness> battery_witness(const TermPtr& lhs,
                                              const TermPtr& rhs,
                                              std::uint64_t seed = 0x5eed);
inline bool battery_equal(const TermPtr& lhs, const TermPtr& rhs,
                          std::uint64_t seed = 0x5eed) {
  return !battery_witness(lhs, rhs, seed).has_value();
}

// text format: first line n, then n rows of n product indices; '#' comments
FiniteSemigroup parse_semigroup(const std::string& text, std::string name);
FiniteSemigroup load_semigroup(const std::string& path);

}  // namespace kterm
