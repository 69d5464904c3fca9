#pragma once

#include <stdexcept>
#include <string>

namespace kterm {

// Input text does not conform to the term grammar (or a trace/semigroup file
// is malformed). `where` is a byte offset into the offending input when known.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t where = npos)
      : std::runtime_error(msg), where_(where) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t where() const { return where_; }

 private:
  std::size_t where_;
};

// Exponent arithmetic left the supported range (|shift| <= 2^31 - 1).
class overflow_error : public std::runtime_error {
 public:
  explicit overflow_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation was called outside its contract (wrong rank, non-canonical
// input, unmapped letter, ...).
class precondition_error : public std::runtime_error {
 public:
  explicit precondition_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

// A should-not-happen condition: a normalization guard tripped, a rewrite
// step failed to replay, or the two decision paths disagreed.
class internal_error : public std::runtime_error {
 public:
  explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline long long checked_shift(long long v, const char* what = "exponent") {
  constexpr long long kMax = 2147483647LL;
  if (v > kMax || v < -kMax)
    throw overflow_error(std::string(what) + " out of range");
  return v;
}

}  // namespace kterm
