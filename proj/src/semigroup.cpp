#include "kterm/semigroup.hpp"

#include <array>
#include <fstream>
#include <random>
#include <sstream>

namespace kterm {

FiniteSemigroup::FiniteSemigroup(unsigned n, std::vector<unsigned> table,
                                 std::string name)
    : n_(n), table_(std::move(table)), name_(std::move(name)) {
  if (n_ == 0 || n_ > 200) throw precondition_error("semigroup order out of range");
  if (table_.size() != static_cast<std::size_t>(n_) * n_)
    throw precondition_error("semigroup table size mismatch");
  for (unsigned v : table_)
    if (v >= n_) throw precondition_error("semigroup table entry out of range");
  for (unsigned a = 0; a < n_; ++a)
    for (unsigned b = 0; b < n_; ++b)
      for (unsigned c = 0; c < n_; ++c)
        if (mul(mul(a, b), c) != mul(a, mul(b, c)))
          throw precondition_error("multiplication table is not associative");
  for (unsigned s = 0; s < n_; ++s)
    if (is_idempotent(s)) idempotents_.push_back(s);
  ip_.resize(n_);
  for (unsigned s = 0; s < n_; ++s) {
    std::vector<int> seen(n_, 0);
    std::vector<unsigned> orbit;
    unsigned cur = s;
    while (!seen[cur]) {
      seen[cur] = static_cast<int>(orbit.size()) + 1;
      orbit.push_back(cur);
      cur = mul(cur, s);
    }
    unsigned index = static_cast<unsigned>(seen[cur]);       // 1-based
    unsigned period = static_cast<unsigned>(orbit.size()) - index + 1;
    ip_[s] = {index, period};
  }
}

unsigned FiniteSemigroup::pow(unsigned s, long long k) const {
  if (k < 1) throw precondition_error("power exponent must be >= 1");
  auto [i, p] = ip_[s];
  // reduce within the eventually-periodic orbit
  long long e = k;
  if (e > i) e = i + (e - i) % p;
  unsigned cur = s;
  for (long long j = 1; j < e; ++j) cur = mul(cur, s);
  return cur;
}

unsigned FiniteSemigroup::omega_power(unsigned s, long long q) const {
  auto [i, p] = ip_[s];
  long long m = ((i + p - 1) / p) * static_cast<long long>(p);  // s^m idempotent
  if (m < 1) m = p;
  long long e = m + ((q % p) + p) % p;
  return pow(s, e);
}

unsigned eval(const TermPtr& t, const FiniteSemigroup& s, const Assignment& a) {
  if (!t) throw precondition_error("cannot evaluate the empty term");
  switch (t->kind()) {
    case Kind::word: {
      const std::string& w = t->letters();
      auto lookup = [&](char c) {
        auto it = a.find(c);
        if (it == a.end())
          throw precondition_error(std::string("unmapped letter '") + c + "'");
        return it->second;
      };
      unsigned cur = lookup(w[0]);
      for (std::size_t i = 1; i < w.size(); ++i) cur = s.mul(cur, lookup(w[i]));
      return cur;
    }
    case Kind::product: {
      unsigned cur = eval(t->children()[0], s, a);
      for (std::size_t i = 1; i < t->children().size(); ++i)
        cur = s.mul(cur, eval(t->children()[i], s, a));
      return cur;
    }
    case Kind::power:
      return s.omega_power(eval(t->base(), s, a), t->shift());
  }
  throw internal_error("unreachable");
}

bool is_local_group(const FiniteSemigroup& s) {
  for (unsigned e : s.idempotents()) {
    std::vector<unsigned> h;
    std::vector<char> in(s.size(), 0);
    for (unsigned x = 0; x < s.size(); ++x) {
      unsigned v = s.mul(s.mul(e, x), e);
      if (!in[v]) {
        in[v] = 1;
        h.push_back(v);
      }
    }
    // eSe with identity e; require every element invertible
    for (unsigned x : h) {
      bool has_inverse = false;
      for (unsigned y : h)
        if (s.mul(x, y) == e && s.mul(y, x) == e) {
          has_inverse = true;
          break;
        }
      if (!has_inverse) return false;
    }
  }
  return true;
}

bool satisfies_lg_identity(const FiniteSemigroup& s) {
  for (unsigned x = 0; x < s.size(); ++x) {
    unsigned xw = s.omega_power(x, 0);
    for (unsigned y = 0; y < s.size(); ++y) {
      unsigned inner = s.mul(s.mul(xw, y), xw);
      if (s.omega_power(inner, 0) != xw) return false;
    }
  }
  return true;
}

namespace {

FiniteSemigroup cyclic(unsigned n) {
  std::vector<unsigned> t(n * n);
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b) t[a * n + b] = (a + b) % n;
  return FiniteSemigroup(n, std::move(t), "Z" + std::to_string(n));
}

FiniteSemigroup symmetric3() {
  // permutations of {0,1,2} listed as images
  std::array<std::array<unsigned, 3>, 6> perms = {{{0, 1, 2},
                                                   {1, 2, 0},
                                                   {2, 0, 1},
                                                   {0, 2, 1},
                                                   {2, 1, 0},
                                                   {1, 0, 2}}};
  auto compose = [&](unsigned a, unsigned b) {
    std::array<unsigned, 3> c{};
    for (unsigned i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
    for (unsigned k = 0; k < 6; ++k)
      if (perms[k] == c) return k;
    return 0u;
  };
  std::vector<unsigned> t(36);
  for (unsigned a = 0; a < 6; ++a)
    for (unsigned b = 0; b < 6; ++b) t[a * 6 + b] = compose(a, b);
  return FiniteSemigroup(6, std::move(t), "S3");
}

FiniteSemigroup null2() {
  // {0, a} with every product 0
  return FiniteSemigroup(2, {0, 0, 0, 0}, "N2");
}

FiniteSemigroup nilpotent3() {
  // <a | a^3 = 0>: elements 0, a, a^2
  std::vector<unsigned> t(9, 0);
  t[1 * 3 + 1] = 2;  // a*a = a^2
  return FiniteSemigroup(3, std::move(t), "N3");
}

FiniteSemigroup left_zero(unsigned n) {
  std::vector<unsigned> t(n * n);
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b) t[a * n + b] = a;
  return FiniteSemigroup(n, std::move(t), "LZ" + std::to_string(n));
}

FiniteSemigroup right_zero(unsigned n) {
  std::vector<unsigned> t(n * n);
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b) t[a * n + b] = b;
  return FiniteSemigroup(n, std::move(t), "RZ" + std::to_string(n));
}

// M[Z_g; I, L; P]: elements (i, v, l), product
// (i, v, l)(j, w, m) = (i, v + P[l][j] + w, m)
FiniteSemigroup rees(unsigned g, unsigned ni, unsigned nl,
                     const std::vector<unsigned>& sandwich, std::string name) {
  unsigned n = ni * g * nl;
  auto enc = [&](unsigned i, unsigned v, unsigned l) {
    return (i * g + v) * nl + l;
  };
  std::vector<unsigned> t(n * n);
  for (unsigned i = 0; i < ni; ++i)
    for (unsigned v = 0; v < g; ++v)
      for (unsigned l = 0; l < nl; ++l)
        for (unsigned j = 0; j < ni; ++j)
          for (unsigned w = 0; w < g; ++w)
            for (unsigned m = 0; m < nl; ++m)
              t[enc(i, v, l) * n + enc(j, w, m)] =
                  enc(i, (v + sandwich[l * ni + j] + w) % g, m);
  return FiniteSemigroup(n, std::move(t), std::move(name));
}

}  // namespace

const std::vector<FiniteSemigroup>& builtin_battery() {
  static const std::vector<FiniteSemigroup> battery = [] {
    std::vector<FiniteSemigroup> b;
    b.push_back(cyclic(2));
    b.push_back(cyclic(3));
    b.push_back(cyclic(4));
    b.push_back(cyclic(6));
    b.push_back(symmetric3());
    b.push_back(null2());
    b.push_back(nilpotent3());
    b.push_back(left_zero(2));
    b.push_back(right_zero(3));
    b.push_back(rees(2, 2, 2, {0, 0, 0, 1}, "M[Z2;2,2]"));
    b.push_back(rees(3, 2, 2, {0, 0, 0, 1}, "M[Z3;2,2]"));
    for (const auto& s : b)
      if (!is_local_group(s))
        throw internal_error("battery member " + s.name() + " is not a local group");
    return b;
  }();
  return battery;
}

FiniteSemigroup semilattice2() {
  // meet semilattice on {0, 1}
  return FiniteSemigroup(2, {0, 0, 0, 1}, "SL2");
}

FiniteSemigroup brandt_b2() {
  // 0, e11, e12, e21, e22 with eij ekl = [j==k] eil
  auto enc = [](unsigned i, unsigned j) { return 1 + i * 2 + j; };
  std::vector<unsigned> t(25, 0);
  for (unsigned i = 0; i < 2; ++i)
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k)
        for (unsigned l = 0; l < 2; ++l)
          if (j == k) t[enc(i, j) * 5 + enc(k, l)] = enc(i, l);
  return FiniteSemigroup(5, std::move(t), "B2");
}

HoldsVerdict identity_holds(const TermPtr& lhs, const TermPtr& rhs,
                            const FiniteSemigroup& s, std::uint64_t seed) {
  std::string letters;
  collect_letters(lhs, letters);
  collect_letters(rhs, letters);
  Alphabet alpha(letters);
  std::vector<char> vars(alpha.letters().begin(), alpha.letters().end());
  std::size_t k = vars.size();
  if (k == 0) return {};

  auto check = [&](const Assignment& a) -> bool {
    return eval(lhs, s, a) == eval(rhs, s, a);
  };

  double total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= s.size();
  if (total <= 1e4) {
    std::vector<unsigned> odo(k, 0);
    while (true) {
      Assignment a;
      for (std::size_t i = 0; i < k; ++i) a[vars[i]] = odo[i];
      if (!check(a)) return {false, a};
      std::size_t i = 0;
      for (; i < k; ++i) {
        if (++odo[i] < s.size()) break;
        odo[i] = 0;
      }
      if (i == k) break;
    }
    return {};
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> dist(0, s.size() - 1);
  for (int trial = 0; trial < 10000; ++trial) {
    Assignment a;
    for (char v : vars) a[v] = dist(rng);
    if (!check(a)) return {false, a};
  }
  return {};
}

std::optional<BatteryWitness> battery_witness(const TermPtr& lhs,
                                              const TermPtr& rhs,
                                              std::uint64_t seed) {
  for (const auto& s : builtin_battery()) {
    auto v = identity_holds(lhs, rhs, s, seed);
    if (!v.holds) return BatteryWitness{s.name(), *v.witness};
  }
  return std::nullopt;
}

FiniteSemigroup parse_semigroup(const std::string& text, std::string name) {
  std::istringstream in(text);
  std::vector<long long> nums;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long v;
    while (ls >> v) nums.push_back(v);
  }
  if (nums.empty()) throw parse_error("empty semigroup file");
  long long n = nums[0];
  if (n < 1 || n > 200) throw parse_error("semigroup order out of range");
  if (static_cast<long long>(nums.size()) != 1 + n * n)
    throw parse_error("expected " + std::to_string(n * n) + " table entries");
  std::vector<unsigned> table;
  for (std::size_t i = 1; i < nums.size(); ++i) {
    if (nums[i] < 0 || nums[i] >= n) throw parse_error("table entry out of range");
    table.push_back(static_cast<unsigned>(nums[i]));
  }
  return FiniteSemigroup(static_cast<unsigned>(n), std::move(table),
                         std::move(name));
}

FiniteSemigroup load_semigroup(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_semigroup(buf.str(), path);
}

}  // namespace kterm
