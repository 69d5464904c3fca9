#include "kterm/term.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace kterm {

TermPtr word(std::string letters) {
  if (letters.empty()) throw precondition_error("empty word");
  for (char c : letters)
    if (c < 'a' || c > 'z') throw precondition_error("letter out of range");
  return std::make_shared<Term>(Term::Private{}, std::move(letters));
}

TermPtr limit(TermPtr base, long long q) {
  if (!base) throw precondition_error("empty power base");
  checked_shift(q);
  return std::make_shared<Term>(Term::Private{}, std::move(base), q);
}

TermPtr concat(std::vector<TermPtr> parts) {
  std::vector<TermPtr> flat;
  for (auto& p : parts) {
    if (!p) continue;
    if (p->kind() == Kind::product)
      flat.insert(flat.end(), p->children().begin(), p->children().end());
    else
      flat.push_back(p);
  }
  // merge adjacent words
  std::vector<TermPtr> out;
  for (auto& p : flat) {
    if (!out.empty() && out.back()->kind() == Kind::word &&
        p->kind() == Kind::word) {
      out.back() = word(out.back()->letters() + p->letters());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) return nullptr;
  if (out.size() == 1) return out[0];
  return std::make_shared<Term>(Term::Private{}, std::move(out));
}

TermPtr concat2(const TermPtr& a, const TermPtr& b) { return concat({a, b}); }

TermPtr repeat(const TermPtr& t, long long n) {
  if (n < 0) throw precondition_error("negative repetition");
  std::vector<TermPtr> parts;
  parts.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) parts.push_back(t);
  return concat(std::move(parts));
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Kind::word:
      return a->letters() == b->letters();
    case Kind::power:
      return a->shift() == b->shift() && term_eq(a->base(), b->base());
    case Kind::product: {
      const auto& x = a->children();
      const auto& y = b->children();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!term_eq(x[i], y[i])) return false;
      return true;
    }
  }
  return false;
}

std::vector<TermPtr> factors(const TermPtr& t) {
  if (!t) return {};
  if (t->kind() == Kind::product) return t->children();
  return {t};
}

// --- parsing ------------------------------------------------------------

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  char peek() const { return i < s.size() ? s[i] : '\0'; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(msg + " at offset " + std::to_string(i), i);
  }
};

long long parse_nat(Cursor& c) {
  if (!std::isdigit(static_cast<unsigned char>(c.peek())))
    c.fail("expected a number");
  long long v = 0;
  while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
    v = v * 10 + (c.s[c.i] - '0');
    checked_shift(v);
    ++c.i;
  }
  return v;
}

// returns (is_limit, value): limit shift or finite exponent
std::pair<bool, long long> parse_power_suffix(Cursor& c) {
  ++c.i;  // '^'
  if (c.peek() == '[') {
    ++c.i;
    if (c.peek() != 'w') c.fail("expected 'w'");
    ++c.i;
    long long q = 0;
    if (c.peek() == '+' || c.peek() == '-') {
      bool neg = c.peek() == '-';
      ++c.i;
      q = parse_nat(c);
      if (neg) q = -q;
    }
    if (c.peek() != ']') c.fail("expected ']'");
    ++c.i;
    return {true, q};
  }
  long long n = parse_nat(c);
  if (n < 2) c.fail("finite exponent must be >= 2");
  return {false, n};
}

TermPtr parse_term(Cursor& c, int depth);

TermPtr parse_factor(Cursor& c, int depth) {
  c.skip_ws();
  char ch = c.peek();
  TermPtr inner;
  if (ch == '(') {
    ++c.i;
    inner = parse_term(c, depth + 1);
    c.skip_ws();
    if (c.peek() != ')') c.fail("expected ')'");
    ++c.i;
    if (c.peek() != '^') c.fail("parenthesized group needs a power");
  } else if (ch >= 'a' && ch <= 'z') {
    inner = word(std::string(1, ch));
    ++c.i;
  } else {
    c.fail("expected a letter or '('");
  }
  if (c.peek() == '^') {
    auto [is_limit_pow, v] = parse_power_suffix(c);
    if (is_limit_pow) return limit(inner, v);
    return repeat(inner, v);
  }
  return inner;
}

TermPtr parse_term(Cursor& c, int depth) {
  if (depth > 512) c.fail("nesting too deep");
  std::vector<TermPtr> parts;
  c.skip_ws();
  while (!c.done()) {
    char ch = c.peek();
    if (ch == ')') break;
    parts.push_back(parse_factor(c, depth));
    c.skip_ws();
  }
  if (parts.empty()) c.fail("empty term");
  return concat(std::move(parts));
}

}  // namespace

TermPtr parse(const std::string& text) {
  Cursor c{text};
  if (c.done()) throw parse_error("empty input", 0);
  TermPtr t = parse_term(c, 0);
  if (!c.done()) c.fail("trailing input");
  return t;
}

namespace {

void print_to(const TermPtr& t, std::string& out) {
  if (!t) return;
  switch (t->kind()) {
    case Kind::word:
      out += t->letters();
      break;
    case Kind::product:
      for (const auto& c : t->children()) print_to(c, out);
      break;
    case Kind::power: {
      const TermPtr& b = t->base();
      bool bare = b->kind() == Kind::word && b->letters().size() == 1;
      if (!bare) out += '(';
      print_to(b, out);
      if (!bare) out += ')';
      out += "^[w";
      if (t->shift() > 0) out += "+" + std::to_string(t->shift());
      if (t->shift() < 0) out += std::to_string(t->shift());
      out += ']';
      break;
    }
  }
}

}  // namespace

std::string print(const TermPtr& t) {
  std::string out;
  print_to(t, out);
  return out;
}

// --- structure ------------------------------------------------------------

int rank(const TermPtr& t) {
  if (!t) return 0;
  switch (t->kind()) {
    case Kind::word:
      return 0;
    case Kind::power:
      return 1 + rank(t->base());
    case Kind::product: {
      int r = 0;
      for (const auto& c : t->children()) r = std::max(r, rank(c));
      return r;
    }
  }
  return 0;
}

TermPtr RankConfig::reassemble() const {
  std::vector<TermPtr> parts;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    parts.push_back(rho[j]);
    parts.push_back(limit(pi[j], shifts[j]));
  }
  parts.push_back(rho.back());
  return concat(std::move(parts));
}

RankConfig rank_configuration(const TermPtr& t) {
  int r = rank(t);
  if (r < 1) throw precondition_error("rank_configuration needs rank >= 1");
  RankConfig cfg;
  cfg.r = r;
  std::vector<TermPtr> pending;
  for (const auto& f : factors(t)) {
    if (f->kind() == Kind::power && rank(f) == r) {
      cfg.rho.push_back(concat(std::move(pending)));
      pending.clear();
      cfg.pi.push_back(f->base());
      cfg.shifts.push_back(f->shift());
    } else {
      pending.push_back(f);
    }
  }
  cfg.rho.push_back(concat(std::move(pending)));
  return cfg;
}

TermPtr p_expansion(const TermPtr& t, long long p) {
  if (p < 1) throw precondition_error("expansion exponent must be positive");
  RankConfig cfg = rank_configuration(t);
  std::vector<TermPtr> parts;
  for (std::size_t j = 0; j < cfg.pi.size(); ++j) {
    parts.push_back(cfg.rho[j]);
    parts.push_back(repeat(cfg.pi[j], p));
  }
  parts.push_back(cfg.rho.back());
  return concat(std::move(parts));
}

OmegaPortions omega_portions(const TermPtr& t) {
  int r = rank(t);
  if (r != 1 && r != 2) throw precondition_error("omega portions need rank 1 or 2");
  TermPtr u = r == 2 ? p_expansion(t, 2) : t;
  RankConfig cfg = rank_configuration(u);
  OmegaPortions out;
  out.initial = concat2(cfg.rho.front(), limit(cfg.pi.front(), 0));
  out.final = concat2(limit(cfg.pi.back(), 0), cfg.rho.back());
  for (int j = 0; j + 1 < cfg.length(); ++j) {
    TermPtr c = concat(
        {limit(cfg.pi[j], 0), cfg.rho[j + 1], limit(cfg.pi[j + 1], 0)});
    bool seen = false;
    for (const auto& prev : out.crucial)
      if (term_eq(prev, c)) {
        seen = true;
        break;
      }
    if (!seen) out.crucial.push_back(c);
  }
  return out;
}

std::optional<TermPtr> final_omega2_portion(const TermPtr& t) {
  if (rank(t) != 1) throw precondition_error("final omega2 portion needs rank 1");
  RankConfig cfg = rank_configuration(t);
  int n = cfg.length();
  if (n < 2 || cfg.shifts.back() != 0) return std::nullopt;
  return concat({limit(cfg.pi[n - 2], 0), cfg.rho[n - 1], limit(cfg.pi[n - 1], 0),
                 cfg.rho[n]});
}

// --- alphabet ---------------------------------------------------------------

Alphabet::Alphabet(std::string letters) {
  std::set<char> s(letters.begin(), letters.end());
  letters_.assign(s.begin(), s.end());
}

bool Alphabet::contains(char c) const {
  return letters_.find(c) != std::string::npos;
}

void collect_letters(const TermPtr& t, std::string& out) {
  if (!t) return;
  switch (t->kind()) {
    case Kind::word:
      out += t->letters();
      break;
    case Kind::power:
      collect_letters(t->base(), out);
      break;
    case Kind::product:
      for (const auto& c : t->children()) collect_letters(c, out);
      break;
  }
}

Alphabet alphabet_of(const std::vector<TermPtr>& terms) {
  std::string all;
  for (const auto& t : terms) collect_letters(t, all);
  return Alphabet(all);
}

// --- atoms ------------------------------------------------------------------

bool atom_eq(const Atom& a, const Atom& b) {
  if (a.is_limit() != b.is_limit()) return false;
  if (a.is_limit()) return a.base == b.base && a.shift == b.shift;
  return a.letter == b.letter;
}

AtomSeq atoms_of(const TermPtr& t) {
  AtomSeq out;
  if (!t) return out;
  if (rank(t) > 1) throw precondition_error("atoms need rank <= 1");
  for (const auto& f : factors(t)) {
    if (f->kind() == Kind::word) {
      for (char c : f->letters()) out.push_back(Atom{c, "", 0});
    } else if (f->kind() == Kind::power) {
      out.push_back(Atom{0, f->base()->letters(), f->shift()});
    } else {
      throw internal_error("nested product");
    }
  }
  return out;
}

TermPtr atoms_term(const AtomSeq& seq) {
  std::vector<TermPtr> parts;
  std::string run;
  auto flush = [&] {
    if (!run.empty()) {
      parts.push_back(word(run));
      run.clear();
    }
  };
  for (const auto& a : seq) {
    if (a.is_limit()) {
      flush();
      parts.push_back(limit(word(a.base), a.shift));
    } else {
      run += a.letter;
    }
  }
  flush();
  return concat(std::move(parts));
}

AtomSeq atoms_slice(const AtomSeq& s, std::size_t b, std::size_t e) {
  return AtomSeq(s.begin() + static_cast<long>(b), s.begin() + static_cast<long>(e));
}

AtomSeq atoms_cat(const AtomSeq& a, const AtomSeq& b) {
  AtomSeq out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool atoms_eq(const AtomSeq& a, const AtomSeq& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!atom_eq(a[i], b[i])) return false;
  return true;
}

// --- positions ---------------------------------------------------------------

bool pos_eq(const Pos& a, const Pos& b) {
  return a.path == b.path && a.whole == b.whole &&
         (a.whole || (a.ub == b.ub && a.ue == b.ue));
}

std::string pos_to_string(const Pos& p) {
  std::string out = "/";
  for (std::size_t i = 0; i < p.path.size(); ++i) {
    if (i) out += '/';
    out += std::to_string(p.path[i]);
  }
  if (!p.whole)
    out += "[" + std::to_string(p.ub) + "-" + std::to_string(p.ue) + "]";
  return out;
}

Pos pos_from_string(const std::string& s) {
  Pos p;
  std::size_t i = 0;
  if (i >= s.size() || s[i] != '/') throw parse_error("bad position", 0);
  ++i;
  while (i < s.size() && s[i] != '[') {
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) throw parse_error("bad position", i);
    p.path.push_back(std::stoi(s.substr(i, j - i)));
    i = j;
    if (i < s.size() && s[i] == '/') ++i;
  }
  if (i < s.size() && s[i] == '[') {
    ++i;
    std::size_t dash = s.find('-', i);
    std::size_t close = s.find(']', i);
    if (dash == std::string::npos || close == std::string::npos)
      throw parse_error("bad position span", i);
    p.whole = false;
    p.ub = std::stoi(s.substr(i, dash - i));
    p.ue = std::stoi(s.substr(dash + 1, close - dash - 1));
    i = close + 1;
  }
  if (i != s.size()) throw parse_error("trailing position text", i);
  return p;
}

namespace {

int child_units(const TermPtr& c) {
  return c->kind() == Kind::word ? static_cast<int>(c->letters().size()) : 1;
}

TermPtr child_at_path(const TermPtr& node, int idx) {
  if (node->kind() == Kind::product) {
    const auto& cs = node->children();
    if (idx < 0 || idx >= static_cast<int>(cs.size()))
      throw precondition_error("position path out of range");
    return cs[idx];
  }
  if (node->kind() == Kind::power) {
    if (idx != 0) throw precondition_error("power has a single child");
    return node->base();
  }
  throw precondition_error("cannot descend into a word");
}

// units of a node, each rendered as a mini-term
std::vector<TermPtr> node_units(const TermPtr& node) {
  std::vector<TermPtr> out;
  if (node->kind() == Kind::word) {
    for (char c : node->letters()) out.push_back(word(std::string(1, c)));
  } else if (node->kind() == Kind::product) {
    for (const auto& ch : node->children()) {
      if (ch->kind() == Kind::word)
        for (char c : ch->letters()) out.push_back(word(std::string(1, c)));
      else
        out.push_back(ch);
    }
  } else {
    out.push_back(node);
  }
  return out;
}

}  // namespace

int unit_count(const TermPtr& node) {
  if (!node) return 0;
  if (node->kind() == Kind::word) return static_cast<int>(node->letters().size());
  if (node->kind() == Kind::power) return 1;
  int n = 0;
  for (const auto& c : node->children()) n += child_units(c);
  return n;
}

std::vector<TermPtr> content_units(const TermPtr& t) {
  if (!t) return {};
  return node_units(t);
}

std::optional<long long> repetition_count(const TermPtr& t, const TermPtr& x) {
  if (!t || !x) return std::nullopt;
  auto tu = content_units(t);
  auto xu = content_units(x);
  if (xu.empty() || tu.size() % xu.size()) return std::nullopt;
  for (std::size_t i = 0; i < tu.size(); ++i)
    if (!term_eq(tu[i], xu[i % xu.size()])) return std::nullopt;
  return static_cast<long long>(tu.size() / xu.size());
}

std::pair<TermPtr, long long> primitive_decomposition(const TermPtr& t) {
  auto tu = content_units(t);
  std::size_t n = tu.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = term_eq(tu[i], tu[i - d]);
    if (ok) {
      std::vector<TermPtr> head(tu.begin(), tu.begin() + static_cast<long>(d));
      return {concat(std::move(head)), static_cast<long long>(n / d)};
    }
  }
  return {t, 1};
}

TermPtr subterm_at(const TermPtr& root, const Pos& pos) {
  TermPtr node = root;
  for (int idx : pos.path) node = child_at_path(node, idx);
  if (pos.whole) return node;
  auto units = node_units(node);
  if (pos.ub < 0 || pos.ue > static_cast<int>(units.size()) || pos.ub > pos.ue)
    throw precondition_error("position span out of range");
  std::vector<TermPtr> parts(units.begin() + pos.ub, units.begin() + pos.ue);
  return concat(std::move(parts));
}

namespace {

TermPtr rebuild(const TermPtr& node, const std::vector<int>& path, std::size_t d,
                const Pos& pos, const TermPtr& repl) {
  if (d == path.size()) {
    if (pos.whole) return repl;
    auto units = node_units(node);
    if (pos.ub < 0 || pos.ue > static_cast<int>(units.size()) || pos.ub > pos.ue)
      throw precondition_error("position span out of range");
    std::vector<TermPtr> parts(units.begin(), units.begin() + pos.ub);
    parts.push_back(repl);
    parts.insert(parts.end(), units.begin() + pos.ue, units.end());
    return concat(std::move(parts));
  }
  int idx = path[d];
  if (node->kind() == Kind::power) {
    TermPtr nb = rebuild(node->base(), path, d + 1, pos, repl);
    if (!nb) throw internal_error("rewrite produced an empty power base");
    return limit(nb, node->shift());
  }
  if (node->kind() == Kind::product) {
    const auto& cs = node->children();
    if (idx < 0 || idx >= static_cast<int>(cs.size()))
      throw precondition_error("position path out of range");
    std::vector<TermPtr> parts(cs.begin(), cs.end());
    parts[idx] = rebuild(cs[idx], path, d + 1, pos, repl);
    return concat(std::move(parts));
  }
  throw precondition_error("cannot descend into a word");
}

}  // namespace

TermPtr replace_at(const TermPtr& root, const Pos& pos, const TermPtr& repl) {
  TermPtr out = rebuild(root, pos.path, 0, pos, repl);
  if (!out) throw internal_error("rewrite produced the empty term");
  return out;
}

}  // namespace kterm
