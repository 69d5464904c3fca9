#include "kterm/sigma.hpp"

#include <array>
#include <sstream>

namespace kterm {

namespace {

struct RuleInfo {
  RuleId id;
  const char* name;
  bool macro;
};

constexpr std::array<RuleInfo, 17> kRules = {{
    {RuleId::R2_1, "R2.1", false},
    {RuleId::R2_2, "R2.2", false},
    {RuleId::R2_3, "R2.3", false},
    {RuleId::R2_4a, "R2.4a", false},
    {RuleId::R2_4b, "R2.4b", false},
    {RuleId::R2_5, "R2.5", false},
    {RuleId::R_LG, "R.LG", false},
    {RuleId::D3_1, "D3.1", true},
    {RuleId::D3_2, "D3.2", true},
    {RuleId::D3_3a, "D3.3a", true},
    {RuleId::D3_3b, "D3.3b", true},
    {RuleId::D3_4, "D3.4", true},
    {RuleId::D3_5, "D3.5", true},
    {RuleId::D3_6, "D3.6", true},
    {RuleId::C3_2_1, "C3.2.1", true},
    {RuleId::C3_2_2, "C3.2.2", true},
    {RuleId::C3_2_3, "C3.2.3", true},
}};

const RuleInfo& info(RuleId r) {
  for (const auto& ri : kRules)
    if (ri.id == r) return ri;
  throw internal_error("unknown rule");
}

const TermPtr& bt(const Bindings& b, const std::string& k) {
  auto it = b.terms.find(k);
  if (it == b.terms.end())
    throw precondition_error("missing term binding " + k);
  return it->second;
}

TermPtr bt_opt(const Bindings& b, const std::string& k) {
  auto it = b.terms.find(k);
  return it == b.terms.end() ? nullptr : it->second;
}

long long bi(const Bindings& b, const std::string& k) {
  auto it = b.ints.find(k);
  if (it == b.ints.end())
    throw precondition_error("missing integer binding " + k);
  return it->second;
}

long long sum(long long a, long long b) { return checked_shift(a + b); }
long long dif(long long a, long long b) { return checked_shift(a - b); }

bool equal_initial_portion(const TermPtr& a, const TermPtr& b) {
  int ra = rank(a), rb = rank(b);
  if (ra < 1 || ra > 2 || rb < 1 || rb > 2) return false;
  return term_eq(omega_portions(a).initial, omega_portions(b).initial);
}

bool equal_final_portion(const TermPtr& a, const TermPtr& b) {
  int ra = rank(a), rb = rank(b);
  if (ra < 1 || ra > 2 || rb < 1 || rb > 2) return false;
  return term_eq(omega_portions(a).final, omega_portions(b).final);
}

}  // namespace

const char* rule_name(RuleId r) { return info(r).name; }

std::optional<RuleId> rule_from_name(const std::string& name) {
  for (const auto& ri : kRules)
    if (name == ri.name) return ri.id;
  return std::nullopt;
}

const std::vector<RuleId>& all_rules() {
  static const std::vector<RuleId> v = [] {
    std::vector<RuleId> out;
    for (const auto& ri : kRules) out.push_back(ri.id);
    return out;
  }();
  return v;
}

bool is_macro(RuleId r) { return info(r).macro; }

bool bindings_eq(const Bindings& a, const Bindings& b) {
  if (a.ints != b.ints) return false;
  if (a.terms.size() != b.terms.size()) return false;
  for (const auto& [k, v] : a.terms) {
    auto it = b.terms.find(k);
    if (it == b.terms.end() || !term_eq(v, it->second)) return false;
  }
  return true;
}

void check_rule_constraints(RuleId r, const Bindings& b) {
  switch (r) {
    case RuleId::R2_2:
    case RuleId::R2_4a:
    case RuleId::R2_4b:
      if (bi(b, "n") < 1) throw precondition_error("n must be >= 1");
      break;
    case RuleId::D3_1: {
      TermPtr pi = concat({bt_opt(b, "u"), limit(bt(b, "x"), bi(b, "q")),
                           bt_opt(b, "v")});
      if (rank(pi) < 1) throw precondition_error("D3.1 needs rank >= 1");
      break;
    }
    case RuleId::C3_2_1: {
      const TermPtr& s = bt(b, "sigma");
      const TermPtr& t = bt(b, "tau");
      if (rank(s) < 1 || rank(t) < 1)
        throw precondition_error("C3.2.1 needs rank >= 1 terms");
      if (!equal_initial_portion(s, t) || !equal_final_portion(s, t))
        throw precondition_error("C3.2.1 needs matching initial and final portions");
      break;
    }
    case RuleId::C3_2_2: {
      const TermPtr& s = bt(b, "sigma");
      const TermPtr& t = bt(b, "tau");
      if (rank(s) < 1 || rank(t) < 1)
        throw precondition_error("C3.2.2 needs rank >= 1 terms");
      if (!equal_initial_portion(s, t))
        throw precondition_error("C3.2.2 needs matching initial portions");
      break;
    }
    case RuleId::C3_2_3: {
      const TermPtr& s = bt(b, "sigma");
      const TermPtr& t = bt(b, "tau");
      if (rank(s) < 1 || rank(t) < 1)
        throw precondition_error("C3.2.3 needs rank >= 1 terms");
      if (!equal_final_portion(s, t))
        throw precondition_error("C3.2.3 needs matching final portions");
      break;
    }
    default:
      break;
  }
}

TermPtr rule_lhs(RuleId r, const Bindings& b) {
  check_rule_constraints(r, b);
  switch (r) {
    case RuleId::R2_1:
      return limit(limit(bt(b, "x"), bi(b, "p")), bi(b, "q"));
    case RuleId::R2_2:
      return limit(repeat(bt(b, "x"), bi(b, "n")), bi(b, "q"));
    case RuleId::R2_3:
      return concat({limit(bt(b, "x"), bi(b, "p")), limit(bt(b, "x"), bi(b, "q"))});
    case RuleId::R2_4a:
      return concat(
          {limit(bt(b, "x"), bi(b, "q")), repeat(bt(b, "x"), bi(b, "n"))});
    case RuleId::R2_4b:
      return concat(
          {repeat(bt(b, "x"), bi(b, "n")), limit(bt(b, "x"), bi(b, "q"))});
    case RuleId::R2_5:
      return concat(
          {limit(concat2(bt(b, "x"), bt(b, "y")), bi(b, "q")), bt(b, "x")});
    case RuleId::R_LG:
      return limit(
          concat({limit(bt(b, "x"), 0), bt(b, "y"), limit(bt(b, "x"), 0)}), 0);
    case RuleId::D3_1:
      return limit(concat({bt_opt(b, "u"), limit(bt(b, "x"), bi(b, "q")),
                           bt_opt(b, "v")}),
                   1);
    case RuleId::D3_2:
      return concat({limit(bt(b, "x"), bi(b, "p")),
                     limit(concat2(bt(b, "y"), limit(bt(b, "x"), bi(b, "q"))), 0)});
    case RuleId::D3_3a:
      return concat(
          {limit(bt(b, "x"), bi(b, "p")),
           limit(concat2(bt(b, "y"), limit(bt(b, "x"), bi(b, "q"))), -1)});
    case RuleId::D3_3b:
      return concat(
          {limit(concat2(limit(bt(b, "x"), bi(b, "q")), bt(b, "y")), -1),
           limit(bt(b, "x"), bi(b, "p"))});
    case RuleId::D3_4:
      return concat({limit(bt(b, "x"), bi(b, "p")), bt_opt(b, "y"),
                     limit(concat({limit(bt(b, "z"), bi(b, "q")),
                                   bt_opt(b, "w"),
                                   limit(bt(b, "x"), bi(b, "r")),
                                   bt_opt(b, "y")}),
                           -1),
                     limit(bt(b, "z"), bi(b, "s"))});
    case RuleId::D3_5:
      return concat({limit(bt(b, "x"), bi(b, "p")), bt(b, "y"),
                     limit(concat2(limit(bt(b, "x"), bi(b, "q")), bt(b, "y")), -1),
                     limit(bt(b, "x"), bi(b, "r"))});
    case RuleId::D3_6:
      return concat(
          {limit(concat2(limit(bt(b, "x"), bi(b, "p")), bt(b, "y")), -1),
           limit(bt(b, "x"), bi(b, "q")),
           limit(concat2(bt(b, "z"), limit(bt(b, "x"), bi(b, "r"))), -1)});
    case RuleId::C3_2_1:
      return concat({bt(b, "sigma"),
                     limit(concat2(bt(b, "tau"), bt(b, "sigma")), -1)});
    case RuleId::C3_2_2:
    case RuleId::C3_2_3:
      return concat({limit(bt(b, "sigma"), -1), limit(bt(b, "tau"), -1)});
  }
  throw internal_error("unreachable");
}

TermPtr rule_rhs(RuleId r, const Bindings& b) {
  check_rule_constraints(r, b);
  switch (r) {
    case RuleId::R2_1:
      return limit(bt(b, "x"), checked_shift(bi(b, "p") * bi(b, "q")));
    case RuleId::R2_2:
      return limit(bt(b, "x"), checked_shift(bi(b, "n") * bi(b, "q")));
    case RuleId::R2_3:
      return limit(bt(b, "x"), sum(bi(b, "p"), bi(b, "q")));
    case RuleId::R2_4a:
    case RuleId::R2_4b:
      return limit(bt(b, "x"), sum(bi(b, "q"), bi(b, "n")));
    case RuleId::R2_5:
      return concat(
          {bt(b, "x"), limit(concat2(bt(b, "y"), bt(b, "x")), bi(b, "q"))});
    case RuleId::R_LG:
      return limit(bt(b, "x"), 0);
    case RuleId::D3_1:
      return concat(
          {bt_opt(b, "u"), limit(bt(b, "x"), bi(b, "q")), bt_opt(b, "v")});
    case RuleId::D3_2:
      return limit(bt(b, "x"), bi(b, "p"));
    case RuleId::D3_3a:
      return concat({limit(bt(b, "x"), dif(bi(b, "p"), bi(b, "q"))),
                     limit(concat2(bt(b, "y"), limit(bt(b, "x"), 0)), -1)});
    case RuleId::D3_3b:
      return concat({limit(concat2(limit(bt(b, "x"), 0), bt(b, "y")), -1),
                     limit(bt(b, "x"), dif(bi(b, "p"), bi(b, "q")))});
    case RuleId::D3_4:
      return concat({limit(bt(b, "x"), dif(bi(b, "p"), bi(b, "r"))),
                     limit(concat({limit(bt(b, "z"), 0), bt_opt(b, "w"),
                                   limit(bt(b, "x"), 0)}),
                           -1),
                     limit(bt(b, "z"), dif(bi(b, "s"), bi(b, "q")))});
    case RuleId::D3_5:
      return limit(bt(b, "x"),
                   sum(dif(bi(b, "p"), bi(b, "q")), bi(b, "r")));
    case RuleId::D3_6:
      return limit(concat({limit(bt(b, "x"), 0), bt(b, "z"),
                           limit(bt(b, "x"),
                                 sum(dif(bi(b, "p"), bi(b, "q")), bi(b, "r"))),
                           bt(b, "y"), limit(bt(b, "x"), 0)}),
                   -1);
    case RuleId::C3_2_1:
      return limit(bt(b, "tau"), -1);
    case RuleId::C3_2_2:
      return concat({limit(concat({bt(b, "tau"), bt(b, "tau"), bt(b, "sigma")}),
                           -1),
                     bt(b, "tau")});
    case RuleId::C3_2_3:
      return concat({bt(b, "sigma"),
                     limit(concat({bt(b, "tau"), bt(b, "sigma"), bt(b, "sigma")}),
                           -1)});
  }
  throw internal_error("unreachable");
}

// --- matchers ---------------------------------------------------------------

namespace {

bool is_limit_node(const TermPtr& t) { return t && t->kind() == Kind::power; }

// decompose a power node's base factors as first-limit + tail etc.
struct BaseSplit {
  TermPtr head;  // may be null
  TermPtr lim;   // the limit factor
  TermPtr tail;  // may be null
};

// leftmost top-level limit factor of t
std::optional<BaseSplit> leftmost_limit(const TermPtr& t) {
  auto fs = factors(t);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (is_limit_node(fs[i])) {
      std::vector<TermPtr> head(fs.begin(), fs.begin() + static_cast<long>(i));
      std::vector<TermPtr> tail(fs.begin() + static_cast<long>(i) + 1, fs.end());
      return BaseSplit{concat(std::move(head)), fs[i], concat(std::move(tail))};
    }
  }
  return std::nullopt;
}

// does t end with the given content (unit-wise)?  returns the prefix before
std::optional<TermPtr> strip_suffix(const TermPtr& t, const TermPtr& suf) {
  auto tu = content_units(t);
  auto su = content_units(suf);
  if (su.size() > tu.size()) return std::nullopt;
  std::size_t off = tu.size() - su.size();
  for (std::size_t i = 0; i < su.size(); ++i)
    if (!term_eq(tu[off + i], su[i])) return std::nullopt;
  std::vector<TermPtr> head(tu.begin(), tu.begin() + static_cast<long>(off));
  return concat(std::move(head));
}

std::optional<Bindings> match_fwd(const TermPtr& sub, RuleId r) {
  Bindings b;
  auto fs = factors(sub);
  switch (r) {
    case RuleId::R2_1: {
      if (!is_limit_node(sub) || !is_limit_node(sub->base())) return std::nullopt;
      b.term("x", sub->base()->base());
      b.num("p", sub->base()->shift()).num("q", sub->shift());
      return b;
    }
    case RuleId::R2_2: {
      if (!is_limit_node(sub)) return std::nullopt;
      auto [root, n] = primitive_decomposition(sub->base());
      if (n < 2) return std::nullopt;
      b.term("x", root).num("n", n).num("q", sub->shift());
      return b;
    }
    case RuleId::R2_3: {
      if (fs.size() != 2 || !is_limit_node(fs[0]) || !is_limit_node(fs[1]))
        return std::nullopt;
      if (!term_eq(fs[0]->base(), fs[1]->base())) return std::nullopt;
      b.term("x", fs[0]->base());
      b.num("p", fs[0]->shift()).num("q", fs[1]->shift());
      return b;
    }
    case RuleId::R2_4a: {
      if (fs.size() < 2 || !is_limit_node(fs[0])) return std::nullopt;
      std::vector<TermPtr> rest(fs.begin() + 1, fs.end());
      auto n = repetition_count(concat(std::move(rest)), fs[0]->base());
      if (!n || *n < 1) return std::nullopt;
      b.term("x", fs[0]->base()).num("q", fs[0]->shift()).num("n", *n);
      return b;
    }
    case RuleId::R2_4b: {
      if (fs.size() < 2 || !is_limit_node(fs.back())) return std::nullopt;
      std::vector<TermPtr> rest(fs.begin(), fs.end() - 1);
      auto n = repetition_count(concat(std::move(rest)), fs.back()->base());
      if (!n || *n < 1) return std::nullopt;
      b.term("x", fs.back()->base()).num("q", fs.back()->shift()).num("n", *n);
      return b;
    }
    case RuleId::R2_5: {
      if (fs.size() < 2 || !is_limit_node(fs[0])) return std::nullopt;
      std::vector<TermPtr> rest(fs.begin() + 1, fs.end());
      TermPtr x = concat(std::move(rest));
      auto y = [&]() -> TermPtr {
        auto bu = content_units(fs[0]->base());
        auto xu = content_units(x);
        if (xu.size() >= bu.size()) return nullptr;
        for (std::size_t i = 0; i < xu.size(); ++i)
          if (!term_eq(bu[i], xu[i])) return nullptr;
        std::vector<TermPtr> tail(bu.begin() + static_cast<long>(xu.size()),
                                  bu.end());
        return concat(std::move(tail));
      }();
      if (!y) return std::nullopt;
      b.term("x", x).term("y", y).num("q", fs[0]->shift());
      return b;
    }
    case RuleId::R_LG: {
      if (!is_limit_node(sub) || sub->shift() != 0) return std::nullopt;
      auto bf = factors(sub->base());
      if (bf.size() < 3) return std::nullopt;
      if (!is_limit_node(bf.front()) || bf.front()->shift() != 0)
        return std::nullopt;
      if (!is_limit_node(bf.back()) || bf.back()->shift() != 0)
        return std::nullopt;
      if (!term_eq(bf.front()->base(), bf.back()->base())) return std::nullopt;
      std::vector<TermPtr> mid(bf.begin() + 1, bf.end() - 1);
      b.term("x", bf.front()->base()).term("y", concat(std::move(mid)));
      return b;
    }
    case RuleId::D3_1: {
      if (!is_limit_node(sub) || sub->shift() != 1) return std::nullopt;
      if (rank(sub->base()) < 1) return std::nullopt;
      auto split = leftmost_limit(sub->base());
      if (!split) return std::nullopt;
      b.term("u", split->head).term("v", split->tail);
      b.term("x", split->lim->base()).num("q", split->lim->shift());
      return b;
    }
    case RuleId::D3_2:
    case RuleId::D3_3a: {
      long long want = r == RuleId::D3_2 ? 0 : -1;
      if (fs.size() != 2 || !is_limit_node(fs[0]) || !is_limit_node(fs[1]))
        return std::nullopt;
      if (fs[1]->shift() != want) return std::nullopt;
      auto bf = factors(fs[1]->base());
      if (bf.size() < 2 || !is_limit_node(bf.back())) return std::nullopt;
      if (!term_eq(bf.back()->base(), fs[0]->base())) return std::nullopt;
      std::vector<TermPtr> y(bf.begin(), bf.end() - 1);
      b.term("x", fs[0]->base()).term("y", concat(std::move(y)));
      b.num("p", fs[0]->shift()).num("q", bf.back()->shift());
      return b;
    }
    case RuleId::D3_3b: {
      if (fs.size() != 2 || !is_limit_node(fs[0]) || !is_limit_node(fs[1]))
        return std::nullopt;
      if (fs[0]->shift() != -1) return std::nullopt;
      auto bf = factors(fs[0]->base());
      if (bf.size() < 2 || !is_limit_node(bf.front())) return std::nullopt;
      if (!term_eq(bf.front()->base(), fs[1]->base())) return std::nullopt;
      std::vector<TermPtr> y(bf.begin() + 1, bf.end());
      b.term("x", fs[1]->base()).term("y", concat(std::move(y)));
      b.num("p", fs[1]->shift()).num("q", bf.front()->shift());
      return b;
    }
    case RuleId::D3_4: {
      if (fs.size() < 4) return std::nullopt;
      std::size_t k = fs.size();
      if (!is_limit_node(fs[0]) || !is_limit_node(fs[k - 2]) ||
          !is_limit_node(fs[k - 1]))
        return std::nullopt;
      if (fs[k - 2]->shift() != -1) return std::nullopt;
      std::vector<TermPtr> yv(fs.begin() + 1, fs.begin() + static_cast<long>(k) - 2);
      TermPtr y = concat(std::move(yv));
      if (!y) return std::nullopt;
      auto bf = factors(fs[k - 2]->base());
      if (bf.size() < 3 || !is_limit_node(bf.front())) return std::nullopt;
      if (!term_eq(bf.front()->base(), fs[k - 1]->base())) return std::nullopt;
      std::vector<TermPtr> rest(bf.begin() + 1, bf.end());
      auto head = strip_suffix(concat(std::move(rest)), y);
      if (!head || !*head) return std::nullopt;
      auto hf = factors(*head);
      if (hf.empty() || !is_limit_node(hf.back())) return std::nullopt;
      if (!term_eq(hf.back()->base(), fs[0]->base())) return std::nullopt;
      std::vector<TermPtr> wv(hf.begin(), hf.end() - 1);
      TermPtr w = concat(std::move(wv));
      if (!w) return std::nullopt;
      b.term("x", fs[0]->base()).term("y", y).term("z", fs[k - 1]->base());
      b.term("w", w);
      b.num("p", fs[0]->shift()).num("q", bf.front()->shift());
      b.num("r", hf.back()->shift()).num("s", fs[k - 1]->shift());
      return b;
    }
    case RuleId::D3_5: {
      if (fs.size() < 4) return std::nullopt;
      std::size_t k = fs.size();
      if (!is_limit_node(fs[0]) || !is_limit_node(fs[k - 2]) ||
          !is_limit_node(fs[k - 1]))
        return std::nullopt;
      if (fs[k - 2]->shift() != -1) return std::nullopt;
      if (!term_eq(fs[0]->base(), fs[k - 1]->base())) return std::nullopt;
      std::vector<TermPtr> yv(fs.begin() + 1, fs.begin() + static_cast<long>(k) - 2);
      TermPtr y = concat(std::move(yv));
      if (!y) return std::nullopt;
      auto bf = factors(fs[k - 2]->base());
      if (bf.size() < 2 || !is_limit_node(bf.front())) return std::nullopt;
      if (!term_eq(bf.front()->base(), fs[0]->base())) return std::nullopt;
      std::vector<TermPtr> tail(bf.begin() + 1, bf.end());
      if (!term_eq(concat(std::move(tail)), y)) return std::nullopt;
      b.term("x", fs[0]->base()).term("y", y);
      b.num("p", fs[0]->shift()).num("q", bf.front()->shift());
      b.num("r", fs[k - 1]->shift());
      return b;
    }
    case RuleId::D3_6: {
      if (fs.size() != 3 || !is_limit_node(fs[0]) || !is_limit_node(fs[1]) ||
          !is_limit_node(fs[2]))
        return std::nullopt;
      if (fs[0]->shift() != -1 || fs[2]->shift() != -1) return std::nullopt;
      auto b1 = factors(fs[0]->base());
      auto b2 = factors(fs[2]->base());
      if (b1.size() < 2 || b2.size() < 2) return std::nullopt;
      if (!is_limit_node(b1.front()) || !is_limit_node(b2.back()))
        return std::nullopt;
      if (!term_eq(b1.front()->base(), fs[1]->base()) ||
          !term_eq(b2.back()->base(), fs[1]->base()))
        return std::nullopt;
      std::vector<TermPtr> yv(b1.begin() + 1, b1.end());
      std::vector<TermPtr> zv(b2.begin(), b2.end() - 1);
      b.term("x", fs[1]->base()).term("y", concat(std::move(yv)));
      b.term("z", concat(std::move(zv)));
      b.num("p", b1.front()->shift()).num("q", fs[1]->shift());
      b.num("r", b2.back()->shift());
      return b;
    }
    case RuleId::C3_2_1: {
      if (fs.size() < 2 || !is_limit_node(fs.back()) || fs.back()->shift() != -1)
        return std::nullopt;
      std::vector<TermPtr> sv(fs.begin(), fs.end() - 1);
      TermPtr sigma = concat(std::move(sv));
      auto tau = strip_suffix(fs.back()->base(), sigma);
      if (!tau || !*tau) return std::nullopt;
      if (rank(sigma) < 1 || rank(*tau) < 1) return std::nullopt;
      if (!equal_initial_portion(sigma, *tau) ||
          !equal_final_portion(sigma, *tau))
        return std::nullopt;
      b.term("sigma", sigma).term("tau", *tau);
      return b;
    }
    case RuleId::C3_2_2:
    case RuleId::C3_2_3: {
      if (fs.size() != 2 || !is_limit_node(fs[0]) || !is_limit_node(fs[1]))
        return std::nullopt;
      if (fs[0]->shift() != -1 || fs[1]->shift() != -1) return std::nullopt;
      TermPtr sigma = fs[0]->base();
      TermPtr tau = fs[1]->base();
      if (rank(sigma) < 1 || rank(tau) < 1) return std::nullopt;
      if (r == RuleId::C3_2_2 && !equal_initial_portion(sigma, tau))
        return std::nullopt;
      if (r == RuleId::C3_2_3 && !equal_final_portion(sigma, tau))
        return std::nullopt;
      b.term("sigma", sigma).term("tau", tau);
      return b;
    }
    default:
      return std::nullopt;
  }
}

std::optional<Bindings> match_rev(const TermPtr& sub, RuleId r) {
  Bindings b;
  switch (r) {
    case RuleId::R2_1:  // choose q = 1
      if (!is_limit_node(sub)) return std::nullopt;
      b.term("x", sub->base()).num("p", sub->shift()).num("q", 1);
      return b;
    case RuleId::R2_2:
      if (!is_limit_node(sub)) return std::nullopt;
      b.term("x", sub->base()).num("n", 1).num("q", sub->shift());
      return b;
    case RuleId::R2_3:  // choose p = 0
      if (!is_limit_node(sub)) return std::nullopt;
      b.term("x", sub->base()).num("p", 0).num("q", sub->shift());
      return b;
    case RuleId::R2_4a:
    case RuleId::R2_4b:  // choose n = 1
      if (!is_limit_node(sub)) return std::nullopt;
      b.term("x", sub->base()).num("n", 1).num("q", sub->shift() - 1);
      return b;
    case RuleId::R2_5: {
      auto fs = factors(sub);
      if (fs.size() < 2) return std::nullopt;
      // x (yx)^(w+q): shortest leading x
      auto u = content_units(sub);
      for (std::size_t k = 1; k < u.size(); ++k) {
        if (!is_limit_node(u[k])) continue;
        std::vector<TermPtr> xv(u.begin(), u.begin() + static_cast<long>(k));
        if (k + 1 != u.size()) continue;  // power must be the final unit
        TermPtr x = concat(std::move(xv));
        auto tail = strip_suffix(u[k]->base(), x);
        if (!tail || !*tail) continue;
        b.term("x", x).term("y", *tail).num("q", u[k]->shift());
        return b;
      }
      return std::nullopt;
    }
    case RuleId::D3_1: {
      if (rank(sub) < 1) return std::nullopt;
      auto split = leftmost_limit(sub);
      if (!split) return std::nullopt;
      b.term("u", split->head).term("v", split->tail);
      b.term("x", split->lim->base()).num("q", split->lim->shift());
      return b;
    }
    default:
      return std::nullopt;  // needs explicit bindings
  }
}

}  // namespace

std::optional<Bindings> match_rule(const TermPtr& t, RuleId r, Dir d,
                                   const Pos& pos) {
  TermPtr sub = subterm_at(t, pos);
  auto b = d == Dir::fwd ? match_fwd(sub, r) : match_rev(sub, r);
  if (!b) return std::nullopt;
  // validate by instantiation
  TermPtr side = d == Dir::fwd ? rule_lhs(r, *b) : rule_rhs(r, *b);
  if (!term_eq(side, sub)) return std::nullopt;
  return b;
}

TermPtr apply_step(const TermPtr& t, const RewriteStep& step) {
  TermPtr src = step.dir == Dir::fwd ? rule_lhs(step.rule, step.bind)
                                     : rule_rhs(step.rule, step.bind);
  TermPtr actual = subterm_at(t, step.pos);
  if (!term_eq(src, actual))
    throw precondition_error(std::string("step ") + rule_name(step.rule) +
                             " does not match at " + pos_to_string(step.pos));
  TermPtr tgt = step.dir == Dir::fwd ? rule_rhs(step.rule, step.bind)
                                     : rule_lhs(step.rule, step.bind);
  return replace_at(t, step.pos, tgt);
}

bool verify_derivation(const Derivation& d) {
  try {
    TermPtr cur = d.source;
    for (const auto& s : d.steps) cur = apply_step(cur, s);
    return term_eq(cur, d.target);
  } catch (const std::exception&) {
    return false;
  }
}

// --- trace serialization ------------------------------------------------

namespace {

std::string bindings_to_text(const Bindings& b) {
  std::string out;
  for (const auto& [k, v] : b.ints) out += " " + k + "=" + std::to_string(v);
  for (const auto& [k, v] : b.terms) out += " " + k + "={" + print(v) + "}";
  return out;
}

void parse_bindings(const std::string& text, Bindings& b) {
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  skip_ws();
  while (i < text.size()) {
    std::size_t eq = text.find('=', i);
    if (eq == std::string::npos) throw parse_error("bad binding", i);
    std::string key = text.substr(i, eq - i);
    i = eq + 1;
    if (i < text.size() && text[i] == '{') {
      std::size_t close = text.find('}', i);
      if (close == std::string::npos) throw parse_error("unclosed binding", i);
      b.term(key, parse(text.substr(i + 1, close - i - 1)));
      i = close + 1;
    } else {
      std::size_t j = i;
      if (j < text.size() && text[j] == '-') ++j;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      b.num(key, std::stoll(text.substr(i, j - i)));
      i = j;
    }
    skip_ws();
  }
}

}  // namespace

std::string derivation_to_text(const Derivation& d) {
  std::string out;
  out += "source " + print(d.source) + "\n";
  out += "target " + print(d.target) + "\n";
  for (const auto& s : d.steps) {
    out += rule_name(s.rule);
    out += s.dir == Dir::fwd ? " fwd " : " rev ";
    out += pos_to_string(s.pos);
    out += bindings_to_text(s.bind);
    out += "\n";
  }
  return out;
}

Derivation derivation_from_text(const std::string& text) {
  Derivation d;
  std::istringstream in(text);
  std::string line;
  bool have_source = false, have_target = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "source") {
      std::string rest;
      std::getline(ls, rest);
      d.source = parse(rest);
      have_source = true;
      continue;
    }
    if (head == "target") {
      std::string rest;
      std::getline(ls, rest);
      d.target = parse(rest);
      have_target = true;
      continue;
    }
    auto rid = rule_from_name(head);
    if (!rid) throw parse_error("unknown rule " + head);
    std::string dir_tok, pos_tok;
    ls >> dir_tok >> pos_tok;
    if (dir_tok != "fwd" && dir_tok != "rev")
      throw parse_error("bad direction " + dir_tok);
    RewriteStep step;
    step.rule = *rid;
    step.dir = dir_tok == "fwd" ? Dir::fwd : Dir::rev;
    step.pos = pos_from_string(pos_tok);
    std::string rest;
    std::getline(ls, rest);
    parse_bindings(rest, step.bind);
    d.steps.push_back(std::move(step));
  }
  if (!have_source || !have_target)
    throw parse_error("trace needs source and target lines");
  return d;
}

}  // namespace kterm
