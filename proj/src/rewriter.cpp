#include "kterm/rewriter.hpp"

#include "kterm/region.hpp"

namespace kterm {

namespace {

TermPtr child_of(const TermPtr& node, int idx) {
  if (node->kind() == Kind::product) return node->children().at(idx);
  if (node->kind() == Kind::power && idx == 0) return node->base();
  throw precondition_error("bad position path");
}

const TermPtr& bt(const Bindings& b, const std::string& k) {
  auto it = b.terms.find(k);
  if (it == b.terms.end()) throw precondition_error("missing binding " + k);
  return it->second;
}

TermPtr bt_opt(const Bindings& b, const std::string& k) {
  auto it = b.terms.find(k);
  return it == b.terms.end() ? nullptr : it->second;
}

long long bi(const Bindings& b, const std::string& k) {
  auto it = b.ints.find(k);
  if (it == b.ints.end()) throw precondition_error("missing binding " + k);
  return it->second;
}

TermPtr lim0(const TermPtr& x) { return limit(x, 0); }

TermPtr units_concat(const std::vector<TermPtr>& us, int i, int j) {
  std::vector<TermPtr> parts(us.begin() + i, us.begin() + j);
  return concat(std::move(parts));
}

}  // namespace

Pos span_of(const TermPtr& root, const Pos& pos) {
  std::vector<TermPtr> nodes{root};
  for (int idx : pos.path) nodes.push_back(child_of(nodes.back(), idx));
  std::size_t a = pos.path.size();
  while (a > 0 && nodes[a - 1]->kind() != Kind::power) --a;
  int off = 0;
  for (std::size_t d = a; d < pos.path.size(); ++d) {
    if (nodes[d]->kind() != Kind::product)
      throw internal_error("unexpected position shape");
    for (int i = 0; i < pos.path[d]; ++i)
      off += unit_count(nodes[d]->children()[i]);
  }
  int lo = off + (pos.whole ? 0 : pos.ub);
  int hi = pos.whole ? off + unit_count(nodes.back()) : off + pos.ue;
  std::vector<int> ap(pos.path.begin(), pos.path.begin() + a);
  return Pos::span(std::move(ap), lo, hi);
}

Pos step_result_span(const TermPtr& before, const RewriteStep& step) {
  Pos span = span_of(before, step.pos);
  TermPtr tgt = step.dir == Dir::fwd ? rule_rhs(step.rule, step.bind)
                                     : rule_lhs(step.rule, step.bind);
  return Pos::span(span.path, span.ub, span.ub + unit_count(tgt));
}

RewriteStep invert_step(const TermPtr& before, const RewriteStep& step) {
  RewriteStep inv;
  inv.rule = step.rule;
  inv.dir = step.dir == Dir::fwd ? Dir::rev : Dir::fwd;
  inv.bind = step.bind;
  inv.pos = step_result_span(before, step);
  return inv;
}

Pos Rewriter::apply(RuleId rule, Dir dir, const Pos& pos, const Bindings& bind) {
  RewriteStep step{rule, dir, pos, bind};
  return apply(step);
}

Pos Rewriter::apply(const RewriteStep& step) {
  Pos res = step_result_span(cur_, step);
  cur_ = apply_step(cur_, step);
  steps_.push_back(step);
  return res;
}

// --- Region -----------------------------------------------------------------

Region Region::whole(Rewriter& rw) {
  return Region{&rw, {}, 0, unit_count(rw.term())};
}

Region Region::of(Rewriter& rw, const Pos& pos) {
  Pos s = span_of(rw.term(), pos);
  return Region{&rw, s.path, s.ub, s.ue - s.ub};
}

TermPtr Region::unit(int i) const {
  auto us = units();
  if (i < 0 || i >= static_cast<int>(us.size()))
    throw internal_error("region unit out of range");
  return us[i];
}

TermPtr Region::slice_term(int i, int j) const {
  auto us = units();
  return units_concat(us, i, j);
}

std::vector<int> Region::power_path(int u) const {
  TermPtr node = rw->term();
  for (int idx : path) node = child_of(node, idx);
  if (node->kind() == Kind::power) {
    if (b + u != 0) throw internal_error("power unit out of range");
    return path;
  }
  if (node->kind() != Kind::product)
    throw internal_error("no power at region unit");
  int off = 0;
  const auto& cs = node->children();
  for (int k = 0; k < static_cast<int>(cs.size()); ++k) {
    int w = unit_count(cs[k]);
    if (b + u < off + w) {
      if (cs[k]->kind() != Kind::power || b + u != off)
        throw internal_error("region unit is not a power");
      auto p = path;
      p.push_back(k);
      return p;
    }
    off += w;
  }
  throw internal_error("region unit out of range");
}

Region Region::base_region(int u) const {
  auto pp = power_path(u);
  pp.push_back(0);
  TermPtr node = rw->term();
  for (int idx : pp) node = child_of(node, idx);
  return Region{rw, pp, 0, unit_count(node)};
}

int Region::apply(RuleId r, Dir d, int i, int j, const Bindings& bind) {
  Pos res = rw->apply(r, d, at(i, j), bind);
  int newlen = res.ue - res.ub;
  len += newlen - (j - i);
  return newlen;
}

void Region::apply_in_base(RuleId r, Dir d, int u, int i, int j,
                           const Bindings& bind) {
  auto pp = power_path(u);
  pp.push_back(0);
  rw->apply(r, d, Pos::span(std::move(pp), i, j), bind);
}

// --- primitive emitters -------------------------------------------------

namespace {

TermPtr expect_power(const TermPtr& t, const char* what) {
  if (!t || t->kind() != Kind::power)
    throw internal_error(std::string("expected a power: ") + what);
  return t;
}

// content of `whole` with the leading `head` units removed
TermPtr strip_prefix_units(const TermPtr& whole, const TermPtr& head) {
  auto wu = content_units(whole);
  auto hu = content_units(head);
  if (hu.size() >= wu.size()) throw internal_error("strip_prefix: too long");
  for (std::size_t i = 0; i < hu.size(); ++i)
    if (!term_eq(wu[i], hu[i])) throw internal_error("strip_prefix: mismatch");
  return units_concat(wu, static_cast<int>(hu.size()),
                      static_cast<int>(wu.size()));
}

TermPtr strip_suffix_units(const TermPtr& whole, const TermPtr& tail) {
  auto wu = content_units(whole);
  auto tu = content_units(tail);
  if (tu.size() >= wu.size()) throw internal_error("strip_suffix: too long");
  std::size_t off = wu.size() - tu.size();
  for (std::size_t i = 0; i < tu.size(); ++i)
    if (!term_eq(wu[off + i], tu[i])) throw internal_error("strip_suffix: mismatch");
  return units_concat(wu, 0, static_cast<int>(off));
}

}  // namespace

void em_split(Region& r, int i, long long p) {
  TermPtr pw = expect_power(r.unit(i), "em_split");
  Bindings b;
  b.term("x", pw->base()).num("p", p).num("q", pw->shift() - p);
  r.apply(RuleId::R2_3, Dir::rev, i, i + 1, b);
}

void em_merge(Region& r, int i) {
  TermPtr a = expect_power(r.unit(i), "em_merge");
  TermPtr c = expect_power(r.unit(i + 1), "em_merge");
  if (!term_eq(a->base(), c->base())) throw internal_error("em_merge bases");
  Bindings b;
  b.term("x", a->base()).num("p", a->shift()).num("q", c->shift());
  r.apply(RuleId::R2_3, Dir::fwd, i, i + 2, b);
}

void em_peel_right(Region& r, int i, long long n) {
  TermPtr pw = expect_power(r.unit(i), "em_peel_right");
  Bindings b;
  b.term("x", pw->base()).num("n", n).num("q", pw->shift() - n);
  r.apply(RuleId::R2_4a, Dir::rev, i, i + 1, b);
}

void em_peel_left(Region& r, int i, long long n) {
  TermPtr pw = expect_power(r.unit(i), "em_peel_left");
  Bindings b;
  b.term("x", pw->base()).num("n", n).num("q", pw->shift() - n);
  r.apply(RuleId::R2_4b, Dir::rev, i, i + 1, b);
}

void em_fold_right(Region& r, int i, int j, long long n) {
  TermPtr pw = expect_power(r.unit(i), "em_fold_right");
  Bindings b;
  b.term("x", pw->base()).num("n", n).num("q", pw->shift());
  r.apply(RuleId::R2_4a, Dir::fwd, i, j, b);
}

void em_fold_left(Region& r, int i, int j, long long n) {
  TermPtr pw = expect_power(r.unit(j - 1), "em_fold_left");
  Bindings b;
  b.term("x", pw->base()).num("n", n).num("q", pw->shift());
  r.apply(RuleId::R2_4b, Dir::fwd, i, j, b);
}

void em_shift_left(Region& r, int xi, int k) {
  TermPtr x = r.slice_term(xi, xi + k);
  TermPtr pw = expect_power(r.unit(xi + k), "em_shift_left");
  TermPtr y = strip_suffix_units(pw->base(), x);
  Bindings b;
  b.term("x", x).term("y", y).num("q", pw->shift());
  r.apply(RuleId::R2_5, Dir::rev, xi, xi + k + 1, b);
}

void em_shift_right(Region& r, int pu, int k) {
  TermPtr pw = expect_power(r.unit(pu), "em_shift_right");
  TermPtr x = r.slice_term(pu + 1, pu + 1 + k);
  TermPtr y = strip_prefix_units(pw->base(), x);
  Bindings b;
  b.term("x", x).term("y", y).num("q", pw->shift());
  r.apply(RuleId::R2_5, Dir::fwd, pu, pu + 1 + k, b);
}

void em_rlg(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "em_rlg");
  auto bu = content_units(pw->base());
  TermPtr first = expect_power(bu.front(), "em_rlg base");
  Bindings b;
  b.term("x", first->base());
  b.term("y", units_concat(bu, 1, static_cast<int>(bu.size()) - 1));
  r.apply(RuleId::R_LG, Dir::fwd, i, i + 1, b);
}

void em_rlg_rev(Region& r, int i, const TermPtr& y) {
  TermPtr pw = expect_power(r.unit(i), "em_rlg_rev");
  Bindings b;
  b.term("x", pw->base()).term("y", y);
  r.apply(RuleId::R_LG, Dir::rev, i, i + 1, b);
}

void em_r21(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "em_r21");
  TermPtr inner = expect_power(pw->base(), "em_r21 base");
  Bindings b;
  b.term("x", inner->base()).num("p", inner->shift()).num("q", pw->shift());
  r.apply(RuleId::R2_1, Dir::fwd, i, i + 1, b);
}

void em_r22(Region& r, int i, long long n) {
  TermPtr pw = expect_power(r.unit(i), "em_r22");
  auto bu = content_units(pw->base());
  if (n < 1 || bu.size() % n) throw internal_error("em_r22 repetition");
  TermPtr root = units_concat(bu, 0, static_cast<int>(bu.size() / n));
  Bindings b;
  b.term("x", root).num("n", n).num("q", pw->shift());
  r.apply(RuleId::R2_2, Dir::fwd, i, i + 1, b);
}

void em_r22_rev(Region& r, int i, long long n) {
  TermPtr pw = expect_power(r.unit(i), "em_r22_rev");
  if (n < 1 || pw->shift() % n) throw internal_error("em_r22_rev exponent");
  Bindings b;
  b.term("x", pw->base()).num("n", n).num("q", pw->shift() / n);
  r.apply(RuleId::R2_2, Dir::rev, i, i + 1, b);
}

void em_split_in_base(Region& r, int u, int bi_, long long p) {
  Region br = r.base_region(u);
  em_split(br, bi_, p);
}

void em_merge_in_base(Region& r, int u, int bi_) {
  Region br = r.base_region(u);
  em_merge(br, bi_);
}

// --- derived chains ----------------------------------------------------

void chain_absorb_left(Region& r, int i) {
  TermPtr xw = expect_power(r.unit(i), "absorb_left");
  TermPtr pw = expect_power(r.unit(i + 1), "absorb_left");
  TermPtr base = pw->base();
  auto bu = content_units(base);
  TermPtr lead = expect_power(bu.front(), "absorb_left lead");
  int blen = static_cast<int>(bu.size());
  long long q = pw->shift();
  em_split(r, i + 1, 0);      // (b)^w (b)^(w+q)
  em_peel_left(r, i + 1, 1);  // b-content (b)^(w-1) (b)^(w+q)
  em_merge(r, i);             // merge x^w with the leading x-power of b
  em_fold_left(r, i, i + blen + 1, 1);
  em_merge(r, i);
  (void)lead;
  (void)q;
}

void chain_absorb_left_rev(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "absorb_left_rev");
  TermPtr base = pw->base();
  auto bu = content_units(base);
  TermPtr lead = expect_power(bu.front(), "absorb_left_rev lead");
  int blen = static_cast<int>(bu.size());
  em_split(r, i, 0);
  em_peel_left(r, i, 1);
  em_split(r, i, 0);  // split the leading x-power of the exposed copy
  em_fold_left(r, i + 1, i + 2 + blen, 1);
  em_merge(r, i + 1);
  (void)lead;
}

void chain_absorb_right(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "absorb_right");
  TermPtr base = pw->base();
  auto bu = content_units(base);
  expect_power(bu.back(), "absorb_right tail");
  int blen = static_cast<int>(bu.size());
  em_split(r, i, pw->shift());  // (b)^(w+q) (b)^w ; x^w follows
  em_peel_right(r, i + 1, 1);   // (b)^(w+q) (b)^(w-1) b x^w
  em_merge(r, i + 1 + blen);    // trailing x-power of b with x^w
  em_fold_right(r, i + 1, i + 2 + blen, 1);
  em_merge(r, i);
}

void chain_absorb_right_rev(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "absorb_right_rev");
  TermPtr base = pw->base();
  auto bu = content_units(base);
  TermPtr tail = expect_power(bu.back(), "absorb_right_rev tail");
  int blen = static_cast<int>(bu.size());
  em_split(r, i, pw->shift());
  em_peel_right(r, i + 1, 1);
  em_split(r, i + 1 + blen, tail->shift());
  em_fold_right(r, i + 1, i + 2 + blen, 1);
  em_merge(r, i);
}

void chain_pull_right(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "pull_right");
  TermPtr base = pw->base();
  auto bu = content_units(base);
  TermPtr lead = expect_power(bu.front(), "pull_right lead");
  TermPtr xw = expect_power(r.unit(i + 1), "pull_right xw");
  if (!term_eq(xw->base(), lead->base()) || xw->shift() != 0)
    throw internal_error("pull_right needs a matching x^w");
  em_split_in_base(r, i, 0, 0);  // base = x^w x^(w+p) y
  Bindings b;
  b.term("x", lim0(lead->base())).term("y", base).num("q", pw->shift());
  r.apply(RuleId::R2_5, Dir::fwd, i, i + 2, b);
  chain_absorb_left(r, i);
}

void chain_pull_right_rev(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "pull_right_rev");
  auto bu = content_units(pw->base());
  TermPtr lead = expect_power(bu.front(), "pull_right_rev lead");
  TermPtr tail = expect_power(bu.back(), "pull_right_rev tail");
  if (!term_eq(tail->base(), lead->base()) || tail->shift() != 0)
    throw internal_error("pull_right_rev needs trailing x^w");
  TermPtr inner = units_concat(bu, 0, static_cast<int>(bu.size()) - 1);
  chain_absorb_left_rev(r, i);
  Bindings b;
  b.term("x", lim0(lead->base())).term("y", inner).num("q", pw->shift());
  r.apply(RuleId::R2_5, Dir::rev, i, i + 2, b);
  em_merge_in_base(r, i, 0);
}

void chain_pull_left(Region& r, int i) {
  TermPtr xw = expect_power(r.unit(i), "pull_left xw");
  TermPtr pw = expect_power(r.unit(i + 1), "pull_left");
  TermPtr base = pw->base();
  auto bu = content_units(base);
  TermPtr tail = expect_power(bu.back(), "pull_left tail");
  if (!term_eq(xw->base(), tail->base()) || xw->shift() != 0)
    throw internal_error("pull_left needs a matching x^w");
  em_split_in_base(r, i + 1, static_cast<int>(bu.size()) - 1, tail->shift());
  Bindings b;
  b.term("x", lim0(tail->base())).term("y", base).num("q", pw->shift());
  r.apply(RuleId::R2_5, Dir::rev, i, i + 2, b);
  chain_absorb_right(r, i);
}

void chain_pull_left_rev(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "pull_left_rev");
  auto bu = content_units(pw->base());
  TermPtr lead = expect_power(bu.front(), "pull_left_rev lead");
  TermPtr tail = expect_power(bu.back(), "pull_left_rev tail");
  if (lead->shift() != 0 || !term_eq(lead->base(), tail->base()))
    throw internal_error("pull_left_rev needs leading x^w");
  TermPtr inner = units_concat(bu, 1, static_cast<int>(bu.size()));
  chain_absorb_right_rev(r, i);
  Bindings b;
  b.term("x", lim0(lead->base())).term("y", inner).num("q", pw->shift());
  r.apply(RuleId::R2_5, Dir::fwd, i, i + 2, b);
  Region br = r.base_region(i + 1);
  em_merge(br, static_cast<int>(br.units().size()) - 2);
}

void chain_collapse_left(Region& r, int i) {
  TermPtr pw = expect_power(r.unit(i), "collapse_left");
  if (pw->shift() != 0) throw internal_error("collapse_left shift");
  auto bu = content_units(pw->base());
  TermPtr lead = expect_power(bu.front(), "collapse_left lead");
  TermPtr xp = expect_power(r.unit(i + 1), "collapse_left xp");
  em_split(r, i + 1, 0);
  chain_pull_right(r, i);
  em_split_in_base(r, i, 0, 0);
  em_rlg(r, i);
  em_merge(r, i);
  (void)lead;
  (void)xp;
}

void chain_collapse_left_rev(Region& r, int i, const TermPtr& y, long long q) {
  TermPtr xp = expect_power(r.unit(i), "collapse_left_rev");
  em_split(r, i, 0);
  em_rlg_rev(r, i, concat2(limit(xp->base(), q), y));
  em_merge_in_base(r, i, 0);
  chain_pull_right_rev(r, i);
  em_merge(r, i + 1);
}

void chain_collapse_right(Region& r, int i) {
  TermPtr xp = expect_power(r.unit(i), "collapse_right");
  TermPtr pw = expect_power(r.unit(i + 1), "collapse_right pw");
  if (pw->shift() != 0) throw internal_error("collapse_right shift");
  auto bu = content_units(pw->base());
  TermPtr tail = expect_power(bu.back(), "collapse_right tail");
  em_split(r, i, xp->shift());
  chain_pull_left(r, i + 1);
  Region br = r.base_region(i + 1);
  em_split(br, static_cast<int>(br.units().size()) - 1, tail->shift());
  em_rlg(r, i + 1);
  em_merge(r, i);
}

void chain_collapse_right_rev(Region& r, int i, const TermPtr& y, long long q) {
  TermPtr xp = expect_power(r.unit(i), "collapse_right_rev");
  em_split(r, i, xp->shift());
  em_rlg_rev(r, i + 1, concat2(y, limit(xp->base(), q)));
  {
    Region br = r.base_region(i + 1);
    em_merge(br, static_cast<int>(br.units().size()) - 2);
  }
  chain_pull_left_rev(r, i + 1);
  em_merge(r, i);
}

// --- macro expansions ----------------------------------------------------

namespace {

void expand_fwd(Region& rg, RuleId rule, const Bindings& bind);

void expand_rev(Region& rg, RuleId rule, const Bindings& bind) {
  Rewriter& rw = *rg.rw;
  TermPtr cur = rw.term();
  TermPtr rhs_inst = rule_rhs(rule, bind);
  if (!term_eq(subterm_at(cur, rg.pos()), rhs_inst))
    throw internal_error("macro reverse: instance mismatch");
  TermPtr lhs_inst = rule_lhs(rule, bind);
  TermPtr target = replace_at(cur, rg.pos(), lhs_inst);
  Rewriter scratch(target);
  Region srg{&scratch, rg.path, rg.b, unit_count(lhs_inst)};
  expand_fwd(srg, rule, bind);
  if (!term_eq(scratch.term(), cur))
    throw internal_error("macro reverse: forward replay mismatch");
  std::vector<TermPtr> states{target};
  for (const auto& s : scratch.steps())
    states.push_back(apply_step(states.back(), s));
  for (std::size_t k = scratch.steps().size(); k-- > 0;)
    rw.apply(invert_step(states[k], scratch.steps()[k]));
  rg.len = unit_count(lhs_inst);
}

void emit_sub(Region& r, int i, int j, RuleId rule, Dir dir, Bindings bind) {
  emit_rule(r, i, j, rule, dir, bind);
}

void expand_d31(Region& r, const Bindings& bind) {
  TermPtr u = bt_opt(bind, "u");
  TermPtr v = bt_opt(bind, "v");
  if (!u && !v) {  // pure power base
    em_r21(r, 0);
    return;
  }
  int ulen = unit_count(u);
  em_split_in_base(r, 0, ulen, 0);  // base = u x^w x^(w+q) v
  em_peel_right(r, 0, 1);           // B^w B
  if (u) em_shift_right(r, 0, ulen);
  chain_pull_right(r, ulen);
  em_rlg(r, ulen);
  em_merge(r, ulen);
}

void expand_d32(Region& r, const Bindings&) {
  chain_collapse_right(r, 0);
}

void expand_d33a(Region& r, const Bindings& bind) {
  TermPtr x = bt(bind, "x");
  TermPtr y = bt(bind, "y");
  long long p = bi(bind, "p");
  long long q = bi(bind, "q");
  int ylen = unit_count(y);
  em_split(r, 0, p - q);  // x^(w+p-q) x^(w+q) P
  {
    Bindings b;
    b.term("x", limit(x, q)).term("y", y).num("q", -1);
    r.apply(RuleId::R2_5, Dir::rev, 1, 3, b);
  }
  // x^(w+p-q) (x^(w+q) y)^(w-1) x^(w+q)
  chain_collapse_right_rev(r, 2, y, 0);
  em_peel_left(r, 3, 1);
  em_fold_right(r, 1, 3 + ylen, 1);
  chain_collapse_left(r, 1);
  em_merge(r, 0);
}

void expand_d33b(Region& r, const Bindings& bind) {
  TermPtr x = bt(bind, "x");
  TermPtr y = bt(bind, "y");
  long long q = bi(bind, "q");
  int ylen = unit_count(y);
  em_split(r, 1, q);  // P x^(w+q) x^(w+p-q)
  {
    Bindings b;
    b.term("x", limit(x, q)).term("y", y).num("q", -1);
    r.apply(RuleId::R2_5, Dir::fwd, 0, 2, b);
  }
  // x^(w+q) (y x^(w+q))^(w-1) x^(w+p-q)
  chain_collapse_left_rev(r, 0, y, 0);
  em_peel_right(r, 0, 1);
  em_fold_left(r, 2, 2 + ylen + 2, 1);
  chain_collapse_right(r, 1);
  em_merge(r, 1);
}

void expand_d34(Region& r, const Bindings& bind) {
  TermPtr x = bt(bind, "x");
  TermPtr y = bt_opt(bind, "y");
  TermPtr z = bt(bind, "z");
  TermPtr w = bt_opt(bind, "w");
  long long p = bi(bind, "p"), q = bi(bind, "q");
  long long rr = bi(bind, "r"), s = bi(bind, "s");
  TermPtr zq_w = concat2(limit(z, q), w);
  TermPtr Z = concat2(zq_w, limit(x, rr));
  int zlen = unit_count(Z);
  int ylen = unit_count(y);
  chain_collapse_right_rev(r, 0, zq_w, rr);
  // x^(w+p) Z^w y (Zy)^(w-1) z^(w+s)
  em_peel_right(r, 1, 1);
  em_fold_left(r, 2, 2 + zlen + ylen + 1, 1);
  // x^(w+p) Z^(w-1) (Zy)^w z^(w+s)
  chain_collapse_left(r, 2);
  // x^(w+p) (z^(w+q) w x^(w+r))^(w-1) z^(w+s)
  {
    Bindings b;
    b.term("x", x).term("y", zq_w).num("p", p).num("q", rr);
    emit_sub(r, 0, 2, RuleId::D3_3a, Dir::fwd, b);
  }
  {
    Bindings b;
    b.term("x", z).term("y", concat2(w, lim0(x))).num("p", s).num("q", q);
    emit_sub(r, 1, 3, RuleId::D3_3b, Dir::fwd, b);
  }
}

void expand_d35(Region& r, const Bindings& bind) {
  TermPtr x = bt(bind, "x");
  TermPtr y = bt(bind, "y");
  long long p = bi(bind, "p"), q = bi(bind, "q");
  int ylen = unit_count(y);
  em_split(r, 0, p - q);
  em_fold_left(r, 1, 1 + 1 + ylen + 1, 1);
  chain_collapse_left(r, 1);
  em_merge(r, 0);
}

void expand_d36(Region& r, const Bindings& bind) {
  TermPtr x = bt(bind, "x");
  TermPtr y = bt(bind, "y");
  TermPtr z = bt(bind, "z");
  long long p = bi(bind, "p"), q = bi(bind, "q"), rr = bi(bind, "r");
  long long Q = q - p - rr;
  int ylen = unit_count(y);
  {
    Bindings b;
    b.term("x", x).term("y", y).num("p", q).num("q", p);
    emit_sub(r, 0, 2, RuleId::D3_3b, Dir::fwd, b);
  }
  {
    Bindings b;
    b.term("x", x).term("y", z).num("p", q - p).num("q", rr);
    emit_sub(r, 1, 3, RuleId::D3_3a, Dir::fwd, b);
  }
  {
    Bindings b;
    b.term("x", x).term("y", z).num("p", 0).num("q", -Q);
    emit_sub(r, 1, 3, RuleId::D3_3a, Dir::rev, b);
  }
  // (x^w y)^(w-1) x^w (z x^(w-Q))^(w-1)
  chain_pull_left(r, 1);
  TermPtr C = concat({lim0(x), z, limit(x, checked_shift(-Q))});
  int clen = unit_count(C);
  chain_absorb_right_rev(r, 1);
  // (x^w y)^(w-1) C^(w-1) x^w
  chain_collapse_right_rev(r, 2, concat2(C, y), 0);
  em_peel_left(r, 3, 1);
  // ... C^(w-1) x^w C y x^w (Cyx^w)^(w-1)
  em_merge(r, 2);  // x^w with C's leading x^w
  em_fold_right(r, 1, 2 + clen, 1);
  // (x^w y)^(w-1) C^w y x^w (Cyx^w)^(w-1)
  {
    Region br = r.base_region(1);
    em_split(br, static_cast<int>(br.units().size()) - 1, -Q);
  }
  em_rlg(r, 1);
  // (x^w y)^(w-1) x^w y x^w (Cyx^w)^(w-1)
  em_fold_right(r, 0, 2 + ylen, 1);
  chain_collapse_left(r, 0);
  chain_absorb_left(r, 0);
}

struct PortionSplit {
  TermPtr u, x, y, v;  // shared head word/base and tail base/word
  int ulen, vlen;
  long long first_shift, last_shift;
  int len;  // content units
};

PortionSplit portion_split(const TermPtr& t) {
  RankConfig cfg = rank_configuration(t);
  PortionSplit ps;
  ps.u = cfg.rho.front();
  ps.v = cfg.rho.back();
  ps.x = cfg.pi.front();
  ps.y = cfg.pi.back();
  ps.ulen = unit_count(ps.u);
  ps.vlen = unit_count(ps.v);
  ps.first_shift = cfg.shifts.front();
  ps.last_shift = cfg.shifts.back();
  ps.len = unit_count(t);
  return ps;
}

void expand_c321(Region& r, const Bindings& bind) {
  TermPtr sigma = bt(bind, "sigma");
  TermPtr tau = bt(bind, "tau");
  PortionSplit S = portion_split(sigma);
  PortionSplit T = portion_split(tau);
  int slen = S.len, tlen = T.len;
  int ulen = S.ulen, vlen = S.vlen;
  // expose u x^w ... y^w v on the sigma copy (last split first)
  em_split(r, slen - vlen - 1, S.last_shift);
  em_split(r, ulen, 0);
  // and inside the base, all four splits right to left
  em_split_in_base(r, slen + 2, tlen + slen - vlen - 1, S.last_shift);
  em_split_in_base(r, slen + 2, tlen + ulen, 0);
  em_split_in_base(r, slen + 2, tlen - T.vlen - 1, T.last_shift);
  em_split_in_base(r, slen + 2, T.ulen, 0);
  TermPtr sIn = r.slice_term(ulen + 1, slen + 1 - vlen);  // sigma inner
  Region tb = r.base_region(slen + 2);
  auto tbu = tb.units();
  TermPtr tIn = units_concat(tbu, T.ulen + 1, tlen + 1 - T.vlen);
  // shift the trailing y^w v into the base
  em_shift_left(r, slen + 1 - vlen, 1 + vlen);
  // [u x^w sIn POW y^w v]
  TermPtr W = concat({S.v, S.u, lim0(S.x), tIn, lim0(S.y), S.v, S.u});
  {
    Bindings b;
    b.term("x", S.x).term("y", sIn).term("z", S.y).term("w", W);
    b.num("p", 0).num("q", 0).num("r", 0).num("s", 0);
    int sl = slen - ulen - vlen;  // sigma inner units
    emit_sub(r, ulen, ulen + sl + 3, RuleId::D3_4, Dir::fwd, b);
  }
  {
    Bindings b;
    b.term("x", S.x).term("y", tIn).term("z", S.y).term("w", W);
    b.num("p", 0).num("q", 0).num("r", 0).num("s", 0);
    emit_sub(r, ulen, ulen + 3, RuleId::D3_4, Dir::rev, b);
  }
  // [u x^w tIn POW2 y^w v]
  int tl = tlen - T.ulen - T.vlen;  // tau inner units
  em_r22(r, ulen + 1 + tl, 2);
  em_shift_left(r, ulen, 1 + tl);
  if (S.u) em_shift_left(r, 0, ulen);
  em_fold_right(r, 0, r.len, 1);
  // single power with base u x^w tIn y^w v
  em_merge_in_base(r, 0, ulen + tl);
  em_merge_in_base(r, 0, ulen);
}

void expand_c322(Region& r, const Bindings& bind) {
  TermPtr sigma = bt(bind, "sigma");
  TermPtr tau = bt(bind, "tau");
  PortionSplit S = portion_split(sigma);
  PortionSplit T = portion_split(tau);
  int ulen = S.ulen;
  em_split_in_base(r, 0, ulen, 0);
  em_split_in_base(r, 1, ulen, 0);
  Region sb = r.base_region(0);
  auto sbu = sb.units();
  TermPtr sIn = units_concat(sbu, ulen + 1, static_cast<int>(sbu.size()));
  Region tb = r.base_region(1);
  auto tbu = tb.units();
  TermPtr tIn = units_concat(tbu, ulen + 1, static_cast<int>(tbu.size()));
  int tl = unit_count(tIn), sl = unit_count(sIn);
  em_peel_right(r, 1, 1);
  em_r22_rev(r, 1, 2);
  // sP (t't')^(w-1) u x^w tIn
  if (S.u) em_shift_right(r, 1, ulen);
  if (S.u) em_shift_right(r, 0, ulen);
  em_shift_right(r, ulen + 1, 1);
  // u (x^w sIn u)^(w-1) x^w (tIn u x^w tIn u x^w)^(w-1) tIn
  {
    Bindings b;
    b.term("x", S.x).term("y", concat2(sIn, S.u));
    b.term("z", concat({tIn, S.u, lim0(S.x), tIn, S.u}));
    b.num("p", 0).num("q", 0).num("r", 0);
    emit_sub(r, ulen, ulen + 3, RuleId::D3_6, Dir::fwd, b);
  }
  chain_pull_right_rev(r, ulen);
  if (S.u) em_shift_left(r, 0, ulen);
  // contract inside the base, right to left
  {
    Region br = r.base_region(0);
    em_merge(br, 3 * ulen + 2 * tl + 2);
    Region br2 = r.base_region(0);
    em_merge(br2, 2 * ulen + tl + 1);
    Region br3 = r.base_region(0);
    em_merge(br3, ulen);
  }
  em_merge(r, 1 + ulen);
  (void)T;
  (void)sl;
}

void expand_c323(Region& r, const Bindings& bind) {
  TermPtr sigma = bt(bind, "sigma");
  TermPtr tau = bt(bind, "tau");
  PortionSplit S = portion_split(sigma);
  PortionSplit T = portion_split(tau);
  int vlen = S.vlen;
  int slen = S.len, tlen = T.len;
  em_split_in_base(r, 0, slen - vlen - 1, S.last_shift);
  em_split_in_base(r, 1, tlen - vlen - 1, T.last_shift);
  Region sb = r.base_region(0);
  auto sbu = sb.units();
  TermPtr sIn = units_concat(sbu, 0, slen - vlen);  // ends with y^(w+bs)
  Region tb = r.base_region(1);
  auto tbu = tb.units();
  TermPtr tIn = units_concat(tbu, 0, tlen - vlen);
  int sl = slen - vlen, tl = tlen - vlen;
  em_peel_left(r, 0, 1);
  em_r22_rev(r, sl + 1 + vlen, 2);
  // sIn y^w v (s's')^(w-1) tP
  if (S.v) em_shift_left(r, sl + 1, vlen);
  if (S.v) em_shift_left(r, sl + 2, vlen);
  em_shift_left(r, sl, 1);
  // sIn (y^w v sIn y^w v sIn)^(w-1) y^w (v tIn y^w)^(w-1) v
  {
    Bindings b;
    b.term("x", S.y).term("y", concat({S.v, sIn, lim0(S.y), S.v, sIn}));
    b.term("z", concat2(S.v, tIn));
    b.num("p", 0).num("q", 0).num("r", 0);
    emit_sub(r, sl, sl + 3, RuleId::D3_6, Dir::fwd, b);
  }
  chain_pull_left_rev(r, sl);
  if (S.v) em_shift_right(r, sl + 1, vlen);
  {
    Region br = r.base_region(sl + 1 + vlen);
    em_merge(br, tl + 1 + 2 * vlen + 2 * sl);
    Region br2 = r.base_region(sl + 1 + vlen);
    em_merge(br2, tl + vlen + sl);
    Region br3 = r.base_region(sl + 1 + vlen);
    em_merge(br3, tl - 1);
  }
  em_merge(r, sl - 1);
}

void expand_fwd(Region& rg, RuleId rule, const Bindings& bind) {
  switch (rule) {
    case RuleId::D3_1:
      expand_d31(rg, bind);
      return;
    case RuleId::D3_2:
      expand_d32(rg, bind);
      return;
    case RuleId::D3_3a:
      expand_d33a(rg, bind);
      return;
    case RuleId::D3_3b:
      expand_d33b(rg, bind);
      return;
    case RuleId::D3_4:
      expand_d34(rg, bind);
      return;
    case RuleId::D3_5:
      expand_d35(rg, bind);
      return;
    case RuleId::D3_6:
      expand_d36(rg, bind);
      return;
    case RuleId::C3_2_1:
      expand_c321(rg, bind);
      return;
    case RuleId::C3_2_2:
      expand_c322(rg, bind);
      return;
    case RuleId::C3_2_3:
      expand_c323(rg, bind);
      return;
    default:
      throw internal_error("expand_fwd on a base rule");
  }
}

}  // namespace

void emit_rule(Region& r, int i, int j, RuleId rule, Dir dir,
               const Bindings& bind) {
  if (!is_macro(rule)) {
    r.apply(rule, dir, i, j, bind);
    return;
  }
  Region sub = r.sub(i, j);
  if (dir == Dir::fwd)
    expand_fwd(sub, rule, bind);
  else
    expand_rev(sub, rule, bind);
  r.len += sub.len - (j - i);
}

void emit_macro_steps(Rewriter& rw, const Pos& span, RuleId rule, Dir dir,
                      const Bindings& bind) {
  if (!is_macro(rule)) {
    rw.apply(rule, dir, span, bind);
    return;
  }
  Region rg = Region::of(rw, span);
  if (dir == Dir::fwd)
    expand_fwd(rg, rule, bind);
  else
    expand_rev(rg, rule, bind);
}

std::vector<RewriteStep> expand_macro(const TermPtr& term,
                                      const RewriteStep& step) {
  if (!is_macro(step.rule)) return {step};
  Rewriter rw(term);
  emit_macro_steps(rw, span_of(term, step.pos), step.rule, step.dir, step.bind);
  if (!term_eq(rw.term(), apply_step(term, step)))
    throw internal_error("macro expansion does not reproduce the step");
  return rw.steps();
}

Derivation flatten(const Derivation& d) {
  Derivation out;
  out.source = d.source;
  TermPtr cur = d.source;
  for (const auto& s : d.steps) {
    if (is_macro(s.rule)) {
      for (const auto& p : expand_macro(cur, s)) {
        cur = apply_step(cur, p);
        out.steps.push_back(p);
      }
    } else {
      cur = apply_step(cur, s);
      out.steps.push_back(s);
    }
  }
  out.target = cur;
  if (!term_eq(cur, d.target))
    throw internal_error("flatten replay mismatch");
  return out;
}

}  // namespace kterm
