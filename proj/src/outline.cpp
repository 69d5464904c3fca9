#include "kterm/outline.hpp"

#include <functional>

namespace kterm {

bool vvar_eq(const VVar& a, const VVar& b) {
  return a.kind == b.kind && a.x == b.x && a.u == b.u && a.y == b.y;
}

AffineExp aff(long long coef, long long offset) {
  checked_shift(coef);
  checked_shift(offset);
  return {coef, offset};
}

AffineExp aff_add(const AffineExp& a, const AffineExp& b) {
  return aff(a.coef + b.coef, a.offset + b.offset);
}

AffineExp aff_neg(const AffineExp& a) { return aff(-a.coef, -a.offset); }

int aff_sign(const AffineExp& a, long long qmin) {
  if (a.coef == 0) return a.offset > 0 ? 1 : a.offset < 0 ? -1 : 0;
  long long at = a.coef * qmin + a.offset;
  if (a.coef > 0 && at > 0) return 1;
  if (a.coef < 0 && at < 0) return -1;
  throw internal_error("sign-ambiguous exponent run");
}

bool run_eq(const Run& a, const Run& b) {
  return vvar_eq(a.var, b.var) && a.exp.coef == b.exp.coef &&
         a.exp.offset == b.exp.offset;
}

bool outline_eq(const OutlineWord& a, const OutlineWord& b) {
  if (a.runs.size() != b.runs.size()) return false;
  for (std::size_t i = 0; i < a.runs.size(); ++i)
    if (!run_eq(a.runs[i], b.runs[i])) return false;
  return true;
}

long long q_param(const TermPtr& t) {
  long long mx = 0;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    if (!u) return;
    if (u->kind() == Kind::power) {
      mx = std::max(mx, u->shift() < 0 ? -u->shift() : u->shift());
      walk(u->base());
    } else if (u->kind() == Kind::product) {
      for (const auto& c : u->children()) walk(c);
    }
  };
  walk(t);
  return 1 + mx;
}

namespace {

std::string word_of(const TermPtr& t) {
  if (!t) return "";
  if (t->kind() != Kind::word) throw internal_error("expected a word context");
  return t->letters();
}

VVar var_initial(const std::string& u, const std::string& x) {
  return {VVar::Kind::initial, x, u, ""};
}
VVar var_final(const std::string& y, const std::string& v) {
  return {VVar::Kind::final_, y, v, ""};
}
VVar var_crucial(const std::string& x, const std::string& u,
                 const std::string& y) {
  return {VVar::Kind::crucial, x, u, y};
}
VVar var_base(const std::string& x) { return {VVar::Kind::base, x, "", ""}; }

// outline fragment of one token: the initial data, the inner runs, the
// final data
struct Fragment {
  std::string iu, ix;  // initial word and base
  std::vector<std::pair<Run, int>> mid;  // runs with a block parity marker
  std::string ty, tv;  // final base and word
};

// rank-1 content: i b^q1 c b^q2 ... b^qn t
Fragment rank1_fragment(const AtomSeq& a) {
  Fragment f;
  std::string pending;
  bool have_first = false;
  std::string prev_base;
  for (const auto& at : a) {
    if (!at.is_limit()) {
      pending += at.letter;
      continue;
    }
    if (!have_first) {
      f.iu = pending;
      f.ix = at.base;
      have_first = true;
    } else {
      f.mid.push_back({{var_crucial(prev_base, pending, at.base), aff(0, 1)}, 0});
    }
    f.mid.push_back({{var_base(at.base), aff(1, at.shift)}, 0});
    prev_base = at.base;
    pending.clear();
  }
  if (!have_first) throw internal_error("rank-1 fragment without a limit");
  f.ty = prev_base;
  f.tv = pending;
  return f;
}

// inverted block of one rank-2 limit term base^(w-1)
Fragment inverted_fragment(const AtomSeq& base) {
  Fragment f;
  RankConfig cfg;  // decompose manually over atoms
  std::vector<std::string> xs, us;
  std::vector<long long> qs;
  std::string pending;
  for (const auto& at : base) {
    if (!at.is_limit()) {
      pending += at.letter;
      continue;
    }
    us.push_back(pending);
    pending.clear();
    xs.push_back(at.base);
    qs.push_back(at.shift);
  }
  us.push_back(pending);  // u_n
  int n = static_cast<int>(xs.size());
  if (n == 0) throw internal_error("rank-2 base without a limit");
  f.iu = us[0];
  f.ix = xs[0];
  f.ty = xs[n - 1];
  f.tv = us[n];
  VVar wrap = var_crucial(xs[n - 1], us[n] + us[0], xs[0]);
  f.mid.push_back({{wrap, aff(0, -1)}, 1});
  for (int j = n - 1; j >= 0; --j) {
    f.mid.push_back({{var_base(xs[j]), aff(-1, -qs[j])}, 1});
    if (j > 0)
      f.mid.push_back({{var_crucial(xs[j - 1], us[j], xs[j]), aff(0, -1)}, 1});
  }
  f.mid.push_back({{wrap, aff(0, -1)}, 1});
  return f;
}

struct Tagged {
  OutlineWord word;
  std::vector<int> block;  // per run
};

Tagged build_outline(const TermPtr& t, long long qmin) {
  int r = rank(t);
  Tagged out;
  out.word.qmin = qmin;
  auto push = [&](const Run& run, int blk) {
    out.word.runs.push_back(run);
    out.block.push_back(blk);
  };
  if (r == 0 || r > 2)
    throw precondition_error("outline needs rank 1 or 2");
  if (r == 1) {
    if (!is_canonical_rank1(t))
      throw precondition_error("outline needs a rank-1 normal form");
    Fragment f = rank1_fragment(atoms_of(t));
    push({var_initial(f.iu, f.ix), aff(0, 1)}, 0);
    for (auto& pr : f.mid) push(pr.first, 0);
    push({var_final(f.ty, f.tv), aff(0, 1)}, 0);
    return out;
  }
  RankConfig cfg = rank_configuration(t);
  for (long long q : cfg.shifts)
    if (q != -1)
      throw precondition_error("outline needs rank-2 exponents w-1");
  if (!is_canonical_rank1(p_expansion(t, 2)))
    throw precondition_error("outline needs a semi-canonical term");
  // fold the top-level tokens, joining fragments with crucial connectors
  bool started = false;
  std::string pending;  // leading rank-0 material
  std::string cy, cv;   // current final portion data
  int blk = 0;          // current positive block index
  std::string iu, ix;
  std::vector<std::pair<Run, int>> runs;  // with absolute block index
  auto join = [&](const Fragment& f, bool negative) {
    if (!started) {
      iu = pending + f.iu;
      ix = f.ix;
      started = true;
    } else {
      runs.push_back(
          {{var_crucial(cy, cv + pending + f.iu, f.ix), aff(0, 1)}, blk});
    }
    pending.clear();
    for (const auto& [run, par] : f.mid)
      runs.push_back({run, par ? blk + 1 : blk});
    if (negative) blk += 2;
    cy = f.ty;
    cv = f.tv;
  };
  for (int j = 0; j < cfg.length(); ++j) {
    if (cfg.rho[j]) {
      if (rank(cfg.rho[j]) == 0)
        pending += word_of(cfg.rho[j]);
      else
        join(rank1_fragment(atoms_of(cfg.rho[j])), false);
    }
    join(inverted_fragment(atoms_of(cfg.pi[j])), true);
  }
  if (cfg.rho.back()) {
    if (rank(cfg.rho.back()) == 0)
      cv += word_of(cfg.rho.back());
    else
      join(rank1_fragment(atoms_of(cfg.rho.back())), false);
  }
  push({var_initial(iu, ix), aff(0, 1)}, 0);
  for (auto& [run, b] : runs) push(run, b);
  push({var_final(cy, cv), aff(0, 1)}, blk);
  return out;
}

}  // namespace

OutlineWord outline(const TermPtr& t, long long qmin) {
  long long need = q_param(t);
  if (qmin < need) throw precondition_error("parameter bound too small");
  return build_outline(t, qmin).word;
}

OutlineWord outline(const TermPtr& t) { return outline(t, q_param(t)); }

OutlineWord reduce_free(const OutlineWord& w) {
  OutlineWord out;
  out.qmin = w.qmin;
  for (const Run& r : w.runs) {
    if (r.exp.is_zero()) continue;
    if (!out.runs.empty() && vvar_eq(out.runs.back().var, r.var)) {
      AffineExp sum = aff_add(out.runs.back().exp, r.exp);
      if (sum.is_zero()) {
        out.runs.pop_back();
      } else {
        out.runs.back().exp = sum;
      }
      continue;
    }
    out.runs.push_back(r);
  }
  // a pop may expose a new adjacent pair; iterate to the fixed point
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Run> next;
    for (const Run& r : out.runs) {
      if (!next.empty() && vvar_eq(next.back().var, r.var)) {
        AffineExp sum = aff_add(next.back().exp, r.exp);
        changed = true;
        if (sum.is_zero())
          next.pop_back();
        else
          next.back().exp = sum;
      } else {
        next.push_back(r);
      }
    }
    out.runs = std::move(next);
  }
  for (const Run& r : out.runs) aff_sign(r.exp, out.qmin);  // sign sanity
  return out;
}

OutlineWord instantiate(const OutlineWord& w, long long qval) {
  if (qval < w.qmin) throw precondition_error("parameter below the bound");
  OutlineWord out;
  out.qmin = w.qmin;
  for (const Run& r : w.runs) {
    AffineExp e = aff(0, checked_shift(r.exp.coef * qval + r.exp.offset));
    if (e.is_zero()) continue;
    out.runs.push_back({r.var, e});
  }
  return out;
}

namespace {

std::string field(const std::string& s) { return s.empty() ? "_" : s; }

std::string exp_text(const AffineExp& e) {
  if (e.coef == 0) return "^" + std::to_string(e.offset);
  std::string q;
  if (e.coef == 1)
    q = "q";
  else if (e.coef == -1)
    q = "-q";
  else
    q = std::to_string(e.coef) + "q";
  if (e.offset > 0) q += "+" + std::to_string(e.offset);
  if (e.offset < 0) q += std::to_string(e.offset);
  return "^(" + q + ")";
}

}  // namespace

std::string outline_to_text(const OutlineWord& w) {
  std::string out;
  for (const Run& r : w.runs) {
    if (!out.empty()) out += ' ';
    switch (r.var.kind) {
      case VVar::Kind::initial:
        out += "i{" + field(r.var.u) + "," + r.var.x + "}";
        break;
      case VVar::Kind::final_:
        out += "t{" + r.var.x + "," + field(r.var.u) + "}";
        break;
      case VVar::Kind::crucial:
        out += "c{" + r.var.x + "," + field(r.var.u) + "," + r.var.y + "}";
        if (!(r.exp.coef == 0 && r.exp.offset == 1)) out += exp_text(r.exp);
        break;
      case VVar::Kind::base:
        out += "b{" + r.var.x + "}" + exp_text(r.exp);
        break;
    }
  }
  return out;
}

int crucial_length(const std::vector<Run>& runs) {
  int n = 0;
  for (const Run& r : runs)
    if (r.var.kind == VVar::Kind::crucial) {
      long long c = r.exp.offset < 0 ? -r.exp.offset : r.exp.offset;
      n += static_cast<int>(c);
    }
  return n;
}

BlockAnalysis block_analysis(const TermPtr& t) {
  if (rank(t) != 2 || !is_canonical_LG(t))
    throw precondition_error("block analysis needs a rank-2 normal form");
  Tagged tg = build_outline(t, q_param(t));
  long long qmin = tg.word.qmin;
  int nblocks = 1;
  for (int b : tg.block) nblocks = std::max(nblocks, b + 1);

  struct Item {
    Run run;
    int block;
    AffineExp lost_left{};   // magnitude cancelled by material on the left
    AffineExp lost_right{};
    bool crucial_cancelled_left = false;
    bool crucial_cancelled_right = false;
    bool alive = true;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < tg.word.runs.size(); ++i)
    items.push_back({tg.word.runs[i], tg.block[i], {}, {}, false, false, true});

  auto sgn = [&](const AffineExp& e) { return aff_sign(e, qmin); };
  auto abs_of = [&](const AffineExp& e) {
    return sgn(e) < 0 ? aff_neg(e) : e;
  };

  // leftmost spur cancellation over the live items
  for (;;) {
    int a = -1, b = -1;
    for (int i = 0; i < static_cast<int>(items.size()) && a < 0; ++i) {
      if (!items[i].alive) continue;
      int j = i + 1;
      while (j < static_cast<int>(items.size()) && !items[j].alive) ++j;
      if (j >= static_cast<int>(items.size())) break;
      if (vvar_eq(items[i].run.var, items[j].run.var) &&
          sgn(items[i].run.exp) != sgn(items[j].run.exp)) {
        a = i;
        b = j;
      } else {
        i = j - 1;
      }
    }
    if (a < 0) break;
    AffineExp sum = aff_add(items[a].run.exp, items[b].run.exp);
    AffineExp ca = abs_of(items[a].run.exp);
    AffineExp cb = abs_of(items[b].run.exp);
    bool crucial = items[a].run.var.kind == VVar::Kind::crucial;
    if (sum.is_zero()) {
      items[a].alive = items[b].alive = false;
      items[a].lost_right = aff_add(items[a].lost_right, ca);
      items[b].lost_left = aff_add(items[b].lost_left, cb);
      if (crucial) {
        items[a].crucial_cancelled_right = true;
        items[b].crucial_cancelled_left = true;
      }
    } else if (sgn(sum) == sgn(items[a].run.exp)) {
      // the left run survives with a reduced exponent
      items[a].run.exp = sum;
      items[a].lost_right = aff_add(items[a].lost_right, cb);
      items[b].alive = false;
      items[b].lost_left = aff_add(items[b].lost_left, cb);
      if (crucial) items[b].crucial_cancelled_left = true;
    } else {
      items[b].run.exp = sum;
      items[b].lost_left = aff_add(items[b].lost_left, ca);
      items[a].alive = false;
      items[a].lost_right = aff_add(items[a].lost_right, ca);
      if (crucial) items[a].crucial_cancelled_right = true;
    }
  }

  BlockAnalysis out;
  out.qmin = qmin;
  out.blocks.resize(nblocks);
  for (int b = 0; b < nblocks; ++b) out.blocks[b].negative = b % 2 == 1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& blk = out.blocks[items[i].block];
    blk.runs.push_back(tg.word.runs[i]);
    if (items[i].alive) {
      blk.remainder.push_back(items[i].run);
      out.root.push_back(items[i].run);
    }
    if (items[i].crucial_cancelled_left) ++blk.d_left;
    if (items[i].crucial_cancelled_right) ++blk.d_right;
  }
  // the cancelled fringe words, read from the ends of each block
  for (int b = 0; b < nblocks; ++b) {
    auto& blk = out.blocks[b];
    std::vector<int> idx;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].block == b) idx.push_back(static_cast<int>(i));
    std::size_t f = 0;
    while (f < idx.size() && !items[idx[f]].alive) {
      if (!items[idx[f]].lost_left.is_zero() ||
          !items[idx[f]].lost_right.is_zero())
        blk.cancelled_prefix.push_back(
            {tg.word.runs[idx[f]].var, abs_of(tg.word.runs[idx[f]].exp)});
      ++f;
    }
    if (f < idx.size() && !items[idx[f]].lost_left.is_zero())
      blk.cancelled_prefix.push_back(
          {tg.word.runs[idx[f]].var, items[idx[f]].lost_left});
    std::size_t l = idx.size();
    while (l > f && !items[idx[l - 1]].alive) --l;
    if (l > f && !items[idx[l - 1]].lost_right.is_zero())
      blk.cancelled_suffix.push_back(
          {tg.word.runs[idx[l - 1]].var, items[idx[l - 1]].lost_right});
    for (std::size_t i = l; i < idx.size(); ++i)
      if (!items[idx[i]].lost_left.is_zero() ||
          !items[idx[i]].lost_right.is_zero())
        blk.cancelled_suffix.push_back(
            {tg.word.runs[idx[i]].var, abs_of(tg.word.runs[idx[i]].exp)});
  }
  return out;
}

}  // namespace kterm
