#include "kterm/canonical.hpp"

#include <algorithm>

namespace kterm {

namespace {

constexpr std::size_t kGuard = 1000000;

struct Ctx {
  Rewriter& rw;
  Alphabet alpha;
  void tick() const {
    if (rw.step_count() > kGuard)
      throw internal_error("normalization guard tripped");
  }
};

Atom unit_atom(const TermPtr& u) {
  if (u->kind() == Kind::word) {
    if (u->letters().size() != 1) throw internal_error("unit is a long word");
    return Atom{u->letters()[0], "", 0};
  }
  if (u->kind() == Kind::power && u->base()->kind() == Kind::word)
    return Atom{0, u->base()->letters(), u->shift()};
  throw precondition_error("content of rank > 1");
}

AtomSeq to_atoms(const std::vector<TermPtr>& units, int b, int e) {
  AtomSeq out;
  for (int i = b; i < e; ++i) out.push_back(unit_atom(units[i]));
  return out;
}

AtomSeq region_atoms(const Region& r) {
  auto us = r.units();
  return to_atoms(us, 0, static_cast<int>(us.size()));
}

// letters strictly between limit atoms
std::string letters_before(const AtomSeq& a, int i) {
  std::string out;
  int j = i - 1;
  while (j >= 0 && !a[j].is_limit()) --j;
  for (int k = j + 1; k < i; ++k) out += a[k].letter;
  return out;
}

std::string letters_after(const AtomSeq& a, int i) {
  std::string out;
  for (std::size_t k = i + 1; k < a.size() && !a[k].is_limit(); ++k)
    out += a[k].letter;
  return out;
}

int next_limit(const AtomSeq& a, int i) {
  for (std::size_t k = i + 1; k < a.size(); ++k)
    if (a[k].is_limit()) return static_cast<int>(k);
  return -1;
}

// --- the rank-1 normal form moves ---------------------------------------

struct R1Move {
  enum Kind {
    none,
    merge,         // adjacent limits, one base
    compress,      // base a proper power
    rotate,        // base not the Lyndon conjugate
    absorb_left,   // base a suffix of the word before
    absorb_right,  // base a prefix of the word after
    dmain          // base a prefix of word + next-base power
  } kind = none;
  int i = 0;     // limit atom index
  int j = 0;     // dmain: index of the next limit
  int k = 0;     // copies / power / rotation offset
  int plen = 0;  // dmain: length of the partial next-base prefix
  int lo = 0, hi = 0;  // witness span (inclusive)
};

R1Move find_rank1_move(const AtomSeq& a) {
  // bases first: merging, primitive-root compression, Lyndon rotation
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (!a[i].is_limit()) continue;
    const std::string& x = a[i].base;
    if (i + 1 < static_cast<int>(a.size()) && a[i + 1].is_limit() &&
        a[i + 1].base == x) {
      R1Move m;
      m.kind = R1Move::merge;
      m.i = i;
      m.lo = i;
      m.hi = i + 1;
      return m;
    }
    if (!is_primitive(x)) {
      auto [root, n] = primitive_root(x);
      (void)root;
      R1Move m;
      m.kind = R1Move::compress;
      m.i = i;
      m.k = n;
      m.lo = m.hi = i;
      return m;
    }
    if (!is_lyndon(x)) {
      auto [off, conj] = lyndon_rotation(x);
      (void)conj;
      R1Move m;
      m.kind = R1Move::rotate;
      m.i = i;
      m.k = off;
      m.lo = m.hi = i;
      return m;
    }
  }
  // then absorption into the limits
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (!a[i].is_limit()) continue;
    const std::string& x = a[i].base;
    int xl = static_cast<int>(x.size());
    std::string before = letters_before(a, i);
    int k = 0;
    while (static_cast<int>(before.size()) >= (k + 1) * xl &&
           before.compare(before.size() - (k + 1) * xl, xl, x) == 0)
      ++k;
    if (k > 0) {
      R1Move m;
      m.kind = R1Move::absorb_left;
      m.i = i;
      m.k = k;
      m.lo = i - k * xl;
      m.hi = i;
      return m;
    }
    std::string after = letters_after(a, i);
    k = 0;
    while (static_cast<int>(after.size()) >= (k + 1) * xl &&
           after.compare(k * xl, xl, x) == 0)
      ++k;
    if (k > 0) {
      R1Move m;
      m.kind = R1Move::absorb_right;
      m.i = i;
      m.k = k;
      m.lo = i;
      m.hi = i + k * xl;
      return m;
    }
    int j = next_limit(a, i);
    if (j >= 0 && static_cast<int>(after.size()) < xl &&
        prefix_of_word_power(x, after, a[j].base)) {
      R1Move m;
      m.kind = R1Move::dmain;
      m.i = i;
      m.j = j;
      int rest = xl - static_cast<int>(after.size());
      int zl = static_cast<int>(a[j].base.size());
      m.k = rest / zl;
      m.plen = rest % zl;
      m.lo = i;
      m.hi = j;
      return m;
    }
  }
  return {};
}

void emit_rank1_move(Ctx& cx, Region& r, const R1Move& m, const AtomSeq& a) {
  cx.tick();
  int xl = static_cast<int>(a[m.i].base.size());
  switch (m.kind) {
    case R1Move::merge:
      em_merge(r, m.i);
      return;
    case R1Move::compress:
      em_r22(r, m.i, m.k);
      return;
    case R1Move::rotate:
      em_peel_left(r, m.i, 1);
      em_shift_left(r, m.i + m.k, xl - m.k);
      return;
    case R1Move::absorb_left:
      em_fold_left(r, m.i - m.k * xl, m.i + 1, m.k);
      return;
    case R1Move::absorb_right:
      em_fold_right(r, m.i, m.i + 1 + m.k * xl, m.k);
      return;
    case R1Move::dmain: {
      int peel = m.plen > 0 ? m.k + 1 : m.k;
      int jj = m.j;
      if (peel > 0) em_peel_left(r, jj, peel);
      em_fold_right(r, m.i, m.i + 1 + xl, 1);
      return;
    }
    case R1Move::none:
      return;
  }
}

void canon1_region(Ctx& cx, Region r) {
  for (;;) {
    AtomSeq a = region_atoms(r);
    R1Move m = find_rank1_move(a);
    if (m.kind == R1Move::none) return;
    emit_rank1_move(cx, r, m, a);
  }
}

// --- rank-2 view ---------------------------------------------------------

struct R2View {
  struct Lim {
    int unit;
    AtomSeq base;
    long long shift;
  };
  std::vector<std::pair<int, int>> segs;  // n+1 unit spans
  std::vector<Lim> lims;

  AtomSeq seg_atoms(const std::vector<TermPtr>& us, int s) const {
    return to_atoms(us, segs[s].first, segs[s].second);
  }
};

R2View r2view(const TermPtr& t) {
  R2View v;
  auto us = content_units(t);
  int start = 0;
  for (int i = 0; i < static_cast<int>(us.size()); ++i) {
    if (rank(us[i]) == 2) {
      v.segs.push_back({start, i});
      v.lims.push_back({i, atoms_of(us[i]->base()), us[i]->shift()});
      start = i + 1;
    }
  }
  v.segs.push_back({start, static_cast<int>(us.size())});
  return v;
}

Region seg_region(Rewriter& rw, const R2View& v, int s) {
  return Region{&rw, {}, v.segs[s].first, v.segs[s].second - v.segs[s].first};
}

Bindings d31_bindings(const TermPtr& pi) {
  auto fs = factors(pi);
  Bindings b;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i]->kind() == Kind::power) {
      std::vector<TermPtr> head(fs.begin(), fs.begin() + i);
      std::vector<TermPtr> tail(fs.begin() + i + 1, fs.end());
      b.term("u", concat(std::move(head)));
      b.term("v", concat(std::move(tail)));
      b.term("x", fs[i]->base()).num("q", fs[i]->shift());
      return b;
    }
  }
  throw internal_error("d31 on a rank-0 term");
}

// --- semi-canonical forms -------------------------------------------------

bool degenerate_base(const AtomSeq& b, int& limidx, int& copies) {
  int li = -1;
  for (int i = 0; i < static_cast<int>(b.size()); ++i) {
    if (b[i].is_limit()) {
      if (li >= 0) return false;
      li = i;
    }
  }
  if (li < 0) return false;
  std::string around;
  for (int i = li + 1; i < static_cast<int>(b.size()); ++i) around += b[i].letter;
  for (int i = 0; i < li; ++i) around += b[i].letter;
  const std::string& x = b[li].base;
  if (around.empty() || around.size() % x.size()) return false;
  for (std::size_t i = 0; i < around.size(); ++i)
    if (around[i] != x[i % x.size()]) return false;
  limidx = li;
  copies = static_cast<int>(around.size() / x.size());
  return true;
}


// Rewrite base^(w+q0) with a dirty wrap junction: unroll to (base^m)^(w-1),
// normalize the m-fold content, and realign by shifting the longest shared
// tail of the detached left copy back into the power.
void refold_limit(Ctx& cx, int pu) {
  Region r = Region::whole(cx.rw);
  TermPtr pw = r.unit(pu);
  AtomSeq B = atoms_of(pw->base());
  long long q0 = pw->shift();
  int blen = static_cast<int>(B.size());
  long long m = 2 - q0;
  em_peel_left(r, pu, 1);
  int pu2 = pu + blen;
  em_peel_right(r, pu2, 1);
  em_r22_rev(r, pu2, m);
  canon1_region(cx, r.base_region(pu2));
  AtomSeq nb = atoms_of(subterm_at(cx.rw.term(), r.base_region(pu2).pos()));
  int kmax = std::min(blen, static_cast<int>(nb.size()) - 1);
  int kstar = 0;
  for (int k = kmax; k >= 1; --k) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      ok = atom_eq(nb[nb.size() - k + i], B[blen - k + i]);
    if (ok) {
      kstar = k;
      break;
    }
  }
  if (kstar > 0) {
    em_shift_left(r, pu2 - kstar, kstar);
    pu2 -= kstar;
    canon1_region(cx, r.base_region(pu2));
  }
  AtomSeq fin = atoms_of(subterm_at(cx.rw.term(), r.base_region(pu2).pos()));
  if (find_rank1_move(atoms_cat(fin, fin)).kind != R1Move::none)
    throw internal_error("refold left a dirty junction");
}

void degenerate_collapse(Ctx& cx, int pu) {
  Region r = Region::whole(cx.rw);
  TermPtr pw = r.unit(pu);
  AtomSeq B = atoms_of(pw->base());
  int blen = static_cast<int>(B.size());
  long long q0 = pw->shift();
  long long m = 2 - q0;
  int limidx = 0, copies = 0;
  if (!degenerate_base(B, limidx, copies))
    throw internal_error("degenerate_collapse misuse");
  int u1len = blen - limidx - 1;
  em_peel_left(r, pu, 1);
  int pu2 = pu + blen;
  em_peel_right(r, pu2, 1);
  em_r22_rev(r, pu2, m);
  canon1_region(cx, r.base_region(pu2));
  if (u1len > 0) {
    em_shift_left(r, pu2 - u1len, u1len);
    pu2 -= u1len;
  }
  canon1_region(cx, r.base_region(pu2));
  {
    Region br = r.base_region(pu2);
    auto us = br.units();
    if (us.size() != 1 || us[0]->kind() != Kind::power)
      throw internal_error("degenerate base did not collapse");
  }
  em_r21(r, pu2);
}

// one pass priority move for the semi-canonical loop; true when something
// was emitted
bool semicanon_move(Ctx& cx) {
  TermPtr t = cx.rw.term();
  if (rank(t) < 2) return false;
  R2View v = r2view(t);
  auto us = content_units(t);
  Region whole = Region::whole(cx.rw);

  // segments and bases in rank-1 normal form
  for (std::size_t s = 0; s < v.segs.size(); ++s) {
    AtomSeq a = v.seg_atoms(us, static_cast<int>(s));
    R1Move m = find_rank1_move(a);
    if (m.kind != R1Move::none) {
      Region rg = seg_region(cx.rw, v, static_cast<int>(s));
      emit_rank1_move(cx, rg, m, a);
      return true;
    }
  }
  for (std::size_t k = 0; k < v.lims.size(); ++k) {
    R1Move m = find_rank1_move(v.lims[k].base);
    if (m.kind != R1Move::none) {
      Region rg = whole.base_region(v.lims[k].unit);
      emit_rank1_move(cx, rg, m, v.lims[k].base);
      return true;
    }
  }
  // per-limit structure
  for (std::size_t k = 0; k < v.lims.size(); ++k) {
    const auto& lm = v.lims[k];
    int pu = lm.unit;
    // base that is a single limit term
    if (lm.base.size() == 1 && lm.base[0].is_limit()) {
      cx.tick();
      em_r21(whole, pu);
      return true;
    }
    // positive exponents dissolve
    if (lm.shift >= 1) {
      cx.tick();
      if (lm.shift >= 2) em_peel_right(whole, pu, lm.shift - 1);
      TermPtr pw = subterm_at(cx.rw.term(), whole.at(pu, pu + 1));
      cx.rw.apply(RuleId::D3_1, Dir::fwd, whole.at(pu, pu + 1),
                  d31_bindings(pw->base()));
      return true;
    }
    int li = 0, copies = 0;
    if (degenerate_base(lm.base, li, copies)) {
      cx.tick();
      degenerate_collapse(cx, pu);
      return true;
    }
    AtomSeq seam = atoms_cat(lm.base, lm.base);
    if (find_rank1_move(seam).kind != R1Move::none) {
      cx.tick();
      refold_limit(cx, pu);
      return true;
    }
    if (lm.shift == 0) {
      cx.tick();
      em_peel_left(whole, pu, 1);
      int pu2 = pu + static_cast<int>(lm.base.size());
      em_peel_right(whole, pu2, 1);
      em_r22_rev(whole, pu2, 2);
      return true;
    }
    if (lm.shift <= -2) {
      cx.tick();
      em_r22_rev(whole, pu, -lm.shift);
      return true;
    }
  }
  // cross-boundary on the 2-expansion
  struct Tag {
    int kind;  // 0 segment, 1 base copy
    int idx;
    int copy;
  };
  AtomSeq flat;
  std::vector<Tag> tags;
  std::vector<int> zone_start;  // per zone, atom offset
  for (std::size_t k = 0; k <= v.lims.size(); ++k) {
    AtomSeq sa = v.seg_atoms(us, static_cast<int>(k));
    for (std::size_t i = 0; i < sa.size(); ++i)
      tags.push_back({0, static_cast<int>(k), 0});
    flat.insert(flat.end(), sa.begin(), sa.end());
    if (k < v.lims.size()) {
      for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < v.lims[k].base.size(); ++i)
          tags.push_back({1, static_cast<int>(k), c});
        flat.insert(flat.end(), v.lims[k].base.begin(), v.lims[k].base.end());
      }
    }
  }
  R1Move mv = find_rank1_move(flat);
  if (mv.kind == R1Move::none) return false;
  cx.tick();
  // find the first zone change inside the witness span
  for (int p = mv.lo; p < mv.hi; ++p) {
    const Tag& a = tags[p];
    const Tag& b = tags[p + 1];
    if (a.kind == b.kind && a.idx == b.idx && a.copy == b.copy) continue;
    if (a.kind == 0 && b.kind == 1 && b.copy == 0) {
      // unroll one copy to the left
      int pu = v.lims[b.idx].unit;
      int blen = static_cast<int>(v.lims[b.idx].base.size());
      em_peel_left(whole, pu, 1);
      em_r22_rev(whole, pu + blen, 2);
      return true;
    }
    if (a.kind == 1 && a.copy == 0 && b.kind == 1 && b.copy == 1 &&
        a.idx == b.idx) {
      refold_limit(cx, v.lims[a.idx].unit);
      return true;
    }
    if (a.kind == 1 && a.copy == 1) {
      int pu = v.lims[a.idx].unit;
      em_peel_right(whole, pu, 1);
      em_r22_rev(whole, pu, 2);
      return true;
    }
    throw internal_error("unclassified boundary violation");
  }
  throw internal_error("violation without a boundary");
}

void semicanonicalize_in(Ctx& cx) {
  while (semicanon_move(cx)) cx.tick();
  if (rank(cx.rw.term()) <= 1) canon1_region(cx, Region::whole(cx.rw));
}

// --- rotation states for the rank-2 matchers -------------------------------

struct Rot {
  int net = 0;  // >0: shift right consuming net units; <0: shift left
  AtomSeq base, left, right;
};

std::vector<Rot> rotations(const AtomSeq& L, const AtomSeq& B,
                           const AtomSeq& R) {
  std::vector<Rot> out;
  out.push_back({0, B, L, R});
  int n = static_cast<int>(B.size());
  for (int j = 1; j <= static_cast<int>(L.size()); ++j) {
    bool ok = true;
    for (int i = 0; i < j && ok; ++i)
      ok = atom_eq(B[(((n - j + i) % n) + n) % n], L[L.size() - j + i]);
    if (!ok) break;
    int o = ((n - j) % n + n) % n;
    AtomSeq nb(B.begin() + o, B.end());
    nb.insert(nb.end(), B.begin(), B.begin() + o);
    AtomSeq nl(L.begin(), L.end() - j);
    AtomSeq nr(L.end() - j, L.end());
    nr.insert(nr.end(), R.begin(), R.end());
    out.push_back({-j, std::move(nb), std::move(nl), std::move(nr)});
  }
  for (int j = 1; j <= static_cast<int>(R.size()); ++j) {
    bool ok = true;
    for (int i = 0; i < j && ok; ++i) ok = atom_eq(B[i % n], R[i]);
    if (!ok) break;
    int o = j % n;
    AtomSeq nb(B.begin() + o, B.end());
    nb.insert(nb.end(), B.begin(), B.begin() + o);
    AtomSeq nl = L;
    nl.insert(nl.end(), R.begin(), R.begin() + j);
    AtomSeq nr(R.begin() + j, R.end());
    out.push_back({j, std::move(nb), std::move(nl), std::move(nr)});
  }
  return out;
}

void emit_rotation(Ctx& cx, int pu, const Rot& rot) {
  Region whole = Region::whole(cx.rw);
  TermPtr pw = whole.unit(pu);
  int n = unit_count(pw->base());
  int left = rot.net < 0 ? -rot.net : rot.net;
  while (left > 0) {
    int step = std::min(left, n - 1);
    if (rot.net > 0) {
      em_shift_right(whole, pu, step);
      pu += step;
    } else {
      em_shift_left(whole, pu - step, step);
      pu -= step;
    }
    left -= step;
  }
}

bool atoms_suffix(const AtomSeq& whole, const AtomSeq& suf) {
  if (suf.size() > whole.size()) return false;
  std::size_t off = whole.size() - suf.size();
  for (std::size_t i = 0; i < suf.size(); ++i)
    if (!atom_eq(whole[off + i], suf[i])) return false;
  return true;
}

// --- step 1: eliminations and agglutinations -------------------------------

bool try_elimination(Ctx& cx, int i) {
  TermPtr t = cx.rw.term();
  R2View v = r2view(t);
  auto us = content_units(t);
  AtomSeq L = v.seg_atoms(us, i);
  AtomSeq R = v.seg_atoms(us, i + 1);
  for (const Rot& rot : rotations(L, v.lims[i].base, R)) {
    const AtomSeq& B = rot.base;
    if (!B[0].is_limit()) continue;
    const std::string& x = B[0].base;
    AtomSeq w1(B.begin() + 1, B.end());
    if (w1.empty()) continue;
    if (rot.right.empty() || !rot.right[0].is_limit() ||
        rot.right[0].base != x)
      continue;
    if (rot.left.size() < w1.size() + 1) continue;
    if (!atoms_suffix(rot.left, w1)) continue;
    const Atom& lx = rot.left[rot.left.size() - w1.size() - 1];
    if (!lx.is_limit() || lx.base != x) continue;
    cx.tick();
    emit_rotation(cx, v.lims[i].unit, rot);
    R2View v2 = r2view(cx.rw.term());
    int pu = v2.lims[i].unit;
    Region whole = Region::whole(cx.rw);
    Bindings b;
    b.term("x", word(x)).term("y", atoms_term(w1));
    b.num("p", lx.shift).num("q", B[0].shift).num("r", rot.right[0].shift);
    int w1n = static_cast<int>(w1.size());
    whole.apply(RuleId::D3_5, Dir::fwd, pu - w1n - 1, pu + 2, b);
    // tidy the merged segment
    R2View v3 = r2view(cx.rw.term());
    for (std::size_t s = 0; s < v3.segs.size(); ++s)
      canon1_region(cx, seg_region(cx.rw, v3, static_cast<int>(s)));
    return true;
  }
  return false;
}

std::string leading_letters(const AtomSeq& a) {
  std::string out;
  for (const auto& at : a) {
    if (at.is_limit()) break;
    out += at.letter;
  }
  return out;
}

std::string trailing_letters(const AtomSeq& a) {
  std::string out;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    if (it->is_limit()) break;
    out = it->letter + out;
  }
  return out;
}

const Atom* first_limit(const AtomSeq& a) {
  for (const auto& at : a)
    if (at.is_limit()) return &at;
  return nullptr;
}

const Atom* last_limit(const AtomSeq& a) {
  for (auto it = a.rbegin(); it != a.rend(); ++it)
    if (it->is_limit()) return &*it;
  return nullptr;
}

bool try_agglutination(Ctx& cx, int i) {
  TermPtr t = cx.rw.term();
  R2View v = r2view(t);
  auto us = content_units(t);
  AtomSeq L = v.seg_atoms(us, i);
  AtomSeq M = v.seg_atoms(us, i + 1);
  AtomSeq R = v.seg_atoms(us, i + 2);
  for (const Rot& r1 : rotations(L, v.lims[i].base, M)) {
    for (const Rot& r2 : rotations(r1.right, v.lims[i + 1].base, R)) {
      const AtomSeq& M2 = r2.left;
      const AtomSeq& B1 = r1.base;
      const AtomSeq& B2 = r2.base;
      auto finish = [&](auto&& emit_core) {
        cx.tick();
        emit_rotation(cx, v.lims[i].unit, r1);
        R2View vb = r2view(cx.rw.term());
        emit_rotation(cx, vb.lims[i + 1].unit, r2);
        emit_core();
        R2View v3 = r2view(cx.rw.term());
        for (std::size_t s = 0; s < v3.segs.size(); ++s)
          canon1_region(cx, seg_region(cx.rw, v3, static_cast<int>(s)));
        for (const auto& lmx : v3.lims)
          canon1_region(cx, Region::whole(cx.rw).base_region(lmx.unit));
        return true;
      };
      if (M2.size() == 1 && M2[0].is_limit() && B1[0].is_limit() &&
          B1[0].base == M2[0].base && B2.back().is_limit() &&
          B2.back().base == M2[0].base && B1.size() >= 2 && B2.size() >= 2) {
        const std::string x = M2[0].base;
        return finish([&] {
          R2View v2 = r2view(cx.rw.term());
          int pu = v2.lims[i].unit;
          Region whole = Region::whole(cx.rw);
          Bindings b;
          b.term("x", word(x));
          b.term("y", atoms_term(AtomSeq(B1.begin() + 1, B1.end())));
          b.term("z", atoms_term(AtomSeq(B2.begin(), B2.end() - 1)));
          b.num("p", B1[0].shift).num("q", M2[0].shift)
              .num("r", B2.back().shift);
          whole.apply(RuleId::D3_6, Dir::fwd, pu, pu + 3, b);
          chain_pull_right_rev(whole, pu);
        });
      }
      if (M2.empty()) {
        // one initial portion: same leading word, same first base
        const Atom* f1 = first_limit(B1);
        const Atom* f2 = first_limit(B2);
        if (f1 && f2 && f1->base == f2->base &&
            leading_letters(B1) == leading_letters(B2)) {
          return finish([&] {
            R2View v2 = r2view(cx.rw.term());
            int pu = v2.lims[i].unit;
            Region whole = Region::whole(cx.rw);
            Bindings b;
            b.term("sigma", atoms_term(B1)).term("tau", atoms_term(B2));
            whole.apply(RuleId::C3_2_2, Dir::fwd, pu, pu + 2, b);
          });
        }
        const Atom* l1 = last_limit(B1);
        const Atom* l2 = last_limit(B2);
        if (l1 && l2 && l1->base == l2->base &&
            trailing_letters(B1) == trailing_letters(B2)) {
          return finish([&] {
            R2View v2 = r2view(cx.rw.term());
            int pu = v2.lims[i].unit;
            Region whole = Region::whole(cx.rw);
            Bindings b;
            b.term("sigma", atoms_term(B1)).term("tau", atoms_term(B2));
            whole.apply(RuleId::C3_2_3, Dir::fwd, pu, pu + 2, b);
          });
        }
      }
    }
  }
  return false;
}

void step1_in(Ctx& cx) {
  for (;;) {
    if (rank(cx.rw.term()) < 2) return;
    R2View v = r2view(cx.rw.term());
    int n = static_cast<int>(v.lims.size());
    bool moved = false;
    for (int i = 0; i < n && !moved; ++i) {
      if (try_elimination(cx, i)) {
        moved = true;
        break;
      }
      if (i + 1 < n && try_agglutination(cx, i)) {
        moved = true;
        break;
      }
    }
    if (!moved) return;
  }
}

// --- step 2: extended shifts right -----------------------------------------

bool step2_move_at(Ctx& cx, int i) {
  TermPtr t = cx.rw.term();
  R2View v = r2view(t);
  auto us = content_units(t);
  const AtomSeq& B = v.lims[i].base;
  AtomSeq R = v.seg_atoms(us, i + 1);
  int n = static_cast<int>(B.size());
  int j = 0;
  while (j < n - 1 && j < static_cast<int>(R.size()) && atom_eq(B[j], R[j]))
    ++j;
  if (j > 0) {
    cx.tick();
    Region whole = Region::whole(cx.rw);
    em_shift_right(whole, v.lims[i].unit, j);
    return true;
  }
  if (i + 1 >= static_cast<int>(v.lims.size())) return false;
  // extended: the whole right segment plus a letter prefix of the next base
  // must align with a power of this base
  for (std::size_t p = 0; p < R.size(); ++p)
    if (!atom_eq(R[p], B[p % n])) return false;
  const AtomSeq& NB = v.lims[i + 1].base;
  int t_best = 0;
  for (std::size_t p = 0; p < NB.size(); ++p) {
    if (NB[p].is_limit()) break;
    if (!atom_eq(NB[p], B[(R.size() + p) % n])) break;
    t_best = static_cast<int>(p) + 1;
  }
  if (t_best == 0) return false;
  cx.tick();
  Region whole = Region::whole(cx.rw);
  int pu_next = v.lims[i + 1].unit;
  em_peel_left(whole, pu_next, 1);
  long long total = static_cast<long long>(R.size()) + t_best;
  int pu = v.lims[i].unit;
  while (total >= n) {
    em_fold_right(whole, pu, pu + 1 + n, 1);
    em_peel_left(whole, pu, 1);
    pu += n;
    total -= n;
  }
  if (total > 0) {
    em_shift_right(whole, pu, static_cast<int>(total));
  }
  R2View v2 = r2view(cx.rw.term());
  em_r22_rev(whole, v2.lims[i + 1].unit, 2);
  return true;
}

void step2_in(Ctx& cx) {
  bool any = true;
  while (any) {
    any = false;
    if (rank(cx.rw.term()) < 2) return;
    int n = static_cast<int>(r2view(cx.rw.term()).lims.size());
    for (int i = 0; i < n; ++i) {
      while (step2_move_at(cx, i)) {
        any = true;
        cx.tick();
      }
    }
  }
}

// --- step 3: shortenings ----------------------------------------------------

bool portions_equal(const TermPtr& a, const TermPtr& b, bool initial,
                    bool final_) {
  if (rank(a) < 1 || rank(b) < 1) return false;
  OmegaPortions pa = omega_portions(a);
  OmegaPortions pb = omega_portions(b);
  if (initial && !term_eq(pa.initial, pb.initial)) return false;
  if (final_ && !term_eq(pa.final, pb.final)) return false;
  return true;
}

bool has_limit(const AtomSeq& a) {
  for (const auto& at : a)
    if (at.is_limit()) return true;
  return false;
}

bool try_type1(Ctx& cx, int i) {
  TermPtr t = cx.rw.term();
  R2View v = r2view(t);
  auto us = content_units(t);
  const AtomSeq& B = v.lims[i].base;
  AtomSeq L = v.seg_atoms(us, i);
  for (int s = 1; s < static_cast<int>(B.size()); ++s) {
    AtomSeq tau(B.begin(), B.begin() + s);
    AtomSeq sig(B.begin() + s, B.end());
    if (!has_limit(tau) || !has_limit(sig)) continue;
    if (!atoms_suffix(L, sig)) continue;
    TermPtr tauT = atoms_term(tau);
    TermPtr sigT = atoms_term(sig);
    if (!portions_equal(tauT, sigT, true, true)) continue;
    cx.tick();
    Region whole = Region::whole(cx.rw);
    int pu = v.lims[i].unit;
    Bindings b;
    b.term("sigma", sigT).term("tau", tauT);
    whole.apply(RuleId::C3_2_1, Dir::fwd,
                pu - static_cast<int>(sig.size()), pu + 1, b);
    R2View v3 = r2view(cx.rw.term());
    for (std::size_t ss = 0; ss < v3.segs.size(); ++ss)
      canon1_region(cx, seg_region(cx.rw, v3, static_cast<int>(ss)));
    return true;
  }
  return false;
}

bool try_type2(Ctx& cx, int i) {
  TermPtr t = cx.rw.term();
  R2View v = r2view(t);
  auto us = content_units(t);
  AtomSeq L = v.seg_atoms(us, i);
  AtomSeq R = v.seg_atoms(us, i + 1);
  for (const Rot& rot : rotations(L, v.lims[i].base, R)) {
    const AtomSeq& B = rot.base;
    // B = z^(w+q1) w2 x^(w+p2) w1 with w1 the trailing letter run
    int w1n = 0;
    while (w1n < static_cast<int>(B.size()) &&
           !B[B.size() - 1 - w1n].is_limit())
      ++w1n;
    int xi = static_cast<int>(B.size()) - 1 - w1n;
    if (xi < 1) continue;  // the x power must not be the leading atom
    if (!B[0].is_limit()) continue;
    const Atom& zx = B[0];
    const Atom& xx = B[xi];
    AtomSeq w1(B.end() - w1n, B.end());
    AtomSeq w2(B.begin() + 1, B.begin() + xi);
    if (rot.left.size() < w1.size() + 1) continue;
    if (!atoms_suffix(rot.left, w1)) continue;
    const Atom& lx = rot.left[rot.left.size() - w1.size() - 1];
    if (!lx.is_limit() || lx.base != xx.base) continue;
    if (rot.right.empty() || !rot.right[0].is_limit() ||
        rot.right[0].base != zx.base)
      continue;
    long long p = lx.shift - xx.shift;
    long long q = rot.right[0].shift - zx.shift;
    bool same = xx.base == zx.base;
    std::string sep;
    if (!(same && (q == 0 || p == 0))) {
      Separator sp = separator_word(xx.base, zx.base, cx.alpha);
      sep = sp.u;
    }
    // discard do-nothing instances
    if (w1n == 0 && xx.shift == 0 && zx.shift == 0) {
      if (same || sep.empty()) continue;
    }
    cx.tick();
    emit_rotation(cx, v.lims[i].unit, rot);
    R2View v2 = r2view(cx.rw.term());
    int pu = v2.lims[i].unit;
    Region whole = Region::whole(cx.rw);
    Bindings b;
    b.term("x", word(xx.base)).term("z", word(zx.base));
    b.term("y", atoms_term(w1)).term("w", atoms_term(w2));
    b.num("p", lx.shift).num("q", zx.shift).num("r", xx.shift)
        .num("s", rot.right[0].shift);
    whole.apply(RuleId::D3_4, Dir::fwd, pu - w1n - 1, pu + 2, b);
    // layout now: x^(w+p) (z^w w2 x^w)^(w-1) z^(w+q)
    int at = pu - w1n - 1;
    if (same && q == 0) {
      chain_pull_left_rev(whole, at + 1);
      em_merge(whole, at);
      chain_absorb_right(whole, at + 1);
    } else if (same && p == 0) {
      chain_pull_right_rev(whole, at + 1);
      em_merge(whole, at + 2);
      chain_absorb_left(whole, at);
    } else if (!sep.empty()) {
      Bindings b2;
      b2.term("x", word(xx.base)).term("z", word(zx.base));
      b2.term("y", word(sep)).term("w", atoms_term(w2));
      b2.num("p", p).num("q", 0).num("r", 0).num("s", q);
      whole.apply(RuleId::D3_4, Dir::rev, at, at + 3, b2);
    }
    // a rank-2 shift right whenever possible
    R2View v4 = r2view(cx.rw.term());
    {
      auto us4 = content_units(cx.rw.term());
      const AtomSeq& B4 = v4.lims[i].base;
      AtomSeq R4 = v4.seg_atoms(us4, i + 1);
      int jj = 0;
      while (jj < static_cast<int>(B4.size()) - 1 &&
             jj < static_cast<int>(R4.size()) && atom_eq(B4[jj], R4[jj]))
        ++jj;
      if (jj > 0) {
        Region w4 = Region::whole(cx.rw);
        em_shift_right(w4, v4.lims[i].unit, jj);
      }
    }
    R2View v5 = r2view(cx.rw.term());
    for (std::size_t ss = 0; ss < v5.segs.size(); ++ss)
      canon1_region(cx, seg_region(cx.rw, v5, static_cast<int>(ss)));
    for (const auto& lmx : v5.lims)
      canon1_region(cx, Region::whole(cx.rw).base_region(lmx.unit));
    return true;
  }
  return false;
}

bool try_type3(Ctx& cx, int i) {
  TermPtr t = cx.rw.term();
  R2View v = r2view(t);
  auto us = content_units(t);
  const AtomSeq& B = v.lims[i].base;
  AtomSeq L = v.seg_atoms(us, i);
  AtomSeq R = v.seg_atoms(us, i + 1);
  int pu = v.lims[i].unit;
  Region whole = Region::whole(cx.rw);
  // trailing form: segment before ends with x^(w+q') w1
  {
    int w1n = 0;
    while (w1n < static_cast<int>(B.size()) &&
           !B[B.size() - 1 - w1n].is_limit())
      ++w1n;
    int xi = static_cast<int>(B.size()) - 1 - w1n;
    if (xi >= 0 && B[xi].is_limit() && B[xi].shift != 0 &&
        static_cast<int>(B.size()) >= w1n + 2) {
      AtomSeq w1(B.end() - w1n, B.end());
      if (L.size() >= w1.size() + 1 && atoms_suffix(L, w1)) {
        const Atom& lx = L[L.size() - w1.size() - 1];
        if (lx.is_limit() && lx.base == B[xi].base) {
          cx.tick();
          long long q = B[xi].shift;
          if (w1n > 0) em_shift_left(whole, pu - w1n, w1n);
          int pu2 = pu - w1n;
          AtomSeq yb(B.end() - w1n, B.end());
          yb.insert(yb.end(), B.begin(), B.begin() + xi);
          Bindings b;
          b.term("x", word(B[xi].base)).term("y", atoms_term(yb));
          b.num("p", lx.shift).num("q", q);
          whole.apply(RuleId::D3_3a, Dir::fwd, pu2 - 1, pu2 + 1, b);
          if (w1n > 0) em_shift_right(whole, pu2, w1n);
          return true;
        }
      }
    }
  }
  // leading form: segment after begins with w1 x^(w+q')
  {
    int w1n = 0;
    while (w1n < static_cast<int>(B.size()) && !B[w1n].is_limit()) ++w1n;
    int xi = w1n;
    if (xi < static_cast<int>(B.size()) && B[xi].is_limit() &&
        B[xi].shift != 0 && static_cast<int>(B.size()) >= w1n + 2) {
      AtomSeq w1(B.begin(), B.begin() + w1n);
      if (static_cast<int>(R.size()) >= w1n + 1) {
        bool pre = true;
        for (int k = 0; k < w1n && pre; ++k) pre = atom_eq(R[k], w1[k]);
        if (pre && R[w1n].is_limit() && R[w1n].base == B[xi].base) {
          cx.tick();
          long long q = B[xi].shift;
          if (w1n > 0) em_shift_right(whole, pu, w1n);
          int pu2 = pu + w1n;
          AtomSeq yb(B.begin() + xi + 1, B.end());
          yb.insert(yb.end(), B.begin(), B.begin() + w1n);
          Bindings b;
          b.term("x", word(B[xi].base)).term("y", atoms_term(yb));
          b.num("p", R[w1n].shift).num("q", q);
          whole.apply(RuleId::D3_3b, Dir::fwd, pu2, pu2 + 2, b);
          if (w1n > 0) em_shift_left(whole, pu2 - w1n, w1n);
          return true;
        }
      }
    }
  }
  return false;
}

void step3_in(Ctx& cx) {
  for (;;) {
    if (rank(cx.rw.term()) < 2) return;
    R2View v = r2view(cx.rw.term());
    int n = static_cast<int>(v.lims.size());
    bool moved = false;
    for (int i = 0; i < n && !moved; ++i) {
      if (try_type1(cx, i) || try_type2(cx, i) || try_type3(cx, i))
        moved = true;
    }
    if (!moved) return;
    cx.tick();
  }
}

// --- rank reduction ---------------------------------------------------------

int top_rank_unit(const TermPtr& t, int r) {
  auto us = content_units(t);
  for (int i = 0; i < static_cast<int>(us.size()); ++i)
    if (us[i]->kind() == Kind::power && rank(us[i]) == r) return i;
  return -1;
}

void claim_reduce(Ctx& cx, int pu);

// normalize the top exponent to w-1 and reduce one rank-r power
void reduce_one(Ctx& cx, int pu) {
  Region whole = Region::whole(cx.rw);
  TermPtr pw = whole.unit(pu);
  long long q = pw->shift();
  if (q >= 0) {
    em_peel_right(whole, pu, q + 1);
  } else if (q <= -2) {
    em_r22_rev(whole, pu, -q);
  }
  claim_reduce(cx, pu);
}

void claim_reduce(Ctx& cx, int pu) {
  cx.tick();
  Region whole = Region::whole(cx.rw);
  TermPtr pw = whole.unit(pu);
  TermPtr pi = pw->base();
  RankConfig cfg = rank_configuration(pi);
  int m = cfg.length();
  if (m == 1 && is_empty(cfg.rho[0]) && is_empty(cfg.rho[1])) {
    em_r21(whole, pu);
    return;
  }
  int W0 = unit_count(cfg.rho[0]);
  int W2 = unit_count(cfg.rho.back());
  const int plen [[maybe_unused]] = unit_count(pi);
  em_split(whole, pu, 0);
  em_peel_right(whole, pu, 1);
  // [pi^(w-1), pi-content, pi^(w-1)]
  if (W0) em_shift_right(whole, pu, W0);
  int pA = pu + W0;
  int s1U = pA + 1;
  if (m == 1) {
    TermPtr sigma = cfg.pi[0];
    long long p = cfg.shifts[0];
    TermPtr y = concat2(cfg.rho[1], cfg.rho[0]);
    if (W2) em_shift_left(whole, pA + 2, W2);
    int pB = pA + 2;
    // [w0, (s^(w+p) w1 w0)^(w-1), s^(w+p), (w1 w0 s^(w+p))^(w-1), w1]
    Bindings b1;
    b1.term("x", sigma).term("y", y).num("p", p).num("q", p);
    whole.apply(RuleId::D3_3b, Dir::fwd, pA, s1U + 1, b1);
    Bindings b2;
    b2.term("x", sigma).term("y", y).num("p", 1).num("q", 1);
    whole.apply(RuleId::D3_3b, Dir::rev, pA, s1U + 1, b2);
    Bindings b3;
    b3.term("x", sigma).term("y", y).num("p", 1).num("q", p);
    whole.apply(RuleId::D3_3a, Dir::fwd, s1U, pB + 1, b3);
    Bindings b4;
    b4.term("x", sigma).term("y", y).num("p", 2 - p).num("q", 1);
    whole.apply(RuleId::D3_3a, Dir::rev, s1U, pB + 1, b4);
    {
      Region br = whole.base_region(pA);
      br.apply(RuleId::D3_1, Dir::fwd, 0, 1, d31_bindings(sigma));
    }
    {
      Region br = whole.base_region(pB);
      int last = static_cast<int>(br.units().size()) - 1;
      br.apply(RuleId::D3_1, Dir::fwd, last, last + 1, d31_bindings(sigma));
    }
    if (W0) em_shift_left(whole, pA - W0, W0);
    if (W2) em_shift_right(whole, pB, W2);
    return;
  }
  // m >= 2: peel off the first top limit, fold the rest into delta1, delta2
  TermPtr s1 = cfg.pi.front();
  TermPtr s2 = cfg.pi.back();
  long long p1 = cfg.shifts.front();
  long long p2 = cfg.shifts.back();
  TermPtr w0 = cfg.rho.front();
  TermPtr w2 = cfg.rho.back();
  std::vector<TermPtr> midparts;
  for (int j = 1; j <= m - 2; ++j) {
    midparts.push_back(cfg.rho[j]);
    midparts.push_back(limit(cfg.pi[j], cfg.shifts[j]));
  }
  midparts.push_back(cfg.rho[m - 1]);
  TermPtr w1 = concat(std::move(midparts));  // may be empty
  int W1 = unit_count(w1);
  em_shift_left(whole, pA + 2 + W1, 1 + W2);
  int pB = pA + 2 + W1;
  // [w0, pA, s1^(w+p1), w1, (s2^(w+p2) w2 w0 s1^(w+p1) w1)^(w-1), s2^(w+p2), w2]
  {
    Bindings b;
    b.term("x", s1).term("z", s2);
    if (w1) b.term("y", w1);
    TermPtr ww = concat2(w2, w0);
    if (ww) b.term("w", ww);
    b.num("p", p1).num("q", p2).num("r", p1).num("s", p2);
    whole.apply(RuleId::D3_4, Dir::fwd, s1U, pB + 2, b);
  }
  int pB2 = s1U + 1;
  // [w0, pA, s1^w, (s2^w w2 w0 s1^w)^(w-1), s2^w, w2]
  TermPtr yA = concat({w1, limit(s2, p2), w2, w0});
  {
    Bindings b;
    b.term("x", s1).term("y", yA).num("p", 0).num("q", p1);
    whole.apply(RuleId::D3_3b, Dir::fwd, pA, s1U + 1, b);
    Bindings b2;
    b2.term("x", s1).term("y", yA).num("p", 1 - p1).num("q", 1);
    whole.apply(RuleId::D3_3b, Dir::rev, pA, s1U + 1, b2);
  }
  {
    TermPtr zy = concat({limit(s2, 0), w2, w0});
    Bindings b;
    b.term("x", s1).term("y", zy).num("p", 2 - p1).num("q", 1);
    whole.apply(RuleId::D3_3a, Dir::rev, s1U, pB2 + 1, b);
  }
  {
    TermPtr yy = concat({w2, w0, limit(s1, 1)});
    Bindings b;
    b.term("x", s2).term("y", yy).num("p", 1).num("q", 1);
    whole.apply(RuleId::D3_3b, Dir::rev, pB2, pB2 + 2, b);
  }
  {
    Region br = whole.base_region(pA);
    br.apply(RuleId::D3_1, Dir::fwd, 0, 1, d31_bindings(s1));
  }
  {
    Region br = whole.base_region(pB2);
    br.apply(RuleId::D3_1, Dir::fwd, 0, 1, d31_bindings(s2));
    Region br2 = whole.base_region(pB2);
    int last = static_cast<int>(br2.units().size()) - 1;
    br2.apply(RuleId::D3_1, Dir::fwd, last, last + 1, d31_bindings(s1));
  }
  whole.apply(RuleId::D3_1, Dir::fwd, pB2 + 1, pB2 + 2, d31_bindings(s2));
  if (W0) em_shift_left(whole, pA - W0, W0);
  em_shift_right(whole, pB2, unit_count(s2) + W2);
  claim_reduce(cx, pu);
}

void reduce_in(Ctx& cx) {
  for (;;) {
    int r = rank(cx.rw.term());
    if (r <= 2) return;
    int pu = top_rank_unit(cx.rw.term(), r);
    if (pu < 0) throw internal_error("rank without a top-rank power");
    reduce_one(cx, pu);
    cx.tick();
  }
}

}  // namespace

// --- public surface ---------------------------------------------------------

bool is_canonical_rank1(const TermPtr& t) {
  if (rank(t) > 1) throw precondition_error("rank-1 check on a rank-2 term");
  if (!t) return true;
  return find_rank1_move(atoms_of(t)).kind == R1Move::none;
}

TermPtr canonicalize_rank1(const TermPtr& t) {
  if (rank(t) > 1) throw precondition_error("rank-1 normal form needs rank <= 1");
  if (!t) return t;
  Rewriter rw(t);
  Ctx cx{rw, alphabet_of({t})};
  canon1_region(cx, Region::whole(rw));
  return rw.term();
}

TermPtr semicanonicalize_rank2(const TermPtr& t) {
  if (rank(t) != 2) throw precondition_error("semi-canonical form needs rank 2");
  Rewriter rw(t);
  Ctx cx{rw, alphabet_of({t})};
  semicanonicalize_in(cx);
  return rw.term();
}

TermPtr step1_eliminations_agglutinations(const TermPtr& t) {
  Rewriter rw(t);
  Ctx cx{rw, alphabet_of({t})};
  step1_in(cx);
  return rw.term();
}

TermPtr step2_extended_shifts(const TermPtr& t) {
  Rewriter rw(t);
  Ctx cx{rw, alphabet_of({t})};
  step2_in(cx);
  return rw.term();
}

TermPtr step3_shortenings(const TermPtr& t, const Alphabet& a) {
  Rewriter rw(t);
  Ctx cx{rw, a};
  step3_in(cx);
  return rw.term();
}

TermPtr reduce_to_rank_le2(const TermPtr& t) {
  if (!t || rank(t) <= 2) return t;
  Rewriter rw(t);
  Ctx cx{rw, alphabet_of({t})};
  reduce_in(cx);
  return rw.term();
}

bool variety_equal(const TermPtr& tau, const TermPtr& sigma, Variety v) {
  if (rank(tau) < 1 || rank(sigma) < 1)
    throw precondition_error("variety comparison needs rank >= 1");
  Alphabet a = alphabet_of({tau, sigma});
  TermPtr c1 = canonicalize_LG(tau, a).output;
  TermPtr c2 = canonicalize_LG(sigma, a).output;
  switch (v) {
    case Variety::K:
      return portions_equal(c1, c2, true, false);
    case Variety::D:
      return portions_equal(c1, c2, false, true);
    case Variety::LI:
      return portions_equal(c1, c2, true, true);
  }
  return false;
}

Separator separator_word(const std::string& x, const std::string& z,
                         const Alphabet& a) {
  if (!is_lyndon(x) || !is_lyndon(z))
    throw precondition_error("separator needs Lyndon words");
  if (x == z) {
    for (char c : a.letters())
      if (c != x[0]) return {0, std::string(1, c), 0};
    throw precondition_error("separator needs a second letter");
  }
  TermPtr canon = canonicalize_rank1(concat2(limit(word(x), 0), limit(word(z), 0)));
  RankConfig cfg = rank_configuration(canon);
  if (cfg.length() != 2 || !term_eq(cfg.pi[0], word(x)) ||
      !term_eq(cfg.pi[1], word(z)) || !is_empty(cfg.rho[0]) ||
      !is_empty(cfg.rho[2]))
    throw internal_error("unexpected separator normal form");
  std::string u;
  if (cfg.rho[1]) u = cfg.rho[1]->letters();
  return {cfg.shifts[0], u, cfg.shifts[1]};
}

bool is_canonical_LG(const TermPtr& t, const Alphabet& a) {
  if (!t) return true;
  int r = rank(t);
  if (r <= 1) return is_canonical_rank1(t);
  if (r > 2) return false;
  RankConfig cfg = rank_configuration(t);
  for (long long q : cfg.shifts)
    if (q != -1) return false;
  if (!is_canonical_rank1(p_expansion(t, 2))) return false;
  if (!term_eq(step1_eliminations_agglutinations(t), t)) return false;
  if (!term_eq(step2_extended_shifts(t), t)) return false;
  if (!term_eq(step3_shortenings(t, a), t)) return false;
  return true;
}

bool is_canonical_LG(const TermPtr& t) {
  return is_canonical_LG(t, alphabet_of({t}));
}

CanonReport canonicalize_LG(const TermPtr& t, const Alphabet& a) {
  Rewriter rw(t);
  Ctx cx{rw, a};
  CanonReport rep;
  rep.input = t;
  rep.stage_log.emplace_back("input", t);
  if (rank(t) > 2) {
    reduce_in(cx);
    rep.stage_log.emplace_back("rank_reduced", rw.term());
  }
  if (rank(rw.term()) <= 1) {
    canon1_region(cx, Region::whole(rw));
    rep.stage_log.emplace_back("canonical", rw.term());
  } else {
    semicanonicalize_in(cx);
    rep.stage_log.emplace_back("semicanonical", rw.term());
    if (rank(rw.term()) <= 1) {
      canon1_region(cx, Region::whole(rw));
      rep.stage_log.emplace_back("canonical", rw.term());
    } else {
      step1_in(cx);
      rep.stage_log.emplace_back("step1", rw.term());
      if (rank(rw.term()) <= 1) {
        canon1_region(cx, Region::whole(rw));
        rep.stage_log.emplace_back("canonical", rw.term());
      } else {
        step2_in(cx);
        rep.stage_log.emplace_back("step2", rw.term());
        step3_in(cx);
        rep.stage_log.emplace_back("step3", rw.term());
      }
    }
  }
  rep.output = rw.term();
  rep.derivation = rw.derivation();
  if (!is_canonical_LG(rep.output, a))
    throw internal_error("pipeline produced a non-normal form");
  return rep;
}

CanonReport canonicalize_LG(const TermPtr& t) {
  return canonicalize_LG(t, alphabet_of({t}));
}

std::string report_to_text(const CanonReport& r) {
  std::string out;
  for (const auto& [name, term] : r.stage_log)
    out += name + ": " + print(term) + "\n";
  return out;
}

}  // namespace kterm
