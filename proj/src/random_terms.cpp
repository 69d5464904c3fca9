#include "kterm/random_terms.hpp"

namespace kterm {

int TermGen::pick(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

std::string TermGen::rand_word(int maxlen) {
  int n = pick(1, maxlen);
  std::string w;
  for (int i = 0; i < n; ++i)
    w += letters_[pick(0, static_cast<int>(letters_.size()) - 1)];
  return w;
}

TermPtr TermGen::gen(int rank_budget, int breadth) {
  if (rank_budget == 0) return word(rand_word(3));
  std::vector<TermPtr> parts;
  int limits = pick(1, breadth);
  if (pick(0, 1)) parts.push_back(word(rand_word(2)));
  for (int i = 0; i < limits; ++i) {
    int inner = pick(0, rank_budget - 1);
    parts.push_back(limit(gen(inner, 1), pick(-4, 4)));
    if (pick(0, 1)) parts.push_back(word(rand_word(2)));
  }
  return concat(std::move(parts));
}

TermPtr TermGen::term(int max_rank) { return gen(pick(0, max_rank), 2); }

TermPtr TermGen::term_of_rank(int r) {
  for (int tries = 0; tries < 200; ++tries) {
    TermPtr t = gen(r, 2);
    if (rank(t) == r) return t;
  }
  // force the rank by nesting
  TermPtr t = word(rand_word(2));
  for (int i = 0; i < r; ++i) t = limit(concat2(t, word(rand_word(1))), -1);
  return t;
}

namespace {

void power_positions(const TermPtr& t, std::vector<int>& path,
                     std::vector<std::vector<int>>& out) {
  if (!t) return;
  if (t->kind() == Kind::power) {
    out.push_back(path);
    path.push_back(0);
    power_positions(t->base(), path, out);
    path.pop_back();
  } else if (t->kind() == Kind::product) {
    for (int i = 0; i < static_cast<int>(t->children().size()); ++i) {
      path.push_back(i);
      power_positions(t->children()[i], path, out);
      path.pop_back();
    }
  }
}

}  // namespace

TermPtr TermGen::perturb(const TermPtr& t, int steps) {
  TermPtr cur = t;
  for (int s = 0; s < steps; ++s) {
    std::vector<std::vector<int>> pows;
    std::vector<int> path;
    power_positions(cur, path, pows);
    if (pows.empty()) break;
    const auto& p = pows[pick(0, static_cast<int>(pows.size()) - 1)];
    TermPtr node = subterm_at(cur, Pos::node(p));
    long long q = node->shift();
    RewriteStep step;
    step.pos = Pos::node(p);
    int choice = pick(0, 4);
    Bindings b;
    b.term("x", node->base());
    switch (choice) {
      case 0:  // split the exponent
        step.rule = RuleId::R2_3;
        step.dir = Dir::rev;
        b.num("p", pick(-2, 2));
        b.ints["q"] = q - b.ints["p"];
        break;
      case 1:  // peel one copy to the right
        step.rule = RuleId::R2_4a;
        step.dir = Dir::rev;
        b.num("n", 1).num("q", q - 1);
        break;
      case 2:  // peel one copy to the left
        step.rule = RuleId::R2_4b;
        step.dir = Dir::rev;
        b.num("n", 1).num("q", q - 1);
        break;
      case 3:  // wrap in an (w+1)-power
        step.rule = RuleId::R2_1;
        step.dir = Dir::rev;
        b.num("p", q).num("q", 1);
        break;
      case 4: {  // double the base
        if (q % 2) {
          step.rule = RuleId::R2_3;
          step.dir = Dir::rev;
          b.num("p", 0).num("q", q);
        } else {
          step.rule = RuleId::R2_2;
          step.dir = Dir::rev;
          b.num("n", 2).num("q", q / 2);
        }
        break;
      }
    }
    step.bind = b;
    TermPtr next = apply_step(cur, step);
    if (rank(next) <= 3 && unit_count(next) <= 160) cur = next;
  }
  return cur;
}

}  // namespace kterm
