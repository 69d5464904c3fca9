#include "kterm/words.hpp"

#include "kterm/errors.hpp"

namespace kterm {

namespace {
void check_nonempty(const std::string& w) {
  if (w.empty()) throw precondition_error("empty word");
}
}  // namespace

std::pair<std::string, int> primitive_root(const std::string& w) {
  check_nonempty(w);
  std::size_t n = w.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return {w.substr(0, d), static_cast<int>(n / d)};
  }
  return {w, 1};
}

bool is_primitive(const std::string& w) {
  return primitive_root(w).second == 1;
}

std::string rotate_left(const std::string& w, int k) {
  check_nonempty(w);
  int n = static_cast<int>(w.size());
  k = ((k % n) + n) % n;
  return w.substr(k) + w.substr(0, k);
}

bool is_lyndon(const std::string& w) {
  check_nonempty(w);
  int n = static_cast<int>(w.size());
  for (int k = 1; k < n; ++k)
    if (rotate_left(w, k) <= w) return false;
  return true;
}

std::pair<int, std::string> lyndon_rotation(const std::string& w) {
  auto [root, power] = primitive_root(w);
  (void)power;
  int n = static_cast<int>(root.size());
  int best = 0;
  std::string best_rot = root;
  for (int k = 1; k < n; ++k) {
    std::string r = rotate_left(root, k);
    if (r < best_rot) {
      best_rot = r;
      best = k;
    }
  }
  return {best, best_rot};
}

bool is_prefix(const std::string& p, const std::string& w) {
  return p.size() <= w.size() && w.compare(0, p.size(), p) == 0;
}

bool is_suffix(const std::string& s, const std::string& w) {
  return s.size() <= w.size() && w.compare(w.size() - s.size(), s.size(), s) == 0;
}

bool prefix_of_word_power(const std::string& w, const std::string& u,
                          const std::string& x) {
  check_nonempty(x);
  for (std::size_t i = 0; i < w.size(); ++i) {
    char expect = i < u.size() ? u[i] : x[(i - u.size()) % x.size()];
    if (w[i] != expect) return false;
  }
  return true;
}

}  // namespace kterm
