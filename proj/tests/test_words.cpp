#include "doctest.h"
#include "kterm/words.hpp"

using namespace kterm;

TEST_CASE("primitivity") {
  CHECK(is_primitive("a"));
  CHECK(is_primitive("ab"));
  CHECK_FALSE(is_primitive("abab"));
  CHECK_FALSE(is_primitive("aaa"));
  auto [r, n] = primitive_root("abab");
  CHECK(r == "ab");
  CHECK(n == 2);
  CHECK(primitive_root("abc").second == 1);
}

TEST_CASE("lyndon") {
  CHECK(is_lyndon("a"));
  CHECK(is_lyndon("aab"));
  CHECK(is_lyndon("ab"));
  CHECK_FALSE(is_lyndon("ba"));
  CHECK_FALSE(is_lyndon("abab"));
  CHECK_FALSE(is_lyndon("aa"));
}

TEST_CASE("lyndon rotation") {
  auto [k, conj] = lyndon_rotation("ba");
  CHECK(k == 1);
  CHECK(conj == "ab");
  auto [k2, c2] = lyndon_rotation("abab");
  CHECK(k2 == 0);
  CHECK(c2 == "ab");
  auto [k3, c3] = lyndon_rotation("cab");
  CHECK(k3 == 1);
  CHECK(c3 == "abc");
}

TEST_CASE("lyndon rotation properties") {
  // every word equals root^power, the rotated root is lyndon and conjugate
  const char* samples[] = {"a", "ba", "cba", "abcabc", "bbab", "zaz", "bAb" + 1};
  for (const char* s : samples) {
    std::string w(s);
    if (w.empty()) continue;
    auto [root, n] = primitive_root(w);
    std::string rebuilt;
    for (int i = 0; i < n; ++i) rebuilt += root;
    CHECK(rebuilt == w);
    auto [k, conj] = lyndon_rotation(w);
    CHECK(is_lyndon(conj));
    CHECK(rotate_left(root, k) == conj);
  }
}

TEST_CASE("prefix of word power") {
  CHECK(prefix_of_word_power("ab", "a", "b"));
  CHECK(prefix_of_word_power("abababa", "", "ab"));
  CHECK_FALSE(prefix_of_word_power("ab", "", "b"));
  CHECK(prefix_of_word_power("a", "abc", "z"));
}
