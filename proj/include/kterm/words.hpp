#pragma once

// Combinatorics on finite words: primitivity, primitive roots, Lyndon words
// and rotation to the Lyndon conjugate.

#include <string>
#include <utility>

namespace kterm {

bool is_primitive(const std::string& w);                       // w non-empty
std::pair<std::string, int> primitive_root(const std::string& w);
bool is_lyndon(const std::string& w);
// least offset k such that rotating the primitive root of w left by k gives
// a Lyndon word; returns (k, rotated root)
std::pair<int, std::string> lyndon_rotation(const std::string& w);

std::string rotate_left(const std::string& w, int k);
bool is_prefix(const std::string& p, const std::string& w);
bool is_suffix(const std::string& s, const std::string& w);
// does w occur as a prefix of u x x x ... (x repeated ad infinitum)?
bool prefix_of_word_power(const std::string& w, const std::string& u,
                          const std::string& x);

}  // namespace kterm
