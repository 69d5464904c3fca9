#pragma once

// Shared fixtures: the two worked normalization examples and the
// intermediate stage snapshots they pass through.

#include <string>

namespace fixtures {

// rank-2 semi-canonical input and its normal form
inline const std::string kF1 =
    "b(ab)^[w-5]cb(ab)^[w+2]c(b(ab)^[w+2]c)^[w-1]ac^[w-3](b^[w]a^[w-1]c)^[w-1]"
    "b^[w]a^[w+1]c(b^[w-2]aca^[w+4]c)^[w-1]b^[w+1]";
inline const std::string kF1Canon =
    "b(ab)^[w-5]cac^[w-3](b^[w]aca^[w+2]c)^[w-1]b^[w+3]";
inline const std::string kF1Step1 =
    "b(ab)^[w-5]cac^[w-3]b^[w](a^[w]cb^[w-2]aca^[w+2]cb^[w])^[w-1]a^[w]cb^[w+1]";
inline const std::string kF1Step2 =
    "b(ab)^[w-5]cac^[w-3]b^[w]a^[w]c(b^[w-2]aca^[w+2]cb^[w]a^[w]c)^[w-1]b^[w+1]";

inline const std::string kF2 =
    "d^[w]b(ad^[w-1]cd^[w+3]bad^[w]b)^[w-1](ab(cd)^[w-2]a)^[w-1]";
inline const std::string kF2Canon =
    "(d^[w-1]cd^[w+3]ba)^[w-1]b(cd)^[w]a(ab(cd)^[w-2]aab(cd)^[w]a)^[w-1]";
inline const std::string kF2Step2 =
    "d^[w]ba(d^[w-1]cd^[w+3]bad^[w]ba)^[w-1]b(cd)^[w-2]a"
    "(ab(cd)^[w-2]aab(cd)^[w-2]a)^[w-1]";

// rank-2 term used for structural checks
inline const std::string kF3 =
    "b(ab^[w]a)^[w-1]bc(c^[w-1]aa(bc)^[w-2])^[w-1]a^[w+1]";

}  // namespace fixtures
