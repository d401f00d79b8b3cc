#pragma once

#include <string>
#include <string_view>

#include "mothergraph/generator.hpp"

namespace mg {

// Text tokens for generators and words.
//
//   rho:(01)                 root permutation in cycle notation, "()" = id
//   lam:21:(12):(01),(01)    lambda generator: trigger in display order
//                            (first-read letter rightmost), pi, then
//                            taus[1], ..., taus[m-1]
//
// Words are tokens joined with ';'. The empty string is the identity word.

std::string format_perm(const Perm& p);
Perm parse_perm(std::string_view text, int m);

std::string format_generator(const Generator& g);
Generator parse_generator(std::string_view text, int m);

std::string format_word(const GroupWord& w);
GroupWord parse_word(std::string_view text, int m);

}  // namespace mg
