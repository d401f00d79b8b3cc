#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mothergraph/automaton.hpp"
#include "mothergraph/generator.hpp"

namespace mg {

struct ModelParams {
  int d = 0;  // activity degree bound
  int m = 2;  // alphabet size

  void validate() const;
};

// alpha_{k,sigma}: for k >= 0 looks for 1^k among the first nonzero letters
// and permutes the letter after the next nonzero one by sigma; alpha_{-1,sigma}
// is the root permutation sigma.
Generator make_alpha(int k, const Perm& sigma);
// beta_{k,rho}: permutes the (k+1)st nonzero letter by rho after a 1^k prefix.
// rho must fix 0.
Generator make_beta(int k, const Perm& rho);

// Independent implementation of a generator's action straight from its
// verbal description. Agrees with act() on every word.
LetterWord direct_action(const Generator& g, const LetterWord& v);

// The triggers of length k in lexicographic (reading) order.
std::vector<std::vector<Digit>> all_triggers(int k, int m);

// One subgroup L^w (or the root permutations) inside the multiset.
struct GeneratorBlock {
  int degree = -1;             // -1 for root permutations
  std::vector<Digit> trigger;  // reading order
  std::size_t begin = 0;       // generators[begin, end)
  std::size_t end = 0;
};

struct GeneratorMultiset {
  ModelParams params;
  std::vector<Generator> generators;
  std::vector<GeneratorBlock> blocks;
  std::vector<std::size_t> inverse;  // index of each generator's inverse

  std::size_t size() const noexcept { return generators.size(); }
  // Position of the block for (k, trigger) in `blocks`; k = -1 gives 0.
  std::size_t block_index(int k, std::span<const Digit> trigger) const;
};

// Multiset union of Sym(m) and every L^w with |w| <= d, identities included.
GeneratorMultiset enumerate_generating_multiset(const ModelParams& p);
// m! + sum_{k<=d} (m-1)^k (m-1)! (m!)^(m-1)
std::uint64_t generating_multiset_size(const ModelParams& p);
// m!(d+1) + (m-1)! d
std::uint64_t mother_state_count(const ModelParams& p);

// Uniform element of L_{k,m} (k >= 0: product over all triggers of length k),
// or a uniform root permutation for k = -1.
GroupWord sample_level_subgroup(int k, const ModelParams& p, std::mt19937_64& rng);

// Distinct elements of L^w, deduplicated with the word problem.
std::vector<GroupWord> enumerate_subgroup_elements(std::span<const Digit> trigger,
                                                   const ModelParams& p,
                                                   std::size_t cap = kDefaultClosureCap);

// One token per line, with a "# degree=k trigger=w" header per block.
std::string dump_multiset(const GeneratorMultiset& ms);

}  // namespace mg
