#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mothergraph/generator.hpp"

namespace mg {

inline constexpr std::size_t kDefaultClosureCap = 1'000'000;

// How a generator treats a target letter sitting at the very end of a finite
// word. Tree is the restriction of the tree automorphism to level n. Truncated
// makes a lambda generator act as the identity when the letter following its
// target does not exist; this is the convention used for the finite graphs
// G(d,m,n), under which G(d,m,n) embeds edge-for-edge into G(d,m,n+1).
enum class ActionMode { Tree, Truncated };

void apply_generator(const Generator& g, std::span<Digit> word, ActionMode mode = ActionMode::Tree);

// v.g, acting letter by letter with each generator in turn.
LetterWord act(const GroupWord& g, const LetterWord& v);

// Section g(v): the element with vw.g = (v.g)(w.g(v)) for every w. Reduced.
GroupWord section(const GroupWord& g, const LetterWord& v);

// Permutation induced on the first letter.
Perm root_perm(const GroupWord& g);

// Exact word problem via the closure of {g} under first-level sections.
// Throws CapExceeded if the closure outgrows `cap` states.
bool is_identity(const GroupWord& g, std::size_t cap = kDefaultClosureCap);
bool equal(const GroupWord& g, const GroupWord& h, std::size_t cap = kDefaultClosureCap);

struct MooreDiagram {
  struct Edge {
    Digit output;
    int target;
  };

  int alphabet = 2;
  std::vector<GroupWord> states;           // states[0] is the reduced input
  std::vector<std::vector<Edge>> edges;    // edges[state][input letter]
  std::vector<bool> active;                // state is not the identity

  std::size_t size() const noexcept { return states.size(); }
};

MooreDiagram build_moore_diagram(const GroupWord& g, std::size_t cap = kDefaultClosureCap);

struct ActivityDegree {
  enum class Kind { None, Finite, Exponential };

  Kind kind = Kind::None;
  int value = 0;  // meaningful for Finite; -1 means finitary

  static ActivityDegree none() { return {Kind::None, 0}; }
  static ActivityDegree finite(int d) { return {Kind::Finite, d}; }
  static ActivityDegree exponential() { return {Kind::Exponential, 0}; }

  bool is_finite() const noexcept { return kind == Kind::Finite; }
  std::string to_string() const;
  friend bool operator==(const ActivityDegree&, const ActivityDegree&) = default;
};

// Structural degree read off the cycle structure of the active states.
ActivityDegree activity_degree(const MooreDiagram& dg);
// Same, without materialising the diagram's state words.
ActivityDegree activity_degree(const GroupWord& g, std::size_t cap = kDefaultClosureCap);

// Number of words v of length `level` with g(v) != 1.
std::uint64_t activity_count(const GroupWord& g, int level, std::size_t cap = kDefaultClosureCap);
// activity counts for levels 0..max_level of the diagram's initial state.
std::vector<std::uint64_t> activity_counts(const MooreDiagram& dg, int max_level);

// Degree read off a count sequence alone: -1 if it ends in zeros, k if the
// (k+1)st differences vanish on the tail, Exponential if no polynomial fits
// and the counts grow by at least 3/2 per level at the end. None otherwise
// (too short to tell).
ActivityDegree empirical_activity_degree(const std::vector<std::uint64_t>& counts);

}  // namespace mg
