#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mothergraph/kernels.hpp"
#include "mothergraph/mother.hpp"
#include "mothergraph/network.hpp"

namespace mg {

// Default cap on m^n; the MOTHERGRAPH_MAX_VERTICES environment variable
// overrides it.
inline constexpr std::uint64_t kDefaultMaxVertices = std::uint64_t{1} << 24;
std::uint64_t vertex_budget();

// Vertex count m^n, or CapExceeded when it exceeds the budget.
std::int32_t checked_vertex_count(int m, int n);

// G(d,m,n): vertices are the encodings of words of length n; conductance of
// {u,v} is the number of generators in the multiset carrying u to v. Lambda
// generators whose target letter is the last letter act trivially.
struct SchreierGraph {
  ModelParams params;
  int n = 0;
  Network net;
  std::vector<std::uint32_t> loops;  // loop count per vertex

  std::int32_t vertices() const noexcept { return net.vertices(); }
  // Generators counted once per application: sum of conductances + loops.
  std::uint64_t generator_degree(std::int32_t v) const;
};

SchreierGraph build_graph(const ModelParams& p, int n, Exec exec = Exec::Parallel);

std::int32_t root(int n);
std::int32_t antiroot(int n, int x, int m);
std::vector<std::int32_t> antiroots(int n, int m);
int count_nonzero(const LetterWord& v);

// Unit-conductance model: u ~ v iff they differ in exactly one position p and
// at most d+1 nonzero letters are read before p.
SchreierGraph build_quasi_model(const ModelParams& p, int n, Exec exec = Exec::Parallel);

struct DistortionReport {
  int schreier_edges_in_model = 0;  // max model distance over Schreier edges
  int model_edges_in_schreier = 0;  // max Schreier distance over model edges
};
DistortionReport distortion_between(const Network& a, const Network& b, Exec exec = Exec::Parallel);
DistortionReport distortion_report(const ModelParams& p, int n, Exec exec = Exec::Parallel);

// Finitely supported point of the boundary, digits in reading order with
// trailing zeros trimmed.
class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  explicit BoundaryPoint(std::vector<Digit> digits);
  static BoundaryPoint zero_ray() { return {}; }

  std::span<const Digit> digits() const noexcept { return digits_; }
  std::size_t support() const noexcept { return digits_.size(); }
  Digit at(std::size_t position) const noexcept {
    return position >= 1 && position <= digits_.size() ? digits_[position - 1] : 0;
  }
  std::string display() const;

  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;

 private:
  std::vector<Digit> digits_;
};

struct BoundaryPointHash {
  std::size_t operator()(const BoundaryPoint& p) const noexcept;
};

BoundaryPoint apply(const Generator& g, const BoundaryPoint& v);
// One entry per multiset generator, in multiset order.
std::vector<std::pair<std::size_t, BoundaryPoint>> neighbors_infinite(const BoundaryPoint& v,
                                                                      const GeneratorMultiset& ms);

// Quotient by digit-wise relabelling of nonzero letters: a class is the
// pattern of nonzero positions, encoded as a binary number.
struct QuotientGraph {
  int n = 0;
  Network net;
  std::vector<std::uint64_t> weights;  // (m-1)^(number of nonzero positions)
};
std::int32_t quotient_class(std::int32_t v, int n, int m);
QuotientGraph quotient_by_symmetry(const SchreierGraph& g);

// Compares the subgraph of G(n+1) induced on the first m^n vertices with
// G(n), ignoring loops.
struct EmbeddingReport {
  bool equal = false;      // same edges with the same conductances
  bool contained = false;  // every edge of G(n) present with at least its conductance
  std::size_t extra_edges = 0;        // induced edges absent from G(n)
  std::size_t weight_mismatches = 0;  // shared edges with different conductance
};
EmbeddingReport compare_induced_embedding(const ModelParams& p, int n);
bool induced_embedding_check(const ModelParams& p, int n);

// Bit-exact text formats.
std::string edges_csv(const SchreierGraph& g);
std::string loops_csv(const SchreierGraph& g);
std::string to_dot(const SchreierGraph& g);

}  // namespace mg
