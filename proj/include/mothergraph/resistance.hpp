#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mothergraph/kernels.hpp"
#include "mothergraph/schreier.hpp"

namespace mg {

struct SolverOptions {
  double tol = 1e-10;           // relative residual
  std::int64_t max_iters = -1;  // -1: 50 * size + 1000
  Exec exec = Exec::Parallel;
};

struct SolveResult {
  std::vector<double> x;
  double residual = 0;  // relative
  std::int64_t iterations = 0;
};

// Jacobi-preconditioned conjugate gradient for a symmetric positive definite
// matrix. Throws SolverError if the iteration cap is reached.
SolveResult pcg(const SymmetricMatrix& a, std::span<const double> b, const SolverOptions& opts);

struct ResistanceReport {
  double value = 0;
  double residual = 0;
  std::int64_t iterations = 0;
  bool infinite = false;  // A and B lie in different components
};

// Sparse antisymmetric edge function; entries keep u < v and store the flow
// from u to v.
class FlowAssignment {
 public:
  struct Entry {
    std::int32_t u;
    std::int32_t v;
    double flow;
  };

  FlowAssignment() = default;
  // Orientation is normalised and repeated edges are summed.
  static FlowAssignment from_entries(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  double flow(std::int32_t u, std::int32_t v) const;  // signed, u -> v
  FlowAssignment& add(const FlowAssignment& other, double scale = 1.0);
  FlowAssignment scaled(double s) const;
  FlowAssignment reversed() const { return scaled(-1.0); }
  // Maps local vertex ids through `to_global`.
  FlowAssignment relabeled(std::span<const std::int32_t> to_global) const;

  // Net outflow at each vertex.
  std::vector<double> divergence(std::int32_t vertices) const;
  // sum f(e)^2 / c(e); throws if the support leaves the network.
  double energy(const Network& net) const;
  // Vertices touched by a nonzero entry.
  std::vector<std::int32_t> support(double eps = 0) const;

 private:
  std::vector<Entry> entries_;
};

struct CurrentFlow {
  FlowAssignment flow;
  std::vector<double> potential;
  ResistanceReport report;
};

// A and B are each merged into a supernode and a unit current is sent from
// A to B. res(v, v) is 0; other overlapping sets are rejected.
ResistanceReport effective_resistance(const Network& net, std::span<const std::int32_t> a,
                                      std::span<const std::int32_t> b, const SolverOptions& opts = {});
CurrentFlow current_flow(const Network& net, std::span<const std::int32_t> a,
                         std::span<const std::int32_t> b, const SolverOptions& opts = {});
// Electrical flow for an arbitrary demand (net current injected per vertex,
// summing to zero). The report's value is the flow energy.
CurrentFlow demand_flow(const Network& net, std::span<const double> demand, const SolverOptions& opts = {});

// Inverse Gray code on two letters: bit k of the result is x_n + ... + x_k mod 2.
std::uint64_t graycode_index(const LetterWord& v);

enum class PairFamily { RootAntiroot, RootAntirootSet };
PairFamily parse_pair_family(const std::string& name);
std::string to_string(PairFamily f);

struct ProfilePoint {
  int n = 0;
  ResistanceReport report;
};
using Profile = std::vector<ProfilePoint>;
using PairSelector = std::function<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>(int n)>;

PairSelector pair_selector(PairFamily family, int m);
Profile resistance_profile(const ModelParams& p, const PairSelector& pairs, int n_first, int n_last,
                           const SolverOptions& opts = {});
Profile resistance_profile(const ModelParams& p, PairFamily family, int n_first, int n_last,
                           const SolverOptions& opts = {});
std::string profile_csv(const Profile& profile);
Profile parse_profile_csv(const std::string& text);
// r(s) := max_{l <= s} r(l), indexed by n.
Profile monotone_corrected(Profile profile);
std::string flow_csv(const FlowAssignment& f);

enum class SearchMode { Exhaustive, Sampled };
struct MaxResistanceResult {
  std::int32_t a = 0;
  std::int32_t b = 0;
  double value = 0;
  double root_antiroot = 0;  // max over antiroots of res(root, antiroot)
  bool root_antiroot_attains = false;
  std::size_t pairs_evaluated = 0;
};
// Exhaustive mode needs at most 1024 vertices. Sampled mode evaluates
// `budget` random pairs plus root/antiroot and a BFS-far pair.
MaxResistanceResult max_resistance_search(const SchreierGraph& g, SearchMode mode, std::size_t budget = 0,
                                          std::uint64_t seed = 1, const SolverOptions& opts = {});
// All-pairs resistances of a small network via a dense grounded inverse.
std::vector<std::vector<double>> all_pairs_resistance(const Network& net);

enum class TransienceVerdict { Consistent, Inconsistent, Undetermined };
std::string to_string(TransienceVerdict v);
struct TransienceReport {
  std::vector<int> n;
  std::vector<double> values;
  TransienceVerdict verdict = TransienceVerdict::Undetermined;
};
// Bounded means the last value is at most 1.05 times the median-index value.
TransienceVerdict transience_verdict(const std::vector<double>& values);
// res(root, antiroot) along n; bounded means the last value is at most 1.05
// times the value at the median n.
TransienceReport transience_report(const ModelParams& p, std::vector<int> n_list, const SolverOptions& opts = {});

}  // namespace mg
