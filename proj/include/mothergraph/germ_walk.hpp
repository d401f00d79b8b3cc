#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mothergraph/automaton.hpp"
#include "mothergraph/kernels.hpp"
#include "mothergraph/mother.hpp"
#include "mothergraph/schreier.hpp"

namespace mg {

// ---------------------------------------------------------------------------
// Germs and lamps

struct GermResult {
  GroupWord word;  // section at 0^l for every l >= level; no root permutations
  int level = 0;
};

// Eventual section of g along the zero ray.
GermResult germ(const GroupWord& g, std::size_t cap = kDefaultClosureCap);
bool fixes_zero_ray(const GroupWord& g, std::size_t cap = kDefaultClosureCap);
// Image of the zero ray, as a finitely supported boundary point.
BoundaryPoint zero_ray_image(const GroupWord& g, std::size_t cap = kDefaultClosureCap);

enum class LampVerdict { Trivial, Nontrivial, Unknown };
enum class LampEvidence { IdentityWord, LowDegreeLetters, ActivityDegree, None };

struct LampCertificate {
  LampVerdict verdict = LampVerdict::Unknown;
  LampEvidence evidence = LampEvidence::None;
  friend bool operator==(const LampCertificate&, const LampCertificate&) = default;
};

std::string to_string(LampVerdict v);
std::string to_string(LampEvidence e);

// Certificate for the coset germ.H, from a word already known to lie in K.
LampCertificate certify_germ(const GroupWord& germ_word, const ModelParams& p,
                             std::size_t cap = kDefaultClosureCap);
LampCertificate lamp_certificate(const GroupWord& g, const ModelParams& p,
                                 std::size_t cap = kDefaultClosureCap);

// The generator y with germ(gs) = germ(g) germ(y); nullopt is the identity.
std::optional<Generator> lamp_update_section(const GroupWord& g, const Generator& s,
                                             std::size_t cap = kDefaultClosureCap);
// Checks germ(gs) = germ(g) germ(y) with the word problem.
bool lamp_update_check(const GroupWord& g, const Generator& s, std::size_t cap = kDefaultClosureCap);

// Incremental germ and zero-ray image of a product of generators. The
// certificate is recomputed only when the lamp can change: a generator of
// degree d applied while the zero ray is fixed.
class LampTracker {
 public:
  explicit LampTracker(const ModelParams& p, std::size_t word_cap = std::size_t{1} << 20,
                       std::size_t closure_cap = kDefaultClosureCap);

  void apply(const Generator& s);
  void apply(const GroupWord& w);

  const BoundaryPoint& ray() const noexcept { return ray_; }
  const GroupWord& germ() const noexcept { return germ_; }
  bool fixes_zero_ray() const noexcept { return ray_.support() == 0; }
  const LampCertificate& certificate();
  std::size_t certificate_evaluations() const noexcept { return evaluations_; }

 private:
  ModelParams p_;
  std::size_t word_cap_;
  std::size_t closure_cap_;
  BoundaryPoint ray_;
  GroupWord germ_;
  LampCertificate cert_{LampVerdict::Trivial, LampEvidence::IdentityWord};
  bool dirty_ = false;
  std::size_t evaluations_ = 0;
};

// ---------------------------------------------------------------------------
// Walks

enum class StepMode { SubgroupUniform, MultisetUniform };
std::string to_string(StepMode m);
StepMode parse_step_mode(const std::string& s);

struct WalkConfig {
  // weights[k + 1] is the probability of level k in -1..d. Unused in
  // multiset-uniform mode, which steps by a uniform multiset generator.
  std::vector<double> weights;
  int steps = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::size_t word_cap = std::size_t{1} << 20;
  std::size_t closure_cap = kDefaultClosureCap;
  StepMode mode = StepMode::SubgroupUniform;
  int window = 500;      // stabilization window (final steps)
  int checkpoint = 100;  // support-growth sampling interval
  Exec exec = Exec::Parallel;

  static WalkConfig uniform(const ModelParams& p);
  // Throws on negative or all-zero weights; returns false if they needed
  // normalising (and normalises them).
  bool normalize(const ModelParams& p);
  void validate(const ModelParams& p) const;
};

// Independent stream for (seed, stream, trial).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

class StepSampler {
 public:
  StepSampler(const ModelParams& p, const WalkConfig& cfg);
  GroupWord operator()(std::mt19937_64& rng) const;

 private:
  ModelParams p_;
  StepMode mode_;
  std::vector<double> weights_;
  GeneratorMultiset ms_;
};

struct SchreierTrial {
  int trial = 0;
  int visits = 0;       // times at the start, time 0 included
  int last_return = 0;  // last time at the start
  std::vector<std::size_t> support_growth;  // distinct points seen, per checkpoint
  std::size_t final_support = 0;
  BoundaryPoint end;
};

struct SchreierWalkResult {
  std::vector<SchreierTrial> trials;
  double mean_visits = 0;
  double mean_last_return = 0;
  double return_fraction = 0;  // trials returning at all after time 0
};

SchreierWalkResult walk_schreier(const ModelParams& p, const BoundaryPoint& start, const WalkConfig& cfg);

struct GroupTrial {
  int trial = 0;
  std::vector<std::pair<int, LampVerdict>> changes;  // (step, new verdict), first at step 0
  LampVerdict final_verdict = LampVerdict::Unknown;
  int stabilization_time = 0;  // step of the last certificate change
  bool stabilized = false;     // constant over the final window
  int zero_ray_visits = 0;
  std::size_t germ_length = 0;
};

struct GroupWalkResult {
  std::vector<GroupTrial> trials;
  int trivial = 0, nontrivial = 0, unknown = 0;
  double stabilized_fraction = 0;
};

GroupWalkResult walk_group(const ModelParams& p, const WalkConfig& cfg, const GroupWord& start = GroupWord(),
                           std::uint64_t stream = 0);

struct HarmonicEstimate {
  GroupWord start;
  int trials = 0, trivial = 0, nontrivial = 0, unknown = 0;
  double p_trivial = 0;
  double std_error = 0;
  double stabilized_fraction = 0;
  GroupWalkResult walks;
};

// Monte Carlo estimate of P_x(lamp certificate = Trivial) for each start x.
std::vector<HarmonicEstimate> estimate_harmonic(const ModelParams& p, const std::vector<GroupWord>& starts,
                                                const WalkConfig& cfg);
// |p_a - p_b| in units of the combined standard error.
double separation(const HarmonicEstimate& a, const HarmonicEstimate& b);
// Identity, and alpha_{d,sigma} followed by a root permutation moving 0.
std::vector<GroupWord> designated_starts(const ModelParams& p);

}  // namespace mg
