#include "mothergraph/germ_walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>

#include "mothergraph/errors.hpp"

namespace mg {

// ---------------------------------------------------------------------------
// Germs

GermResult germ(const GroupWord& g, std::size_t cap) {
  const LetterWord zero = LetterWord::zeros(g.alphabet(), 1);
  GroupWord cur = g.reduced();
  // The ray image grows by at most one letter per generator, so the zero-ray
  // section settles within |g| + 2 levels.
  const int max_level = static_cast<int>(cur.size()) + 2;
  for (int level = 0; level <= max_level; ++level) {
    GroupWord next = section(cur, zero);
    if (equal(next, cur, cap)) {
      // next is the same element and never carries root permutations.
      return {std::move(next), level};
    }
    cur = std::move(next);
  }
  throw Error("zero-ray section failed to stabilise");
}

BoundaryPoint zero_ray_image(const GroupWord& g, std::size_t cap) {
  const GermResult gr = germ(g, cap);
  const LetterWord v = act(g, LetterWord::zeros(g.alphabet(), gr.level));
  return BoundaryPoint(std::vector<Digit>(v.digits().begin(), v.digits().end()));
}

bool fixes_zero_ray(const GroupWord& g, std::size_t cap) { return zero_ray_image(g, cap).support() == 0; }

std::string to_string(LampVerdict v) {
  switch (v) {
    case LampVerdict::Trivial: return "trivial";
    case LampVerdict::Nontrivial: return "nontrivial";
    case LampVerdict::Unknown: return "unknown";
  }
  return "?";
}

std::string to_string(LampEvidence e) {
  switch (e) {
    case LampEvidence::IdentityWord: return "identity-word";
    case LampEvidence::LowDegreeLetters: return "low-degree-letters";
    case LampEvidence::ActivityDegree: return "activity-degree";
    case LampEvidence::None: return "none";
  }
  return "?";
}

LampCertificate certify_germ(const GroupWord& germ_word, const ModelParams& p, std::size_t cap) {
  const GroupWord x = germ_word.reduced();
  if (x.empty()) return {LampVerdict::Trivial, LampEvidence::IdentityWord};
  const bool low = std::all_of(x.letters().begin(), x.letters().end(),
                               [&](const Generator& g) { return g.is_lambda() && g.degree() < p.d; });
  if (low) return {LampVerdict::Trivial, LampEvidence::LowDegreeLetters};
  try {
    if (is_identity(x, cap)) return {LampVerdict::Trivial, LampEvidence::IdentityWord};
    // H is generated by elements of activity degree <= d-1 and activity
    // counts are subadditive, so degree exactly d rules out membership.
    if (activity_degree(x, cap) == ActivityDegree::finite(p.d)) {
      return {LampVerdict::Nontrivial, LampEvidence::ActivityDegree};
    }
  } catch (const CapExceeded&) {
  }
  return {LampVerdict::Unknown, LampEvidence::None};
}

LampCertificate lamp_certificate(const GroupWord& g, const ModelParams& p, std::size_t cap) {
  try {
    return certify_germ(germ(g, cap).word, p, cap);
  } catch (const CapExceeded&) {
    return {LampVerdict::Unknown, LampEvidence::None};
  }
}

namespace {

// Section of s along the finite word v followed by one 0.
std::optional<Generator> section_along(const Generator& s, std::span<const Digit> v) {
  std::optional<Generator> y = s;
  for (Digit x : v) {
    if (!y) return y;
    y = y->section_at(x);
  }
  if (y) y = y->section_at(0);
  if (y && y->is_trivial()) y.reset();
  return y;
}

}  // namespace

std::optional<Generator> lamp_update_section(const GroupWord& g, const Generator& s, std::size_t cap) {
  const BoundaryPoint v = zero_ray_image(g, cap);
  return section_along(s, v.digits());
}

bool lamp_update_check(const GroupWord& g, const Generator& s, std::size_t cap) {
  const std::optional<Generator> y = lamp_update_section(g, s, cap);
  GroupWord gs = g;
  gs.push_back(s);
  GroupWord rhs = germ(g, cap).word;
  if (y) rhs = rhs * germ(GroupWord::of(*y), cap).word;
  return equal(germ(gs, cap).word, rhs, cap);
}

// ---------------------------------------------------------------------------
// LampTracker

LampTracker::LampTracker(const ModelParams& p, std::size_t word_cap, std::size_t closure_cap)
    : p_(p), word_cap_(word_cap), closure_cap_(closure_cap), germ_(p.m) {
  p_.validate();
}

void LampTracker::apply(const Generator& s) {
  if (s.alphabet() != p_.m) throw InvalidArgument("generator alphabet mismatch");
  if (s.is_trivial()) return;
  const bool at_zero = fixes_zero_ray();
  if (const std::optional<Generator> y = section_along(s, ray_.digits())) germ_.push_reduced(*y);
  ray_ = mg::apply(s, ray_);
  if (at_zero && s.degree() == p_.d) dirty_ = true;
  if (germ_.size() > word_cap_) throw CapExceeded("germ word length", word_cap_);
}

void LampTracker::apply(const GroupWord& w) {
  for (const Generator& s : w.letters()) apply(s);
}

const LampCertificate& LampTracker::certificate() {
  if (dirty_) {
    cert_ = certify_germ(germ_, p_, closure_cap_);
    ++evaluations_;
    dirty_ = false;
  }
  return cert_;
}

// ---------------------------------------------------------------------------
// Walk configuration and sampling

std::string to_string(StepMode m) {
  return m == StepMode::SubgroupUniform ? "subgroup-uniform" : "multiset-uniform";
}

StepMode parse_step_mode(const std::string& s) {
  if (s == "subgroup-uniform") return StepMode::SubgroupUniform;
  if (s == "multiset-uniform") return StepMode::MultisetUniform;
  throw InvalidArgument(fmt::format("unknown step mode '{}'", s));
}

WalkConfig WalkConfig::uniform(const ModelParams& p) {
  WalkConfig c;
  c.weights.assign(static_cast<std::size_t>(p.d) + 2, 1.0 / (p.d + 2));
  return c;
}

bool WalkConfig::normalize(const ModelParams& p) {
  if (weights.size() != static_cast<std::size_t>(p.d) + 2) {
    throw InvalidArgument(fmt::format("expected {} weights (levels -1..{})", p.d + 2, p.d));
  }
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and nonnegative");
    sum += w;
  }
  if (sum <= 0) throw InvalidArgument("weights sum to zero");
  if (std::abs(sum - 1.0) <= 1e-12) return true;
  for (double& w : weights) w /= sum;
  return false;
}

void WalkConfig::validate(const ModelParams& p) const {
  p.validate();
  if (steps < 0 || trials < 0) throw InvalidArgument("steps and trials must be nonnegative");
  if (window < 0 || checkpoint <= 0) throw InvalidArgument("invalid window or checkpoint");
  if (mode == StepMode::SubgroupUniform) {
    WalkConfig copy = *this;
    if (!copy.normalize(p)) throw InvalidArgument("weights must sum to 1");
  }
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

StepSampler::StepSampler(const ModelParams& p, const WalkConfig& cfg)
    : p_(p), mode_(cfg.mode), weights_(cfg.weights) {
  cfg.validate(p);
  if (mode_ == StepMode::MultisetUniform) ms_ = enumerate_generating_multiset(p);
}

GroupWord StepSampler::operator()(std::mt19937_64& rng) const {
  if (mode_ == StepMode::MultisetUniform) {
    std::uniform_int_distribution<std::size_t> pick(0, ms_.size() - 1);
    return GroupWord::of(ms_.generators[pick(rng)]);
  }
  std::discrete_distribution<int> level(weights_.begin(), weights_.end());
  return sample_level_subgroup(level(rng) - 1, p_, rng);
}

// ---------------------------------------------------------------------------
// Walks

SchreierWalkResult walk_schreier(const ModelParams& p, const BoundaryPoint& start, const WalkConfig& cfg) {
  const StepSampler sample(p, cfg);
  SchreierWalkResult out;
  out.trials.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.exec, [&](std::int64_t t) {
    std::mt19937_64 rng = trial_rng(cfg.seed, 0, static_cast<std::uint64_t>(t));
    SchreierTrial& tr = out.trials[t];
    tr.trial = static_cast<int>(t);
    BoundaryPoint cur = start;
    std::unordered_set<BoundaryPoint, BoundaryPointHash> seen{start};
    tr.visits = 1;
    for (int step = 1; step <= cfg.steps; ++step) {
      const GroupWord w = sample(rng);
      for (const Generator& s : w.letters()) cur = apply(s, cur);
      seen.insert(cur);
      if (cur == start) {
        ++tr.visits;
        tr.last_return = step;
      }
      if (step % cfg.checkpoint == 0) tr.support_growth.push_back(seen.size());
    }
    tr.final_support = seen.size();
    tr.end = cur;
  });
  for (const SchreierTrial& tr : out.trials) {
    out.mean_visits += tr.visits;
    out.mean_last_return += tr.last_return;
    out.return_fraction += tr.visits > 1;
  }
  if (cfg.trials > 0) {
    out.mean_visits /= cfg.trials;
    out.mean_last_return /= cfg.trials;
    out.return_fraction /= cfg.trials;
  }
  return out;
}

GroupWalkResult walk_group(const ModelParams& p, const WalkConfig& cfg, const GroupWord& start, std::uint64_t stream) {
  const StepSampler sample(p, cfg);
  GroupWord first = start;
  if (first.empty()) first = GroupWord(p.m);
  if (first.alphabet() != p.m) throw InvalidArgument("start element alphabet mismatch");
  GroupWalkResult out;
  out.trials.resize(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.exec, [&](std::int64_t t) {
    std::mt19937_64 rng = trial_rng(cfg.seed, stream, static_cast<std::uint64_t>(t));
    GroupTrial& tr = out.trials[t];
    tr.trial = static_cast<int>(t);
    LampTracker lamp(p, cfg.word_cap, cfg.closure_cap);
    lamp.apply(first);
    LampVerdict cur = lamp.certificate().verdict;
    tr.changes.emplace_back(0, cur);
    tr.zero_ray_visits = lamp.fixes_zero_ray();
    for (int step = 1; step <= cfg.steps; ++step) {
      lamp.apply(sample(rng));
      const LampVerdict v = lamp.certificate().verdict;
      if (v != cur) {
        tr.changes.emplace_back(step, v);
        cur = v;
      }
      tr.zero_ray_visits += lamp.fixes_zero_ray();
    }
    tr.final_verdict = cur;
    tr.stabilization_time = tr.changes.back().first;
    tr.stabilized = tr.stabilization_time <= std::max(0, cfg.steps - cfg.window);
    tr.germ_length = lamp.germ().size();
  });
  int stable = 0;
  for (const GroupTrial& tr : out.trials) {
    out.trivial += tr.final_verdict == LampVerdict::Trivial;
    out.nontrivial += tr.final_verdict == LampVerdict::Nontrivial;
    out.unknown += tr.final_verdict == LampVerdict::Unknown;
    stable += tr.stabilized;
  }
  out.stabilized_fraction = cfg.trials > 0 ? static_cast<double>(stable) / cfg.trials : 0.0;
  return out;
}

std::vector<HarmonicEstimate> estimate_harmonic(const ModelParams& p, const std::vector<GroupWord>& starts,
                                                const WalkConfig& cfg) {
  if (starts.size() < 2) throw InvalidArgument("need at least two starting elements");
  std::vector<HarmonicEstimate> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    GroupWalkResult r = walk_group(p, cfg, starts[i], i + 1);
    HarmonicEstimate e;
    e.start = starts[i];
    e.trials = cfg.trials;
    e.trivial = r.trivial;
    e.nontrivial = r.nontrivial;
    e.unknown = r.unknown;
    e.stabilized_fraction = r.stabilized_fraction;
    if (cfg.trials > 0) {
      e.p_trivial = static_cast<double>(r.trivial) / cfg.trials;
      e.std_error = std::sqrt(e.p_trivial * (1 - e.p_trivial) / cfg.trials);
    }
    e.walks = std::move(r);
    out.push_back(std::move(e));
  }
  return out;
}

double separation(const HarmonicEstimate& a, const HarmonicEstimate& b) {
  const double se = std::hypot(a.std_error, b.std_error);
  const double diff = std::abs(a.p_trivial - b.p_trivial);
  if (se == 0) return diff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

std::vector<GroupWord> designated_starts(const ModelParams& p) {
  p.validate();
  const Perm swap = Perm::transposition(p.m, 0, 1);
  GroupWord moved(p.m);
  moved.push_back(make_alpha(p.d, swap));
  moved.push_back(Generator::root_perm(swap));
  return {GroupWord(p.m), moved};
}

}  // namespace mg
