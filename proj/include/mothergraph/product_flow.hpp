#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mothergraph/resistance.hpp"

namespace mg {

enum class GammaMode { Auto, Constant, Custom };

struct FlowSchedule {
  int d_prime = 0;
  std::vector<double> gamma;  // gamma[s] for s = 0..n (gamma[0] unused)
  int stage_max = 0;          // sigma: smallest s with floor(gamma_s) + 1 + s >= n

  int floor_gamma(int s) const;
};

// Auto: gamma_s = log_{m^2/(m-1)}(r(s) s^(d-1)) from the monotone-corrected
// profile (its last value is reused past its end); constant: gamma_s = value;
// custom: gamma_s = custom[s-1]. In every mode gamma_1..gamma_d = 1, values are
// clamped below by 1 and made nondecreasing.
FlowSchedule gamma_schedule(const ModelParams& p, int n, int d_prime, GammaMode mode, const Profile& r_table = {},
                            double constant = 1.0, const std::vector<double>& custom = {});

// Stage s uses the vertex families
//   X_s 1 Y_s    : X * m^(s+1) + m^s     + y,  y in Y_s
//   X_s 0 1 Y_s-1: X * m^(s+1) + m^(s-1) + y,  y in Y_{s-1}
// where X ranges over X_s, the words on positions s+2..n.
struct StageSets {
  int stage = 0;
  std::vector<std::int64_t> x;  // X_s
  std::vector<std::int64_t> y;  // Y_s
};
StageSets build_stage_sets(std::int32_t a, const ModelParams& p, int n, const FlowSchedule& sched, int s);

struct StageFlow {
  enum class Kind { Initial, Horizontal, Vertical };
  Kind kind = Kind::Initial;
  int stage = 0;
  bool reversed = false;  // belongs to the a' chain
  FlowAssignment flow;
  double energy = 0;
  std::size_t source_size = 0;
  std::size_t target_size = 0;
  double bound = 0;      // per-stage energy bound from the r-bar tables (0 if not audited)
  int overlap = 1;       // number of stage flows sharing an edge with this one, itself included
  // Average energy of the pairwise unit current flows being averaged; -1 when
  // the blocks are too large for the dense check.
  double pair_average_energy = -1;
  std::vector<std::int32_t> sources;
  std::vector<std::int32_t> targets;
};

std::string to_string(StageFlow::Kind k);

struct ProductFlow {
  ModelParams params;
  int n = 0;
  std::int32_t a = 0;
  std::int32_t a_prime = 0;
  FlowSchedule schedule;
  FlowAssignment total;  // unit flow from a to a'
  std::vector<StageFlow> stages;
};

// Maximal resistances r-bar(d, m, k) for k = 0..k_max (index k); exhaustive
// where m^k <= 1024, otherwise the max over antiroots and a sampled search.
std::vector<double> max_resistance_table(const ModelParams& p, int k_max, const SolverOptions& opts = {});

// Horizontal spread X_{s-1} 1 Y_{s-1} -> X_s 0 1 Y_{s-1} (s = sigma uses X_sigma).
StageFlow horizontal_flow(std::int32_t a, const SchreierGraph& g, const FlowSchedule& sched, int s,
                          const SolverOptions& opts = {});
// Vertical spread X_s 0 1 Y_{s-1} -> X_s 1 Y_s.
StageFlow vertical_flow(std::int32_t a, const SchreierGraph& g, const FlowSchedule& sched, int s,
                        const SolverOptions& opts = {});

ProductFlow build_product_flow(const SchreierGraph& g, std::int32_t a, std::int32_t a_prime,
                               const FlowSchedule& sched, const SolverOptions& opts = {});

struct EnergyBoundReport {
  double energy = 0;
  double rhs = 0;
  double ratio = 0;
  double resistance = 0;       // res(a, a')
  double overlap_bound = 0;    // sum of overlap * stage energy
  double max_divergence_error = 0;
  double max_transport_error = 0;
  bool divergence_ok = false;
  bool transport_ok = false;
  bool disjoint_ok = false;
  bool overlap_ok = false;
  bool thompson_ok = false;
  bool stage_bounds_ok = false;
  bool convexity_ok = false;
};

// rbar_low = r-bar(d', m, .), rbar_high = r-bar(d, m, .), both indexed by n.
EnergyBoundReport validate_energy_bound(ProductFlow& flow, const std::vector<double>& rbar_low,
                                        const std::vector<double>& rbar_high, const SolverOptions& opts = {});

double energy_bound_rhs(const FlowSchedule& sched, const ModelParams& p, int n, const std::vector<double>& rbar_low,
                        const std::vector<double>& rbar_high);

}  // namespace mg
