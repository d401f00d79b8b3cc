#include "mothergraph/product_flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "mothergraph/errors.hpp"

namespace mg {

namespace {

std::int64_t ipow(int m, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= m;
  return r;
}

int popcount_nonzero(std::int64_t v, int m) {
  int c = 0;
  for (; v > 0; v /= m) c += v % m != 0;
  return c;
}

// Words on positions 1..len with exactly k nonzero letters.
std::vector<std::int64_t> words_with_nonzero(int len, int k, int m) {
  std::vector<std::int64_t> out;
  const std::int64_t total = ipow(m, len);
  for (std::int64_t y = 0; y < total; ++y) {
    if (popcount_nonzero(y, m) == k) out.push_back(y);
  }
  return out;
}

int block_length(const FlowSchedule& sched, int n, int s) {
  return s < sched.stage_max ? sched.floor_gamma(s) + 2 : n - sched.stage_max;
}

// Uniform source on `from`, uniform sink on `to`, solved inside the subgraph
// induced on `block`; returns the flow in global vertex ids.
FlowAssignment spread(const Network& net, const std::vector<std::int32_t>& block,
                      const std::vector<std::int32_t>& from, const std::vector<std::int32_t>& to,
                      const SolverOptions& opts, double* pair_average) {
  const Network sub = net.induced(block);
  std::map<std::int32_t, std::int32_t> local;
  for (std::size_t i = 0; i < block.size(); ++i) local.emplace(block[i], static_cast<std::int32_t>(i));
  std::vector<double> demand(block.size(), 0.0);
  for (std::int32_t v : from) demand[local.at(v)] += 1.0 / static_cast<double>(from.size());
  for (std::int32_t v : to) demand[local.at(v)] -= 1.0 / static_cast<double>(to.size());
  SolverOptions inner = opts;
  inner.exec = Exec::Serial;
  const CurrentFlow cf = demand_flow(sub, demand, inner);
  if (pair_average && block.size() <= 1024) {
    const auto r = all_pairs_resistance(sub);
    double s = 0;
    for (std::int32_t u : from) {
      for (std::int32_t v : to) s += r[local.at(u)][local.at(v)];
    }
    *pair_average = s / static_cast<double>(from.size() * to.size());
  } else if (pair_average) {
    *pair_average = -1;
  }
  return cf.flow.relabeled(block);
}

void check_stage(const FlowSchedule& sched, int s, int lo) {
  if (s < lo || s > sched.stage_max) {
    throw InvalidArgument(fmt::format("stage {} outside {}..{}", s, lo, sched.stage_max));
  }
}

}  // namespace

int FlowSchedule::floor_gamma(int s) const {
  if (s < 0 || s >= static_cast<int>(gamma.size())) throw InvalidArgument("stage outside the gamma schedule");
  return std::max(1, static_cast<int>(std::floor(gamma[s] + 1e-12)));
}

FlowSchedule gamma_schedule(const ModelParams& p, int n, int d_prime, GammaMode mode, const Profile& r_table,
                            double constant, const std::vector<double>& custom) {
  p.validate();
  if (p.d < 1) throw InvalidArgument("the product flow needs d >= 1");
  if (d_prime < 0 || d_prime > p.d - 1) throw InvalidArgument("d' must lie in 0..d-1");
  if (n < p.d + 2) throw InvalidArgument(fmt::format("the product flow needs n >= d + 2 = {}", p.d + 2));
  FlowSchedule sched;
  sched.d_prime = d_prime;
  sched.gamma.assign(static_cast<std::size_t>(n) + 1, 1.0);
  Profile r;
  if (mode == GammaMode::Auto) {
    if (r_table.empty()) throw InvalidArgument("automatic gamma needs a resistance profile");
    r = monotone_corrected(r_table);
  }
  if (mode == GammaMode::Custom && custom.empty()) throw InvalidArgument("custom gamma needs values");
  const double base = static_cast<double>(p.m) * p.m / (p.m - 1);
  for (int s = p.d + 1; s <= n; ++s) {
    double g = 1.0;
    switch (mode) {
      case GammaMode::Auto: {
        double rs = r.front().report.value;
        for (const auto& pt : r) {
          if (pt.n <= s) rs = pt.report.value;
        }
        g = std::log(rs * std::pow(static_cast<double>(s), p.d - 1)) / std::log(base);
        break;
      }
      case GammaMode::Constant: g = constant; break;
      case GammaMode::Custom: g = custom[std::min<std::size_t>(static_cast<std::size_t>(s - 1), custom.size() - 1)]; break;
    }
    sched.gamma[s] = std::max({1.0, g, sched.gamma[s - 1]});
  }
  sched.stage_max = -1;
  for (int s = 1; s <= n; ++s) {
    if (sched.floor_gamma(s) + 1 + s >= n) {
      sched.stage_max = s;
      break;
    }
  }
  if (sched.stage_max < p.d) throw InvalidArgument("schedule infeasible for this n");
  return sched;
}

StageSets build_stage_sets(std::int32_t a, const ModelParams& p, int n, const FlowSchedule& sched, int s) {
  check_stage(sched, s, p.d - 1);
  if (a < 0 || a >= ipow(p.m, n)) throw InvalidArgument("terminal vertex out of range");
  StageSets out;
  out.stage = s;
  const int m = p.m;
  if (s == sched.stage_max) {
    const std::int64_t count = ipow(m, n - s - 1);
    for (std::int64_t x = 0; x < count; ++x) out.x.push_back(x);
  } else {
    const int g = sched.floor_gamma(s);
    // a with its lowest g+s+1 digits erased, lowest remaining digit cycled.
    const std::int64_t high = a / ipow(m, g + s + 1);
    const std::int64_t star = high - high % m + (high % m + 1) % m;
    for (std::int64_t x = 0; x < ipow(m, g); ++x) out.x.push_back(star * ipow(m, g) + x);
  }
  out.y = words_with_nonzero(s, p.d - sched.d_prime - 1, m);
  return out;
}

std::string to_string(StageFlow::Kind k) {
  switch (k) {
    case StageFlow::Kind::Initial: return "initial";
    case StageFlow::Kind::Horizontal: return "horizontal";
    case StageFlow::Kind::Vertical: return "vertical";
  }
  return "?";
}

StageFlow horizontal_flow(std::int32_t a, const SchreierGraph& g, const FlowSchedule& sched, int s,
                          const SolverOptions& opts) {
  const ModelParams& p = g.params;
  const int n = g.n, m = p.m;
  check_stage(sched, s, p.d);
  const StageSets prev = build_stage_sets(a, p, n, sched, s - 1);
  const StageSets cur = build_stage_sets(a, p, n, sched, s);
  const int len = block_length(sched, n, s);
  // Block: positions s+1..s+len are free, s is 1, y below, a's digits above.
  const std::int64_t high = s + len < n ? a / ipow(m, s + len) : 0;
  StageFlow out;
  out.kind = StageFlow::Kind::Horizontal;
  out.stage = s;
  std::vector<FlowAssignment> parts(prev.y.size());
  std::vector<double> averages(prev.y.size(), 0.0);
  std::vector<std::vector<std::int32_t>> srcs(prev.y.size()), dsts(prev.y.size());
  parallel_for(static_cast<std::int64_t>(prev.y.size()), opts.exec, [&](std::int64_t i) {
    const std::int64_t y = prev.y[i];
    const std::int64_t low = ipow(m, s - 1) + y;
    std::vector<std::int32_t> block;
    for (std::int64_t xb = 0; xb < ipow(m, len); ++xb) {
      block.push_back(static_cast<std::int32_t>((high * ipow(m, len) + xb) * ipow(m, s) + low));
    }
    for (std::int64_t x : prev.x) srcs[i].push_back(static_cast<std::int32_t>(x * ipow(m, s) + low));
    for (std::int64_t x : cur.x) dsts[i].push_back(static_cast<std::int32_t>(x * ipow(m, s + 1) + low));
    for (std::int32_t v : srcs[i]) {
      if (v / ipow(m, s + len) != high) throw InvalidArgument("horizontal source outside its block");
    }
    parts[i] = spread(g.net, block, srcs[i], dsts[i], opts, &averages[i]);
  });
  const double w = 1.0 / static_cast<double>(prev.y.size());
  bool have_average = true;
  double average = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.flow.add(parts[i], w);
    out.sources.insert(out.sources.end(), srcs[i].begin(), srcs[i].end());
    out.targets.insert(out.targets.end(), dsts[i].begin(), dsts[i].end());
    have_average = have_average && averages[i] >= 0;
    average += averages[i] * w * w;
  }
  out.pair_average_energy = have_average ? average : -1;
  out.source_size = out.sources.size();
  out.target_size = out.targets.size();
  out.energy = out.flow.energy(g.net);
  return out;
}

StageFlow vertical_flow(std::int32_t a, const SchreierGraph& g, const FlowSchedule& sched, int s,
                        const SolverOptions& opts) {
  const ModelParams& p = g.params;
  const int n = g.n, m = p.m;
  check_stage(sched, s, p.d);
  if (s == sched.stage_max) throw InvalidArgument("no vertical spread at the last stage");
  const StageSets cur = build_stage_sets(a, p, n, sched, s);
  const std::vector<std::int64_t> y_prev = words_with_nonzero(s - 1, p.d - sched.d_prime - 1, m);
  StageFlow out;
  out.kind = StageFlow::Kind::Vertical;
  out.stage = s;
  std::vector<FlowAssignment> parts(cur.x.size());
  std::vector<double> averages(cur.x.size(), 0.0);
  std::vector<std::vector<std::int32_t>> srcs(cur.x.size()), dsts(cur.x.size());
  parallel_for(static_cast<std::int64_t>(cur.x.size()), opts.exec, [&](std::int64_t i) {
    const std::int64_t base = cur.x[i] * ipow(m, s + 1);
    std::vector<std::int32_t> block;
    for (std::int64_t yy = 0; yy < ipow(m, s + 1); ++yy) block.push_back(static_cast<std::int32_t>(base + yy));
    for (std::int64_t y : y_prev) srcs[i].push_back(static_cast<std::int32_t>(base + ipow(m, s - 1) + y));
    for (std::int64_t y : cur.y) dsts[i].push_back(static_cast<std::int32_t>(base + ipow(m, s) + y));
    parts[i] = spread(g.net, block, srcs[i], dsts[i], opts, &averages[i]);
  });
  const double w = 1.0 / static_cast<double>(cur.x.size());
  bool have_average = true;
  double average = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.flow.add(parts[i], w);
    out.sources.insert(out.sources.end(), srcs[i].begin(), srcs[i].end());
    out.targets.insert(out.targets.end(), dsts[i].begin(), dsts[i].end());
    have_average = have_average && averages[i] >= 0;
    average += averages[i] * w * w;
  }
  out.pair_average_energy = have_average ? average : -1;
  out.source_size = out.sources.size();
  out.target_size = out.targets.size();
  out.energy = out.flow.energy(g.net);
  return out;
}

namespace {

std::vector<StageFlow> chain(const SchreierGraph& g, std::int32_t a, const FlowSchedule& sched,
                             const SolverOptions& opts) {
  const ModelParams& p = g.params;
  const int m = p.m, d = p.d;
  std::vector<StageFlow> out;
  // Initial current flow from a to uniform measure on X_{d-1} 1 Y_{d-1}.
  const StageSets first = build_stage_sets(a, p, g.n, sched, d - 1);
  StageFlow init;
  init.kind = StageFlow::Kind::Initial;
  init.stage = d - 1;
  init.sources = {a};
  for (std::int64_t x : first.x) {
    for (std::int64_t y : first.y) {
      init.targets.push_back(static_cast<std::int32_t>(x * ipow(m, d) + ipow(m, d - 1) + y));
    }
  }
  std::vector<double> demand(static_cast<std::size_t>(g.vertices()), 0.0);
  demand[a] += 1.0;
  for (std::int32_t v : init.targets) demand[v] -= 1.0 / static_cast<double>(init.targets.size());
  SolverOptions inner = opts;
  init.flow = demand_flow(g.net, demand, inner).flow;
  init.energy = init.flow.energy(g.net);
  init.source_size = 1;
  init.target_size = init.targets.size();
  out.push_back(std::move(init));
  for (int s = d; s < sched.stage_max; ++s) {
    out.push_back(horizontal_flow(a, g, sched, s, opts));
    out.push_back(vertical_flow(a, g, sched, s, opts));
  }
  out.push_back(horizontal_flow(a, g, sched, sched.stage_max, opts));
  return out;
}

}  // namespace

ProductFlow build_product_flow(const SchreierGraph& g, std::int32_t a, std::int32_t a_prime,
                               const FlowSchedule& sched, const SolverOptions& opts) {
  if (a == a_prime) throw InvalidArgument("terminals must differ");
  if (a < 0 || a_prime < 0 || a >= g.vertices() || a_prime >= g.vertices()) {
    throw InvalidArgument("terminal vertex out of range");
  }
  if (g.n < g.params.d + 2) throw InvalidArgument("the product flow needs n >= d + 2");
  if (static_cast<int>(sched.gamma.size()) != g.n + 1) throw InvalidArgument("schedule built for another n");
  ProductFlow pf;
  pf.params = g.params;
  pf.n = g.n;
  pf.a = a;
  pf.a_prime = a_prime;
  pf.schedule = sched;
  pf.stages = chain(g, a, sched, opts);
  for (StageFlow& st : chain(g, a_prime, sched, opts)) {
    st.reversed = true;
    st.flow = st.flow.reversed();
    std::swap(st.sources, st.targets);
    std::swap(st.source_size, st.target_size);
    pf.stages.push_back(std::move(st));
  }
  for (const StageFlow& st : pf.stages) pf.total.add(st.flow);
  return pf;
}

std::vector<double> max_resistance_table(const ModelParams& p, int k_max, const SolverOptions& opts) {
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    const SchreierGraph g = build_graph(p, k, opts.exec);
    const SearchMode mode = g.vertices() <= 1024 ? SearchMode::Exhaustive : SearchMode::Sampled;
    out[k] = max_resistance_search(g, mode, 200, 1, opts).value;
  }
  return out;
}

double energy_bound_rhs(const FlowSchedule& sched, const ModelParams& p, int n, const std::vector<double>& rbar_low,
                        const std::vector<double>& rbar_high) {
  const int d = p.d, dp = sched.d_prime;
  double rhs = 0;
  for (int s = 1; s <= n - 2; ++s) {
    const int g = sched.floor_gamma(s);
    if (g >= static_cast<int>(rbar_low.size()) || s >= static_cast<int>(rbar_high.size())) {
      throw InvalidArgument(fmt::format("r-bar tables too short for stage {}", s));
    }
    rhs += rbar_low[g] / std::pow(static_cast<double>(s), d - dp - 1) + rbar_high[s] / std::pow(p.m, g);
  }
  return rhs;
}

EnergyBoundReport validate_energy_bound(ProductFlow& pf, const std::vector<double>& rbar_low,
                                        const std::vector<double>& rbar_high, const SolverOptions& opts) {
  const SchreierGraph g = build_graph(pf.params, pf.n, opts.exec);
  const std::int32_t nv = g.vertices();
  EnergyBoundReport r;
  r.energy = pf.total.energy(g.net);
  r.rhs = energy_bound_rhs(pf.schedule, pf.params, pf.n, rbar_low, rbar_high);
  r.ratio = r.energy / r.rhs;
  SolverOptions tight = opts;
  tight.tol = std::min(opts.tol, 1e-12);
  r.resistance = effective_resistance(g.net, std::span(&pf.a, 1), std::span(&pf.a_prime, 1), tight).value;
  r.thompson_ok = r.energy >= r.resistance - 1e-8;

  // Divergence of the total flow.
  const auto div = pf.total.divergence(nv);
  for (std::int32_t v = 0; v < nv; ++v) {
    const double expect = v == pf.a ? 1.0 : v == pf.a_prime ? -1.0 : 0.0;
    r.max_divergence_error = std::max(r.max_divergence_error, std::abs(div[v] - expect));
  }
  r.divergence_ok = r.max_divergence_error <= 1e-9;

  // Each stage moves uniform measure onto uniform measure.
  for (const StageFlow& st : pf.stages) {
    std::vector<double> expect(static_cast<std::size_t>(nv), 0.0);
    for (std::int32_t v : st.sources) expect[v] += 1.0 / static_cast<double>(st.sources.size());
    for (std::int32_t v : st.targets) expect[v] -= 1.0 / static_cast<double>(st.targets.size());
    const auto sd = st.flow.divergence(nv);
    for (std::int32_t v = 0; v < nv; ++v) {
      r.max_transport_error = std::max(r.max_transport_error, std::abs(sd[v] - expect[v]));
    }
  }
  r.transport_ok = r.max_transport_error <= 1e-9;

  // Same-kind stage flows of one chain at different s < sigma share no vertex.
  r.disjoint_ok = true;
  for (std::size_t i = 0; i < pf.stages.size(); ++i) {
    const StageFlow& si = pf.stages[i];
    if (si.kind == StageFlow::Kind::Initial || si.stage >= pf.schedule.stage_max) continue;
    const auto sup_i = si.flow.support(1e-15);
    for (std::size_t j = i + 1; j < pf.stages.size(); ++j) {
      const StageFlow& sj = pf.stages[j];
      if (sj.kind != si.kind || sj.reversed != si.reversed || sj.stage >= pf.schedule.stage_max) continue;
      const auto sup_j = sj.flow.support(1e-15);
      std::vector<std::int32_t> common;
      std::set_intersection(sup_i.begin(), sup_i.end(), sup_j.begin(), sup_j.end(), std::back_inserter(common));
      if (!common.empty()) r.disjoint_ok = false;
    }
  }

  // Overlap multiplicities and the quadratic-form bound.
  std::vector<std::set<std::pair<std::int32_t, std::int32_t>>> edges(pf.stages.size());
  for (std::size_t i = 0; i < pf.stages.size(); ++i) {
    for (const auto& e : pf.stages[i].flow.entries()) {
      if (e.flow != 0) edges[i].insert({e.u, e.v});
    }
  }
  r.overlap_bound = 0;
  for (std::size_t i = 0; i < pf.stages.size(); ++i) {
    int count = 0;
    for (std::size_t j = 0; j < pf.stages.size(); ++j) {
      const bool share = std::any_of(edges[i].begin(), edges[i].end(), [&](const auto& e) { return edges[j].count(e) > 0; });
      count += share || i == j;
    }
    pf.stages[i].overlap = count;
    r.overlap_bound += count * pf.stages[i].energy;
  }
  r.overlap_ok = r.energy <= r.overlap_bound * (1 + 1e-12) + 1e-12;

  // Per-stage energy bounds and convexity.
  r.stage_bounds_ok = true;
  r.convexity_ok = true;
  const int m = pf.params.m;
  for (StageFlow& st : pf.stages) {
    if (st.kind == StageFlow::Kind::Horizontal) {
      const int len = block_length(pf.schedule, pf.n, st.stage);
      const auto y = words_with_nonzero(st.stage - 1, pf.params.d - pf.schedule.d_prime - 1, m);
      if (len < static_cast<int>(rbar_low.size())) st.bound = rbar_low[len] / static_cast<double>(y.size());
    } else if (st.kind == StageFlow::Kind::Vertical) {
      const auto xs = build_stage_sets(st.reversed ? pf.a_prime : pf.a, pf.params, pf.n, pf.schedule, st.stage).x;
      if (st.stage + 1 < static_cast<int>(rbar_high.size())) {
        st.bound = rbar_high[st.stage + 1] / static_cast<double>(xs.size());
      }
    }
    if (st.bound > 0 && st.energy > st.bound + 1e-9) r.stage_bounds_ok = false;
    if (st.pair_average_energy >= 0 && st.energy > st.pair_average_energy + 1e-9) r.convexity_ok = false;
  }
  return r;
}

}  // namespace mg
