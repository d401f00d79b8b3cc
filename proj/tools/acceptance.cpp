// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "mothergraph/germ_walk.hpp"
#include "mothergraph/product_flow.hpp"

using namespace mg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double res(const Network& net, std::int32_t a, std::int32_t b) {
  SolverOptions o;
  o.tol = 1e-12;
  return effective_resistance(net, std::span(&a, 1), std::span(&b, 1), o).value;
}

std::uint64_t factorial(int m) {
  std::uint64_t f = 1;
  for (int i = 2; i <= m; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Action by the verbal definition on every word of length `depth`.
bool same_action(const GroupWord& g, const GroupWord& h, int depth) {
  const int m = g.alphabet();
  for (std::uint64_t x = 0; x < ipow(m, depth); ++x) {
    LetterWord u = LetterWord::from_value(x, depth, m), v = u;
    for (const Generator& s : g.letters()) u = direct_action(s, u);
    for (const Generator& s : h.letters()) v = direct_action(s, v);
    if (!(u == v)) return false;
  }
  return true;
}

Outcome degree_regularity() {
  int graphs = 0;
  for (int m = 2; m <= 3; ++m) {
    for (int d = 0; d <= 4; ++d) {
      std::uint64_t expect = factorial(m);
      for (int k = 0; k <= d; ++k) {
        expect += ipow(m - 1, k) * factorial(m - 1) * ipow(factorial(m), m - 1);
      }
      for (int n = 0; n <= 5; ++n, ++graphs) {
        const SchreierGraph g = build_graph({d, m}, n);
        for (std::int32_t v = 0; v < g.vertices(); ++v) {
          if (static_cast<std::uint64_t>(g.generator_degree(v)) != expect) {
            return {false, fmt::format("d={} m={} n={} vertex {} has degree {} != {}", d, m, n, v,
                                       g.generator_degree(v), expect)};
          }
        }
      }
    }
  }
  return {true, fmt::format("{} graphs, every vertex at the formula degree", graphs)};
}

Outcome gray_path() {
  double worst = 0, worst_dense = 0;
  for (int n = 1; n <= 12; ++n) {
    const SchreierGraph g = build_graph({0, 2}, n);
    const std::int32_t nv = g.vertices();
    std::vector<std::int32_t> order(static_cast<std::size_t>(nv));
    for (std::int32_t v = 0; v < nv; ++v) order[graycode_index(LetterWord::from_value(v, n, 2))] = v;
    if (g.net.edge_count() != static_cast<std::size_t>(nv - 1)) {
      return {false, fmt::format("n={}: {} edges, expected {}", n, g.net.edge_count(), nv - 1)};
    }
    double series = 0;
    bool unit = true;
    for (std::int32_t i = 0; i + 1 < nv; ++i) {
      const double c = g.net.conductance(order[i], order[i + 1]);
      if (c <= 0) return {false, fmt::format("n={}: Gray neighbours {} {} not adjacent", n, order[i], order[i + 1])};
      series += 1 / c;
      unit = unit && c == 1;
    }
    if (order.front() != root(n) || order.back() != antiroot(n, 1, 2)) {
      return {false, fmt::format("n={}: path ends are not root and antiroot", n)};
    }
    const double r = res(g.net, root(n), antiroot(n, 1, 2));
    worst = std::max(worst, std::abs(r - series));
    if (unit) worst = std::max(worst, std::abs(r - (std::pow(2.0, n) - 1)));
    if (n <= 9) {
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nv, nv);
      for (const WeightedEdge& e : g.net.edges()) {
        L(e.u, e.v) -= e.conductance;
        L(e.v, e.u) -= e.conductance;
        L(e.u, e.u) += e.conductance;
        L(e.v, e.v) += e.conductance;
      }
      // Ground the root: the reduced Laplacian is invertible.
      const Eigen::MatrixXd inv = L.bottomRightCorner(nv - 1, nv - 1).inverse();
      const std::int32_t b = antiroot(n, 1, 2) - 1;
      worst_dense = std::max(worst_dense, std::abs(inv(b, b) - r));
    }
  }
  const bool ok = worst <= 1e-8 && worst_dense <= 1e-8;
  return {ok, fmt::format("n=1..12 simple Gray paths; |res - series| max {:.2e}; dense check max {:.2e}; n=12 res = 4095",
                          worst, worst_dense)};
}

Outcome degree0_rate() {
  const Profile prof = resistance_profile({0, 3}, PairFamily::RootAntiroot, 4, 9);
  std::string ratios;
  bool ok = true;
  for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
    const double q = prof[i + 1].report.value / prof[i].report.value;
    ok = ok && q >= 1.35 && q <= 1.65;
    ratios += fmt::format("{}{:.4f}", i ? ", " : "", q);
  }
  return {ok, fmt::format("m=3 r(n+1)/r(n), n=4..8: {} (target 1.5)", ratios)};
}

Outcome monotone_in_n() {
  std::mt19937_64 rng(101);
  int done = 0;
  double worst = -1e300;
  while (done < 200) {
    const int m = 2 + static_cast<int>(rng() % 2);
    const int d = static_cast<int>(rng() % 4);
    const int n = 2 + static_cast<int>(rng() % 7);  // 2..8
    const int np = 1 + static_cast<int>(rng() % (n - 1));
    const std::int32_t span = static_cast<std::int32_t>(ipow(m, np));
    const std::int32_t x = static_cast<std::int32_t>(rng() % span), y = static_cast<std::int32_t>(rng() % span);
    if (x == y) continue;
    const double big = res(build_graph({d, m}, n).net, x, y);
    const double small = res(build_graph({d, m}, np).net, x, y);
    worst = std::max(worst, big - small);
    ++done;
  }
  return {worst <= 1e-8, fmt::format("200 instances, max res_n - res_n' = {:.3e}", worst)};
}

Outcome subadditive_bound() {
  std::mt19937_64 rng(202);
  int checked = 0;
  double worst = -1e300;
  for (int m = 2; m <= 3; ++m) {
    for (int d = 0; d <= 3; ++d) {
      std::vector<double> level(8, 0.0);  // res_s(o, antiroot_s)
      for (int s = 1; s <= 7; ++s) level[s] = res(build_graph({d, m}, s).net, root(s), antiroot(s, 1, m));
      for (int n = 1; n <= 7; ++n) {
        const SchreierGraph g = build_graph({d, m}, n);
        const std::int32_t nv = g.vertices();
        SolverOptions o;
        o.tol = 1e-12;
        for (int t = 0; t < 100; ++t, ++checked) {
          const std::int32_t x = nv <= 100 ? t % nv : static_cast<std::int32_t>(rng() % nv);
          double bound = 0;
          std::int32_t v = x;
          for (int s = 1; s <= n; ++s, v /= m) {
            if (v % m != 0) bound += level[s];
          }
          const double r = x == 0 ? 0.0 : res(g.net, root(n), x);
          worst = std::max(worst, r - bound);
        }
      }
    }
  }
  return {worst <= 1e-8, fmt::format("{} samples, max res(o,x) - bound = {:.3e}", checked, worst)};
}

Outcome monotone_in_d() {
  std::mt19937_64 rng(303);
  int checked = 0;
  double worst = -1e300;
  for (int m = 2; m <= 3; ++m) {
    for (int n = 1; n <= 7; ++n) {
      std::vector<SchreierGraph> gs;
      for (int d = 0; d <= 4; ++d) gs.push_back(build_graph({d, m}, n));
      const std::int32_t nv = gs[0].vertices();
      std::vector<std::pair<std::int32_t, std::int32_t>> pairs{{root(n), antiroot(n, 1, m)}};
      for (int t = 0; t < 10; ++t) {
        const std::int32_t a = static_cast<std::int32_t>(rng() % nv), b = static_cast<std::int32_t>(rng() % nv);
        if (a != b) pairs.emplace_back(a, b);
      }
      for (const auto& [a, b] : pairs) {
        double prev = res(gs[0].net, a, b);
        for (int d = 1; d <= 4; ++d, ++checked) {
          const double r = res(gs[d].net, a, b);
          worst = std::max(worst, r - prev);
          prev = r;
        }
      }
    }
  }
  return {worst <= 1e-8, fmt::format("{} (pair, d -> d+1) steps, max increase {:.3e}", checked, worst)};
}

Outcome quotient_invariance() {
  double worst = 0;
  for (int d = 0; d <= 1; ++d) {
    for (int n = 1; n <= 5; ++n) {
      const SchreierGraph g = build_graph({d, 3}, n);
      const std::vector<std::int32_t> o{root(n)};
      const std::vector<std::int32_t> anti = antiroots(n, 3);
      SolverOptions opts;
      opts.tol = 1e-13;
      const double full = effective_resistance(g.net, o, anti, opts).value;
      const QuotientGraph q = quotient_by_symmetry(g);
      const double quot = res(q.net, quotient_class(root(n), n, 3), quotient_class(anti[0], n, 3));
      worst = std::max(worst, std::abs(full - quot));
    }
  }
  return {worst <= 1e-8, fmt::format("m=3, d<=1, n<=5: max |full - quotient| = {:.3e}", worst)};
}

Outcome bounded_regime() {
  const Profile p4 = resistance_profile({4, 2}, PairFamily::RootAntiroot, 6, 13);
  const double q = p4.back().report.value / p4[4].report.value;  // r(13)/r(10)
  const Profile p3 = resistance_profile({3, 2}, PairFamily::RootAntiroot, 8, 16);
  double lo = 1e300, hi = 0;
  std::string norm;
  for (const ProfilePoint& pt : p3) {
    const double l = std::log(static_cast<double>(pt.n));
    const double v = pt.report.value / (l * l);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    norm += fmt::format("{}{:.3f}", norm.empty() ? "" : " ", v);
  }
  std::string raw3;
  for (const ProfilePoint& pt : p3) raw3 += fmt::format("{}{:.4f}", raw3.empty() ? "" : " ", pt.report.value);
  const bool ok4 = q <= 1.10, ok3 = hi / lo <= 1.5;
  return {ok4 && ok3,
          fmt::format("d=4: r(13)/r(10) = {:.4f} [{}]; d=3: r(n)/log^2 n over n=8..16 = {} (max/min {:.3f}) [{}]; "
                      "raw d=3 r(n): {}",
                      q, ok4 ? "ok" : "fail", norm, hi / lo, ok3 ? "ok" : "fail", raw3)};
}

Outcome product_flow() {
  const ModelParams p{3, 2};
  SolverOptions o;
  const std::vector<double> rlow = max_resistance_table({0, 2}, 9, o);
  const std::vector<double> rhigh = max_resistance_table(p, 9, o);
  const Profile prof = resistance_profile(p, PairFamily::RootAntiroot, 1, 9);
  bool ok = true;
  std::vector<double> ratios;
  std::string rows;
  for (int n = 6; n <= 9; ++n) {
    const SchreierGraph g = build_graph(p, n);
    const FlowSchedule sched = gamma_schedule(p, n, 0, GammaMode::Auto, prof);
    ProductFlow pf = build_product_flow(g, root(n), antiroot(n, 1, 2), sched, o);
    const EnergyBoundReport r = validate_energy_bound(pf, rlow, rhigh, o);
    ok = ok && r.max_divergence_error <= 1e-9 && r.energy >= r.resistance - 1e-8 && std::isfinite(r.ratio) &&
         r.ratio > 0;
    ratios.push_back(r.ratio);
    rows += fmt::format(" n={}: E={:.4f} R={:.4f} RHS={:.4f} ratio={:.4f} div={:.1e} audits={}{}{}{}{};", n, r.energy,
                        r.resistance, r.rhs, r.ratio, r.max_divergence_error, r.transport_ok ? "T" : "t",
                        r.disjoint_ok ? "D" : "d", r.overlap_ok ? "O" : "o", r.stage_bounds_ok ? "S" : "s",
                        r.convexity_ok ? "C" : "c");
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  ok = ok && *hi / *lo <= 5.0;
  return {ok, fmt::format("{} ratio max/min = {:.3f}", rows, *hi / *lo)};
}

Outcome algebra() {
  std::mt19937_64 rng(404);
  int laws = 0, commute = 0, inverses = 0;
  const auto perms = Perm::all(3);
  const auto fix0 = Perm::all_fixing_zero(3);
  for (int t = 0; t < 40; ++t, ++laws) {
    const int k = t % 4;
    const Perm s = perms[rng() % perms.size()], u = perms[rng() % perms.size()];
    GroupWord lhs(3, {make_alpha(k, s), make_alpha(k, u)});
    GroupWord rhs = GroupWord::of(make_alpha(k, s * u));
    if (!equal(lhs, rhs) || !same_action(lhs, rhs, 6)) return {false, fmt::format("alpha law fails at k={}", k)};
    const Perm r1 = fix0[rng() % fix0.size()], r2 = fix0[rng() % fix0.size()];
    lhs = GroupWord(3, {make_beta(k, r1), make_beta(k, r2)});
    rhs = GroupWord::of(make_beta(k, r1 * r2));
    if (!equal(lhs, rhs) || !same_action(lhs, rhs, 6)) return {false, fmt::format("beta law fails at k={}", k)};
  }
  const auto elems = WreathElem::all(3);
  while (commute < 200) {
    const int k = 1 + commute % 3;
    const auto trigs = all_triggers(k, 3);
    const auto& w1 = trigs[rng() % trigs.size()];
    const auto& w2 = trigs[rng() % trigs.size()];
    if (w1 == w2) continue;
    const Generator a = Generator::lambda(w1, elems[rng() % elems.size()]);
    const Generator b = Generator::lambda(w2, elems[rng() % elems.size()]);
    const GroupWord c(3, {a, b, a.inverse(), b.inverse()});
    if (!is_identity(c) || !same_action(c, GroupWord(3), 5)) return {false, "cross-trigger commutator nontrivial"};
    ++commute;
  }
  const Digit one[] = {1};
  const std::size_t l2 = enumerate_subgroup_elements(one, {1, 2}).size();
  const std::size_t l3 = enumerate_subgroup_elements(one, {1, 3}).size();
  for (int m = 2; m <= 3; ++m) {
    const GeneratorMultiset ms = enumerate_generating_multiset({2, m});
    for (std::size_t i = 0; i < ms.size(); ++i, ++inverses) {
      const GroupWord c(m, {ms.generators[i], ms.generators[ms.inverse[i]]});
      if (!is_identity(c) || !same_action(c, GroupWord(m), 5)) return {false, "multiset not closed under inverse"};
    }
  }
  const bool ok = l2 == 2 && l3 == 72;
  return {ok, fmt::format("{} composition laws, {} commutators, |L^w| = {} (m=2) and {} (m=3), {} inverse pairs", laws,
                          commute, l2, l3, inverses)};
}

Outcome germ_lamp() {
  std::mt19937_64 rng(505);
  int gy = 0, stable = 0, sound = 0;
  for (int m = 2; m <= 3; ++m) {
    for (int d = 1; d <= 4; ++d) {
      const GeneratorMultiset ms = enumerate_generating_multiset({d, m});
      auto word = [&](int max_len, bool only_low) {
        GroupWord w(m);
        const int len = static_cast<int>(rng() % (max_len + 1));
        while (static_cast<int>(w.size()) < len) {
          const Generator& s = ms.generators[rng() % ms.size()];
          if (only_low && !(s.is_lambda() && s.degree() < d)) continue;
          w.push_back(s);
        }
        return w;
      };
      for (int t = 0; t < 63; ++t) {
        const GroupWord g = word(10, false);
        if (!lamp_update_check(g, ms.generators[rng() % ms.size()])) return {false, "germ(gs) != germ(g) germ(y)"};
        ++gy;
        const GermResult r = germ(g);
        GroupWord sec = section(g, LetterWord::zeros(m, r.level));
        for (int l = 0; l <= 4; ++l) {
          if (!equal(sec, r.word)) return {false, "zero-ray section drifts after the stabilization level"};
          sec = section(sec, LetterWord::zeros(m, 1));
        }
        ++stable;
      }
      for (int t = 0; t < 25; ++t, ++sound) {
        if (lamp_certificate(word(12, true), {d, m}).verdict == LampVerdict::Nontrivial) {
          return {false, "Nontrivial certificate on an H-word"};
        }
      }
    }
  }
  return {gy >= 500 && stable >= 500 && sound >= 200,
          fmt::format("{} lamp-law pairs, {} germ stability checks, {} H-words never Nontrivial", gy, stable, sound)};
}

Outcome harmonic() {
  const ModelParams p{4, 2};
  WalkConfig cfg = WalkConfig::uniform(p);
  cfg.steps = 2000;
  cfg.trials = 200;
  cfg.seed = 42;
  const GroupWalkResult g = walk_group(p, cfg);
  const auto est = estimate_harmonic(p, designated_starts(p), cfg);
  const double sep = separation(est[0], est[1]);
  const bool ok = g.stabilized_fraction >= 0.95 && sep > 3.0;
  return {ok, fmt::format("stabilized {:.1f}% of trials; P(Trivial) = {:.3f} +- {:.3f} (identity) vs {:.3f} +- {:.3f} "
                          "(lit, moved); separation {:.2f} SE",
                          100 * g.stabilized_fraction, est[0].p_trivial, est[0].std_error, est[1].p_trivial,
                          est[1].std_error, sep)};
}

Outcome activity() {
  int checked = 0, agree_from = 0;
  for (int m = 2; m <= 3; ++m) {
    for (int k = -1; k <= 4; ++k) {
      std::vector<GroupWord> words{GroupWord::of(make_alpha(k, Perm::transposition(m, 0, 1)))};
      if (m == 3 && k >= 0) words.push_back(GroupWord::of(make_beta(k, Perm::transposition(3, 1, 2))));
      for (const GroupWord& w : words) {
        const MooreDiagram dg = build_moore_diagram(w);
        const ActivityDegree structural = activity_degree(dg);
        // The fit is taken on the counts up to depth 12; shallower prefixes are
        // only reported (quadratic growth looks exponential over 4 levels).
        const ActivityDegree fit = empirical_activity_degree(activity_counts(dg, 12));
        ++checked;
        if (!(fit == structural)) {
          return {false, fmt::format("m={} k={}: structural {} vs fit {}", m, k, structural.to_string(),
                                     fit.to_string())};
        }
        int from = 12;
        while (from > 1 && empirical_activity_degree(activity_counts(dg, from - 1)) == structural) --from;
        agree_from = std::max(agree_from, from);
        if (!(activity_degree(dg) == ActivityDegree::finite(k))) return {false, "alpha/beta degree is not k"};
      }
    }
  }
  return {true, fmt::format("{} elements (alpha_k, beta_k, k <= 4): structural degree equals the fit on counts to depth "
                           "12; the fit is already right from depth {} on", checked, agree_from)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"degree regularity", degree_regularity},
      {"Gray-code path", gray_path},
      {"degree-0 rate", degree0_rate},
      {"monotonicity in n", monotone_in_n},
      {"resistance subadditivity", subadditive_bound},
      {"monotonicity in d", monotone_in_d},
      {"quotient invariance", quotient_invariance},
      {"bounded-resistance regime", bounded_regime},
      {"product flow", product_flow},
      {"algebra suite", algebra},
      {"germ/lamp suite", germ_lamp},
      {"harmonic witness", harmonic},
      {"activity degree", activity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
