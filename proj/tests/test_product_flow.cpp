#include <algorithm>
#include <cmath>
#include <random>
#include <map>
#include <set>

#include "doctest.h"
#include "mothergraph/errors.hpp"
#include "mothergraph/product_flow.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

const ModelParams kP{3, 2};

Profile constant_profile(double r, int n_last) {
  Profile prof;
  for (int n = 1; n <= n_last; ++n) {
    ProfilePoint pt;
    pt.n = n;
    pt.report.value = r;
    prof.push_back(pt);
  }
  return prof;
}

// Energy of the optimal flow with divergence `demand` inside the subgraph
// induced on `block`, by a dense pseudoinverse.
double block_energy(const Network& net, const std::vector<std::int32_t>& block, const std::vector<double>& demand) {
  const int k = static_cast<int>(block.size());
  const Eigen::MatrixXd lp = oracle::pseudoinverse(
      oracle::dense_laplacian(k, [&](int u, int v) { return net.conductance(block[u], block[v]); }));
  Eigen::VectorXd b(k);
  for (int i = 0; i < k; ++i) b[i] = demand[i];
  return b.dot(lp * b);
}

int digit(std::int64_t v, int pos, int m) {  // 1-based position
  for (int i = 1; i < pos; ++i) v /= m;
  return static_cast<int>(v % m);
}

int nonzeros_below(std::int64_t v, int pos, int m) {  // positions 1..pos-1
  int c = 0;
  for (int i = 1; i < pos; ++i, v /= m) c += v % m != 0;
  return c;
}

}  // namespace

TEST_CASE("gamma schedules") {
  SUBCASE("constant resistance floors to one") {
    const FlowSchedule s = gamma_schedule({1, 2}, 6, 0, GammaMode::Auto, constant_profile(1.0, 8));
    for (int k = 0; k <= 6; ++k) CHECK(s.gamma[k] == 1.0);
    CHECK(s.stage_max == 4);  // 1 + 1 + 4 >= 6
  }
  SUBCASE("auto formula, base m^2/(m-1)") {
    const FlowSchedule s = gamma_schedule({2, 3}, 8, 1, GammaMode::Auto, constant_profile(100.0, 8));
    for (int k = 0; k <= 2; ++k) CHECK(s.gamma[k] == 1.0);
    CHECK(s.gamma[3] == doctest::Approx(std::log(300.0) / std::log(4.5)));
    CHECK(s.gamma[8] == doctest::Approx(std::log(800.0) / std::log(4.5)));
  }
  SUBCASE("nondecreasing on a measured profile") {
    const Profile prof = resistance_profile(kP, PairFamily::RootAntiroot, 1, 9);
    const FlowSchedule s = gamma_schedule(kP, 9, 0, GammaMode::Auto, prof);
    for (int k = 1; k <= 9; ++k) CHECK(s.gamma[k] >= s.gamma[k - 1]);
    for (int k = 0; k <= kP.d; ++k) CHECK(s.gamma[k] == 1.0);
    CHECK(s.stage_max >= kP.d);
    CHECK(s.floor_gamma(s.stage_max) + 1 + s.stage_max >= 9);
    CHECK(s.floor_gamma(s.stage_max - 1) + s.stage_max < 9);
  }
  SUBCASE("constant and custom") {
    const FlowSchedule c = gamma_schedule(kP, 9, 0, GammaMode::Constant, {}, 2.5);
    CHECK(c.gamma[4] == 2.5);
    CHECK(c.floor_gamma(4) == 2);
    const FlowSchedule u = gamma_schedule(kP, 9, 0, GammaMode::Custom, {}, 1.0, {1, 1, 1, 3, 2, 4});
    CHECK(u.gamma[4] == 3.0);
    CHECK(u.gamma[5] == 3.0);  // running max
    CHECK(u.gamma[9] == 4.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(gamma_schedule(kP, 9, 0, GammaMode::Auto), InvalidArgument);
    CHECK_THROWS_AS(gamma_schedule(kP, 9, 3, GammaMode::Constant), InvalidArgument);
    CHECK_THROWS_AS(gamma_schedule(kP, 4, 0, GammaMode::Constant), InvalidArgument);
    CHECK_THROWS_AS(gamma_schedule({0, 2}, 6, 0, GammaMode::Constant), InvalidArgument);
  }
}

TEST_CASE("stage sets") {
  const int n = 9;
  const FlowSchedule sched = gamma_schedule(kP, n, 0, GammaMode::Constant);
  const std::int32_t a = 0b101100110;
  for (int s = kP.d - 1; s <= sched.stage_max; ++s) {
    const StageSets st = build_stage_sets(a, kP, n, sched, s);
    CHECK(st.y.size() == static_cast<std::size_t>(s * (s - 1) / 2));  // C(s,2), m-1 = 1
    if (s < sched.stage_max) {
      REQUIRE(st.x.size() == 2);
      // Digits above position gamma+s+1 of a, lowest one flipped, then x.
      for (std::int64_t x : st.x) {
        CHECK(x / 2 == ((a >> (s + 2)) ^ 1));
      }
    } else {
      CHECK(st.x.size() == oracle::ipow(2, n - s - 1));
    }
  }
  CHECK(build_stage_sets(a, kP, n, sched, 4).y.size() == 6);
  const FlowSchedule one = gamma_schedule({1, 2}, 6, 0, GammaMode::Constant);
  CHECK(build_stage_sets(0, {1, 2}, 6, one, 3).y == std::vector<std::int64_t>{0});
  CHECK_THROWS_AS(build_stage_sets(1 << n, kP, n, sched, 3), InvalidArgument);
  CHECK_THROWS_AS(build_stage_sets(a, kP, n, sched, sched.stage_max + 1), InvalidArgument);
}

TEST_CASE("horizontal and vertical spreads against the dense oracle") {
  const int n = 8, m = 2;
  const SchreierGraph g = build_graph(kP, n);
  const FlowSchedule sched = gamma_schedule(kP, n, 0, GammaMode::Constant);
  const std::int32_t a = 0b10110101;
  const std::int32_t nv = g.vertices();
  for (int s = kP.d; s <= sched.stage_max; ++s) {
    CAPTURE(s);
    const StageFlow h = horizontal_flow(a, g, sched, s);
    const int len = s < sched.stage_max ? sched.floor_gamma(s) + 2 : n - sched.stage_max;
    // Each block: a fixed lower word with a 1 at position s and d-d'-1 nonzeros
    // below it; positions s+1..s+len free; everything higher copied from a.
    std::map<std::int64_t, std::vector<std::int32_t>> blocks;
    for (std::int32_t v = 0; v < nv; ++v) {
      if (digit(v, s, m) != 1 || nonzeros_below(v, s, m) != 2) continue;
      if ((v >> (s + len)) != (a >> (s + len))) continue;
      blocks[v & ((1 << s) - 1)].push_back(v);
    }
    const std::set<std::int32_t> src(h.sources.begin(), h.sources.end()), dst(h.targets.begin(), h.targets.end());
    double expect = 0;
    const double w = 1.0 / static_cast<double>(blocks.size());
    for (const auto& [low, block] : blocks) {
      std::vector<double> demand(block.size());
      int ns = 0, nt = 0;
      for (std::int32_t v : block) ns += src.count(v), nt += dst.count(v);
      REQUIRE(ns > 0);
      REQUIRE(nt > 0);
      for (std::size_t i = 0; i < block.size(); ++i) {
        demand[i] = (src.count(block[i]) ? 1.0 / ns : 0.0) - (dst.count(block[i]) ? 1.0 / nt : 0.0);
      }
      expect += w * w * block_energy(g.net, block, demand);
    }
    CHECK(h.energy == doctest::Approx(expect).epsilon(1e-8));
    CHECK(h.energy <= h.pair_average_energy + 1e-9);

    if (s == sched.stage_max) continue;
    const StageFlow vf = vertical_flow(a, g, sched, s);
    const StageSets xs = build_stage_sets(a, kP, n, sched, s);
    double vexpect = 0;
    const double vw = 1.0 / static_cast<double>(xs.x.size());
    const std::set<std::int32_t> vsrc(vf.sources.begin(), vf.sources.end()), vdst(vf.targets.begin(), vf.targets.end());
    for (std::int64_t x : xs.x) {
      std::vector<std::int32_t> block;
      for (std::int32_t v = 0; v < nv; ++v) {
        if ((v >> (s + 1)) == x) block.push_back(v);
      }
      std::vector<double> demand(block.size());
      int ns = 0, nt = 0;
      for (std::int32_t v : block) ns += vsrc.count(v), nt += vdst.count(v);
      for (std::size_t i = 0; i < block.size(); ++i) {
        demand[i] = (vsrc.count(block[i]) ? 1.0 / ns : 0.0) - (vdst.count(block[i]) ? 1.0 / nt : 0.0);
      }
      vexpect += vw * vw * block_energy(g.net, block, demand);
    }
    CHECK(vf.energy == doctest::Approx(vexpect).epsilon(1e-8));
    CHECK(vf.energy <= vf.pair_average_energy + 1e-9);
  }
  CHECK_THROWS_AS(vertical_flow(a, g, sched, sched.stage_max), InvalidArgument);
  CHECK_THROWS_AS(horizontal_flow(a, g, sched, kP.d - 1), InvalidArgument);
}

TEST_CASE("stage transport") {
  const int n = 7;
  const SchreierGraph g = build_graph(kP, n);
  const FlowSchedule sched = gamma_schedule(kP, n, 0, GammaMode::Constant);
  const StageFlow h = horizontal_flow(0, g, sched, kP.d);
  const auto div = h.flow.divergence(g.vertices());
  for (std::int32_t v : h.sources) CHECK(div[v] == doctest::Approx(1.0 / static_cast<double>(h.sources.size())));
  for (std::int32_t v : h.targets) CHECK(div[v] == doctest::Approx(-1.0 / static_cast<double>(h.targets.size())));
  double rest = 0;
  std::set<std::int32_t> ends(h.sources.begin(), h.sources.end());
  ends.insert(h.targets.begin(), h.targets.end());
  for (std::int32_t v = 0; v < g.vertices(); ++v) {
    if (!ends.count(v)) rest = std::max(rest, std::abs(div[v]));
  }
  CHECK(rest <= 1e-9);
}

TEST_CASE("product flow audits over the sweep") {
  SolverOptions o;
  const std::vector<double> rlow = max_resistance_table({0, 2}, 8, o);
  const std::vector<double> rhigh = max_resistance_table(kP, 9, o);
  for (int k = 1; k <= 8; ++k) CHECK(rlow[k] == doctest::Approx(std::pow(2.0, k) - 1));
  const Profile prof = resistance_profile(kP, PairFamily::RootAntiroot, 1, 9);
  std::vector<double> ratios;
  for (int n = 6; n <= 9; ++n) {
    CAPTURE(n);
    const SchreierGraph g = build_graph(kP, n);
    const FlowSchedule sched = gamma_schedule(kP, n, 0, GammaMode::Auto, prof);
    ProductFlow pf = build_product_flow(g, root(n), antiroot(n, 1, 2), sched, o);
    const EnergyBoundReport r = validate_energy_bound(pf, rlow, rhigh, o);
    CHECK(r.max_divergence_error <= 1e-9);
    CHECK(r.divergence_ok);
    CHECK(r.transport_ok);
    CHECK(r.energy >= r.resistance - 1e-8);
    CHECK(r.disjoint_ok);
    CHECK(r.overlap_ok);
    CHECK(r.stage_bounds_ok);
    CHECK(r.convexity_ok);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.rhs == doctest::Approx(energy_bound_rhs(sched, kP, n, rlow, rhigh)));
    ratios.push_back(r.ratio);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 5.0);
}

TEST_CASE("arbitrary terminals and execution modes") {
  const int n = 7;
  const SchreierGraph g = build_graph(kP, n);
  const FlowSchedule sched = gamma_schedule(kP, n, 0, GammaMode::Constant);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int32_t> pick(0, g.vertices() - 1);
  for (int t = 0; t < 5; ++t) {
    const std::int32_t a = pick(rng);
    std::int32_t b = pick(rng);
    if (b == a) b = (a + 1) % g.vertices();
    SolverOptions ser, par;
    ser.exec = Exec::Serial;
    const ProductFlow ps = build_product_flow(g, a, b, sched, ser);
    const ProductFlow pp = build_product_flow(g, a, b, sched, par);
    CHECK(ps.total.energy(g.net) == pp.total.energy(g.net));
    const auto div = ps.total.divergence(g.vertices());
    for (std::int32_t v = 0; v < g.vertices(); ++v) {
      const double expect = v == a ? 1.0 : v == b ? -1.0 : 0.0;
      CHECK(std::abs(div[v] - expect) <= 1e-9);
    }
    const double r = effective_resistance(g.net, std::span(&a, 1), std::span(&b, 1)).value;
    CHECK(ps.total.energy(g.net) >= r - 1e-8);
  }
  CHECK_THROWS_AS(build_product_flow(g, 3, 3, sched), InvalidArgument);
  const FlowSchedule other = gamma_schedule(kP, 8, 0, GammaMode::Constant);
  CHECK_THROWS_AS(build_product_flow(g, 0, 1, other), InvalidArgument);
}

TEST_CASE("right-hand side by hand") {
  // d=1, d'=0: s^{d-d'-1} = 1; gamma = 1 everywhere.
  const FlowSchedule s = gamma_schedule({1, 2}, 5, 0, GammaMode::Constant);
  const std::vector<double> low{0, 1, 3, 7};
  const std::vector<double> high{0, 1, 2.5, 4, 5};
  // s = 1..3: low[1] + high[s]/2
  CHECK(energy_bound_rhs(s, {1, 2}, 5, low, high) == doctest::Approx(3 * 1.0 + (1 + 2.5 + 4) / 2));
  CHECK_THROWS_AS(energy_bound_rhs(s, {1, 2}, 5, low, std::vector<double>{0, 1}), InvalidArgument);
}
