#include <cmath>
#include <random>

#include "doctest.h"
#include "mothergraph/errors.hpp"
#include "mothergraph/resistance.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

double res(const Network& net, std::int32_t a, std::int32_t b, double tol = 1e-12) {
  SolverOptions o;
  o.tol = tol;
  return effective_resistance(net, std::span(&a, 1), std::span(&b, 1), o).value;
}

Eigen::MatrixXd dense_pinv(const Network& net) {
  return oracle::pseudoinverse(
      oracle::dense_laplacian(net.vertices(), [&](int u, int v) { return net.conductance(u, v); }));
}

}  // namespace

TEST_CASE("small resistances against the dense oracle") {
  const SchreierGraph g1 = build_graph({0, 2}, 1);
  CHECK(res(g1.net, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  const SchreierGraph g3 = build_graph({0, 2}, 3);
  CHECK(res(g3.net, root(3), antiroot(3, 1, 2)) == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(oracle::pinv_resistance(dense_pinv(g3.net), 0, 4) == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(res(g3.net, 5, 5) == 0.0);

  std::mt19937_64 rng(41);
  for (auto [d, m, n] : {std::tuple{1, 2, 6}, {2, 3, 4}, {3, 2, 7}, {0, 3, 5}}) {
    const SchreierGraph g = build_graph({d, m}, n);
    const Eigen::MatrixXd lp = dense_pinv(g.net);
    std::uniform_int_distribution<std::int32_t> pick(0, g.vertices() - 1);
    for (int i = 0; i < 10; ++i) {
      const std::int32_t a = pick(rng), b = pick(rng);
      CHECK(res(g.net, a, b) == doctest::Approx(oracle::pinv_resistance(lp, a, b)).epsilon(1e-8));
    }
  }
}

TEST_CASE("serial and parallel solves are bit-identical") {
  const SchreierGraph g = build_graph({3, 2}, 12);
  const std::int32_t a = 0, b = antiroot(12, 1, 2);
  SolverOptions s, p;
  s.exec = Exec::Serial;
  p.exec = Exec::Parallel;
  const auto rs = effective_resistance(g.net, std::span(&a, 1), std::span(&b, 1), s);
  const auto rp = effective_resistance(g.net, std::span(&a, 1), std::span(&b, 1), p);
  CHECK(rs.value == rp.value);
  CHECK(rs.iterations == rp.iterations);
}

TEST_CASE("set resistance, infinite resistance and errors") {
  // Two components: {0,1} and {2,3}.
  const WeightedEdge es[] = {{0, 1, 1.0}, {2, 3, 2.0}};
  const Network net = Network::from_edges(4, es);
  const std::int32_t a = 0, c = 2;
  CHECK(effective_resistance(net, std::span(&a, 1), std::span(&c, 1)).infinite);
  const std::int32_t ab[] = {0, 1}, bc[] = {1, 2};
  CHECK_THROWS_AS(effective_resistance(net, ab, bc), InvalidArgument);
  CHECK_THROWS_AS(effective_resistance(net, {}, bc), InvalidArgument);
  // Supernode: both antiroots of m=3 against a dense oracle with the set
  // shorted by a huge conductance.
  const SchreierGraph g = build_graph({0, 3}, 4);
  const auto anti = antiroots(4, 3);
  const std::int32_t o = 0;
  const double set = effective_resistance(g.net, std::span(&o, 1), anti, {1e-12}).value;
  const Eigen::MatrixXd lp = oracle::pseudoinverse(oracle::dense_laplacian(g.vertices(), [&](int u, int v) {
    if ((u == anti[0] && v == anti[1]) || (u == anti[1] && v == anti[0])) return 1e7 + g.net.conductance(u, v);
    return g.net.conductance(u, v);
  }));
  CHECK(set == doctest::Approx(oracle::pinv_resistance(lp, 0, anti[0])).epsilon(1e-5));
}

TEST_CASE("current flow") {
  const WeightedEdge es[] = {{0, 1, 1.0}};
  const Network two = Network::from_edges(2, es);
  const std::int32_t a = 0, b = 1;
  const CurrentFlow f2 = current_flow(two, std::span(&a, 1), std::span(&b, 1));
  CHECK(f2.flow.flow(0, 1) == doctest::Approx(1.0));

  const SchreierGraph g = build_graph({2, 3}, 4);
  const std::int32_t o = 0;
  const auto anti = antiroots(4, 3);
  SolverOptions opts;
  opts.tol = 1e-12;
  const CurrentFlow f = current_flow(g.net, std::span(&o, 1), anti, opts);
  CHECK(f.flow.energy(g.net) == doctest::Approx(f.report.value).epsilon(2e-10));
  const auto div = f.flow.divergence(g.vertices());
  CHECK(div[0] == doctest::Approx(1.0).epsilon(1e-9));
  double worst = 0;
  for (std::int32_t v = 1; v < g.vertices(); ++v) {
    if (v != anti[0] && v != anti[1]) worst = std::max(worst, std::abs(div[v]));
  }
  CHECK(worst < 1e-9);
  // Invariance under relabelling nonzero letters position by position: the
  // swap 1 <-> 2 at every position maps the flow onto itself.
  auto relabel = [](std::int32_t v) {
    LetterWord w = LetterWord::from_value(v, 4, 3);
    for (auto& x : w.digits()) x = x == 0 ? 0 : 3 - x;
    return static_cast<std::int32_t>(w.value());
  };
  double asym = 0;
  for (const auto& e : f.flow.entries()) asym = std::max(asym, std::abs(e.flow - f.flow.flow(relabel(e.u), relabel(e.v))));
  CHECK(asym < 1e-9);
}

TEST_CASE("demand flow matches a pair current flow") {
  const SchreierGraph g = build_graph({1, 2}, 6);
  std::vector<double> demand(g.vertices(), 0.0);
  demand[3] = 1;
  demand[40] = -1;
  const CurrentFlow d = demand_flow(g.net, demand, {1e-12});
  const std::int32_t a = 3, b = 40;
  CHECK(d.report.value == doctest::Approx(res(g.net, a, b)).epsilon(1e-9));
  demand[7] = 0.5;
  CHECK_THROWS_AS(demand_flow(g.net, demand), InvalidArgument);
}

TEST_CASE("Gray code") {
  CHECK(graycode_index(LetterWord::from_display("000", 2)) == 0);
  CHECK(graycode_index(LetterWord::from_display("100", 2)) == 7);
  CHECK_THROWS_AS(graycode_index(LetterWord::zeros(3, 2)), InvalidArgument);
  for (int n = 1; n <= 10; ++n) {
    const SchreierGraph g = build_graph({0, 2}, n);
    std::vector<bool> seen(g.vertices(), false);
    bool adjacency = true;
    for (std::int32_t u = 0; u < g.vertices(); ++u) {
      const auto yu = graycode_index(LetterWord::from_value(u, n, 2));
      seen[yu] = true;
      for (std::int32_t v = u + 1; v < g.vertices(); ++v) {
        const auto yv = graycode_index(LetterWord::from_value(v, n, 2));
        const bool adjacent = g.net.conductance(u, v) > 0;
        const bool consecutive = (yu > yv ? yu - yv : yv - yu) == 1;
        adjacency = adjacency && adjacent == consecutive;
      }
    }
    CHECK(adjacency);
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("profiles") {
  const Profile p = resistance_profile({0, 2}, PairFamily::RootAntiroot, 1, 6, {1e-12});
  for (const auto& pt : p) CHECK(pt.report.value == doctest::Approx(std::pow(2.0, pt.n) - 1).epsilon(1e-9));
  const std::string csv = profile_csv(p);
  CHECK(csv.starts_with("n,value,residual,iters\n1,1,"));
  const Profile back = parse_profile_csv(csv);
  CHECK(back.size() == p.size());
  CHECK(back[5].report.value == doctest::Approx(63));
  CHECK_THROWS_AS(parse_profile_csv("x\n"), ParseError);
  CHECK_THROWS_AS(parse_pair_family("nope"), InvalidArgument);
  Profile bumpy{{1, {2.0}}, {2, {1.0}}, {3, {3.0}}};
  const Profile mono = monotone_corrected(bumpy);
  CHECK(mono[1].report.value == 2.0);
  CHECK(mono[2].report.value == 3.0);
}

TEST_CASE("resistance properties") {
  std::mt19937_64 rng(43);
  SUBCASE("symmetry and triangle inequality") {
    const SchreierGraph g = build_graph({1, 3}, 5);
    std::uniform_int_distribution<std::int32_t> pick(0, g.vertices() - 1);
    for (int i = 0; i < 200; ++i) {
      const std::int32_t a = pick(rng), b = pick(rng), c = pick(rng);
      const double ab = res(g.net, a, b), ba = res(g.net, b, a);
      CHECK(std::abs(ab - ba) <= 1e-9);
      CHECK(res(g.net, a, c) <= ab + res(g.net, b, c) + 1e-8);
    }
  }
  SUBCASE("monotone in d") {
    for (int m : {2, 3}) {
      const int n = m == 2 ? 7 : 5;
      std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(oracle::ipow(m, n)) - 1);
      std::vector<SchreierGraph> gs;
      for (int d = 0; d <= 3; ++d) gs.push_back(build_graph({d, m}, n));
      for (int i = 0; i < 20; ++i) {
        const std::int32_t a = pick(rng), b = pick(rng);
        for (int d = 0; d < 3; ++d) CHECK(res(gs[d + 1].net, a, b) <= res(gs[d].net, a, b) + 1e-8);
      }
    }
  }
  SUBCASE("quotient invariance") {
    for (int d = 0; d <= 1; ++d) {
      for (int n = 1; n <= 5; ++n) {
        const SchreierGraph g = build_graph({d, 3}, n);
        const QuotientGraph q = quotient_by_symmetry(g);
        const std::int32_t o = 0, cls = quotient_class(antiroot(n, 1, 3), n, 3);
        const double full = effective_resistance(g.net, std::span(&o, 1), antiroots(n, 3), {1e-12}).value;
        CHECK(std::abs(full - res(q.net, 0, cls)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("maximum resistance search") {
  const SchreierGraph g = build_graph({0, 2}, 3);
  const auto ex = max_resistance_search(g, SearchMode::Exhaustive);
  CHECK(ex.a == 0);
  CHECK(ex.b == 4);
  CHECK(ex.value == doctest::Approx(7.0));
  CHECK(ex.root_antiroot_attains);
  const auto one = max_resistance_search(build_graph({1, 3}, 1), SearchMode::Exhaustive);
  CHECK(one.value == doctest::Approx(1.0 / 3.0));
  const SchreierGraph big = build_graph({2, 2}, 8);
  const auto exb = max_resistance_search(big, SearchMode::Exhaustive);
  const auto sam = max_resistance_search(big, SearchMode::Sampled, 50, 7);
  CHECK(sam.value <= exb.value + 1e-8);
  CHECK(sam.root_antiroot == doctest::Approx(exb.root_antiroot).epsilon(1e-8));
  CHECK(sam.pairs_evaluated >= 51);
  const auto pairs = all_pairs_resistance(build_graph({1, 2}, 5).net);
  const Eigen::MatrixXd lp = dense_pinv(build_graph({1, 2}, 5).net);
  CHECK(pairs[3][17] == doctest::Approx(oracle::pinv_resistance(lp, 3, 17)).epsilon(1e-9));
}

TEST_CASE("transience report") {
  const auto r0 = transience_report({0, 2}, {2, 3, 4, 5});
  CHECK(r0.verdict == TransienceVerdict::Inconsistent);
  CHECK(r0.values[3] == doctest::Approx(31));
  CHECK(transience_report({4, 2}, {6}).verdict == TransienceVerdict::Undetermined);
  const auto r4 = transience_report({4, 2}, {6, 7, 8, 9, 10, 11, 12, 13});
  CHECK(r4.verdict == TransienceVerdict::Consistent);
}
