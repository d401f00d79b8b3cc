#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mothergraph/errors.hpp"
#include "mothergraph/schreier.hpp"
#include "oracles.hpp"

using namespace mg;

namespace {

// Reference construction: apply every generator of the multiset to every
// vertex through the generic truncated action.
std::map<std::pair<int, int>, int> brute_edges(const ModelParams& p, int n, std::vector<int>* loops) {
  const auto ms = enumerate_generating_multiset(p);
  std::map<std::pair<int, int>, int> edges;
  const int count = static_cast<int>(oracle::ipow(p.m, n));
  loops->assign(count, 0);
  for (int v = 0; v < count; ++v) {
    for (const auto& g : ms.generators) {
      LetterWord w = LetterWord::from_value(v, n, p.m);
      apply_generator(g, w.digits(), ActionMode::Truncated);
      const int t = static_cast<int>(w.value());
      if (t == v) {
        ++(*loops)[v];
      } else if (v < t) {
        ++edges[{v, t}];
      }
    }
  }
  return edges;
}

}  // namespace

TEST_CASE("fast construction matches generator-by-generator application") {
  for (int m : {2, 3}) {
    for (int d = 0; d <= 3; ++d) {
      for (int n = 0; n <= (m == 2 ? 7 : 4); ++n) {
        const ModelParams p{d, m};
        std::vector<int> loops;
        const auto expect = brute_edges(p, n, &loops);
        const SchreierGraph g = build_graph(p, n);
        const auto edges = g.net.edges();
        REQUIRE(edges.size() == expect.size());
        bool same = true;
        for (const auto& e : edges) same = same && expect.at({e.u, e.v}) == e.conductance;
        for (int v = 0; v < g.vertices(); ++v) same = same && static_cast<int>(g.loops[v]) == loops[v];
        CHECK(same);
      }
    }
  }
}

TEST_CASE("serial and parallel construction agree") {
  const SchreierGraph a = build_graph({2, 3}, 6, Exec::Serial);
  const SchreierGraph b = build_graph({2, 3}, 6, Exec::Parallel);
  CHECK(edges_csv(a) == edges_csv(b));
  CHECK(a.loops == b.loops);
}

TEST_CASE("regular degree and connectivity") {
  for (int m : {2, 3}) {
    for (int d = 0; d <= 4; ++d) {
      const ModelParams p{d, m};
      const std::uint64_t degree = generating_multiset_size(p);
      for (int n = 0; n <= 6; ++n) {
        const SchreierGraph g = build_graph(p, n);
        bool regular = true;
        for (std::int32_t v = 0; v < g.vertices(); ++v) regular = regular && g.generator_degree(v) == degree;
        CHECK(regular);
        const std::int32_t src = 0;
        const auto seen = g.net.reachable(std::span(&src, 1));
        CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
      }
    }
  }
}

TEST_CASE("small cases") {
  // d = 0, m = 2 is a path in Gray-code order.
  const SchreierGraph path = build_graph({0, 2}, 3);
  CHECK(path.net.edge_count() == 7);
  for (std::int32_t v = 0; v < path.vertices(); ++v) CHECK(path.net.neighbors(v).size() <= 2);
  // n = 1: root permutations give the complete graph; (m-1)! permutations
  // carry a given letter to another, and lambdas have no letter to act on.
  const SchreierGraph one = build_graph({2, 3}, 1);
  CHECK(one.net.edge_count() == 3);
  for (const auto& e : one.net.edges()) CHECK(e.conductance == 2);
  for (auto l : one.loops) CHECK(l == generating_multiset_size({2, 3}) - 4);
  // n = 0: a single vertex carrying every generator as a loop.
  const SchreierGraph zero = build_graph({1, 3}, 0);
  CHECK(zero.vertices() == 1);
  CHECK(zero.loops[0] == generating_multiset_size({1, 3}));
}

TEST_CASE("root, antiroot and nonzero count") {
  CHECK(root(3) == 0);
  CHECK(antiroot(3, 1, 2) == 4);
  CHECK(antiroot(2, 2, 3) == 6);
  CHECK_THROWS_AS(antiroot(2, 0, 3), InvalidArgument);
  CHECK(count_nonzero(LetterWord::from_display("000", 2)) == 0);
  CHECK(count_nonzero(LetterWord::from_display("102", 3)) == 2);
  CHECK(count_nonzero(LetterWord::from_value(antiroot(5, 1, 3), 5, 3)) == 1);
}

TEST_CASE("budget") {
  CHECK_THROWS_AS(checked_vertex_count(3, 40), CapExceeded);
  setenv("MOTHERGRAPH_MAX_VERTICES", "100", 1);
  CHECK_THROWS_AS(build_graph({0, 2}, 7), CapExceeded);
  CHECK_NOTHROW(build_graph({0, 2}, 6));
  unsetenv("MOTHERGRAPH_MAX_VERTICES");
}

TEST_CASE("quasi model") {
  const SchreierGraph q = build_quasi_model({0, 2}, 2);
  // Both positions are free for every vertex of length 2 when d = 0.
  CHECK(q.net.edge_count() == 4);
  for (const auto& e : q.net.edges()) CHECK(e.u != e.v);
  for (int m : {2, 3}) {
    for (int d = 0; d <= 2; ++d) {
      for (int n = 1; n <= (m == 2 ? 8 : 5); ++n) {
        const SchreierGraph model = build_quasi_model({d, m}, n);
        const std::int32_t src = 0;
        const auto seen = model.net.reachable(std::span(&src, 1));
        CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
      }
    }
  }
  const SchreierGraph g = build_graph({1, 2}, 6);
  const auto self = distortion_between(g.net, g.net);
  CHECK(self.schreier_edges_in_model == 1);
  CHECK(self.model_edges_in_schreier == 1);
  const auto r = distortion_report({1, 2}, 6);
  CHECK(r.schreier_edges_in_model >= 1);
  CHECK(r.model_edges_in_schreier >= 1);
}

TEST_CASE("infinite neighbours") {
  for (int m : {2, 3}) {
    const auto ms = enumerate_generating_multiset({3, m});
    const auto zero = neighbors_infinite(BoundaryPoint::zero_ray(), ms);
    CHECK(zero.size() == ms.size());
    for (const auto& [i, pt] : zero) {
      const Generator& g = ms.generators[i];
      if (g.is_lambda()) {
        CHECK(pt == BoundaryPoint::zero_ray());
      } else {
        CHECK(pt == BoundaryPoint({g.perm()(0)}));
      }
    }
  }
  // Support grows by at most two positions and the finite graph's edges are
  // all realised on the boundary.
  std::mt19937_64 rng(31);
  for (int m : {2, 3}) {
    const ModelParams p{2, m};
    const auto ms = enumerate_generating_multiset(p);
    const int n = m == 2 ? 7 : 5;
    const SchreierGraph g = build_graph(p, n);
    std::set<std::pair<int, int>> boundary_edges;
    std::size_t mismatches = 0;
    for (std::int32_t v = 0; v < g.vertices(); ++v) {
      const LetterWord w = LetterWord::from_value(v, n, m);
      const BoundaryPoint pt(std::vector<Digit>(w.digits().begin(), w.digits().end()));
      for (const auto& [i, q] : neighbors_infinite(pt, ms)) {
        CHECK(q.support() <= pt.support() + 2);
        if (q.support() <= static_cast<std::size_t>(n) && !(q == pt)) {
          std::uint64_t val = 0;
          for (std::size_t k = q.support(); k > 0; --k) val = val * m + q.at(k);
          boundary_edges.insert({v, static_cast<int>(val)});
        }
      }
    }
    for (const auto& e : g.net.edges()) mismatches += boundary_edges.count({e.u, e.v}) == 0;
    CHECK(mismatches == 0);
    if (m == 2) {
      // For two letters every boundary move within the first n positions is
      // also a move of G(d,2,n).
      std::size_t extra = 0;
      for (const auto& [u, v] : boundary_edges) extra += g.net.conductance(u, v) == 0;
      CHECK(extra == 0);
    }
  }
}

TEST_CASE("symmetry quotient") {
  const SchreierGraph g = build_graph({0, 3}, 2);
  const QuotientGraph q = quotient_by_symmetry(g);
  CHECK(q.net.vertices() == 4);
  std::multiset<std::uint64_t> w(q.weights.begin(), q.weights.end());
  CHECK(w == std::multiset<std::uint64_t>{1, 2, 2, 4});
  const SchreierGraph two = build_graph({1, 2}, 4);
  const QuotientGraph q2 = quotient_by_symmetry(two);
  CHECK(edges_csv(two) == edges_csv({two.params, two.n, q2.net, two.loops}));
  std::uint64_t total = 0;
  for (auto x : quotient_by_symmetry(build_graph({1, 3}, 4)).weights) total += x;
  CHECK(total == 81);
}

TEST_CASE("induced embedding") {
  CHECK(induced_embedding_check({0, 2}, 3));
  CHECK(induced_embedding_check({1, 2}, 4));
  CHECK(induced_embedding_check({1, 2}, 0));
  for (int d = 0; d <= 3; ++d) {
    for (int n = 0; n <= 6; ++n) CHECK(induced_embedding_check({d, 2}, n));
    // With three letters the letter after position n can stay 0 while the
    // target letter is relabelled, so G(n+1) adds edges among low vertices;
    // G(n) itself is still contained with its exact weights.
    for (int n = 0; n <= 5; ++n) {
      const auto r = compare_induced_embedding({d, 3}, n);
      CHECK(r.contained);
      if (n >= 1) CHECK_FALSE(r.equal);
    }
  }
}

TEST_CASE("text formats") {
  const SchreierGraph g = build_graph({0, 2}, 2);
  CHECK(edges_csv(g) == "u,v,conductance\n0,1,1\n1,3,1\n2,3,1\n");
  CHECK(loops_csv(g) == "vertex,count\n0,3\n1,2\n2,3\n3,2\n");
  const std::string dot = to_dot(g);
  CHECK(dot.find("1 [label=\"01\"];") != std::string::npos);
  CHECK(dot.find("1 -- 3 [weight=1, label=\"1\"];") != std::string::npos);
  CHECK(edges_csv(build_graph({0, 2}, 0)) == "u,v,conductance\n");
}
