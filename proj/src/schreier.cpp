#include "mothergraph/schreier.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <map>

#include <fmt/format.h>

#include "mothergraph/errors.hpp"

namespace mg {

namespace {

using Row = std::vector<std::pair<std::int32_t, double>>;

// Sorts (target, count) pairs and merges duplicates.
Row compress(std::vector<std::int32_t>& targets) {
  std::sort(targets.begin(), targets.end());
  Row row;
  for (std::int32_t t : targets) {
    if (!row.empty() && row.back().first == t) {
      row.back().second += 1;
    } else {
      row.emplace_back(t, 1.0);
    }
  }
  return row;
}

std::vector<std::int64_t> powers(int m, int n) {
  std::vector<std::int64_t> pw(static_cast<std::size_t>(n) + 2, 1);
  for (int i = 1; i < n + 2; ++i) pw[i] = pw[i - 1] * m;
  return pw;
}

}  // namespace

std::uint64_t vertex_budget() {
  if (const char* env = std::getenv("MOTHERGRAPH_MAX_VERTICES")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw InvalidArgument("MOTHERGRAPH_MAX_VERTICES must be a positive integer");
  }
  return kDefaultMaxVertices;
}

std::int32_t checked_vertex_count(int m, int n) {
  if (n < 0) throw InvalidArgument("n must be nonnegative");
  const std::uint64_t budget = std::min<std::uint64_t>(vertex_budget(), INT32_MAX);
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= static_cast<std::uint64_t>(m);
    if (count > budget) throw CapExceeded(fmt::format("graph with {}^{} vertices exceeds the vertex budget", m, n), budget);
  }
  return static_cast<std::int32_t>(count);
}

std::uint64_t SchreierGraph::generator_degree(std::int32_t v) const {
  double s = loops[v];
  for (double c : net.conductances(v)) s += c;
  return static_cast<std::uint64_t>(s + 0.5);
}

SchreierGraph build_graph(const ModelParams& p, int n, Exec exec) {
  p.validate();
  const std::int32_t count = checked_vertex_count(p.m, n);
  const GeneratorMultiset ms = enumerate_generating_multiset(p);
  const std::vector<Perm> perms = Perm::all(p.m);
  const auto pw = powers(p.m, n);

  std::vector<Row> rows(static_cast<std::size_t>(count));
  std::vector<std::uint32_t> loops(static_cast<std::size_t>(count), 0);
  parallel_for(count, exec, [&](std::int64_t v) {
    const LetterWord word = LetterWord::from_value(static_cast<std::uint64_t>(v), n, p.m);
    const auto dg = word.digits();
    std::vector<std::int32_t> targets;
    // Root permutations change the first letter.
    for (const Perm& s : perms) {
      const std::int64_t t = n == 0 ? v : v + (static_cast<std::int64_t>(s(dg[0])) - dg[0]);
      targets.push_back(static_cast<std::int32_t>(t));
    }
    std::vector<int> nonzero;
    for (int i = 0; i < n; ++i) {
      if (dg[i] != 0) nonzero.push_back(i);
    }
    // For degree k only the block whose trigger equals the first k nonzero
    // letters can act; every other block fixes v.
    for (int k = 0; k <= p.d; ++k) {
      const std::size_t block_size = ms.blocks[ms.block_index(k, {})].end - ms.blocks[ms.block_index(k, {})].begin;
      const std::size_t blocks_k = ms.block_index(k + 1, {}) - ms.block_index(k, {});
      std::size_t loops_here = block_size * blocks_k;
      if (static_cast<int>(nonzero.size()) > k && nonzero[k] + 1 < n) {
        std::vector<Digit> trig;
        for (int j = 0; j < k; ++j) trig.push_back(dg[nonzero[j]]);
        const GeneratorBlock& b = ms.blocks[ms.block_index(k, trig)];
        const int t = nonzero[k];
        const Digit c = dg[t], next = dg[t + 1];
        for (std::size_t i = b.begin; i < b.end; ++i) {
          const WreathElem& e = ms.generators[i].elem();
          const std::int64_t target = v + (static_cast<std::int64_t>(e.pi(c)) - c) * pw[t] +
                                      (static_cast<std::int64_t>(e.taus[c](next)) - next) * pw[t + 1];
          targets.push_back(static_cast<std::int32_t>(target));
        }
        loops_here -= b.end - b.begin;
      }
      loops[v] += static_cast<std::uint32_t>(loops_here);
    }
    std::uint32_t self = 0;
    std::erase_if(targets, [&](std::int32_t t) {
      if (t != v) return false;
      ++self;
      return true;
    });
    loops[v] += self;
    rows[v] = compress(targets);
  });

  SchreierGraph g;
  g.params = p;
  g.n = n;
  g.net = Network::from_rows(rows);
  g.loops = std::move(loops);
  return g;
}

std::int32_t root(int n) {
  if (n < 0) throw InvalidArgument("n must be nonnegative");
  return 0;
}

std::int32_t antiroot(int n, int x, int m) {
  if (n < 1) throw InvalidArgument("antiroot needs n >= 1");
  if (x < 1 || x >= m) throw InvalidArgument("antiroot letter must lie in 1..m-1");
  std::int64_t v = x;
  for (int i = 1; i < n; ++i) v *= m;
  if (v > INT32_MAX) throw InvalidArgument("antiroot encoding overflows");
  return static_cast<std::int32_t>(v);
}

std::vector<std::int32_t> antiroots(int n, int m) {
  std::vector<std::int32_t> out;
  for (int x = 1; x < m; ++x) out.push_back(antiroot(n, x, m));
  return out;
}

int count_nonzero(const LetterWord& v) {
  return static_cast<int>(std::count_if(v.digits().begin(), v.digits().end(), [](Digit x) { return x != 0; }));
}

SchreierGraph build_quasi_model(const ModelParams& p, int n, Exec exec) {
  p.validate();
  const std::int32_t count = checked_vertex_count(p.m, n);
  const auto pw = powers(p.m, n);
  std::vector<Row> rows(static_cast<std::size_t>(count));
  parallel_for(count, exec, [&](std::int64_t v) {
    const LetterWord word = LetterWord::from_value(static_cast<std::uint64_t>(v), n, p.m);
    const auto dg = word.digits();
    std::vector<std::int32_t> targets;
    int before = 0;
    for (int pos = 0; pos < n; ++pos) {
      if (before <= p.d + 1) {
        for (int a = 0; a < p.m; ++a) {
          if (a != dg[pos]) targets.push_back(static_cast<std::int32_t>(v + (a - dg[pos]) * pw[pos]));
        }
      }
      if (dg[pos] != 0) ++before;
    }
    rows[v] = compress(targets);
  });
  SchreierGraph g;
  g.params = p;
  g.n = n;
  g.net = Network::from_rows(rows);
  g.loops.assign(static_cast<std::size_t>(count), 0);
  return g;
}

DistortionReport distortion_between(const Network& a, const Network& b, Exec exec) {
  if (a.vertices() != b.vertices()) throw InvalidArgument("distortion needs equal vertex sets");
  const std::int32_t n = a.vertices();
  std::vector<int> a_in_b(static_cast<std::size_t>(n), 0), b_in_a(static_cast<std::size_t>(n), 0);
  auto stretch = [](const Network& edges_of, const Network& metric, std::int32_t u) {
    if (edges_of.neighbors(u).empty()) return 0;
    const auto dist = metric.bfs(u);
    int worst = 0;
    for (std::int32_t v : edges_of.neighbors(u)) {
      if (dist[v] < 0) return -1;
      worst = std::max(worst, dist[v]);
    }
    return worst;
  };
  parallel_for(n, exec, [&](std::int64_t u) {
    a_in_b[u] = stretch(a, b, static_cast<std::int32_t>(u));
    b_in_a[u] = stretch(b, a, static_cast<std::int32_t>(u));
  });
  DistortionReport r;
  for (std::int32_t u = 0; u < n; ++u) {
    if (a_in_b[u] < 0 || b_in_a[u] < 0) throw InvalidArgument("graphs have different components");
    r.schreier_edges_in_model = std::max(r.schreier_edges_in_model, a_in_b[u]);
    r.model_edges_in_schreier = std::max(r.model_edges_in_schreier, b_in_a[u]);
  }
  return r;
}

DistortionReport distortion_report(const ModelParams& p, int n, Exec exec) {
  const SchreierGraph g = build_graph(p, n, exec);
  const SchreierGraph q = build_quasi_model(p, n, exec);
  return distortion_between(g.net, q.net, exec);
}

BoundaryPoint::BoundaryPoint(std::vector<Digit> digits) : digits_(std::move(digits)) {
  while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
}

std::string BoundaryPoint::display() const {
  std::string s = "...0";
  for (auto it = digits_.rbegin(); it != digits_.rend(); ++it) s.push_back(static_cast<char>('0' + *it));
  return s;
}

std::size_t BoundaryPointHash::operator()(const BoundaryPoint& p) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (Digit x : p.digits()) h = (h ^ x) * 1099511628211ULL;
  return h;
}

BoundaryPoint apply(const Generator& g, const BoundaryPoint& v) {
  // Only the target letter and the one after it can change, so two spare
  // zeros past the support suffice.
  std::vector<Digit> buf(v.digits().begin(), v.digits().end());
  buf.resize(buf.size() + 2, 0);
  apply_generator(g, buf, ActionMode::Tree);
  return BoundaryPoint(std::move(buf));
}

std::vector<std::pair<std::size_t, BoundaryPoint>> neighbors_infinite(const BoundaryPoint& v,
                                                                      const GeneratorMultiset& ms) {
  std::vector<std::pair<std::size_t, BoundaryPoint>> out;
  out.reserve(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) out.emplace_back(i, apply(ms.generators[i], v));
  return out;
}

std::int32_t quotient_class(std::int32_t v, int n, int m) {
  std::int32_t cls = 0;
  for (int i = 0; i < n; ++i) {
    if (v % m != 0) cls |= 1 << i;
    v /= m;
  }
  return cls;
}

QuotientGraph quotient_by_symmetry(const SchreierGraph& g) {
  const int n = g.n, m = g.params.m;
  if (n > 30) throw InvalidArgument("quotient limited to n <= 30");
  const std::int32_t classes = std::int32_t{1} << n;
  std::vector<WeightedEdge> edges;
  for (const auto& e : g.net.edges()) {
    const std::int32_t a = quotient_class(e.u, n, m), b = quotient_class(e.v, n, m);
    if (a != b) edges.push_back({a, b, e.conductance});
  }
  QuotientGraph q;
  q.n = n;
  q.net = Network::from_edges(classes, edges);
  q.weights.resize(static_cast<std::size_t>(classes));
  for (std::int32_t c = 0; c < classes; ++c) {
    std::uint64_t w = 1;
    for (int i = 0; i < std::popcount(static_cast<std::uint32_t>(c)); ++i) w *= static_cast<std::uint64_t>(m - 1);
    q.weights[c] = w;
  }
  return q;
}

EmbeddingReport compare_induced_embedding(const ModelParams& p, int n) {
  const SchreierGraph small = build_graph(p, n);
  const SchreierGraph big = build_graph(p, n + 1);
  std::vector<std::int32_t> low(static_cast<std::size_t>(small.vertices()));
  for (std::int32_t i = 0; i < small.vertices(); ++i) low[i] = i;
  const Network induced = big.net.induced(low);

  EmbeddingReport r;
  r.contained = true;
  for (const auto& e : small.net.edges()) {
    const double c = induced.conductance(e.u, e.v);
    if (c != e.conductance) ++r.weight_mismatches;
    if (c < e.conductance) r.contained = false;
  }
  for (const auto& e : induced.edges()) {
    if (small.net.conductance(e.u, e.v) == 0) ++r.extra_edges;
  }
  r.equal = r.extra_edges == 0 && r.weight_mismatches == 0;
  return r;
}

bool induced_embedding_check(const ModelParams& p, int n) { return compare_induced_embedding(p, n).equal; }

std::string edges_csv(const SchreierGraph& g) {
  std::string out = "u,v,conductance\n";
  for (const auto& e : g.net.edges()) {
    out += fmt::format("{},{},{}\n", e.u, e.v, static_cast<std::uint64_t>(e.conductance + 0.5));
  }
  return out;
}

std::string loops_csv(const SchreierGraph& g) {
  std::string out = "vertex,count\n";
  for (std::size_t v = 0; v < g.loops.size(); ++v) {
    if (g.loops[v] > 0) out += fmt::format("{},{}\n", v, g.loops[v]);
  }
  return out;
}

std::string to_dot(const SchreierGraph& g) {
  std::string out = fmt::format("graph G_d{}_m{}_n{} {{\n", g.params.d, g.params.m, g.n);
  for (std::int32_t v = 0; v < g.vertices(); ++v) {
    out += fmt::format("  {} [label=\"{}\"];\n", v,
                       LetterWord::from_value(static_cast<std::uint64_t>(v), g.n, g.params.m).display());
  }
  for (const auto& e : g.net.edges()) {
    const auto c = static_cast<std::uint64_t>(e.conductance + 0.5);
    out += fmt::format("  {} -- {} [weight={}, label=\"{}\"];\n", e.u, e.v, c, c);
  }
  out += "}\n";
  return out;
}

}  // namespace mg
