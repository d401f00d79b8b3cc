#include "mothergraph/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "mothergraph/errors.hpp"

namespace mg {

namespace {

constexpr std::int32_t kGround = -1;
constexpr std::int32_t kExcluded = -2;

// Reduced Laplacian for vertices mapped to indices >= 0 by `index`; vertices
// sharing an index are contracted, kGround vertices are held at potential 0.
SymmetricMatrix grounded_laplacian(const Network& net, const std::vector<std::int32_t>& index, std::int32_t size,
                                   Exec exec) {
  std::vector<std::vector<std::int32_t>> members(static_cast<std::size_t>(size));
  for (std::int32_t u = 0; u < net.vertices(); ++u) {
    if (index[u] >= 0) members[index[u]].push_back(u);
  }
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(static_cast<std::size_t>(size));
  SymmetricMatrix a;
  a.diag.assign(static_cast<std::size_t>(size), 0.0);
  parallel_for(size, exec, [&](std::int64_t r) {
    auto& row = rows[r];
    double diag = 0;
    for (std::int32_t u : members[r]) {
      const auto nb = net.neighbors(u);
      const auto cs = net.conductances(u);
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const std::int32_t t = index[nb[k]];
        if (t == r || t == kExcluded) continue;
        diag += cs[k];
        if (t >= 0) row.emplace_back(t, -cs[k]);
      }
    }
    std::sort(row.begin(), row.end());
    std::size_t w = 0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (w > 0 && row[w - 1].first == row[k].first) {
        row[w - 1].second += row[k].second;
      } else {
        row[w++] = row[k];
      }
    }
    row.resize(w);
    a.diag[r] = diag;
  });
  a.offsets.assign(static_cast<std::size_t>(size) + 1, 0);
  for (std::int32_t r = 0; r < size; ++r) a.offsets[r + 1] = a.offsets[r] + static_cast<std::int64_t>(rows[r].size());
  a.cols.reserve(static_cast<std::size_t>(a.offsets.back()));
  a.vals.reserve(static_cast<std::size_t>(a.offsets.back()));
  for (const auto& row : rows) {
    for (const auto& [c, v] : row) {
      a.cols.push_back(c);
      a.vals.push_back(v);
    }
  }
  return a;
}

FlowAssignment flow_from_potential(const Network& net, const std::vector<double>& x,
                                   const std::vector<std::int32_t>& index) {
  std::vector<FlowAssignment::Entry> entries;
  for (std::int32_t u = 0; u < net.vertices(); ++u) {
    if (index[u] == kExcluded) continue;
    const auto nb = net.neighbors(u);
    const auto cs = net.conductances(u);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const std::int32_t v = nb[k];
      if (v <= u || index[v] == kExcluded) continue;
      const double f = cs[k] * (x[u] - x[v]);
      if (f != 0) entries.push_back({u, v, f});
    }
  }
  return FlowAssignment::from_entries(std::move(entries));
}

void check_vertices(const Network& net, std::span<const std::int32_t> set, const char* what) {
  if (set.empty()) throw InvalidArgument(fmt::format("{} set is empty", what));
  for (std::int32_t v : set) {
    if (v < 0 || v >= net.vertices()) throw InvalidArgument(fmt::format("{} vertex {} out of range", what, v));
  }
}

}  // namespace

SolveResult pcg(const SymmetricMatrix& a, std::span<const double> b, const SolverOptions& opts) {
  const std::int32_t n = a.size();
  if (static_cast<std::int32_t>(b.size()) != n) throw InvalidArgument("right-hand side size mismatch");
  const std::int64_t cap = opts.max_iters >= 0 ? opts.max_iters : 50 * static_cast<std::int64_t>(n) + 1000;
  const Exec ex = opts.exec;
  SolveResult out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = std::sqrt(dot(b, b, ex));
  if (bnorm == 0) return out;

  std::vector<double> minv(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) {
    if (!(a.diag[i] > 0)) throw SolverError("matrix has a nonpositive diagonal entry");
    minv[i] = 1.0 / a.diag[i];
  }
  std::vector<double> r(b.begin(), b.end()), z(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n)),
      ap(static_cast<std::size_t>(n));
  hadamard(minv, r, z, ex);
  p = z;
  double rz = dot(r, z, ex);
  double rel = 1.0;
  std::int64_t it = 0;
  while (rel > opts.tol) {
    if (it >= cap) {
      throw SolverError(fmt::format("conjugate gradient did not converge in {} iterations (residual {:.3g})", cap, rel));
    }
    spmv(a, p, ap, ex);
    const double pap = dot(p, ap, ex);
    if (!(pap > 0)) throw SolverError("matrix is not positive definite");
    const double alpha = rz / pap;
    axpy(alpha, p, out.x, ex);
    axpy(-alpha, ap, r, ex);
    ++it;
    rel = std::sqrt(dot(r, r, ex)) / bnorm;
    if (rel <= opts.tol) break;
    hadamard(minv, r, z, ex);
    const double rz_new = dot(r, z, ex);
    xpby(z, rz_new / rz, p, ex);
    rz = rz_new;
  }
  // Report the true residual rather than the recursively updated one.
  spmv(a, out.x, ap, ex);
  for (std::int32_t i = 0; i < n; ++i) ap[i] = b[i] - ap[i];
  out.residual = std::sqrt(dot(ap, ap, ex)) / bnorm;
  out.iterations = it;
  return out;
}

FlowAssignment FlowAssignment::from_entries(std::vector<Entry> entries) {
  for (auto& e : entries) {
    if (e.u > e.v) {
      std::swap(e.u, e.v);
      e.flow = -e.flow;
    }
    if (e.u == e.v) throw InvalidArgument("flow on a loop");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; });
  FlowAssignment f;
  for (const auto& e : entries) {
    if (!f.entries_.empty() && f.entries_.back().u == e.u && f.entries_.back().v == e.v) {
      f.entries_.back().flow += e.flow;
    } else {
      f.entries_.push_back(e);
    }
  }
  return f;
}

double FlowAssignment::flow(std::int32_t u, std::int32_t v) const {
  const bool flip = u > v;
  if (flip) std::swap(u, v);
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{u, v, 0},
                                   [](const Entry& x, const Entry& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; });
  if (it == entries_.end() || it->u != u || it->v != v) return 0.0;
  return flip ? -it->flow : it->flow;
}

FlowAssignment& FlowAssignment::add(const FlowAssignment& other, double scale) {
  std::vector<Entry> merged;
  merged.reserve(entries_.size() + other.entries_.size());
  auto less = [](const Entry& x, const Entry& y) { return x.u != y.u ? x.u < y.u : x.v < y.v; };
  std::size_t i = 0, j = 0;
  while (i < entries_.size() || j < other.entries_.size()) {
    if (j == other.entries_.size() || (i < entries_.size() && less(entries_[i], other.entries_[j]))) {
      merged.push_back(entries_[i++]);
    } else if (i == entries_.size() || less(other.entries_[j], entries_[i])) {
      Entry e = other.entries_[j++];
      e.flow *= scale;
      merged.push_back(e);
    } else {
      Entry e = entries_[i++];
      e.flow += scale * other.entries_[j++].flow;
      merged.push_back(e);
    }
  }
  entries_ = std::move(merged);
  return *this;
}

FlowAssignment FlowAssignment::scaled(double s) const {
  FlowAssignment f = *this;
  for (auto& e : f.entries_) e.flow *= s;
  return f;
}

FlowAssignment FlowAssignment::relabeled(std::span<const std::int32_t> to_global) const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({to_global[e.u], to_global[e.v], e.flow});
  return from_entries(std::move(out));
}

std::vector<double> FlowAssignment::divergence(std::int32_t vertices) const {
  std::vector<double> div(static_cast<std::size_t>(vertices), 0.0);
  for (const auto& e : entries_) {
    if (e.v >= vertices) throw InvalidArgument("flow vertex out of range");
    div[e.u] += e.flow;
    div[e.v] -= e.flow;
  }
  return div;
}

double FlowAssignment::energy(const Network& net) const {
  double s = 0;
  for (const auto& e : entries_) {
    if (e.flow == 0) continue;
    const double c = net.conductance(e.u, e.v);
    if (c <= 0) throw InvalidArgument(fmt::format("flow on non-edge {{{},{}}}", e.u, e.v));
    s += e.flow * e.flow / c;
  }
  return s;
}

std::vector<std::int32_t> FlowAssignment::support(double eps) const {
  std::vector<std::int32_t> out;
  for (const auto& e : entries_) {
    if (std::abs(e.flow) > eps) {
      out.push_back(e.u);
      out.push_back(e.v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CurrentFlow current_flow(const Network& net, std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                         const SolverOptions& opts) {
  check_vertices(net, a, "source");
  check_vertices(net, b, "sink");
  const std::int32_t n = net.vertices();
  CurrentFlow out;
  out.potential.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<std::int32_t> index(static_cast<std::size_t>(n), kExcluded);
  std::vector<char> in_a(static_cast<std::size_t>(n), 0);
  for (std::int32_t v : a) in_a[v] = 1;
  bool overlap = false, same = true;
  for (std::int32_t v : b) overlap = overlap || in_a[v];
  {
    std::vector<std::int32_t> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
    sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
    same = sa == sb;
  }
  if (overlap) {
    if (same) return out;  // degenerate: zero resistance, zero flow
    throw InvalidArgument("source and sink sets overlap");
  }

  const auto comp = net.reachable(b);
  for (std::int32_t v : a) {
    if (!comp[v]) {
      out.report.infinite = true;
      out.report.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  for (std::int32_t v : b) index[v] = kGround;
  std::int32_t size = 1;  // index 0 is the contracted source
  for (std::int32_t u = 0; u < n; ++u) {
    if (!comp[u] || index[u] == kGround) continue;
    index[u] = in_a[u] ? 0 : size++;
  }

  const SymmetricMatrix lap = grounded_laplacian(net, index, size, opts.exec);
  std::vector<double> rhs(static_cast<std::size_t>(size), 0.0);
  rhs[0] = 1.0;
  SolveResult sol = pcg(lap, rhs, opts);
  out.report.value = dot(rhs, sol.x, Exec::Serial);
  out.report.residual = sol.residual;
  out.report.iterations = sol.iterations;
  for (std::int32_t u = 0; u < n; ++u) {
    if (index[u] >= 0) out.potential[u] = sol.x[index[u]];
  }
  out.flow = flow_from_potential(net, out.potential, index);
  return out;
}

ResistanceReport effective_resistance(const Network& net, std::span<const std::int32_t> a,
                                      std::span<const std::int32_t> b, const SolverOptions& opts) {
  return current_flow(net, a, b, opts).report;
}

CurrentFlow demand_flow(const Network& net, std::span<const double> demand, const SolverOptions& opts) {
  const std::int32_t n = net.vertices();
  if (static_cast<std::int32_t>(demand.size()) != n) throw InvalidArgument("demand size mismatch");
  CurrentFlow out;
  out.potential.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int32_t> carriers;
  double total = 0, scale = 0;
  for (std::int32_t v = 0; v < n; ++v) {
    if (demand[v] != 0) carriers.push_back(v);
    total += demand[v];
    scale += std::abs(demand[v]);
  }
  if (carriers.empty()) return out;
  if (std::abs(total) > 1e-12 * scale) throw InvalidArgument("demand does not sum to zero");
  const std::int32_t ground = carriers.front();
  const auto comp = net.reachable(std::span(&ground, 1));
  for (std::int32_t v : carriers) {
    if (!comp[v]) throw InvalidArgument("demand spans several components");
  }
  std::vector<std::int32_t> index(static_cast<std::size_t>(n), kExcluded);
  std::int32_t size = 0;
  for (std::int32_t u = 0; u < n; ++u) {
    if (comp[u] && u != ground) index[u] = size++;
  }
  index[ground] = kGround;
  const SymmetricMatrix lap = grounded_laplacian(net, index, size, opts.exec);
  std::vector<double> rhs(static_cast<std::size_t>(size), 0.0);
  for (std::int32_t u = 0; u < n; ++u) {
    if (index[u] >= 0) rhs[index[u]] = demand[u];
  }
  SolveResult sol = pcg(lap, rhs, opts);
  for (std::int32_t u = 0; u < n; ++u) {
    if (index[u] >= 0) out.potential[u] = sol.x[index[u]];
  }
  out.report.value = dot(rhs, sol.x, Exec::Serial);
  out.report.residual = sol.residual;
  out.report.iterations = sol.iterations;
  out.flow = flow_from_potential(net, out.potential, index);
  return out;
}

std::uint64_t graycode_index(const LetterWord& v) {
  if (v.alphabet() != 2) throw InvalidArgument("Gray code index needs m = 2");
  std::uint64_t y = 0;
  int parity = 0;
  for (int k = v.length(); k >= 1; --k) {
    parity ^= v.at(k);
    if (parity) y |= std::uint64_t{1} << (k - 1);
  }
  return y;
}

PairFamily parse_pair_family(const std::string& name) {
  if (name == "root-antiroot") return PairFamily::RootAntiroot;
  if (name == "set-antiroots") return PairFamily::RootAntirootSet;
  throw InvalidArgument("unknown pair family '" + name + "' (expected root-antiroot or set-antiroots)");
}

std::string to_string(PairFamily f) {
  return f == PairFamily::RootAntiroot ? "root-antiroot" : "set-antiroots";
}

PairSelector pair_selector(PairFamily family, int m) {
  return [family, m](int n) {
    std::vector<std::int32_t> a{root(n)};
    std::vector<std::int32_t> b =
        family == PairFamily::RootAntiroot ? std::vector<std::int32_t>{antiroot(n, 1, m)} : antiroots(n, m);
    return std::make_pair(a, b);
  };
}

Profile resistance_profile(const ModelParams& p, const PairSelector& pairs, int n_first, int n_last,
                           const SolverOptions& opts) {
  if (n_first < 1 || n_last < n_first) throw InvalidArgument("invalid n range");
  Profile out;
  for (int n = n_first; n <= n_last; ++n) {
    const SchreierGraph g = build_graph(p, n, opts.exec);
    const auto [a, b] = pairs(n);
    out.push_back({n, effective_resistance(g.net, a, b, opts)});
  }
  return out;
}

Profile resistance_profile(const ModelParams& p, PairFamily family, int n_first, int n_last,
                           const SolverOptions& opts) {
  return resistance_profile(p, pair_selector(family, p.m), n_first, n_last, opts);
}

std::string profile_csv(const Profile& profile) {
  std::string out = "n,value,residual,iters\n";
  for (const auto& pt : profile) {
    out += fmt::format("{},{:.12g},{:.12g},{}\n", pt.n, pt.report.value, pt.report.residual, pt.report.iterations);
  }
  return out;
}

Profile parse_profile_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "n,value,residual,iters") {
    throw ParseError("expected header n,value,residual,iters", 0);
  }
  Profile out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ProfilePoint pt;
    char c1, c2, c3;
    std::istringstream row(line);
    if (!(row >> pt.n >> c1 >> pt.report.value >> c2 >> pt.report.residual >> c3 >> pt.report.iterations) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw ParseError("malformed profile row", lineno);
    }
    out.push_back(pt);
  }
  if (out.empty()) throw InvalidArgument("profile is empty");
  std::sort(out.begin(), out.end(), [](const ProfilePoint& x, const ProfilePoint& y) { return x.n < y.n; });
  return out;
}

Profile monotone_corrected(Profile profile) {
  std::sort(profile.begin(), profile.end(), [](const ProfilePoint& x, const ProfilePoint& y) { return x.n < y.n; });
  double best = 0;
  for (auto& pt : profile) {
    best = std::max(best, pt.report.value);
    pt.report.value = best;
  }
  return profile;
}

std::string flow_csv(const FlowAssignment& f) {
  std::string out = "u,v,flow\n";
  for (const auto& e : f.entries()) out += fmt::format("{},{},{:.12g}\n", e.u, e.v, e.flow);
  return out;
}

std::vector<std::vector<double>> all_pairs_resistance(const Network& net) {
  const std::int32_t n = net.vertices();
  if (n > 4096) throw InvalidArgument("dense all-pairs resistance limited to 4096 vertices");
  std::vector<std::vector<double>> r(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  if (n < 2) return r;
  // Ground vertex 0; G = inverse of the reduced Laplacian, padded with zeros.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (const auto& e : net.edges()) {
    const int u = e.u - 1, v = e.v - 1;
    if (u >= 0) lap(u, u) += e.conductance;
    if (v >= 0) lap(v, v) += e.conductance;
    if (u >= 0 && v >= 0) {
      lap(u, v) -= e.conductance;
      lap(v, u) -= e.conductance;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(lap);
  if (llt.info() != Eigen::Success) throw SolverError("network is disconnected");
  const Eigen::MatrixXd g = llt.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));
  auto gv = [&](int a, int b) { return a == 0 || b == 0 ? 0.0 : g(a - 1, b - 1); };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) r[a][b] = gv(a, a) + gv(b, b) - 2 * gv(a, b);
  }
  return r;
}

MaxResistanceResult max_resistance_search(const SchreierGraph& g, SearchMode mode, std::size_t budget,
                                          std::uint64_t seed, const SolverOptions& opts) {
  const std::int32_t n = g.vertices();
  if (n < 2) throw InvalidArgument("need at least two vertices");
  MaxResistanceResult out;
  const std::vector<std::int32_t> anti = antiroots(g.n, g.params.m);
  if (mode == SearchMode::Exhaustive) {
    if (n > 1024) throw InvalidArgument("exhaustive search limited to 1024 vertices");
    const auto r = all_pairs_resistance(g.net);
    out.value = -1;
    for (std::int32_t a = 0; a < n; ++a) {
      for (std::int32_t b = a + 1; b < n; ++b) {
        if (r[a][b] > out.value) out = {a, b, r[a][b], 0, false, 0};
      }
    }
    out.pairs_evaluated = static_cast<std::size_t>(n) * (n - 1) / 2;
    for (std::int32_t x : anti) out.root_antiroot = std::max(out.root_antiroot, r[0][x]);
  } else {
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    for (std::int32_t x : anti) pairs.emplace_back(0, x);
    // Double sweep: the farthest vertex from the farthest vertex of 0.
    auto farthest = [&](std::int32_t s) {
      const auto dist = g.net.bfs(s);
      return static_cast<std::int32_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    };
    const std::int32_t f1 = farthest(0);
    const std::int32_t f2 = farthest(f1);
    if (f1 != f2) pairs.emplace_back(std::min(f1, f2), std::max(f1, f2));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int32_t> pick(0, n - 1);
    while (pairs.size() < anti.size() + 1 + budget) {
      const std::int32_t a = pick(rng), b = pick(rng);
      if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::vector<double> values(pairs.size());
    SolverOptions inner = opts;
    inner.exec = Exec::Serial;
    parallel_for(static_cast<std::int64_t>(pairs.size()), opts.exec, [&](std::int64_t i) {
      const std::int32_t a = pairs[i].first, b = pairs[i].second;
      values[i] = effective_resistance(g.net, std::span(&a, 1), std::span(&b, 1), inner).value;
    });
    out.value = -1;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (values[i] > out.value) {
        out.a = pairs[i].first;
        out.b = pairs[i].second;
        out.value = values[i];
      }
    }
    for (std::size_t i = 0; i < anti.size(); ++i) out.root_antiroot = std::max(out.root_antiroot, values[i]);
    out.pairs_evaluated = pairs.size();
  }
  out.root_antiroot_attains = out.root_antiroot >= out.value * (1 - 1e-9);
  return out;
}

std::string to_string(TransienceVerdict v) {
  switch (v) {
    case TransienceVerdict::Consistent: return "transience-consistent";
    case TransienceVerdict::Inconsistent: return "not-transience-consistent";
    case TransienceVerdict::Undetermined: return "undetermined";
  }
  return "?";
}

TransienceReport transience_report(const ModelParams& p, std::vector<int> n_list, const SolverOptions& opts) {
  std::sort(n_list.begin(), n_list.end());
  n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
  TransienceReport out;
  for (int n : n_list) {
    const SchreierGraph g = build_graph(p, n, opts.exec);
    const std::int32_t a = root(n), b = antiroot(n, 1, p.m);
    out.n.push_back(n);
    out.values.push_back(effective_resistance(g.net, std::span(&a, 1), std::span(&b, 1), opts).value);
  }
  out.verdict = transience_verdict(out.values);
  return out;
}

TransienceVerdict transience_verdict(const std::vector<double>& values) {
  if (values.size() < 2) return TransienceVerdict::Undetermined;
  const double median = values[(values.size() - 1) / 2];
  return values.back() <= 1.05 * median ? TransienceVerdict::Consistent : TransienceVerdict::Inconsistent;
}

}  // namespace mg
