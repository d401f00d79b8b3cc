// Serial reference vs OpenMP timings for the hot kernels. Each pair of runs
// must produce identical output; a mismatch is reported and fails the run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "mothergraph/germ_walk.hpp"
#include "mothergraph/resistance.hpp"

using namespace mg;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

// Graph Laplacian plus a small shift, so it is positive definite.
SymmetricMatrix shifted_laplacian(const Network& net) {
  SymmetricMatrix a;
  a.diag.resize(static_cast<std::size_t>(net.vertices()));
  for (std::int32_t u = 0; u < net.vertices(); ++u) {
    a.diag[u] = net.weighted_degree(u) + 1e-3;
    for (std::size_t i = 0; i < net.neighbors(u).size(); ++i) {
      a.cols.push_back(net.neighbors(u)[i]);
      a.vals.push_back(-net.conductances(u)[i]);
    }
    a.offsets.push_back(static_cast<std::int64_t>(a.cols.size()));
  }
  return a;
}

bool report(const std::string& name, double serial, double parallel, bool same) {
  fmt::print("{:<28} serial {:9.4f}s  parallel {:9.4f}s  speedup {:5.2f}x  {}\n", name, serial, parallel,
             serial / parallel, same ? "identical" : "MISMATCH");
  std::fflush(stdout);
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::stoi(argv[1]) : 16;
  const ModelParams p{4, 2};
  fmt::print("threads={} graph=G(4,2,{})\n", max_threads(), n);
  bool ok = true;

  SchreierGraph gs, gp;
  const double tbs = seconds([&] { gs = build_graph(p, n, Exec::Serial); }, 3);
  const double tbp = seconds([&] { gp = build_graph(p, n, Exec::Parallel); }, 3);
  ok &= report("build_graph", tbs, tbp,
               gs.net.adjacency() == gp.net.adjacency() && gs.net.values() == gp.net.values());

  const SymmetricMatrix a = shifted_laplacian(gs.net);
  std::vector<double> x(static_cast<std::size_t>(a.size())), ys(x.size()), yp(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>((i * 2654435761u) % 1000) / 1000.0;
  const double tss = seconds([&] { for (int r = 0; r < 50; ++r) spmv(a, x, ys, Exec::Serial); }, 3);
  const double tsp = seconds([&] { for (int r = 0; r < 50; ++r) spmv(a, x, yp, Exec::Parallel); }, 3);
  ok &= report("spmv x50", tss, tsp, ys == yp);

  double ds = 0, dp = 0;
  const double tds = seconds([&] { for (int r = 0; r < 50; ++r) ds = dot(x, ys, Exec::Serial); }, 3);
  const double tdp = seconds([&] { for (int r = 0; r < 50; ++r) dp = dot(x, yp, Exec::Parallel); }, 3);
  ok &= report("dot x50", tds, tdp, ds == dp);

  SolverOptions so, po;
  so.exec = Exec::Serial;
  po.exec = Exec::Parallel;
  const std::int32_t src = root(n), dst = antiroot(n, 1, 2);
  ResistanceReport rs, rp;
  const double trs = seconds([&] { rs = effective_resistance(gs.net, std::span(&src, 1), std::span(&dst, 1), so); }, 2);
  const double trp = seconds([&] { rp = effective_resistance(gs.net, std::span(&src, 1), std::span(&dst, 1), po); }, 2);
  ok &= report(fmt::format("pcg resistance ({} it)", rs.iterations), trs, trp,
               rs.value == rp.value && rs.iterations == rp.iterations);

  WalkConfig cfg = WalkConfig::uniform(p);
  cfg.steps = 2000;
  cfg.trials = 200;
  cfg.seed = 7;
  GroupWalkResult ws, wp;
  cfg.exec = Exec::Serial;
  const double tws = seconds([&] { ws = walk_group(p, cfg); }, 1);
  cfg.exec = Exec::Parallel;
  const double twp = seconds([&] { wp = walk_group(p, cfg); }, 1);
  bool same = ws.trials.size() == wp.trials.size();
  for (std::size_t i = 0; same && i < ws.trials.size(); ++i) {
    same = ws.trials[i].changes == wp.trials[i].changes &&
           ws.trials[i].germ_length == wp.trials[i].germ_length;
  }
  ok &= report("group walks 200x2000", tws, twp, same);

  return ok ? 0 : 1;
}
