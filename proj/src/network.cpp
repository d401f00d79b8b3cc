#include "mothergraph/network.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "mothergraph/errors.hpp"

namespace mg {

Network Network::from_edges(std::int32_t vertices, std::span<const WeightedEdge> edges) {
  if (vertices < 0) throw InvalidArgument("negative vertex count");
  std::vector<WeightedEdge> dir;
  dir.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= vertices || e.v >= vertices) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (e.u == e.v) continue;
    dir.push_back(e);
    dir.push_back({e.v, e.u, e.conductance});
  }
  std::sort(dir.begin(), dir.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  Network net;
  net.n_ = vertices;
  net.offsets_.assign(static_cast<std::size_t>(vertices) + 1, 0);
  for (std::size_t i = 0; i < dir.size(); ++i) {
    if (!net.adj_.empty() && i > 0 && dir[i].u == dir[i - 1].u && dir[i].v == dir[i - 1].v) {
      net.cond_.back() += dir[i].conductance;
      continue;
    }
    net.adj_.push_back(dir[i].v);
    net.cond_.push_back(dir[i].conductance);
    ++net.offsets_[dir[i].u + 1];
  }
  for (std::int32_t u = 0; u < vertices; ++u) net.offsets_[u + 1] += net.offsets_[u];
  return net;
}

Network Network::from_rows(const std::vector<std::vector<std::pair<std::int32_t, double>>>& rows) {
  Network net;
  net.n_ = static_cast<std::int32_t>(rows.size());
  net.offsets_.assign(rows.size() + 1, 0);
  for (std::size_t u = 0; u < rows.size(); ++u) {
    net.offsets_[u + 1] = net.offsets_[u] + static_cast<std::int64_t>(rows[u].size());
  }
  net.adj_.reserve(static_cast<std::size_t>(net.offsets_.back()));
  net.cond_.reserve(static_cast<std::size_t>(net.offsets_.back()));
  for (std::size_t u = 0; u < rows.size(); ++u) {
    for (std::size_t i = 0; i < rows[u].size(); ++i) {
      const auto [v, c] = rows[u][i];
      if (v < 0 || v >= net.n_ || v == static_cast<std::int32_t>(u) || (i > 0 && rows[u][i - 1].first >= v)) {
        throw InvalidArgument("rows must be sorted, unique and loop-free");
      }
      net.adj_.push_back(v);
      net.cond_.push_back(c);
    }
  }
  return net;
}

double Network::conductance(std::int32_t u, std::int32_t v) const {
  const auto nb = neighbors(u);
  const auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return 0.0;
  return cond_[offsets_[u] + (it - nb.begin())];
}

double Network::weighted_degree(std::int32_t u) const {
  double s = 0;
  for (double c : conductances(u)) s += c;
  return s;
}

std::vector<WeightedEdge> Network::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (std::int32_t u = 0; u < n_; ++u) {
    const auto nb = neighbors(u);
    const auto cs = conductances(u);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] > u) out.push_back({u, nb[i], cs[i]});
    }
  }
  return out;
}

Network Network::induced(std::span<const std::int32_t> vertices) const {
  std::unordered_map<std::int32_t, std::int32_t> local;
  local.reserve(vertices.size() * 2);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] < 0 || vertices[i] >= n_) throw InvalidArgument("induced vertex out of range");
    if (!local.emplace(vertices[i], static_cast<std::int32_t>(i)).second) {
      throw InvalidArgument("induced vertex repeated");
    }
  }
  std::vector<WeightedEdge> es;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto nb = neighbors(vertices[i]);
    const auto cs = conductances(vertices[i]);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      const auto it = local.find(nb[j]);
      if (it != local.end() && it->second > static_cast<std::int32_t>(i)) {
        es.push_back({static_cast<std::int32_t>(i), it->second, cs[j]});
      }
    }
  }
  return from_edges(static_cast<std::int32_t>(vertices.size()), es);
}

std::vector<bool> Network::reachable(std::span<const std::int32_t> sources) const {
  std::vector<bool> seen(static_cast<std::size_t>(n_), false);
  std::vector<std::int32_t> stack;
  for (std::int32_t s : sources) {
    if (!seen[s]) {
      seen[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const std::int32_t u = stack.back();
    stack.pop_back();
    for (std::int32_t v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

std::vector<std::int32_t> Network::bfs(std::int32_t source) const {
  std::vector<std::int32_t> dist(static_cast<std::size_t>(n_), -1);
  std::deque<std::int32_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::int32_t u = queue.front();
    queue.pop_front();
    for (std::int32_t v : neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace mg
