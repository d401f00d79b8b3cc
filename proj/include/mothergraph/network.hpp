#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mg {

struct WeightedEdge {
  std::int32_t u;
  std::int32_t v;
  double conductance;
};

// Undirected weighted graph in CSR form. Each edge appears in both endpoint
// rows; neighbours are sorted and unique, loops are never stored.
class Network {
 public:
  Network() = default;
  // Parallel edges are merged (conductances added); loops are dropped.
  static Network from_edges(std::int32_t vertices, std::span<const WeightedEdge> edges);
  // Rows must hold sorted, unique, loop-free neighbours and be symmetric.
  static Network from_rows(const std::vector<std::vector<std::pair<std::int32_t, double>>>& rows);

  std::int32_t vertices() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return adj_.size() / 2; }

  std::span<const std::int32_t> neighbors(std::int32_t u) const {
    return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
  }
  std::span<const double> conductances(std::int32_t u) const {
    return {cond_.data() + offsets_[u], cond_.data() + offsets_[u + 1]};
  }
  // 0 when u and v are not adjacent.
  double conductance(std::int32_t u, std::int32_t v) const;
  double weighted_degree(std::int32_t u) const;

  // Edges with u < v in lexicographic order.
  std::vector<WeightedEdge> edges() const;

  // Subgraph induced on `vertices`; vertex i of the result is vertices[i].
  Network induced(std::span<const std::int32_t> vertices) const;

  // Vertices reachable from `sources`.
  std::vector<bool> reachable(std::span<const std::int32_t> sources) const;
  // Hop distances from `source` (-1 when unreachable).
  std::vector<std::int32_t> bfs(std::int32_t source) const;

  const std::vector<std::int64_t>& offsets() const noexcept { return offsets_; }
  const std::vector<std::int32_t>& adjacency() const noexcept { return adj_; }
  const std::vector<double>& values() const noexcept { return cond_; }

 private:
  std::int32_t n_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> adj_;
  std::vector<double> cond_;
};

}  // namespace mg
