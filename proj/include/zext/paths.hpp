#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "zext/graph.hpp"

namespace zext {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kInfiniteGirth = std::numeric_limits<std::size_t>::max();

// Relative tolerance used for every distance tie and equality test.
inline constexpr double kDistanceTolerance = 1e-9;

inline bool nearly_equal(double a, double b, double tol = kDistanceTolerance) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Dense row-major square matrix of doubles.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n, double fill = kInfinity) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t a, std::size_t b) const { return data_[a * n_ + b]; }
  double& operator()(std::size_t a, std::size_t b) { return data_[a * n_ + b]; }
  std::span<const double> row(std::size_t a) const { return {data_.data() + a * n_, n_}; }
  std::span<double> row(std::size_t a) { return {data_.data() + a * n_, n_}; }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Shortest path tree from one source. Among equal-length routes the
// predecessor of v is the smallest vertex id u with dist[u] + len(u,v) ==
// dist[v] (relative tolerance), and the smallest such edge id.
struct ShortestPathTree {
  VertexId source = kNoVertex;
  std::vector<double> dist;
  std::vector<VertexId> pred;
  std::vector<EdgeId> pred_edge;

  bool reachable(VertexId v) const { return dist[v] != kInfinity; }

  // Vertex sequence source..target; empty if unreachable.
  std::vector<VertexId> path_to(VertexId target) const {
    if (!reachable(target)) return {};
    std::vector<VertexId> rev{target};
    while (rev.back() != source) rev.push_back(pred[rev.back()]);
    return {rev.rbegin(), rev.rend()};
  }

  std::vector<EdgeId> edge_path_to(VertexId target) const {
    if (!reachable(target)) return {};
    std::vector<EdgeId> rev;
    for (VertexId v = target; v != source; v = pred[v]) rev.push_back(pred_edge[v]);
    return {rev.rbegin(), rev.rend()};
  }
};

inline std::vector<double> dijkstra_distances(const Graph& g, const EdgeLengths& len, VertexId source) {
  std::vector<double> dist(g.vertex_count(), kInfinity);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (EdgeId e : g.incident(u)) {
      const VertexId v = g.other(e, u);
      const double nd = d + len[e];
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

inline ShortestPathTree shortest_path_tree(const Graph& g, const EdgeLengths& len, VertexId source) {
  ShortestPathTree t;
  t.source = source;
  t.dist = dijkstra_distances(g, len, source);
  t.pred.assign(g.vertex_count(), kNoVertex);
  t.pred_edge.assign(g.vertex_count(), kNoEdge);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (v == source || !t.reachable(v)) continue;
    for (EdgeId e : g.incident(v)) {
      const VertexId u = g.other(e, v);
      if (u == v || !t.reachable(u) || !(t.dist[u] < t.dist[v])) continue;
      if (!nearly_equal(t.dist[u] + len[e], t.dist[v])) continue;
      if (u < t.pred[v] || (u == t.pred[v] && e < t.pred_edge[v])) {
        t.pred[v] = u;
        t.pred_edge[v] = e;
      }
    }
  }
  return t;
}

// All-pairs distances by one Dijkstra per source. Unreachable pairs hold
// kInfinity.
inline DistanceMatrix shortest_path_metric(const Graph& g, const EdgeLengths& len) {
  DistanceMatrix m(g.vertex_count());
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    const auto row = dijkstra_distances(g, len, s);
    std::copy(row.begin(), row.end(), m.row(s).begin());
  }
  return m;
}

// Hop (edge-count) distances from a source; SIZE_MAX when unreachable.
inline std::vector<std::size_t> hop_distances(const Graph& g, VertexId source) {
  std::vector<std::size_t> dist(g.vertex_count(), std::numeric_limits<std::size_t>::max());
  std::queue<VertexId> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop();
    for (EdgeId e : g.incident(u)) {
      const VertexId v = g.other(e, u);
      if (dist[v] == std::numeric_limits<std::size_t>::max()) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

// Length of the shortest cycle (edge count), kInfiniteGirth for forests.
// BFS from every vertex; a non-tree edge (x, y) closes a cycle through the
// root of length at most dist[x] + dist[y] + 1, and the minimum over all
// roots is exact.
inline std::size_t girth(const Graph& g) {
  std::size_t best = kInfiniteGirth;
  for (const Edge& e : g.edges()) {
    if (e.u == e.v) return 1;
  }
  std::vector<std::size_t> dist(g.vertex_count());
  std::vector<EdgeId> via(g.vertex_count());
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    std::fill(dist.begin(), dist.end(), kInfiniteGirth);
    std::queue<VertexId> q;
    dist[s] = 0;
    via[s] = kNoEdge;
    q.push(s);
    while (!q.empty()) {
      const VertexId x = q.front();
      q.pop();
      if (2 * dist[x] + 1 >= best) break;
      for (EdgeId e : g.incident(x)) {
        if (e == via[x]) continue;
        const VertexId y = g.other(e, x);
        if (dist[y] == kInfiniteGirth) {
          dist[y] = dist[x] + 1;
          via[y] = e;
          q.push(y);
        } else {
          best = std::min(best, dist[x] + dist[y] + 1);
        }
      }
    }
  }
  return best;
}

}  // namespace zext
