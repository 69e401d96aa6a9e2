#pragma once

#include <bit>
#include <cstdint>
#include <queue>
#include <vector>

#include "zext/error.hpp"
#include "zext/graph.hpp"

namespace zext {

// Packed vector over GF(2).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i % 64);
    if (value) {
      words_[i / 64] |= bit;
    } else {
      words_[i / 64] &= ~bit;
    }
  }
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  BitVector& operator^=(const BitVector& o) {
    if (o.size_ != size_) fail("BitVector: size mismatch ", size_, " vs ", o.size_);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size_; ++i) {
      if (test(i)) out.push_back(i);
    }
    return out;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  bool operator==(const BitVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Indicator vector over the edge ids of a host graph.
using EdgeSet = BitVector;

class Gf2Matrix {
 public:
  Gf2Matrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return rows_[r].test(c); }
  void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }
  void flip(std::size_t r, std::size_t c) { rows_[r].flip(c); }
  const BitVector& row(std::size_t r) const { return rows_[r]; }

  static Gf2Matrix identity(std::size_t n) {
    Gf2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  static Gf2Matrix from_rows(const std::vector<BitVector>& rows, std::size_t cols) {
    Gf2Matrix m(0, cols);
    for (const auto& r : rows) {
      if (r.size() != cols) fail("Gf2Matrix: row width ", r.size(), " != ", cols);
      m.rows_.push_back(r);
    }
    return m;
  }

  // Matrix-vector product over GF(2).
  BitVector apply(const BitVector& x) const {
    if (x.size() != cols_) fail("Gf2Matrix::apply: vector size ", x.size(), " != ", cols_);
    BitVector out(rows());
    for (std::size_t r = 0; r < rows(); ++r) {
      std::uint64_t acc = 0;
      const auto& a = rows_[r].words();
      const auto& b = x.words();
      for (std::size_t w = 0; w < a.size(); ++w) acc ^= a[w] & b[w];
      out.set(r, (std::popcount(acc) & 1) != 0);
    }
    return out;
  }

  // Rank by Gaussian elimination on a copy.
  std::size_t rank() const {
    auto work = rows_;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols_ && rank < work.size(); ++c) {
      std::size_t pivot = rank;
      while (pivot < work.size() && !work[pivot].test(c)) ++pivot;
      if (pivot == work.size()) continue;
      std::swap(work[pivot], work[rank]);
      for (std::size_t r = 0; r < work.size(); ++r) {
        if (r != rank && work[r].test(c)) work[r] ^= work[rank];
      }
      ++rank;
    }
    return rank;
  }

 private:
  std::size_t cols_;
  std::vector<BitVector> rows_;
};

// |V| x |E| incidence over GF(2); a self-loop touches its vertex twice and
// so contributes a zero column.
inline Gf2Matrix incidence_matrix(const Graph& g) {
  Gf2Matrix m(g.vertex_count(), g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    m.flip(g.edge(e).u, e);
    m.flip(g.edge(e).v, e);
  }
  return m;
}

inline std::size_t kernel_dim(const Gf2Matrix& m) { return m.cols() - m.rank(); }

// First Betti number by the Euler formula |E| - |V| + #components.
inline std::size_t betti1(const Graph& g) {
  return g.edge_count() + component_count(g) - g.vertex_count();
}

// Fundamental cycles of a BFS spanning forest, one per non-tree edge.
inline std::vector<EdgeSet> cycle_basis(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<VertexId> parent(n, kNoVertex);
  std::vector<EdgeId> parent_edge(n, kNoEdge);
  std::vector<std::size_t> depth(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<bool> tree(g.edge_count(), false);
  for (VertexId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::queue<VertexId> q;
    q.push(root);
    while (!q.empty()) {
      const VertexId x = q.front();
      q.pop();
      for (EdgeId e : g.incident(x)) {
        const VertexId y = g.other(e, x);
        if (seen[y]) continue;
        seen[y] = true;
        parent[y] = x;
        parent_edge[y] = e;
        depth[y] = depth[x] + 1;
        tree[e] = true;
        q.push(y);
      }
    }
  }
  std::vector<EdgeSet> basis;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (tree[e]) continue;
    EdgeSet c(g.edge_count());
    c.set(e);
    VertexId a = g.edge(e).u;
    VertexId b = g.edge(e).v;
    while (a != b) {
      if (depth[a] >= depth[b]) {
        c.flip(parent_edge[a]);
        a = parent[a];
      } else {
        c.flip(parent_edge[b]);
        b = parent[b];
      }
    }
    basis.push_back(std::move(c));
  }
  return basis;
}

}  // namespace zext
