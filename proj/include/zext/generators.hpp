#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "zext/error.hpp"
#include "zext/graph.hpp"
#include "zext/rng.hpp"

namespace zext {

// Cayley graph of Z_m1 x ... x Z_mr. The generator list is symmetrized:
// missing inverses are added. Each inverse pair {s, s^-1} gets symbols +k/-k;
// an involution gets +k on both endpoints.
inline Graph build_cayley(const std::vector<int>& moduli, const std::vector<std::vector<int>>& generators) {
  if (moduli.empty()) fail("cayley: empty group");
  std::size_t order = 1;
  for (int m : moduli) {
    if (m < 1) fail("cayley: modulus ", m, " must be positive");
    order *= static_cast<std::size_t>(m);
  }
  CayleyStructure group{moduli, {}};
  auto normalize = [&](std::vector<int> s) {
    if (s.size() != moduli.size()) fail("cayley: generator has ", s.size(), " coordinates, group has ", moduli.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = ((s[i] % moduli[i]) + moduli[i]) % moduli[i];
    return s;
  };

  std::vector<std::vector<int>> given;
  for (const auto& raw : generators) {
    auto s = normalize(raw);
    if (std::all_of(s.begin(), s.end(), [](int c) { return c == 0; })) fail("cayley: identity is not a valid generator");
    if (std::find(given.begin(), given.end(), s) != given.end()) {
      fail("cayley: duplicate generator ", group.vertex(s), " after reduction");
    }
    given.push_back(std::move(s));
  }

  // Assign symbols; inverses of listed generators are implied.
  std::vector<std::pair<Label, std::vector<int>>> symbols;
  Label next = 1;
  auto find_symbol = [&](const std::vector<int>& s) -> const std::pair<Label, std::vector<int>>* {
    for (const auto& entry : symbols) {
      if (entry.second == s) return &entry;
    }
    return nullptr;
  };
  for (const auto& s : given) {
    if (find_symbol(s) != nullptr) continue;
    const auto inv = group.negate(s);
    symbols.emplace_back(next, s);
    if (inv != s) symbols.emplace_back(-next, inv);
    ++next;
  }
  for (const auto& [sym, elem] : symbols) group.generator.emplace(sym, elem);

  Graph g(order);
  for (VertexId x = 0; x < order; ++x) {
    const auto ex = group.element(x);
    for (const auto& [sym, elem] : symbols) {
      if (sym < 0) continue;
      const VertexId y = group.vertex(group.add(ex, elem));
      const auto inv = group.negate(elem);
      if (inv == elem) {
        if (x < y) g.add_edge(x, y, sym, sym);
      } else {
        g.add_edge(x, y, sym, -sym);
      }
    }
  }
  g.set_cayley(std::move(group));
  return g;
}

// Single cyclic group convenience: Z_m with integer generators.
inline Graph build_cayley(int modulus, const std::vector<int>& generators) {
  std::vector<std::vector<int>> gens;
  for (int s : generators) gens.push_back({s});
  return build_cayley(std::vector<int>{modulus}, gens);
}

struct RandomRegularOptions {
  std::size_t max_attempts = 100000;
};

// Simple d-regular graph on m vertices from the configuration model,
// rejecting pairings that produce loops or parallel edges. Edge ids follow
// the sorted (u < v) edge list, so the result depends only on (m, d, seed).
inline Graph random_regular(std::size_t m, std::size_t d, std::uint64_t seed, RandomRegularOptions opts = {}) {
  if ((m * d) % 2 != 0) fail("random_regular: m*d = ", m * d, " must be even");
  if (d >= m) fail("random_regular: degree ", d, " must be smaller than vertex count ", m);
  Rng rng(seed);
  std::vector<VertexId> stubs;
  stubs.reserve(m * d);
  for (VertexId v = 0; v < m; ++v) {
    for (std::size_t k = 0; k < d; ++k) stubs.push_back(v);
  }
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    rng.shuffle(stubs);
    pairs.clear();
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      auto a = stubs[i];
      auto b = stubs[i + 1];
      if (a == b) ok = false;
      if (a > b) std::swap(a, b);
      pairs.emplace_back(a, b);
    }
    if (!ok) continue;
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) continue;
    Graph g(m);
    for (auto [a, b] : pairs) g.add_edge(a, b);
    return g;
  }
  fail("random_regular: no simple ", d, "-regular graph on ", m, " vertices after ", opts.max_attempts,
       " attempts; use a larger m or a smaller d");
}

inline Graph cycle_graph(std::size_t m) {
  Graph g(m);
  for (VertexId v = 0; v < m; ++v) g.add_edge(v, static_cast<VertexId>((v + 1) % m));
  return g;
}

inline Graph path_graph(std::size_t m) {
  Graph g(m);
  for (VertexId v = 0; v + 1 < m; ++v) g.add_edge(v, v + 1);
  return g;
}

inline Graph complete_graph(std::size_t m) {
  Graph g(m);
  for (VertexId u = 0; u < m; ++u) {
    for (VertexId v = u + 1; v < m; ++v) g.add_edge(u, v);
  }
  return g;
}

}  // namespace zext
