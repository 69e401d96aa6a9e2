#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>
#include <vector>

#include "zext/error.hpp"
#include "zext/instance.hpp"
#include "zext/relaxation.hpp"
#include "zext/rng.hpp"

namespace zext {

inline double integral_cost(const Labeling& f, const ZeroExtInstance& inst) {
  validate_labeling(f, inst);
  double sum = 0.0;
  for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& ed = inst.graph.edge(e);
    if (f[ed.u] != f[ed.v]) sum += inst.weights[e] * inst.metric(f[ed.u], f[ed.v]);
  }
  return sum;
}

// Every vertex labeled `t`, terminals fixed.
inline Labeling constant_labeling(const ZeroExtInstance& inst, std::uint32_t t) {
  Labeling f(inst.vertex_count(), t);
  for (std::size_t i = 0; i < inst.terminal_count(); ++i) f[inst.terminals[i]] = static_cast<std::uint32_t>(i);
  return f;
}

struct Solution {
  Labeling labeling;
  double cost = 0.0;
};

inline constexpr double kBruteForceCap = 1e7;

// Exhaustive search in lexicographic order of the labeling vector; only a
// strictly cheaper labeling replaces the incumbent.
inline Solution brute_force(const ZeroExtInstance& inst, double cap = kBruteForceCap) {
  const auto free = inst.non_terminals();
  const std::size_t k = inst.terminal_count();
  const double count = std::pow(static_cast<double>(k), static_cast<double>(free.size()));
  if (count > cap) {
    throw TooLarge(detail::concat("brute_force: ", k, "^", free.size(), " = ", count, " labelings exceed cap ", cap),
                   count);
  }
  Labeling f = constant_labeling(inst, 0);
  Solution best{f, integral_cost(f, inst)};
  if (free.empty()) return best;
  while (true) {
    std::size_t i = free.size();
    for (;;) {
      if (i == 0) return best;
      --i;
      if (++f[free[i]] < k) break;
      f[free[i]] = 0;
    }
    const double c = integral_cost(f, inst);
    if (c < best.cost) best = {f, c};
  }
}

// Randomized rounding: r uniform in [1, 2), a uniform order on terminals;
// u goes to the first terminal in that order within r * A_u, where A_u is
// its distance to the nearest terminal.
template <MetricView M>
Labeling ckr_round(const ZeroExtInstance& inst, const M& delta, std::uint64_t seed) {
  if (delta.size() != inst.vertex_count()) fail("ckr_round: metric size mismatch");
  Rng rng(seed);
  const double r = rng.uniform(1.0, 2.0);
  const auto order = rng.permutation(inst.terminal_count());
  const std::size_t k = inst.terminal_count();
  Labeling f = constant_labeling(inst, 0);
  for (VertexId u = 0; u < inst.vertex_count(); ++u) {
    if (inst.is_terminal(u)) continue;
    double a = kInfinity;
    std::uint32_t nearest = 0;
    for (std::uint32_t t = 0; t < k; ++t) {
      const double d = delta(u, inst.terminals[t]);
      if (d < a) {
        a = d;
        nearest = t;
      }
    }
    f[u] = nearest;
    const double radius = r * a;
    for (std::uint32_t t : order) {
      if (delta(u, inst.terminals[t]) <= radius) {
        f[u] = t;
        break;
      }
    }
  }
  return f;
}

struct Baselines {
  Solution all_to_one;
  std::uint32_t best_terminal = 0;
  Solution nearest_terminal;
};

// Nearest terminal under the instance's edge lengths, or hop counts when the
// instance carries none; ties go to the smaller terminal ordinal.
inline Labeling nearest_terminal_labeling(const ZeroExtInstance& inst) {
  const std::size_t n = inst.vertex_count();
  std::vector<double> dist(n, kInfinity);
  std::vector<std::uint32_t> owner(n, std::numeric_limits<std::uint32_t>::max());
  using Item = std::tuple<double, std::uint32_t, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::uint32_t t = 0; t < inst.terminal_count(); ++t) {
    dist[inst.terminals[t]] = 0.0;
    owner[inst.terminals[t]] = t;
    heap.emplace(0.0, t, inst.terminals[t]);
  }
  while (!heap.empty()) {
    auto [d, t, u] = heap.top();
    heap.pop();
    if (d != dist[u] || t != owner[u]) continue;
    for (EdgeId e : inst.graph.incident(u)) {
      const VertexId v = inst.graph.other(e, u);
      if (inst.is_terminal(v)) continue;
      const double nd = d + (inst.lengths ? (*inst.lengths)[e] : 1.0);
      if (nd < dist[v] || (nd == dist[v] && t < owner[v])) {
        dist[v] = nd;
        owner[v] = t;
        heap.emplace(nd, t, v);
      }
    }
  }
  Labeling f = constant_labeling(inst, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (!inst.is_terminal(v) && owner[v] != std::numeric_limits<std::uint32_t>::max()) f[v] = owner[v];
  }
  return f;
}

inline Baselines baseline_labelings(const ZeroExtInstance& inst) {
  const std::size_t k = inst.terminal_count();
  if (k > kDenseMetricCap) fail("baseline_labelings: exhaustive all_to_one scan limited to ", kDenseMetricCap, " terminals");
  // cost(t*) = fixed + sum over edges (non-terminal, terminal s) of w * D(t*, s)
  double fixed = 0.0;
  std::vector<std::pair<std::uint32_t, double>> touches;
  for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& ed = inst.graph.edge(e);
    const bool tu = inst.is_terminal(ed.u);
    const bool tv = inst.is_terminal(ed.v);
    if (tu && tv) {
      fixed += inst.weights[e] * inst.metric(inst.ordinal[ed.u], inst.ordinal[ed.v]);
    } else if (tu != tv) {
      const VertexId t = tu ? ed.u : ed.v;
      touches.emplace_back(static_cast<std::uint32_t>(inst.ordinal[t]), inst.weights[e]);
    }
  }
  Baselines out;
  double best = kInfinity;
  for (std::uint32_t star = 0; star < k; ++star) {
    double c = fixed;
    const auto row = inst.metric.row(star);
    for (const auto& [s, w] : touches) c += w * row[s];
    if (c < best) {
      best = c;
      out.best_terminal = star;
    }
  }
  out.all_to_one.labeling = constant_labeling(inst, out.best_terminal);
  out.all_to_one.cost = integral_cost(out.all_to_one.labeling, inst);
  out.nearest_terminal.labeling = nearest_terminal_labeling(inst);
  out.nearest_terminal.cost = integral_cost(out.nearest_terminal.labeling, inst);
  return out;
}

// Sweeps vertices in id order, moving each to its best terminal when that
// strictly lowers the cost; stops after a sweep without moves or after
// max_rounds sweeps.
inline Labeling local_search(const ZeroExtInstance& inst, Labeling f, std::size_t max_rounds) {
  validate_labeling(f, inst);
  const std::size_t k = inst.terminal_count();
  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool moved = false;
    for (VertexId v = 0; v < inst.vertex_count(); ++v) {
      if (inst.is_terminal(v)) continue;
      auto local = [&](std::uint32_t t) {
        double c = 0.0;
        for (EdgeId e : inst.graph.incident(v)) {
          const VertexId o = inst.graph.other(e, v);
          if (o == v || f[o] == t) continue;
          c += inst.weights[e] * inst.metric(t, f[o]);
        }
        return c;
      };
      const double current = local(f[v]);
      double best = current;
      std::uint32_t arg = f[v];
      for (std::uint32_t t = 0; t < k; ++t) {
        if (t == f[v]) continue;
        const double c = local(t);
        if (c < best) {
          best = c;
          arg = t;
        }
      }
      if (arg != f[v] && best < current - 1e-12 * std::max(1.0, current)) {
        f[v] = arg;
        moved = true;
      }
    }
    if (!moved) break;
  }
  return f;
}

// Labeling file: one "vertex terminal_vertex" pair per line.
inline void write_labeling(std::ostream& os, const Labeling& f, const ZeroExtInstance& inst) {
  for (VertexId v = 0; v < f.size(); ++v) os << v << ' ' << inst.terminals[f[v]] << '\n';
}

inline Labeling read_labeling(std::istream& is, const ZeroExtInstance& inst) {
  Labeling f(inst.vertex_count(), std::numeric_limits<std::uint32_t>::max());
  std::string line;
  while (detail::next_data_line(is, line)) {
    std::istringstream ls(line);
    std::size_t v = 0;
    std::size_t t = 0;
    if (!(ls >> v >> t)) fail("labeling file: bad line '", line, "'");
    if (v >= f.size()) fail("labeling file: vertex ", v, " out of range");
    if (t >= inst.vertex_count() || !inst.is_terminal(static_cast<VertexId>(t))) {
      fail("labeling file: vertex ", t, " is not a terminal");
    }
    f[v] = static_cast<std::uint32_t>(inst.ordinal[t]);
  }
  for (VertexId v = 0; v < f.size(); ++v) {
    if (f[v] == std::numeric_limits<std::uint32_t>::max()) fail("labeling file: vertex ", v, " has no label");
  }
  validate_labeling(f, inst);
  return f;
}

}  // namespace zext
