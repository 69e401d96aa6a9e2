#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zext/error.hpp"
#include "zext/extension.hpp"
#include "zext/gf2.hpp"
#include "zext/graph.hpp"
#include "zext/instance.hpp"
#include "zext/paths.hpp"
#include "zext/relaxation.hpp"

namespace zext {

// Vertex and edge subsets of a host graph, both kept sorted.
struct Subgraph {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;

  bool operator==(const Subgraph&) const = default;
};

// Largest number of G-hops allowed between a cloud and its representative.
inline std::size_t hop_bound(double epsilon, std::size_t n) {
  return static_cast<std::size_t>(std::floor(epsilon * std::log(static_cast<double>(n)) + 1e-12));
}

inline double default_threshold(double epsilon) { return 1.0 - 4.0 * epsilon; }

struct Representatives {
  std::vector<VertexId> clouds;                   // S, ascending
  std::vector<std::optional<VertexId>> rep;       // per cloud: X vertex or none
};

// Cloud g is represented by terminal twin v when at least threshold * |V_H|
// of g's vertices are labeled v_T.
inline Representatives extract_representatives(const ZeroExtInstance& inst, const ExtendedGraph& x,
                                               const Labeling& f, double threshold) {
  if (!(threshold > 0.5) || threshold > 1.0) {
    fail("extract_representatives: threshold ", threshold, " must lie in (1/2, 1]");
  }
  if (!inst.is_gap() || inst.terminal_count() != x.vertex_count()) {
    fail("extract_representatives: instance was not built from this extension");
  }
  validate_labeling(f, inst);
  const std::size_t m = x.cloud_size();
  const double need = threshold * static_cast<double>(m) - 1e-9;
  Representatives out;
  out.rep.assign(x.cloud_count(), std::nullopt);
  std::map<std::uint32_t, std::size_t> counts;
  for (VertexId g = 0; g < x.cloud_count(); ++g) {
    counts.clear();
    for (VertexId h = 0; h < m; ++h) ++counts[f[x.vertex(g, h)]];
    for (const auto& [t, c] : counts) {
      if (static_cast<double>(c) >= need) {
        out.rep[g] = static_cast<VertexId>(t);
        out.clouds.push_back(g);
        break;
      }
    }
  }
  return out;
}

struct SplitCandidate {
  Subgraph sub;                                   // G'
  std::vector<std::optional<VertexId>> rep;       // f-bar per cloud; set on every vertex of G'
  double alpha = 0.0;
  double epsilon = 0.0;
  double threshold = 0.0;
  // Per edge of G' (same order as sub.edges): flat vertex sequence from the
  // representative of the smaller cloud id to the other one.
  std::vector<std::vector<VertexId>> paths;
};

// Canonical shortest path between two representatives, directed from the
// endpoint with the smaller cloud id.
inline std::vector<VertexId> representative_path(const ExtendedGraph& x, const Edge& base_edge,
                                                 const std::vector<std::optional<VertexId>>& rep) {
  const VertexId lo = std::min(base_edge.u, base_edge.v);
  const VertexId hi = std::max(base_edge.u, base_edge.v);
  const auto tree = shortest_path_tree(x.flat_graph(), x.flat_lengths(), *rep[lo]);
  if (!tree.reachable(*rep[hi])) fail("representative path: ", *rep[lo], " cannot reach ", *rep[hi]);
  return tree.path_to(*rep[hi]);
}

inline SplitCandidate build_split_candidate(const ZeroExtInstance& inst, const ExtendedGraph& x, const Labeling& f,
                                            double alpha, double epsilon, double threshold) {
  const auto reps = extract_representatives(inst, x, f, threshold);
  const Graph& g = x.base();
  const std::size_t bound = hop_bound(epsilon, g.vertex_count());
  SplitCandidate c;
  c.alpha = alpha;
  c.epsilon = epsilon;
  c.threshold = threshold;
  c.rep.assign(g.vertex_count(), std::nullopt);
  std::vector<bool> inside(g.vertex_count(), false);
  for (VertexId v : reps.clouds) {
    const auto hops = hop_distances(g, v);
    if (hops[x.cloud_of(*reps.rep[v])] <= bound) {
      inside[v] = true;
      c.rep[v] = reps.rep[v];
      c.sub.vertices.push_back(v);
    }
  }
  std::map<VertexId, std::vector<double>> dist;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (!inside[ed.u] || !inside[ed.v]) continue;
    const VertexId a = *c.rep[ed.u];
    if (!dist.count(a)) dist[a] = dijkstra_distances(x.flat_graph(), x.flat_lengths(), a);
    if (dist[a][*c.rep[ed.v]] < alpha) {
      c.sub.edges.push_back(e);
      c.paths.push_back(representative_path(x, ed, c.rep));
    }
  }
  return c;
}

// A walk in G: start vertex plus edge ids.
struct BaseWalk {
  VertexId start = kNoVertex;
  std::vector<EdgeId> edges;
};

struct HomeomorphismResult {
  bool ok = true;
  std::vector<EdgeId> witness_cycle;   // G edge ids of the failing basis cycle
  std::vector<EdgeId> odd_edges;       // its odd-occurrence set
};

// Endpoint of a walk, or an error when a step leaves the walk.
inline VertexId walk_end(const Graph& g, const BaseWalk& w) {
  VertexId at = w.start;
  for (std::size_t i = 0; i < w.edges.size(); ++i) {
    const EdgeId e = w.edges[i];
    if (e >= g.edge_count()) fail("walk: step ", i, " uses unknown edge ", e);
    const Edge& ed = g.edge(e);
    if (ed.u != at && ed.v != at) fail("walk: step ", i, " (edge ", e, ") does not touch vertex ", at);
    at = g.other(e, at);
  }
  return at;
}

// Checks the odd-occurrence condition on a fundamental cycle basis of G';
// C -> sum of parity(P(e)) is linear over GF(2), so agreeing on a basis
// means agreeing on every cycle.
inline HomeomorphismResult check_cycle_homeomorphism(const std::vector<VertexId>& ftilde,
                                                     const std::vector<BaseWalk>& walks, const Graph& g,
                                                     const Subgraph& sub) {
  if (walks.size() != sub.edges.size()) fail("cycle homeomorphism: ", walks.size(), " walks for ", sub.edges.size(), " edges");
  std::map<VertexId, VertexId> local;
  for (VertexId v : sub.vertices) local.emplace(v, static_cast<VertexId>(local.size()));
  Graph h(sub.vertices.size(), true);
  std::vector<EdgeSet> parity;
  for (std::size_t i = 0; i < sub.edges.size(); ++i) {
    const Edge& ed = g.edge(sub.edges[i]);
    if (!local.count(ed.u) || !local.count(ed.v)) fail("cycle homeomorphism: edge ", sub.edges[i], " leaves G'");
    h.add_edge(local[ed.u], local[ed.v]);
    const BaseWalk& w = walks[i];
    const VertexId a = ftilde[ed.u];
    const VertexId b = ftilde[ed.v];
    const VertexId end = walk_end(g, w);
    if (!((w.start == a && end == b) || (w.start == b && end == a))) {
      fail("cycle homeomorphism: walk for edge ", sub.edges[i], " runs ", w.start, " -> ", end, ", expected ", a,
           " <-> ", b);
    }
    EdgeSet p(g.edge_count());
    for (EdgeId e : w.edges) p.flip(e);
    parity.push_back(std::move(p));
  }
  HomeomorphismResult res;
  for (const EdgeSet& cycle : cycle_basis(h)) {
    EdgeSet odd(g.edge_count());
    EdgeSet want(g.edge_count());
    for (std::size_t i : cycle.ones()) {
      odd ^= parity[i];
      want.flip(sub.edges[i]);
    }
    if (odd != want) {
      res.ok = false;
      for (std::size_t i : cycle.ones()) res.witness_cycle.push_back(sub.edges[i]);
      for (std::size_t e : odd.ones()) res.odd_edges.push_back(static_cast<EdgeId>(e));
      return res;
    }
  }
  return res;
}

struct EdgeDistance {
  EdgeId edge;
  double distance;
};

struct CloudHops {
  VertexId cloud;
  std::size_t hops;
};

struct SplitReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  double threshold = 0.0;
  std::size_t n = 0;

  bool size_ok = false;
  std::size_t sub_edges = 0;
  std::size_t base_edges = 0;
  double size_required = 0.0;

  bool homeomorphism_ok = false;
  HomeomorphismResult homeomorphism;

  bool distance_ok = false;
  std::vector<EdgeDistance> distance_violations;

  bool closeness_ok = false;
  std::size_t hop_limit = 0;
  std::vector<CloudHops> closeness_violations;

  bool ok() const { return size_ok && homeomorphism_ok && distance_ok && closeness_ok; }
};

inline SplitReport verify_split(const SplitCandidate& c, const ExtendedGraph& x) {
  const Graph& g = x.base();
  SplitReport r;
  r.alpha = c.alpha;
  r.epsilon = c.epsilon;
  r.threshold = c.threshold;
  r.n = g.vertex_count();

  r.sub_edges = c.sub.edges.size();
  r.base_edges = g.edge_count();
  r.size_required = (1.0 - c.epsilon) * static_cast<double>(g.edge_count());
  r.size_ok = static_cast<double>(r.sub_edges) >= r.size_required - 1e-9;

  for (VertexId v : c.sub.vertices) {
    if (!c.rep[v]) fail("verify_split: vertex ", v, " of G' has no representative");
  }
  if (c.paths.size() != c.sub.edges.size()) fail("verify_split: path assignment does not cover G'");

  r.distance_ok = true;
  std::map<VertexId, std::vector<double>> dist;
  for (EdgeId e : c.sub.edges) {
    const Edge& ed = g.edge(e);
    const VertexId a = *c.rep[ed.u];
    if (!dist.count(a)) dist[a] = dijkstra_distances(x.flat_graph(), x.flat_lengths(), a);
    const double d = dist[a][*c.rep[ed.v]];
    if (!(d < c.alpha)) {
      r.distance_ok = false;
      r.distance_violations.push_back({e, d});
    }
  }

  r.closeness_ok = true;
  r.hop_limit = hop_bound(c.epsilon, g.vertex_count());
  for (VertexId v : c.sub.vertices) {
    const auto hops = hop_distances(g, v)[x.cloud_of(*c.rep[v])];
    if (hops > r.hop_limit) {
      r.closeness_ok = false;
      r.closeness_violations.push_back({v, hops});
    }
  }

  std::vector<VertexId> ftilde(g.vertex_count(), kNoVertex);
  for (VertexId v : c.sub.vertices) ftilde[v] = x.cloud_of(*c.rep[v]);
  std::vector<BaseWalk> walks;
  for (std::size_t i = 0; i < c.sub.edges.size(); ++i) {
    const auto& p = c.paths[i];
    if (p.empty()) fail("verify_split: empty path for edge ", c.sub.edges[i]);
    walks.push_back({x.cloud_of(p.front()), x.project_walk(p)});
  }
  r.homeomorphism = check_cycle_homeomorphism(ftilde, walks, g, c.sub);
  r.homeomorphism_ok = r.homeomorphism.ok;
  return r;
}

}  // namespace zext
