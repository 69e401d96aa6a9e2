#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "zext/error.hpp"
#include "zext/extension.hpp"
#include "zext/gf2.hpp"
#include "zext/graph.hpp"
#include "zext/split.hpp"

namespace zext {

// ind((g, h)) = (g, i); indices start at 1 within each cloud.
struct FormalVertex {
  VertexId cloud = 0;
  std::uint32_t index = 0;
  auto operator<=>(const FormalVertex&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const FormalVertex& v) {
  return os << '(' << v.cloud << ',' << v.index << ')';
}

struct FormalStep {
  StepLabel label;
  FormalVertex target;
  bool operator==(const FormalStep&) const = default;
};

struct FormalPath {
  FormalVertex start;
  std::vector<FormalStep> steps;

  std::size_t vertex_count() const { return steps.size() + 1; }
  const FormalVertex& vertex(std::size_t i) const { return i == 0 ? start : steps[i - 1].target; }
  const FormalVertex& back() const { return vertex(steps.size()); }
  bool operator==(const FormalPath&) const = default;
};

struct FormalTransformation {
  std::vector<FormalPath> paths;
  std::map<VertexId, FormalVertex> ind;    // exposed flat vertex -> index
  std::vector<std::uint32_t> occupancy;    // per cloud: indices handed out
};

// Representative paths of a candidate, one per edge of G' in the candidate's
// order, recomputed when the candidate carries none.
inline std::vector<std::vector<VertexId>> shortest_rep_paths(const ExtendedGraph& x, const SplitCandidate& c) {
  if (c.paths.size() == c.sub.edges.size()) return c.paths;
  std::vector<std::vector<VertexId>> out;
  for (EdgeId e : c.sub.edges) out.push_back(representative_path(x, x.base().edge(e), c.rep));
  return out;
}

inline FormalTransformation formal_transform(const std::vector<std::vector<VertexId>>& paths, const ExtendedGraph& x) {
  FormalTransformation ft;
  ft.occupancy.assign(x.cloud_count(), 0);
  auto expose = [&](VertexId v) {
    auto it = ft.ind.find(v);
    if (it != ft.ind.end()) return it->second;
    const VertexId g = x.cloud_of(v);
    const FormalVertex fv{g, ++ft.occupancy[g]};
    ft.ind.emplace(v, fv);
    return fv;
  };
  for (const auto& p : paths) {
    if (p.empty()) fail("formal_transform: empty path");
    FormalPath q;
    q.start = expose(p.front());
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      const StepLabel label = x.step_label(p[i], p[i + 1]);
      q.steps.push_back({label, expose(p[i + 1])});
    }
    ft.paths.push_back(std::move(q));
  }
  return ft;
}

// True fiber vertex of one endpoint of each path.
struct EndpointIdentity {
  bool at_start = true;
  VertexId fiber = 0;
};

inline std::vector<EndpointIdentity> endpoint_identities(const std::vector<std::vector<VertexId>>& paths,
                                                         const ExtendedGraph& x) {
  std::vector<EndpointIdentity> out;
  for (const auto& p : paths) out.push_back({true, x.fiber_of(p.front())});
  return out;
}

// Replays the labels from the known endpoint; the index map must stay a
// bijection onto flat vertices and every step must land in its cloud.
inline std::vector<std::vector<VertexId>> reconstruct_paths(const FormalTransformation& ft, const ExtendedGraph& x,
                                                            const std::vector<EndpointIdentity>& ids) {
  if (ids.size() != ft.paths.size()) fail("reconstruct_paths: ", ids.size(), " identities for ", ft.paths.size(), " paths");
  std::map<FormalVertex, VertexId> seen;
  std::map<VertexId, FormalVertex> owner;
  auto bind = [&](std::size_t p, std::size_t step, const FormalVertex& fv, VertexId v) {
    if (x.cloud_of(v) != fv.cloud) {
      fail("reconstruct_paths: path ", p, " step ", step, " reaches cloud ", x.cloud_of(v), " but index ", fv,
           " names cloud ", fv.cloud);
    }
    auto [it, fresh] = seen.emplace(fv, v);
    if (!fresh && it->second != v) {
      fail("reconstruct_paths: path ", p, " step ", step, " maps index ", fv, " to vertex ", v,
           " but it was vertex ", it->second);
    }
    auto [jt, fresh2] = owner.emplace(v, fv);
    if (!fresh2 && jt->second != fv) {
      fail("reconstruct_paths: path ", p, " step ", step, " reaches vertex ", v, " already indexed ", jt->second);
    }
  };
  std::vector<std::vector<VertexId>> out;
  for (std::size_t p = 0; p < ft.paths.size(); ++p) {
    const FormalPath& q = ft.paths[p];
    const std::size_t len = q.steps.size();
    std::vector<VertexId> walk(len + 1);
    if (ids[p].fiber >= x.cloud_size()) fail("reconstruct_paths: path ", p, " identity out of range");
    if (ids[p].at_start) {
      walk[0] = x.vertex(q.start.cloud, ids[p].fiber);
      bind(p, 0, q.start, walk[0]);
      for (std::size_t i = 0; i < len; ++i) {
        const auto next = x.follow(walk[i], q.steps[i].label);
        if (!next) fail("reconstruct_paths: path ", p, " step ", i + 1, " label ", q.steps[i].label, " is not valid at vertex ", walk[i]);
        walk[i + 1] = *next;
        bind(p, i + 1, q.steps[i].target, walk[i + 1]);
      }
    } else {
      walk[len] = x.vertex(q.back().cloud, ids[p].fiber);
      bind(p, len, q.back(), walk[len]);
      for (std::size_t i = len; i > 0; --i) {
        const auto inv = x.inverse(q.steps[i - 1].label);
        const auto prev = inv ? x.follow(walk[i], *inv) : std::nullopt;
        if (!prev) fail("reconstruct_paths: path ", p, " step ", i, " label ", q.steps[i - 1].label, " cannot be undone at vertex ", walk[i]);
        walk[i - 1] = *prev;
        bind(p, i - 1, q.vertex(i - 1), walk[i - 1]);
      }
    }
    out.push_back(std::move(walk));
  }
  return out;
}

// Label bookkeeping that only needs the public factor graphs G and H.
class LabelAlgebra {
 public:
  struct Offset {
    std::vector<int> element;  // Cayley fiber: group element
    bool moved = false;        // edge-code fiber: walk span (from, to)
    VertexId from = 0;
    VertexId to = 0;
  };

  LabelAlgebra(const Graph& base, const Graph& fiber)
      : base_(&base), fiber_(&fiber), base_mode_(label_mode(base)), fiber_mode_(label_mode(fiber)) {}

  LabelMode fiber_mode() const { return fiber_mode_; }
  LabelMode base_mode() const { return base_mode_; }

  std::optional<StepLabel> inverse(StepLabel l) const {
    const auto sym = l.kind == StepKind::intra ? detail::factor_inverse(*fiber_, fiber_mode_, l.symbol)
                                               : detail::factor_inverse(*base_, base_mode_, l.symbol);
    if (!sym) return std::nullopt;
    return StepLabel{l.kind, *sym};
  }

  // Base edge crossed by an inter label leaving `cloud`.
  std::optional<EdgeId> base_edge(VertexId cloud, Label symbol) const {
    return detail::factor_edge(*base_, base_mode_, cloud, symbol);
  }

  Offset zero() const {
    Offset o;
    if (fiber_mode_ == LabelMode::cayley) o.element.assign(fiber_->cayley()->moduli.size(), 0);
    return o;
  }

  // Appends one intra step; nullopt when the symbol is unknown or the walk
  // breaks.
  std::optional<Offset> step(Offset o, Label symbol) const {
    if (fiber_mode_ == LabelMode::cayley) {
      const auto& gens = fiber_->cayley()->generator;
      const auto it = gens.find(symbol);
      if (it == gens.end()) return std::nullopt;
      o.element = fiber_->cayley()->add(o.element, it->second);
      return o;
    }
    if (symbol < 0 || static_cast<std::size_t>(symbol / 2) >= fiber_->edge_count()) return std::nullopt;
    const Edge& ed = fiber_->edge(static_cast<EdgeId>(symbol / 2));
    const VertexId a = symbol % 2 == 0 ? ed.u : ed.v;
    const VertexId b = symbol % 2 == 0 ? ed.v : ed.u;
    if (o.moved && o.to != a) return std::nullopt;
    if (!o.moved) o.from = a;
    o.moved = true;
    o.to = b;
    return o;
  }

  std::optional<Offset> walk(const std::vector<Label>& symbols) const {
    std::optional<Offset> o = zero();
    for (Label s : symbols) {
      o = step(*o, s);
      if (!o) return std::nullopt;
    }
    return o;
  }

  bool same_point(const Offset& a, const Offset& b) const {
    if (fiber_mode_ == LabelMode::cayley) return a.element == b.element;
    if (a.moved && b.moved) return a.from == b.from && a.to == b.to;
    if (!a.moved && !b.moved) return true;
    const Offset& m = a.moved ? a : b;
    return m.from == m.to;
  }

 private:
  const Graph* base_;
  const Graph* fiber_;
  LabelMode base_mode_;
  LabelMode fiber_mode_;
};

struct IccComponent {
  VertexId cloud = 0;
  std::vector<std::uint32_t> distinguished;    // indices, ascending
  std::vector<std::uint32_t> representatives;  // path endpoints among them
  std::size_t degree = 0;                      // R-edge ends, self-loops twice
  std::vector<std::uint32_t> members;          // all indices (not recoverable from a certificate)
  std::size_t inter_edges = 0;                 // distinct touching inter edges (not recoverable)
};

// One end of an R-edge: the distinguished vertex, the label of the inter
// step leaving the component along the edge, and the base edge it crosses.
struct REnd {
  std::size_t component = 0;
  FormalVertex vertex;
  StepLabel label;
  EdgeId base_edge = kNoEdge;
  bool operator==(const REnd&) const = default;
};

struct REdge {
  REnd a;
  REnd b;
  std::size_t inter_steps = 0;
  bool operator==(const REdge&) const = default;
};

struct FormalEdge {
  FormalVertex u;
  FormalVertex v;
  auto operator<=>(const FormalEdge&) const = default;
};

inline FormalEdge make_formal_edge(FormalVertex a, FormalVertex b) {
  return a < b ? FormalEdge{a, b} : FormalEdge{b, a};
}

struct ICCGraph {
  std::vector<IccComponent> components;
  std::vector<REdge> edges;
  std::size_t s_tot = 0;
  // Analysis extras, absent from a reconstructed graph.
  std::vector<FormalEdge> surprising;
  std::size_t non_inner_components = 0;
  std::size_t non_inner_paths = 0;

  // R as a multigraph with self-loops.
  Graph r() const {
    Graph g(components.size(), true);
    for (const REdge& e : edges) g.add_edge(static_cast<VertexId>(e.a.component), static_cast<VertexId>(e.b.component));
    return g;
  }

  std::optional<std::size_t> component_of(FormalVertex v) const {
    for (std::size_t c = 0; c < components.size(); ++c) {
      const auto& comp = components[c];
      if (comp.cloud != v.cloud) continue;
      if (std::binary_search(comp.members.begin(), comp.members.end(), v.index)) return c;
    }
    return std::nullopt;
  }

  // Structural equality on what a certificate determines.
  bool operator==(const ICCGraph& o) const {
    if (components.size() != o.components.size() || edges != o.edges || s_tot != o.s_tot) return false;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const auto& a = components[i];
      const auto& b = o.components[i];
      if (a.cloud != b.cloud || a.distinguished != b.distinguished || a.representatives != b.representatives ||
          a.degree != b.degree) {
        return false;
      }
    }
    return true;
  }
};

namespace detail {

inline std::tuple<FormalVertex, StepLabel> end_key(const REnd& e) { return {e.vertex, e.label}; }

// Sorts components by (cloud, smallest distinguished index), orients each
// edge so its a-end key is the smaller one, sorts edges, fills degrees.
inline void canonicalize(ICCGraph& g) {
  std::vector<std::size_t> order(g.components.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t c) {
    const auto& comp = g.components[c];
    return std::make_pair(comp.cloud, comp.distinguished.empty() ? 0U : comp.distinguished.front());
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<std::size_t> rank(order.size());
  std::vector<IccComponent> sorted;
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = i;
    sorted.push_back(std::move(g.components[order[i]]));
  }
  g.components = std::move(sorted);
  for (auto& c : g.components) c.degree = 0;
  for (auto& e : g.edges) {
    e.a.component = rank[e.a.component];
    e.b.component = rank[e.b.component];
    if (end_key(e.b) < end_key(e.a)) std::swap(e.a, e.b);
    ++g.components[e.a.component].degree;
    ++g.components[e.b.component].degree;
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const REdge& x, const REdge& y) {
    return std::make_tuple(end_key(x.a), end_key(x.b)) < std::make_tuple(end_key(y.a), end_key(y.b));
  });
  g.s_tot = 2 * g.edges.size();
}

}  // namespace detail

// Intra-cloud components of the formal paths, the inner ones among them,
// and one R-edge per distinct chain between inner components.
inline ICCGraph inner_components(const FormalTransformation& ft, const ExtendedGraph& x) {
  std::map<FormalVertex, std::size_t> id;
  std::vector<FormalVertex> vertex;
  auto idx = [&](const FormalVertex& v) {
    auto [it, fresh] = id.emplace(v, vertex.size());
    if (fresh) vertex.push_back(v);
    return it->second;
  };
  for (const auto& p : ft.paths) {
    for (std::size_t i = 0; i < p.vertex_count(); ++i) idx(p.vertex(i));
  }
  std::vector<std::size_t> parent(vertex.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::set<FormalEdge> inter;
  std::set<FormalEdge> intra;
  for (const auto& p : ft.paths) {
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      const FormalVertex& a = p.vertex(i);
      const FormalVertex& b = p.vertex(i + 1);
      if (p.steps[i].label.kind == StepKind::intra) {
        parent[find(idx(a))] = find(idx(b));
        intra.insert(make_formal_edge(a, b));
      } else {
        inter.insert(make_formal_edge(a, b));
      }
    }
  }
  std::map<std::size_t, std::size_t> comp_of_root;
  std::vector<std::size_t> comp(vertex.size());
  std::vector<std::vector<std::uint32_t>> members;
  std::vector<VertexId> cloud;
  for (std::size_t v = 0; v < vertex.size(); ++v) {
    auto [it, fresh] = comp_of_root.emplace(find(v), members.size());
    if (fresh) {
      members.emplace_back();
      cloud.push_back(vertex[v].cloud);
    }
    comp[v] = it->second;
    members[it->second].push_back(vertex[v].index);
  }
  const std::size_t nc = members.size();
  std::vector<std::size_t> touching(nc, 0);
  for (const FormalEdge& e : inter) {
    ++touching[comp[id.at(e.u)]];
    ++touching[comp[id.at(e.v)]];
  }
  std::vector<std::set<std::uint32_t>> reps(nc);
  for (const auto& p : ft.paths) {
    reps[comp[id.at(p.start)]].insert(p.start.index);
    reps[comp[id.at(p.back())]].insert(p.back().index);
  }
  std::vector<bool> inner(nc);
  for (std::size_t c = 0; c < nc; ++c) inner[c] = touching[c] >= 3 || !reps[c].empty();

  ICCGraph g;
  std::vector<std::set<std::uint32_t>> dist(nc);
  std::map<std::tuple<FormalVertex, StepLabel>, std::size_t> known;
  std::set<FormalEdge> surprising;
  for (std::size_t pi = 0; pi < ft.paths.size(); ++pi) {
    const auto& p = ft.paths[pi];
    auto in_inner = [&](std::size_t i) { return inner[comp[id.at(p.vertex(i))]]; };
    std::size_t i = 0;
    while (i < p.steps.size()) {
      if (p.steps[i].label.kind == StepKind::intra) {
        ++i;
        continue;
      }
      // p.vertex(i) sits in an inner component; find the next inter step
      // that enters one.
      std::size_t j = i;
      std::size_t m = 0;
      while (true) {
        if (j >= p.steps.size()) fail("inner_components: path ", pi, " ends outside an inner component");
        if (p.steps[j].label.kind == StepKind::inter) {
          ++m;
          if (in_inner(j + 1)) break;
        }
        ++j;
      }
      const FormalVertex va = p.vertex(i);
      const FormalVertex vb = p.vertex(j + 1);
      surprising.insert(make_formal_edge(va, p.vertex(i + 1)));
      surprising.insert(make_formal_edge(p.vertex(j), vb));
      dist[comp[id.at(va)]].insert(va.index);
      dist[comp[id.at(vb)]].insert(vb.index);
      const StepLabel la = p.steps[i].label;
      const auto lb = x.inverse(p.steps[j].label);
      if (!lb) fail("inner_components: label ", p.steps[j].label, " has no inverse");
      if (!known.count({va, la})) {
        REdge e;
        e.a = {comp[id.at(va)], va, la, *x.base_edge_of(va.cloud, la.symbol)};
        e.b = {comp[id.at(vb)], vb, *lb, *x.base_edge_of(vb.cloud, lb->symbol)};
        e.inter_steps = m;
        known.emplace(std::make_tuple(va, la), g.edges.size());
        known.emplace(std::make_tuple(vb, *lb), g.edges.size());
        g.edges.push_back(e);
      }
      i = j + 1;
    }
  }

  // Keep inner components only, then renumber.
  std::vector<std::size_t> keep(nc, SIZE_MAX);
  for (std::size_t c = 0; c < nc; ++c) {
    if (!inner[c]) {
      ++g.non_inner_components;
      // A path: members - 1 distinct intra edges and no branching.
      std::map<std::uint32_t, int> deg;
      std::size_t edges = 0;
      for (const FormalEdge& e : intra) {
        if (comp[id.at(e.u)] != c) continue;
        ++edges;
        ++deg[e.u.index];
        ++deg[e.v.index];
      }
      bool path = edges + 1 == members[c].size();
      for (const auto& [v, d] : deg) path = path && d <= 2;
      if (path) ++g.non_inner_paths;
      continue;
    }
    keep[c] = g.components.size();
    IccComponent ic;
    ic.cloud = cloud[c];
    for (std::uint32_t r : reps[c]) dist[c].insert(r);
    ic.distinguished.assign(dist[c].begin(), dist[c].end());
    ic.representatives.assign(reps[c].begin(), reps[c].end());
    ic.members = members[c];
    std::sort(ic.members.begin(), ic.members.end());
    ic.inter_edges = touching[c];
    g.components.push_back(std::move(ic));
  }
  for (auto& e : g.edges) {
    e.a.component = keep[e.a.component];
    e.b.component = keep[e.b.component];
  }
  g.surprising.assign(surprising.begin(), surprising.end());
  detail::canonicalize(g);
  return g;
}

struct SkeletonPath {
  std::vector<StepLabel> labels;
  std::vector<std::optional<FormalVertex>> marks;  // labels.size() + 1 entries
  bool operator==(const SkeletonPath&) const = default;
};

struct Skeleton {
  std::vector<SkeletonPath> paths;

  std::size_t kept() const {
    std::size_t k = 0;
    for (const auto& p : paths) {
      for (const auto& m : p.marks) k += m.has_value();
    }
    return k;
  }
  bool operator==(const Skeleton&) const = default;
};

// Indices survive at path ends and at the target of a surprising edge that
// enters an inner component, on that edge's first occurrence.
inline Skeleton skeleton(const FormalTransformation& ft, const ICCGraph& icc) {
  std::set<FormalVertex> inner;
  for (const auto& c : icc.components) {
    for (std::uint32_t i : c.members) inner.insert({c.cloud, i});
  }
  const std::set<FormalEdge> surprising(icc.surprising.begin(), icc.surprising.end());
  std::set<FormalEdge> seen;
  Skeleton s;
  for (const auto& p : ft.paths) {
    SkeletonPath sp;
    sp.marks.assign(p.vertex_count(), std::nullopt);
    sp.marks.front() = p.start;
    sp.marks.back() = p.back();
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      sp.labels.push_back(p.steps[i].label);
      const FormalEdge e = make_formal_edge(p.vertex(i), p.vertex(i + 1));
      const bool first = seen.insert(e).second;
      if (first && surprising.count(e) && inner.count(p.vertex(i + 1))) sp.marks[i + 1] = p.vertex(i + 1);
    }
    s.paths.push_back(std::move(sp));
  }
  return s;
}

struct Representation {
  VertexId cloud = 0;
  std::vector<std::uint32_t> distinguished;
  // walks[i][j]: intra symbols of a walk inside the component from
  // distinguished[i] to distinguished[j].
  std::vector<std::vector<std::vector<Label>>> walks;
  // Cayley fiber only: element(j) - element(i).
  std::vector<std::vector<std::vector<int>>> differences;
  bool operator==(const Representation&) const = default;
};

struct RepresentativeIdentity {
  VertexId cloud = 0;   // g in V_G'
  VertexId rep_cloud = 0;
  VertexId rep_fiber = 0;
  bool operator==(const RepresentativeIdentity&) const = default;
};

inline constexpr int kCertificateVersion = 1;

struct Certificate {
  int version = kCertificateVersion;
  LabelMode fiber_mode = LabelMode::cayley;
  Graph base;    // G (public)
  Graph fiber;   // H (public)
  Subgraph sub;  // G'
  std::vector<Representation> representations;
  Skeleton skel;
  std::vector<RepresentativeIdentity> identities;

  bool operator==(const Certificate& o) const {
    return version == o.version && fiber_mode == o.fiber_mode && base == o.base && fiber == o.fiber && sub == o.sub &&
           representations == o.representations && skel == o.skel && identities == o.identities;
  }
};

struct CertificateRun {
  std::vector<std::vector<VertexId>> paths;
  FormalTransformation ft;
  ICCGraph icc;
  Certificate cert;
};

// BFS inside one component over its intra steps; labels of the reverse
// direction come from the inverse symbol.
inline std::vector<Label> component_walk(const std::map<FormalVertex, std::vector<std::pair<FormalVertex, Label>>>& adj,
                                         FormalVertex from, FormalVertex to) {
  std::map<FormalVertex, std::pair<FormalVertex, Label>> pred;
  std::queue<FormalVertex> q;
  q.push(from);
  pred.emplace(from, std::make_pair(from, 0));
  while (!q.empty() && !pred.count(to)) {
    const FormalVertex u = q.front();
    q.pop();
    const auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (const auto& [v, l] : it->second) {
      if (pred.emplace(v, std::make_pair(u, l)).second) q.push(v);
    }
  }
  if (!pred.count(to)) fail("certificate: ", to, " is not reachable from ", from, " inside its component");
  std::vector<Label> rev;
  for (FormalVertex v = to; v != from; v = pred.at(v).first) rev.push_back(pred.at(v).second);
  return {rev.rbegin(), rev.rend()};
}

inline CertificateRun run_certificate(const ExtendedGraph& x, const SplitCandidate& c, bool force = false) {
  if (!force) {
    const auto report = verify_split(c, x);
    if (!report.ok()) fail("build_certificate: candidate is not a split (pass force for diagnostics)");
  }
  CertificateRun run;
  run.paths = shortest_rep_paths(x, c);
  run.ft = formal_transform(run.paths, x);
  run.icc = inner_components(run.ft, x);

  Certificate& cert = run.cert;
  cert.fiber_mode = x.fiber_mode();
  cert.base = x.base();
  cert.fiber = x.fiber();
  cert.sub = c.sub;
  cert.skel = skeleton(run.ft, run.icc);
  for (VertexId g : c.sub.vertices) {
    cert.identities.push_back({g, x.cloud_of(*c.rep[g]), x.fiber_of(*c.rep[g])});
  }

  std::map<FormalVertex, VertexId> flat;
  for (const auto& [v, fv] : run.ft.ind) flat.emplace(fv, v);
  std::map<FormalVertex, std::vector<std::pair<FormalVertex, Label>>> adj;
  for (const auto& p : run.ft.paths) {
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
      if (p.steps[i].label.kind != StepKind::intra) continue;
      const FormalVertex a = p.vertex(i);
      const FormalVertex b = p.vertex(i + 1);
      adj[a].emplace_back(b, p.steps[i].label.symbol);
      adj[b].emplace_back(a, x.inverse(p.steps[i].label)->symbol);
    }
  }
  for (auto& [v, list] : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  const auto& group = x.fiber().cayley();
  for (const auto& comp : run.icc.components) {
    Representation rep;
    rep.cloud = comp.cloud;
    rep.distinguished = comp.distinguished;
    const std::size_t p = comp.distinguished.size();
    rep.walks.assign(p, std::vector<std::vector<Label>>(p));
    if (cert.fiber_mode == LabelMode::cayley) rep.differences.assign(p, std::vector<std::vector<int>>(p));
    for (std::size_t i = 0; i < p; ++i) {
      const FormalVertex a{comp.cloud, comp.distinguished[i]};
      for (std::size_t j = 0; j < p; ++j) {
        if (i == j) continue;
        const FormalVertex b{comp.cloud, comp.distinguished[j]};
        rep.walks[i][j] = component_walk(adj, a, b);
        if (cert.fiber_mode == LabelMode::cayley) {
          rep.differences[i][j] = group->add(group->element(x.fiber_of(flat.at(b))),
                                             group->negate(group->element(x.fiber_of(flat.at(a)))));
        }
      }
    }
    cert.representations.push_back(std::move(rep));
  }
  return run;
}

inline Certificate build_certificate(const ExtendedGraph& x, const SplitCandidate& c, bool force = false) {
  return run_certificate(x, c, force).cert;
}

// Scans the skeleton path by path. Inside an inner component the position
// is tracked as an offset from the component's first distinguished vertex;
// leaving it names an R-edge by (vertex, label), which is either retraced or
// walked until the next indexed vertex.
inline ICCGraph reconstruct_R(const Certificate& cert) {
  if (cert.version != kCertificateVersion) fail("reconstruct_R: unsupported certificate version ", cert.version);
  const LabelAlgebra alg(cert.base, cert.fiber);
  if (alg.fiber_mode() != cert.fiber_mode) fail("reconstruct_R: fiber label mode does not match the header");
  using Offset = LabelAlgebra::Offset;

  const std::size_t nc = cert.representations.size();
  std::map<FormalVertex, std::pair<std::size_t, std::size_t>> slot_of;
  std::vector<std::vector<Offset>> offsets(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& rep = cert.representations[c];
    const std::size_t p = rep.distinguished.size();
    if (p == 0) fail("reconstruct_R: component ", c, " has no distinguished vertex");
    if (rep.walks.size() != p) fail("reconstruct_R: component ", c, " walk table has wrong size");
    for (std::size_t j = 0; j < p; ++j) {
      if (!slot_of.emplace(FormalVertex{rep.cloud, rep.distinguished[j]}, std::make_pair(c, j)).second) {
        fail("reconstruct_R: index (", rep.cloud, ",", rep.distinguished[j], ") listed twice");
      }
      auto off = j == 0 ? std::optional<Offset>(alg.zero()) : alg.walk(rep.walks[0][j]);
      if (!off) fail("reconstruct_R: component ", c, " walk 0->", j, " is not a walk in H");
      if (cert.fiber_mode == LabelMode::cayley && j > 0 && off->element != rep.differences[0][j]) {
        fail("reconstruct_R: component ", c, " walk 0->", j, " disagrees with its group difference");
      }
      offsets[c].push_back(*off);
    }
  }

  ICCGraph g;
  g.components.resize(nc);
  std::vector<std::set<std::uint32_t>> reps(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    g.components[c].cloud = cert.representations[c].cloud;
    g.components[c].distinguished = cert.representations[c].distinguished;
  }
  struct Known {
    std::size_t edge;
    bool from_a;
  };
  std::map<std::tuple<FormalVertex, StepLabel>, Known> known;
  std::vector<std::vector<StepLabel>> edge_labels;

  auto locate = [&](std::size_t path, std::size_t pos, const FormalVertex& v) {
    const auto it = slot_of.find(v);
    if (it == slot_of.end()) fail("reconstruct_R: path ", path, " position ", pos, " index ", v, " is not distinguished");
    return it->second;
  };
  auto slot_at = [&](std::size_t c, const Offset& o) -> std::optional<std::size_t> {
    for (std::size_t j = 0; j < offsets[c].size(); ++j) {
      if (alg.same_point(offsets[c][j], o)) return j;
    }
    return std::nullopt;
  };

  for (std::size_t pi = 0; pi < cert.skel.paths.size(); ++pi) {
    const auto& sp = cert.skel.paths[pi];
    const std::size_t len = sp.labels.size();
    if (sp.marks.size() != len + 1) fail("reconstruct_R: path ", pi, " has ", sp.marks.size(), " marks for ", len, " labels");
    if (!sp.marks.front() || !sp.marks.back()) fail("reconstruct_R: path ", pi, " lacks an endpoint index");
    auto [c, s] = locate(pi, 0, *sp.marks.front());
    reps[c].insert(cert.representations[c].distinguished[s]);
    Offset o = offsets[c][s];
    std::size_t i = 0;
    auto check_mark = [&](std::size_t pos) {
      if (!sp.marks[pos]) return;
      const auto [mc, ms] = locate(pi, pos, *sp.marks[pos]);
      if (mc != c || !alg.same_point(offsets[mc][ms], o)) {
        fail("reconstruct_R: path ", pi, " position ", pos, " index ", *sp.marks[pos], " contradicts the scan");
      }
    };
    while (i < len) {
      const StepLabel l = sp.labels[i];
      if (l.kind == StepKind::intra) {
        auto next = alg.step(o, l.symbol);
        if (!next) fail("reconstruct_R: path ", pi, " step ", i, " label ", l, " is not a fiber step here");
        o = *next;
        ++i;
        check_mark(i);
        continue;
      }
      const auto here = slot_at(c, o);
      if (!here) fail("reconstruct_R: path ", pi, " step ", i, " leaves component ", c, " from a non-distinguished vertex");
      const FormalVertex va{g.components[c].cloud, g.components[c].distinguished[*here]};
      const auto hit = known.find({va, l});
      if (hit != known.end()) {
        const auto& seq = edge_labels[hit->second.edge];
        const REdge& e = g.edges[hit->second.edge];
        std::vector<StepLabel> expect = seq;
        if (!hit->second.from_a) {
          std::reverse(expect.begin(), expect.end());
          for (auto& x : expect) x = *alg.inverse(x);
        }
        if (i + expect.size() > len) fail("reconstruct_R: path ", pi, " step ", i, " ends inside a known R-edge");
        for (std::size_t t = 0; t < expect.size(); ++t) {
          if (sp.labels[i + t] != expect[t]) {
            fail("reconstruct_R: path ", pi, " step ", i + t, " label ", sp.labels[i + t], " departs from a known R-edge");
          }
        }
        const REnd& arrive = hit->second.from_a ? e.b : e.a;
        c = arrive.component;
        o = offsets[c][slot_of.at(arrive.vertex).second];
        i += expect.size();
        check_mark(i);
        continue;
      }
      // A new R-edge: follow clouds through G until an indexed vertex.
      VertexId cloud = va.cloud;
      std::optional<VertexId> fiber_at;
      std::size_t j = i;
      std::size_t m = 0;
      EdgeId last_base = kNoEdge;
      while (true) {
        if (j >= len) fail("reconstruct_R: path ", pi, " ends outside an inner component");
        const StepLabel lj = sp.labels[j];
        if (lj.kind == StepKind::inter) {
          const auto be = alg.base_edge(cloud, lj.symbol);
          if (!be) fail("reconstruct_R: path ", pi, " step ", j, " label ", lj, " is not a base step at cloud ", cloud);
          cloud = cert.base.other(*be, cloud);
          last_base = *be;
          fiber_at.reset();
          ++m;
          if (sp.marks[j + 1]) break;
        } else if (alg.fiber_mode() == LabelMode::edge_code) {
          Offset probe;
          if (fiber_at) {
            probe.moved = true;
            probe.from = probe.to = *fiber_at;
          }
          const auto next = alg.step(probe, lj.symbol);
          if (!next) fail("reconstruct_R: path ", pi, " step ", j, " label ", lj, " breaks the fiber walk");
          fiber_at = next->to;
        } else if (!alg.step(alg.zero(), lj.symbol)) {
          fail("reconstruct_R: path ", pi, " step ", j, " label ", lj, " is not a fiber generator");
        }
        ++j;
      }
      const FormalVertex vb = *sp.marks[j + 1];
      if (vb.cloud != cloud) {
        fail("reconstruct_R: path ", pi, " step ", j, " arrives in cloud ", cloud, " but index ", vb, " names cloud ", vb.cloud);
      }
      const auto [c2, s2] = locate(pi, j + 1, vb);
      const auto lb = alg.inverse(sp.labels[j]);
      if (!lb) fail("reconstruct_R: path ", pi, " step ", j, " label has no inverse");
      if (known.count({vb, *lb})) fail("reconstruct_R: path ", pi, " step ", j, " re-enters a known R-edge from its far end");
      REdge e;
      e.a = {c, va, l, *alg.base_edge(va.cloud, l.symbol)};
      e.b = {c2, vb, *lb, last_base};
      e.inter_steps = m;
      known.emplace(std::make_tuple(va, l), Known{g.edges.size(), true});
      known.emplace(std::make_tuple(vb, *lb), Known{g.edges.size(), false});
      edge_labels.emplace_back(sp.labels.begin() + static_cast<std::ptrdiff_t>(i),
                               sp.labels.begin() + static_cast<std::ptrdiff_t>(j + 1));
      g.edges.push_back(e);
      c = c2;
      o = offsets[c2][s2];
      i = j + 1;
    }
    const auto [lc, ls] = locate(pi, len, *sp.marks.back());
    if (lc != c || !alg.same_point(offsets[lc][ls], o)) fail("reconstruct_R: path ", pi, " ends away from its indexed endpoint");
    reps[c].insert(cert.representations[c].distinguished[ls]);
  }
  for (std::size_t c = 0; c < nc; ++c) g.components[c].representatives.assign(reps[c].begin(), reps[c].end());
  detail::canonicalize(g);
  return g;
}

struct ConstraintEdge {
  std::size_t r_edge;
  EdgeId base_edge;
};

struct Diagnostics {
  std::size_t n = 0;
  std::size_t r_vertices = 0;
  std::size_t r_edges = 0;
  std::size_t r_components = 0;
  std::size_t b1 = 0;
  std::size_t s_tot = 0;
  double lower_stated = 0.0;  // s_tot/6 - n/3
  bool lower_stated_ok = false;
  double lower_counted = 0.0;  // s_tot/6 - n, from s_tot >= 3(|V_R| - n)
  bool lower_counted_ok = false;
  double upper = 0.0;  // s_tot/2
  bool upper_ok = false;
  double betti_target = 0.0;  // (1 - slack*eps)(d/2 - 1) n
  bool betti_target_met = false;
  std::vector<ConstraintEdge> constraints;
  std::vector<std::size_t> beta;  // per base edge
  bool beta_sum_ok = false;
  double probability_bound = 1.0;  // (2/n)^b1
  double log10_probability_bound = 0.0;
};

// DFS over R; an edge reaching an already visited component is a
// constraint edge, charged to the base edge at its arrival end.
inline std::vector<ConstraintEdge> constraint_edges(const ICCGraph& icc) {
  const Graph r = icc.r();
  std::vector<bool> visited(r.vertex_count(), false);
  std::vector<bool> used(r.edge_count(), false);
  std::vector<ConstraintEdge> out;
  for (VertexId root = 0; root < r.vertex_count(); ++root) {
    if (visited[root]) continue;
    visited[root] = true;
    std::vector<std::pair<VertexId, std::size_t>> stack{{root, 0}};
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto inc = r.incident(v);
      if (next == inc.size()) {
        stack.pop_back();
        continue;
      }
      const EdgeId e = inc[next++];
      if (used[e]) continue;
      used[e] = true;
      const REdge& re = icc.edges[e];
      const bool to_b = re.a.component == v;
      const VertexId w = static_cast<VertexId>(to_b ? re.b.component : re.a.component);
      const EdgeId charged = to_b ? re.b.base_edge : re.a.base_edge;
      if (visited[w]) {
        out.push_back({e, charged});
      } else {
        visited[w] = true;
        stack.emplace_back(w, 0);
      }
    }
  }
  return out;
}

inline Diagnostics diagnostics(const ICCGraph& icc, const Graph& base, double epsilon, std::size_t d,
                               double slack = 1.0) {
  Diagnostics out;
  const Graph r = icc.r();
  out.n = base.vertex_count();
  out.r_vertices = r.vertex_count();
  out.r_edges = r.edge_count();
  out.r_components = component_count(r);
  out.b1 = betti1(r);
  out.s_tot = icc.s_tot;
  const double s = static_cast<double>(out.s_tot);
  const double n = static_cast<double>(out.n);
  const double b1 = static_cast<double>(out.b1);
  out.lower_stated = s / 6.0 - n / 3.0;
  out.lower_stated_ok = b1 >= out.lower_stated - 1e-9;
  out.lower_counted = s / 6.0 - n;
  out.lower_counted_ok = b1 >= out.lower_counted - 1e-9;
  out.upper = s / 2.0;
  out.upper_ok = b1 <= out.upper + 1e-9;
  out.betti_target = (1.0 - slack * epsilon) * (static_cast<double>(d) / 2.0 - 1.0) * n;
  out.betti_target_met = b1 >= out.betti_target;
  out.constraints = constraint_edges(icc);
  out.beta.assign(base.edge_count(), 0);
  for (const auto& ce : out.constraints) ++out.beta[ce.base_edge];
  out.beta_sum_ok = std::accumulate(out.beta.begin(), out.beta.end(), std::size_t{0}) == out.b1;
  out.log10_probability_bound = b1 * std::log10(2.0 / n);
  out.probability_bound = std::pow(2.0 / n, b1);
  return out;
}

struct Occupancy {
  std::uint32_t max_per_cloud = 0;
  double exponent = 0.0;  // log(max) / (eps ln n)
};

inline Occupancy occupancy(const FormalTransformation& ft, double epsilon, std::size_t n) {
  Occupancy o;
  for (auto c : ft.occupancy) o.max_per_cloud = std::max(o.max_per_cloud, c);
  const double denom = epsilon * std::log(static_cast<double>(n));
  o.exponent = (o.max_per_cloud > 0 && denom > 0.0) ? std::log(static_cast<double>(o.max_per_cloud)) / denom : 0.0;
  return o;
}

}  // namespace zext
