#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "zext/error.hpp"
#include "zext/graph.hpp"
#include "zext/rng.hpp"

namespace zext {

enum class StepKind : std::uint8_t { intra = 0, inter = 1 };

// Label of an edge of the extended graph read from the endpoint the walk
// leaves. Factors carrying a Cayley structure use their generator symbols;
// other factors use a directed edge code 2*edge + (0 if leaving edge.u).
struct StepLabel {
  StepKind kind = StepKind::intra;
  Label symbol = 0;

  auto operator<=>(const StepLabel&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const StepLabel& l) {
  return os << (l.kind == StepKind::intra ? 'h' : 'g') << l.symbol;
}

enum class LabelMode : std::uint8_t { cayley, edge_code };

inline LabelMode label_mode(const Graph& g) {
  return g.cayley().has_value() && g.has_labels() ? LabelMode::cayley : LabelMode::edge_code;
}

namespace detail {

inline Label factor_label(const Graph& g, LabelMode mode, VertexId from, EdgeId e) {
  if (mode == LabelMode::cayley) return g.label(from, e);
  return static_cast<Label>(2 * e + (g.edge(e).u == from ? 0 : 1));
}

// Edge of g leaving `from` with the given factor label.
inline std::optional<EdgeId> factor_edge(const Graph& g, LabelMode mode, VertexId from, Label symbol) {
  if (mode == LabelMode::cayley) return g.edge_with_label(from, symbol);
  if (symbol < 0) return std::nullopt;
  const auto e = static_cast<EdgeId>(symbol / 2);
  if (e >= g.edge_count()) return std::nullopt;
  const Edge& ed = g.edge(e);
  const VertexId expected = (symbol % 2 == 0) ? ed.u : ed.v;
  if (expected != from) return std::nullopt;
  return e;
}

inline std::optional<Label> factor_inverse(const Graph& g, LabelMode mode, Label symbol) {
  if (mode == LabelMode::cayley) return g.inverse_label(symbol);
  return symbol ^ 1;
}

}  // namespace detail

// Where an edge of the flattened extension came from.
struct EdgeOrigin {
  StepKind kind;
  EdgeId factor_edge;  // fiber edge (intra) or base edge (inter)
};

struct FlatGraph {
  Graph graph;
  EdgeLengths lengths;
  bool labels_omitted = false;
};

// One sample of the randomized extension of `base` by `fiber`. Vertex
// (g, h) has flat id g * |V_fiber| + h. Every base edge is oriented from its
// smaller endpoint to its larger one and carries a permutation: (lo, h) is
// matched to (hi, perm[h]).
class ExtendedGraph {
 public:
  ExtendedGraph(Graph base, EdgeLengths base_len, Graph fiber, EdgeLengths fiber_len,
                std::vector<std::vector<VertexId>> matchings, std::uint64_t seed)
      : base_(std::move(base)),
        base_len_(std::move(base_len)),
        fiber_(std::move(fiber)),
        fiber_len_(std::move(fiber_len)),
        matchings_(std::move(matchings)),
        seed_(seed) {
    if (base_len_.size() != base_.edge_count()) fail("extension: base lengths do not match base edges");
    if (fiber_len_.size() != fiber_.edge_count()) fail("extension: fiber lengths do not match fiber edges");
    if (matchings_.size() != base_.edge_count()) fail("extension: need one matching per base edge");
    const std::size_t m = fiber_.vertex_count();
    for (std::size_t e = 0; e < matchings_.size(); ++e) {
      if (base_.edge(static_cast<EdgeId>(e)).u == base_.edge(static_cast<EdgeId>(e)).v) {
        fail("extension: base self-loops are not supported");
      }
      const auto& perm = matchings_[e];
      if (perm.size() != m) fail("extension: matching ", e, " has ", perm.size(), " entries, expected ", m);
      std::vector<VertexId> inv(m, kNoVertex);
      for (VertexId h = 0; h < m; ++h) {
        if (perm[h] >= m || inv[perm[h]] != kNoVertex) fail("extension: matching ", e, " is not a bijection");
        inv[perm[h]] = h;
      }
      inverse_.push_back(std::move(inv));
    }
    base_mode_ = label_mode(base_);
    fiber_mode_ = label_mode(fiber_);
    build_flat();
  }

  const Graph& base() const { return base_; }
  const EdgeLengths& base_lengths() const { return base_len_; }
  const Graph& fiber() const { return fiber_; }
  const EdgeLengths& fiber_lengths() const { return fiber_len_; }
  const std::vector<std::vector<VertexId>>& matchings() const { return matchings_; }
  std::uint64_t seed() const { return seed_; }
  LabelMode base_mode() const { return base_mode_; }
  LabelMode fiber_mode() const { return fiber_mode_; }

  std::size_t cloud_size() const { return fiber_.vertex_count(); }
  std::size_t cloud_count() const { return base_.vertex_count(); }
  std::size_t vertex_count() const { return cloud_count() * cloud_size(); }

  VertexId vertex(VertexId cloud, VertexId fiber_vertex) const {
    return static_cast<VertexId>(cloud * cloud_size() + fiber_vertex);
  }
  VertexId cloud_of(VertexId v) const {
    if (v >= vertex_count()) fail("project: vertex ", v, " out of range");
    return static_cast<VertexId>(v / cloud_size());
  }
  VertexId fiber_of(VertexId v) const { return static_cast<VertexId>(v % cloud_size()); }

  // Partner of (cloud, h) across base edge e.
  VertexId matched(EdgeId base_edge, VertexId cloud, VertexId h) const {
    const Edge& ed = base_.edge(base_edge);
    const VertexId lo = std::min(ed.u, ed.v);
    const VertexId hi = std::max(ed.u, ed.v);
    const auto& perm = matchings_[base_edge];
    if (cloud == lo) return vertex(hi, perm[h]);
    if (cloud == hi) {
      return vertex(lo, inverse_[base_edge][h]);
    }
    fail("matched: cloud ", cloud, " is not an endpoint of base edge ", base_edge);
  }

  const Graph& flat_graph() const { return flat_.graph; }
  const EdgeLengths& flat_lengths() const { return flat_.lengths; }
  const EdgeOrigin& origin(EdgeId flat_edge) const { return origins_[flat_edge]; }

  std::optional<EdgeId> edge_between(VertexId a, VertexId b) const {
    const Graph& g = flat_.graph;
    for (EdgeId e : g.incident(a)) {
      if (g.other(e, a) == b) return e;
    }
    return std::nullopt;
  }

  StepLabel step_label(VertexId from, VertexId to) const {
    const auto e = edge_between(from, to);
    if (!e) fail("step_label: ", from, " and ", to, " are not adjacent");
    const EdgeOrigin& o = origins_[*e];
    if (o.kind == StepKind::intra) {
      return {StepKind::intra, detail::factor_label(fiber_, fiber_mode_, fiber_of(from), o.factor_edge)};
    }
    return {StepKind::inter, detail::factor_label(base_, base_mode_, cloud_of(from), o.factor_edge)};
  }

  // Vertex reached from `from` along the edge with the given label.
  std::optional<VertexId> follow(VertexId from, StepLabel label) const {
    const VertexId g = cloud_of(from);
    const VertexId h = fiber_of(from);
    if (label.kind == StepKind::intra) {
      const auto e = detail::factor_edge(fiber_, fiber_mode_, h, label.symbol);
      if (!e) return std::nullopt;
      return vertex(g, fiber_.other(*e, h));
    }
    const auto e = detail::factor_edge(base_, base_mode_, g, label.symbol);
    if (!e) return std::nullopt;
    return matched(*e, g, h);
  }

  // Base edge named by an inter label at a cloud.
  std::optional<EdgeId> base_edge_of(VertexId cloud, Label symbol) const {
    return detail::factor_edge(base_, base_mode_, cloud, symbol);
  }

  std::optional<StepLabel> inverse(StepLabel label) const {
    const auto sym = label.kind == StepKind::intra ? detail::factor_inverse(fiber_, fiber_mode_, label.symbol)
                                                   : detail::factor_inverse(base_, base_mode_, label.symbol);
    if (!sym) return std::nullopt;
    return StepLabel{label.kind, *sym};
  }

  // Flattened graph with generator labels. Intra edges keep fiber symbols;
  // inter symbols are shifted by the largest fiber symbol so the two
  // alphabets stay disjoint.
  FlatGraph as_graph(bool with_labels = true) const {
    FlatGraph out = flat_;
    if (!with_labels) return out;
    if (!base_.has_labels() || !fiber_.has_labels()) {
      out.labels_omitted = true;
      return out;
    }
    Label shift = 0;
    for (EdgeId e = 0; e < fiber_.edge_count(); ++e) {
      const Edge& ed = fiber_.edge(e);
      shift = std::max({shift, std::abs(fiber_.label(ed.u, e)), std::abs(fiber_.label(ed.v, e))});
    }
    auto lift = [shift](Label s) { return s >= 0 ? s + shift : s - shift; };
    Graph labeled(vertex_count());
    for (EdgeId e = 0; e < flat_.graph.edge_count(); ++e) {
      const Edge& ed = flat_.graph.edge(e);
      const EdgeOrigin& o = origins_[e];
      if (o.kind == StepKind::intra) {
        labeled.add_edge(ed.u, ed.v, fiber_.label(fiber_of(ed.u), o.factor_edge),
                         fiber_.label(fiber_of(ed.v), o.factor_edge));
      } else {
        labeled.add_edge(ed.u, ed.v, lift(base_.label(cloud_of(ed.u), o.factor_edge)),
                         lift(base_.label(cloud_of(ed.v), o.factor_edge)));
      }
    }
    out.graph = std::move(labeled);
    return out;
  }

  // Projection of a walk (flat vertex sequence) to base edges; intra steps
  // vanish and inter steps map to their base edge.
  std::vector<EdgeId> project_walk(std::span<const VertexId> walk) const {
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
      const auto e = edge_between(walk[i], walk[i + 1]);
      if (!e) fail("project_walk: step ", i, " (", walk[i], "->", walk[i + 1], ") is not an edge");
      if (origins_[*e].kind == StepKind::inter) out.push_back(origins_[*e].factor_edge);
    }
    return out;
  }

  bool operator==(const ExtendedGraph& o) const {
    return base_ == o.base_ && base_len_ == o.base_len_ && fiber_ == o.fiber_ && fiber_len_ == o.fiber_len_ &&
           matchings_ == o.matchings_;
  }

 private:
  void build_flat() {
    Graph g(vertex_count());
    std::vector<double> len;
    origins_.clear();
    for (VertexId c = 0; c < cloud_count(); ++c) {
      for (EdgeId f = 0; f < fiber_.edge_count(); ++f) {
        const Edge& ed = fiber_.edge(f);
        g.add_edge(vertex(c, ed.u), vertex(c, ed.v));
        len.push_back(fiber_len_[f]);
        origins_.push_back({StepKind::intra, f});
      }
    }
    for (EdgeId b = 0; b < base_.edge_count(); ++b) {
      const Edge& ed = base_.edge(b);
      const VertexId lo = std::min(ed.u, ed.v);
      const VertexId hi = std::max(ed.u, ed.v);
      for (VertexId h = 0; h < cloud_size(); ++h) {
        g.add_edge(vertex(lo, h), vertex(hi, matchings_[b][h]));
        len.push_back(base_len_[b]);
        origins_.push_back({StepKind::inter, b});
      }
    }
    flat_.graph = std::move(g);
    flat_.lengths = EdgeLengths(std::move(len));
  }

  Graph base_;
  EdgeLengths base_len_;
  Graph fiber_;
  EdgeLengths fiber_len_;
  std::vector<std::vector<VertexId>> matchings_;
  std::vector<std::vector<VertexId>> inverse_;
  std::uint64_t seed_ = 0;
  LabelMode base_mode_ = LabelMode::edge_code;
  LabelMode fiber_mode_ = LabelMode::edge_code;
  FlatGraph flat_;
  std::vector<EdgeOrigin> origins_;
};

// One uniform permutation per base edge, each drawn by Fisher-Yates from
// the substream (seed, base edge id).
inline ExtendedGraph sample_extension(const Graph& base, const EdgeLengths& base_len, const Graph& fiber,
                                      const EdgeLengths& fiber_len, std::uint64_t seed) {
  std::vector<std::vector<VertexId>> matchings;
  matchings.reserve(base.edge_count());
  for (EdgeId e = 0; e < base.edge_count(); ++e) {
    Rng rng = Rng::substream(seed, e);
    matchings.push_back(rng.permutation(fiber.vertex_count()));
  }
  return ExtendedGraph(base, base_len, fiber, fiber_len, std::move(matchings), seed);
}

// Matchings file: one line per base edge "<base_edge_id>: <perm[0]> <perm[1]> ...".
inline void write_matchings(std::ostream& os, const ExtendedGraph& x) {
  for (std::size_t e = 0; e < x.matchings().size(); ++e) {
    os << e << ':';
    for (VertexId h : x.matchings()[e]) os << ' ' << h;
    os << '\n';
  }
}

inline std::vector<std::vector<VertexId>> read_matchings(std::istream& is) {
  std::vector<std::vector<VertexId>> out;
  std::string line;
  while (detail::next_data_line(is, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail("matchings file: missing ':' in '", line, "'");
    const auto id = std::stoul(line.substr(0, colon));
    if (id != out.size()) fail("matchings file: base edge ids must be dense");
    std::istringstream row(line.substr(colon + 1));
    std::vector<VertexId> perm;
    for (VertexId h = 0; row >> h;) perm.push_back(h);
    out.push_back(std::move(perm));
  }
  return out;
}

}  // namespace zext
