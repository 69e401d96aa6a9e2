#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "zext/error.hpp"

namespace zext {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using Label = std::int32_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

struct Edge {
  VertexId u;
  VertexId v;
};

// Group structure of a Cayley graph over Z_m1 x ... x Z_mr. Vertex ids are
// the mixed-radix encoding of group elements (first coordinate most
// significant); every label symbol names one generator.
struct CayleyStructure {
  std::vector<int> moduli;
  std::map<Label, std::vector<int>> generator;

  std::vector<int> element(VertexId v) const {
    std::vector<int> out(moduli.size());
    for (std::size_t i = moduli.size(); i-- > 0;) {
      out[i] = static_cast<int>(v % static_cast<VertexId>(moduli[i]));
      v /= static_cast<VertexId>(moduli[i]);
    }
    return out;
  }

  VertexId vertex(const std::vector<int>& element) const {
    VertexId v = 0;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      const int m = moduli[i];
      v = v * static_cast<VertexId>(m) + static_cast<VertexId>(((element[i] % m) + m) % m);
    }
    return v;
  }

  std::vector<int> add(std::vector<int> a, const std::vector<int>& b) const {
    for (std::size_t i = 0; i < moduli.size(); ++i) a[i] = (a[i] + b[i]) % moduli[i];
    return a;
  }

  std::vector<int> negate(std::vector<int> a) const {
    for (std::size_t i = 0; i < moduli.size(); ++i) a[i] = (moduli[i] - a[i]) % moduli[i];
    return a;
  }

  bool operator==(const CayleyStructure&) const = default;
};

// Undirected graph with dense edge ids. Self-loops and parallel edges are
// only accepted in multigraph mode. Optional per-endpoint generator labels.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t vertex_count, bool multigraph = false)
      : incidence_(vertex_count), multigraph_(multigraph) {}

  EdgeId add_edge(VertexId u, VertexId v) {
    if (u >= vertex_count() || v >= vertex_count()) {
      fail("edge (", u, ",", v, ") out of range for ", vertex_count(), " vertices");
    }
    if (!multigraph_) {
      if (u == v) fail("self-loop at vertex ", u, " in a simple graph");
      const VertexId probe = degree(u) <= degree(v) ? u : v;
      const VertexId target = probe == u ? v : u;
      for (EdgeId e : incidence_[probe]) {
        if (other(e, probe) == target) fail("parallel edge (", u, ",", v, ") in a simple graph");
      }
    }
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({u, v});
    incidence_[u].push_back(id);
    if (u != v) incidence_[v].push_back(id);
    if (!labels_.empty()) labels_.push_back({0, 0});
    return id;
  }

  EdgeId add_edge(VertexId u, VertexId v, Label label_u, Label label_v) {
    if (labels_.empty() && !edges_.empty()) fail("mixing labeled and unlabeled edges");
    const EdgeId id = add_edge(u, v);
    if (labels_.size() < edges_.size()) labels_.resize(edges_.size());
    labels_[id] = {label_u, label_v};
    return id;
  }

  std::size_t vertex_count() const { return incidence_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool multigraph() const { return multigraph_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const EdgeId> incident(VertexId v) const { return incidence_[v]; }

  // Self-loops count twice, as usual.
  std::size_t degree(VertexId v) const {
    std::size_t d = 0;
    for (EdgeId e : incidence_[v]) d += edges_[e].u == edges_[e].v ? 2 : 1;
    return d;
  }

  VertexId other(EdgeId e, VertexId v) const {
    const Edge& ed = edges_[e];
    return ed.u == v ? ed.v : ed.u;
  }

  bool has_labels() const { return !labels_.empty() && labels_.size() == edges_.size(); }

  Label label(VertexId v, EdgeId e) const { return edges_[e].u == v ? labels_[e][0] : labels_[e][1]; }

  // Edge leaving v with the given label, if any.
  std::optional<EdgeId> edge_with_label(VertexId v, Label l) const {
    for (EdgeId e : incidence_[v]) {
      if (label(v, e) == l) return e;
    }
    return std::nullopt;
  }

  // Inverse of a label symbol as witnessed by the edges carrying it.
  std::optional<Label> inverse_label(Label l) const {
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      if (labels_[e][0] == l) return labels_[e][1];
      if (labels_[e][1] == l) return labels_[e][0];
    }
    return std::nullopt;
  }

  // Cayley property: labels at each vertex are distinct and the pairing of
  // labels across edges is a consistent involution on the alphabet.
  // Returns an empty string when valid, otherwise a description.
  std::string label_violation() const {
    if (!has_labels()) return "graph has no labels";
    std::map<Label, Label> inverse;
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const auto [a, b] = labels_[e];
      for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        auto [it, inserted] = inverse.emplace(x, y);
        if (!inserted && it->second != y) {
          return detail::concat("label ", x, " paired with both ", it->second, " and ", y);
        }
      }
    }
    for (VertexId v = 0; v < vertex_count(); ++v) {
      std::vector<Label> seen;
      for (EdgeId e : incidence_[v]) seen.push_back(label(v, e));
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        return detail::concat("vertex ", v, " has repeated labels");
      }
    }
    return {};
  }

  const std::optional<CayleyStructure>& cayley() const { return cayley_; }
  void set_cayley(CayleyStructure c) { cayley_ = std::move(c); }

  // Structural equality: same vertex count, edge list and labels.
  bool operator==(const Graph& o) const {
    if (vertex_count() != o.vertex_count() || edges_.size() != o.edges_.size()) return false;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (edges_[i].u != o.edges_[i].u || edges_[i].v != o.edges_[i].v) return false;
    }
    return labels_ == o.labels_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incidence_;
  std::vector<std::array<Label, 2>> labels_;
  std::optional<CayleyStructure> cayley_;
  bool multigraph_ = false;
};

// Per-edge positive lengths, indexed by edge id.
class EdgeLengths {
 public:
  EdgeLengths() = default;
  explicit EdgeLengths(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t e = 0; e < values_.size(); ++e) {
      if (!(values_[e] > 0.0)) fail("edge ", e, " has non-positive length ", values_[e]);
    }
  }
  static EdgeLengths uniform(const Graph& g, double length) {
    return EdgeLengths(std::vector<double>(g.edge_count(), length));
  }

  double operator[](EdgeId e) const { return values_[e]; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  bool operator==(const EdgeLengths&) const = default;

 private:
  std::vector<double> values_;
};

// Connected components by union-find; returns component id per vertex.
inline std::vector<std::uint32_t> component_ids(const Graph& g, std::size_t* count = nullptr) {
  std::vector<std::uint32_t> parent(g.vertex_count());
  for (std::uint32_t v = 0; v < parent.size(); ++v) parent[v] = v;
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Edge& e : g.edges()) parent[find(e.u)] = find(e.v);
  std::vector<std::uint32_t> id(g.vertex_count(), std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto& slot = id[find(v)];
    if (slot == std::numeric_limits<std::uint32_t>::max()) slot = next++;
  }
  std::vector<std::uint32_t> out(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) out[v] = id[find(v)];
  if (count != nullptr) *count = next;
  return out;
}

inline std::size_t component_count(const Graph& g) {
  std::size_t c = 0;
  component_ids(g, &c);
  return c;
}

inline bool is_regular(const Graph& g, std::size_t* degree_out = nullptr) {
  if (g.vertex_count() == 0) return true;
  const std::size_t d = g.degree(0);
  for (VertexId v = 1; v < g.vertex_count(); ++v) {
    if (g.degree(v) != d) return false;
  }
  if (degree_out != nullptr) *degree_out = d;
  return true;
}

// ---------------------------------------------------------------------------
// Text serialization.
//
//   graph file:   "<vertex_count> [<degree>]" then one line per edge
//                 "<edge_id> <u> <v> [<label_u> <label_v>]"
//   lengths file: one line per edge "<edge_id> <length>"
//
// Blank lines and lines starting with '#' are ignored.
// ---------------------------------------------------------------------------

inline void write_graph(std::ostream& os, const Graph& g) {
  os << g.vertex_count();
  if (std::size_t d = 0; g.vertex_count() > 0 && is_regular(g, &d)) os << ' ' << d;
  os << '\n';
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    os << e << ' ' << ed.u << ' ' << ed.v;
    if (g.has_labels()) os << ' ' << g.label(ed.u, e) << ' ' << g.label(ed.v, e);
    os << '\n';
  }
}

namespace detail {

inline bool next_data_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace detail

inline Graph read_graph(std::istream& is, bool multigraph = false) {
  std::string line;
  if (!detail::next_data_line(is, line)) fail("graph file: missing header");
  std::istringstream header(line);
  std::size_t n = 0;
  if (!(header >> n)) fail("graph file: bad header '", line, "'");
  std::optional<std::size_t> declared_degree;
  if (std::size_t d = 0; header >> d) declared_degree = d;

  Graph g(n, multigraph);
  std::size_t line_no = 1;
  while (detail::next_data_line(is, line)) {
    ++line_no;
    std::istringstream row(line);
    std::size_t id = 0;
    VertexId u = 0;
    VertexId v = 0;
    if (!(row >> id >> u >> v)) fail("graph file: malformed edge line '", line, "'");
    if (id != g.edge_count()) fail("graph file: edge ids must be dense, got ", id, " expected ", g.edge_count());
    Label lu = 0;
    Label lv = 0;
    if (row >> lu >> lv) {
      g.add_edge(u, v, lu, lv);
    } else {
      if (g.has_labels()) fail("graph file: edge ", id, " is missing labels");
      g.add_edge(u, v);
    }
  }
  if (declared_degree) {
    std::size_t d = 0;
    if (!is_regular(g, &d) || d != *declared_degree) {
      fail("graph file: header declares degree ", *declared_degree, " but graph is not regular of that degree");
    }
  }
  return g;
}

inline void write_lengths(std::ostream& os, const EdgeLengths& len) {
  os.precision(17);
  for (EdgeId e = 0; e < len.size(); ++e) os << e << ' ' << len[e] << '\n';
}

inline EdgeLengths read_lengths(std::istream& is) {
  std::vector<double> values;
  std::string line;
  while (detail::next_data_line(is, line)) {
    std::istringstream row(line);
    std::size_t id = 0;
    double len = 0;
    if (!(row >> id >> len)) fail("lengths file: malformed line '", line, "'");
    if (id != values.size()) fail("lengths file: edge ids must be dense");
    values.push_back(len);
  }
  return EdgeLengths(std::move(values));
}

}  // namespace zext
