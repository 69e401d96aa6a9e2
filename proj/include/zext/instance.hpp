#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "zext/error.hpp"
#include "zext/extension.hpp"
#include "zext/generators.hpp"
#include "zext/graph.hpp"
#include "zext/paths.hpp"
#include "zext/rng.hpp"
#include "zext/spectral.hpp"

namespace zext {

// Terminal counts up to this bound keep D as a dense k x k matrix; larger
// gap instances compute rows on demand from the extended graph.
inline constexpr std::size_t kDenseMetricCap = 4096;

// First violated semi-metric axiom, described with the offending indices.
inline std::optional<std::string> semimetric_violation(const DistanceMatrix& d, double tol = kDistanceTolerance) {
  const std::size_t n = d.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (d(a, a) != 0.0) return detail::concat("diagonal entry (", a, ",", a, ") = ", d(a, a));
    for (std::size_t b = 0; b < n; ++b) {
      if (!(d(a, b) >= 0.0) || !std::isfinite(d(a, b))) {
        return detail::concat("entry (", a, ",", b, ") = ", d(a, b), " is not a finite non-negative value");
      }
      if (!nearly_equal(d(a, b), d(b, a), tol)) return detail::concat("asymmetric pair (", a, ",", b, ")");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const double via = d(a, b) + d(b, c);
        if (d(a, c) > via + tol * std::max(1.0, via)) {
          return detail::concat("triangle inequality violated for triple (", a, ",", b, ",", c, "): d(", a, ",", c,
                                ") = ", d(a, c), " > ", d(a, b), " + ", d(b, c));
        }
      }
    }
  }
  return std::nullopt;
}

// Metric D over terminal ordinals. Dense, or lazily expanded from an
// extended graph as D(u, v) = D_X(u, v) + 2L for u != v. Lazy rows are
// computed once each; concurrent readers of the same row block on its
// once_flag while one thread fills it.
class TerminalMetric {
 public:
  TerminalMetric() = default;

  static TerminalMetric dense(DistanceMatrix d) {
    TerminalMetric m;
    m.size_ = d.size();
    m.dense_ = std::make_shared<const DistanceMatrix>(std::move(d));
    return m;
  }

  static TerminalMetric lazy(std::shared_ptr<const ExtendedGraph> x, double L) {
    TerminalMetric m;
    m.size_ = x->vertex_count();
    m.lazy_ = std::make_shared<LazyRows>(std::move(x), L);
    return m;
  }

  std::size_t size() const { return size_; }
  bool is_dense() const { return dense_ != nullptr; }
  const DistanceMatrix* dense_matrix() const { return dense_.get(); }

  double operator()(std::size_t a, std::size_t b) const {
    if (dense_) return (*dense_)(a, b);
    return row(a)[b];
  }

  std::span<const double> row(std::size_t a) const {
    if (dense_) return dense_->row(a);
    return lazy_->row(a);
  }

 private:
  struct LazyRows {
    LazyRows(std::shared_ptr<const ExtendedGraph> ext, double length_to_terminal)
        : x(std::move(ext)), L(length_to_terminal), rows(x->vertex_count()), once(x->vertex_count()) {}

    std::span<const double> row(std::size_t a) {
      std::call_once(once[a], [&] {
        auto d = dijkstra_distances(x->flat_graph(), x->flat_lengths(), static_cast<VertexId>(a));
        for (std::size_t b = 0; b < d.size(); ++b) d[b] = (a == b) ? 0.0 : d[b] + 2.0 * L;
        rows[a] = std::move(d);
      });
      return rows[a];
    }

    std::shared_ptr<const ExtendedGraph> x;
    double L;
    std::vector<std::vector<double>> rows;
    std::vector<std::once_flag> once;
  };

  std::size_t size_ = 0;
  std::shared_ptr<const DistanceMatrix> dense_;
  std::shared_ptr<LazyRows> lazy_;
};

struct GapOrigin {
  std::shared_ptr<const ExtendedGraph> extension;
  double L = 0.0;
};

// A 0-extension instance. Terminal ordinal t names vertex terminals[t]; a
// labeling maps every vertex to a terminal ordinal. Gap instances number the
// extended-graph vertices 0..|X|-1, their terminal twins |X|..2|X|-1 (twin of
// x has ordinal x), X-edges first with the flat ids of the extension, then
// the pendant edge of x at id |E_X| + x.
struct ZeroExtInstance {
  Graph graph;
  std::vector<double> weights;
  std::vector<VertexId> terminals;
  std::vector<std::int64_t> ordinal;  // per vertex: terminal ordinal or -1
  TerminalMetric metric;
  std::optional<EdgeLengths> lengths;
  std::optional<GapOrigin> origin;

  std::size_t vertex_count() const { return graph.vertex_count(); }
  std::size_t terminal_count() const { return terminals.size(); }
  bool is_terminal(VertexId v) const { return ordinal[v] >= 0; }
  bool is_gap() const { return origin.has_value(); }

  std::vector<VertexId> non_terminals() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < vertex_count(); ++v) {
      if (!is_terminal(v)) out.push_back(v);
    }
    return out;
  }
};

// Extended graph sizes are n per factor; parameters follow the natural log.
struct GapParams {
  std::size_t n = 0;
  std::size_t d = 0;
  double ell_G = 0.0;
  double ell_H = 0.0;
  double L = 0.0;

  static GapParams make(std::size_t n, std::size_t d) {
    if (n < 3) fail("gap params: n = ", n, " must be at least 3");
    if (d < 3) fail("gap params: d = ", d, " must be at least 3");
    const double ln = std::log(static_cast<double>(n));
    return GapParams{n, d, std::pow(ln, 2.0 / 3.0), std::pow(ln, 1.0 / 3.0), ln};
  }
};

inline ZeroExtInstance build_gap_instance(std::shared_ptr<const ExtendedGraph> x, double L) {
  if (!(L > 0.0)) fail("gap instance: L = ", L, " must be positive");
  const Graph& gx = x->flat_graph();
  const std::size_t k = gx.vertex_count();
  std::size_t comps = 0;
  const auto comp = component_ids(gx, &comps);
  if (comps > 1) {
    std::string listing;
    std::vector<std::vector<VertexId>> members(comps);
    for (VertexId v = 0; v < k; ++v) members[comp[v]].push_back(v);
    for (std::size_t c = 0; c < comps; ++c) {
      listing += detail::concat(" {", members[c].front(), members[c].size() > 1 ? ", ..." : "", "} (",
                                members[c].size(), " vertices)");
    }
    fail("gap instance: extended graph is disconnected into ", comps, " components:", listing);
  }

  ZeroExtInstance inst;
  inst.graph = Graph(2 * k);
  std::vector<double> len;
  for (const Edge& e : gx.edges()) {
    inst.graph.add_edge(e.u, e.v);
  }
  for (EdgeId e = 0; e < gx.edge_count(); ++e) len.push_back(x->flat_lengths()[e]);
  for (VertexId v = 0; v < k; ++v) {
    inst.graph.add_edge(v, static_cast<VertexId>(k + v));
    len.push_back(L);
  }
  inst.weights.reserve(len.size());
  for (double l : len) inst.weights.push_back(1.0 / l);
  inst.lengths = EdgeLengths(std::move(len));
  inst.ordinal.assign(2 * k, -1);
  for (VertexId v = 0; v < k; ++v) {
    inst.terminals.push_back(static_cast<VertexId>(k + v));
    inst.ordinal[k + v] = v;
  }
  if (k <= kDenseMetricCap) {
    DistanceMatrix d = shortest_path_metric(gx, x->flat_lengths());
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) d(a, b) = a == b ? 0.0 : d(a, b) + 2.0 * L;
    }
    inst.metric = TerminalMetric::dense(std::move(d));
  } else {
    inst.metric = TerminalMetric::lazy(x, L);
  }
  inst.origin = GapOrigin{std::move(x), L};
  return inst;
}

// Terminals may sit anywhere; weights need only be non-negative.
inline ZeroExtInstance build_generic_instance(Graph graph, std::vector<double> weights,
                                              std::vector<VertexId> terminals, DistanceMatrix metric) {
  if (weights.size() != graph.edge_count()) {
    fail("generic instance: ", weights.size(), " weights for ", graph.edge_count(), " edges");
  }
  for (std::size_t e = 0; e < weights.size(); ++e) {
    if (!(weights[e] >= 0.0) || !std::isfinite(weights[e])) fail("generic instance: edge ", e, " has invalid weight");
  }
  if (metric.size() != terminals.size()) {
    fail("generic instance: metric is ", metric.size(), "x", metric.size(), " for ", terminals.size(), " terminals");
  }
  if (terminals.empty()) fail("generic instance: no terminals");
  ZeroExtInstance inst;
  inst.ordinal.assign(graph.vertex_count(), -1);
  for (std::size_t t = 0; t < terminals.size(); ++t) {
    const VertexId v = terminals[t];
    if (v >= graph.vertex_count()) fail("generic instance: terminal ", v, " out of range");
    if (inst.ordinal[v] >= 0) fail("generic instance: terminal ", v, " listed twice");
    inst.ordinal[v] = static_cast<std::int64_t>(t);
  }
  if (auto bad = semimetric_violation(metric)) fail("generic instance: D is not a semi-metric: ", *bad);
  inst.graph = std::move(graph);
  inst.weights = std::move(weights);
  inst.terminals = std::move(terminals);
  inst.metric = TerminalMetric::dense(std::move(metric));
  return inst;
}

enum class FiberKind { random_regular, circulant };

struct GapOptions {
  std::optional<std::size_t> girth_floor;  // default ceil(log_{d-1} n)
  std::size_t max_retries = 2000;
  std::size_t expansion_iterations = 300;
  FiberKind fiber = FiberKind::random_regular;
};

struct GapProvenance {
  std::size_t n = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::uint64_t base_seed = 0;
  std::uint64_t fiber_seed = 0;
  std::uint64_t extension_seed = 0;
  std::size_t base_attempts = 0;
  std::size_t girth = 0;
  std::size_t girth_floor = 0;
  double base_lambda2 = 0.0;
  double fiber_lambda2 = 0.0;
  std::string fiber_kind;
  std::string rng = std::string(Rng::kName);
  GapParams params;
};

struct GapBuild {
  std::shared_ptr<const ExtendedGraph> extension;
  ZeroExtInstance instance;
  GapProvenance provenance;
};

inline std::size_t default_girth_floor(std::size_t n, std::size_t d) {
  const double v = std::log(static_cast<double>(n)) / std::log(static_cast<double>(d - 1));
  return static_cast<std::size_t>(std::ceil(v - 1e-12));
}

// Z_n with generators +-1, ..., +-(d/2), plus n/2 when d is odd.
inline Graph circulant(std::size_t n, std::size_t d) {
  std::vector<int> gens;
  for (std::size_t s = 1; s <= d / 2; ++s) gens.push_back(static_cast<int>(s));
  if (d % 2 == 1) {
    if (n % 2 != 0) fail("circulant: odd degree needs even n");
    gens.push_back(static_cast<int>(n / 2));
  }
  return build_cayley(static_cast<int>(n), gens);
}

inline GapBuild default_gap_instance(std::size_t n, std::size_t d, std::uint64_t seed, const GapOptions& opts = {}) {
  const GapParams p = GapParams::make(n, d);
  GapProvenance prov;
  prov.n = n;
  prov.d = d;
  prov.seed = seed;
  prov.params = p;
  prov.girth_floor = opts.girth_floor.value_or(default_girth_floor(n, d));

  std::optional<Graph> base;
  std::size_t best_girth = 0;
  for (std::size_t attempt = 0; attempt < opts.max_retries; ++attempt) {
    const std::uint64_t s = Rng::mix(seed ^ Rng::mix(0x1000 + attempt));
    Graph g = random_regular(n, d, s);
    const std::size_t gg = girth(g);
    best_girth = std::max(best_girth, gg);
    if (gg >= prov.girth_floor && component_count(g) == 1) {
      prov.base_seed = s;
      prov.base_attempts = attempt + 1;
      prov.girth = gg;
      base = std::move(g);
      break;
    }
  }
  if (!base) {
    fail("default_gap_instance: no connected base graph with girth >= ", prov.girth_floor, " after ",
         opts.max_retries, " attempts (best girth ", best_girth, ")");
  }

  std::optional<Graph> fiber;
  if (opts.fiber == FiberKind::circulant) {
    fiber = circulant(n, d);
    prov.fiber_kind = "circulant";
  } else {
    prov.fiber_kind = "random_regular";
    for (std::size_t attempt = 0; attempt < opts.max_retries && !fiber; ++attempt) {
      const std::uint64_t s = Rng::mix(seed ^ Rng::mix(0x2000 + attempt));
      Graph h = random_regular(n, d, s);
      if (component_count(h) == 1) {
        prov.fiber_seed = s;
        fiber = std::move(h);
      }
    }
    if (!fiber) fail("default_gap_instance: no connected fiber graph found");
  }

  prov.base_lambda2 = expansion_estimate(*base, opts.expansion_iterations, seed).lambda2;
  prov.fiber_lambda2 = expansion_estimate(*fiber, opts.expansion_iterations, seed).lambda2;
  prov.extension_seed = Rng::mix(seed ^ Rng::mix(0x3000));

  const auto base_len = EdgeLengths::uniform(*base, p.ell_G);
  const auto fiber_len = EdgeLengths::uniform(*fiber, p.ell_H);
  auto x = std::make_shared<const ExtendedGraph>(
      sample_extension(*base, base_len, *fiber, fiber_len, prov.extension_seed));
  auto inst = build_gap_instance(x, p.L);
  return GapBuild{std::move(x), std::move(inst), prov};
}

}  // namespace zext
