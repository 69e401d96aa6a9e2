#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "zext/error.hpp"
#include "zext/instance.hpp"
#include "zext/paths.hpp"
#include "zext/rng.hpp"

namespace zext {

// Anything that answers delta(a, b) over the vertices of an instance.
template <class M>
concept MetricView = requires(const M& m, std::size_t a) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m(a, a) } -> std::convertible_to<double>;
};

// Dense semi-metric over all vertices of an instance.
using SemiMetric = DistanceMatrix;

// The shortest-path metric of a gap instance without materializing it:
// delta(x, y) = D_X, delta(x, y_T) = D_X + L, delta(x_T, y_T) = D_X + 2L.
class CanonicalMetricView {
 public:
  explicit CanonicalMetricView(const ZeroExtInstance& inst) : inst_(&inst) {
    if (!inst.is_gap()) fail("canonical metric: instance has no gap origin");
    k_ = inst.terminal_count();
    L_ = inst.origin->L;
  }

  std::size_t size() const { return 2 * k_; }

  double operator()(std::size_t a, std::size_t b) const {
    if (a == b) return 0.0;
    const bool ta = a >= k_;
    const bool tb = b >= k_;
    const std::size_t x = ta ? a - k_ : a;
    const std::size_t y = tb ? b - k_ : b;
    const double dx = x == y ? 0.0 : inst_->metric(x, y) - 2.0 * L_;
    return dx + L_ * static_cast<double>(int{ta} + int{tb});
  }

 private:
  const ZeroExtInstance* inst_;
  std::size_t k_ = 0;
  double L_ = 0.0;
};

struct FractionalSolution {
  SemiMetric delta;
  double cost = 0.0;
};

template <MetricView M>
double fractional_cost(const M& delta, const ZeroExtInstance& inst) {
  if (delta.size() != inst.vertex_count()) {
    fail("fractional_cost: metric over ", delta.size(), " points for ", inst.vertex_count(), " vertices");
  }
  double sum = 0.0;
  for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& ed = inst.graph.edge(e);
    sum += inst.weights[e] * delta(ed.u, ed.v);
  }
  return sum;
}

// Largest |V| for which canonical_fractional builds the dense matrix.
inline constexpr std::size_t kDenseSemiMetricCap = 4096;

// Shortest-path metric of the instance graph under its edge lengths. Every
// terminal is a leaf, so distances among X are those of the extended graph
// and a pendant edge adds L per terminal endpoint.
inline FractionalSolution canonical_fractional(const ZeroExtInstance& inst) {
  if (!inst.is_gap() || !inst.lengths) {
    fail("canonical_fractional: instance has no length origin; export the LP (export_lp) and solve it externally");
  }
  const std::size_t nv = inst.vertex_count();
  if (nv > kDenseSemiMetricCap) {
    fail("canonical_fractional: |V| = ", nv, " exceeds the dense cap ", kDenseSemiMetricCap,
         "; use CanonicalMetricView");
  }
  const ExtendedGraph& x = *inst.origin->extension;
  const std::size_t k = x.vertex_count();
  const double L = inst.origin->L;
  FractionalSolution sol{SemiMetric(nv, 0.0), 0.0};
  for (VertexId s = 0; s < k; ++s) {
    const auto row = dijkstra_distances(x.flat_graph(), x.flat_lengths(), s);
    for (std::size_t t = 0; t < k; ++t) {
      sol.delta(s, t) = row[t];
      sol.delta(s, k + t) = row[t] + L;
      sol.delta(k + s, t) = row[t] + L;
      sol.delta(k + s, k + t) = s == t ? 0.0 : row[t] + 2.0 * L;
    }
  }
  sol.cost = fractional_cost(sol.delta, inst);
  return sol;
}

enum class ViolationKind { asymmetric, diagonal, negative, triangle, terminal };

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::asymmetric: return "asymmetric";
    case ViolationKind::diagonal: return "diagonal";
    case ViolationKind::negative: return "negative";
    case ViolationKind::triangle: return "triangle";
    case ViolationKind::terminal: return "terminal";
  }
  return "?";
}

// For triangle violations: delta(a, c) exceeds delta(a, b) + delta(b, c)
// by `magnitude`. For terminal violations a, b are the terminal vertices.
struct Violation {
  ViolationKind kind;
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t c = 0;
  double magnitude = 0.0;
};

struct FeasibilityOptions {
  std::size_t exhaustive_limit = 300;      // exhaustive triangle check up to this |V|
  std::size_t sampled_triples = 2000000;   // above the limit
  std::uint64_t sample_seed = 0x5eed;
  std::size_t max_reported = 1000;
  double tolerance = kDistanceTolerance;
};

template <MetricView M>
std::vector<Violation> is_feasible(const M& delta, const ZeroExtInstance& inst, const FeasibilityOptions& opt = {}) {
  const std::size_t n = inst.vertex_count();
  if (delta.size() != n) fail("is_feasible: metric over ", delta.size(), " points for ", n, " vertices");
  std::vector<Violation> out;
  auto report = [&](Violation v) {
    if (out.size() < opt.max_reported) out.push_back(v);
  };
  auto slack = [&](double ref) { return opt.tolerance * std::max(1.0, std::abs(ref)); };

  const bool exhaustive = n <= opt.exhaustive_limit;
  if (exhaustive) {
    for (std::size_t a = 0; a < n; ++a) {
      if (delta(a, a) != 0.0) report({ViolationKind::diagonal, a, a, a, std::abs(delta(a, a))});
      for (std::size_t b = a + 1; b < n; ++b) {
        const double ab = delta(a, b);
        if (ab < 0.0) report({ViolationKind::negative, a, b, b, -ab});
        if (!nearly_equal(ab, delta(b, a), opt.tolerance)) {
          report({ViolationKind::asymmetric, a, b, b, std::abs(ab - delta(b, a))});
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a) continue;
        const double ab = delta(a, b);
        for (std::size_t c = 0; c < n; ++c) {
          if (c == a || c == b) continue;
          const double via = ab + delta(b, c);
          const double ac = delta(a, c);
          if (ac > via + slack(via)) report({ViolationKind::triangle, a, b, c, ac - via});
        }
      }
    }
  } else {
    Rng rng(opt.sample_seed);
    for (std::size_t s = 0; s < opt.sampled_triples; ++s) {
      const std::size_t a = rng.below(n);
      const std::size_t b = rng.below(n);
      const std::size_t c = rng.below(n);
      if (a == b || b == c || a == c) continue;
      const double via = delta(a, b) + delta(b, c);
      const double ac = delta(a, c);
      if (ac > via + slack(via)) report({ViolationKind::triangle, a, b, c, ac - via});
      if (!nearly_equal(delta(a, b), delta(b, a), opt.tolerance)) {
        report({ViolationKind::asymmetric, a, b, b, std::abs(delta(a, b) - delta(b, a))});
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (delta(a, a) != 0.0) report({ViolationKind::diagonal, a, a, a, std::abs(delta(a, a))});
    }
  }

  const std::size_t k = inst.terminal_count();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double want = inst.metric(i, j);
      const double got = delta(inst.terminals[i], inst.terminals[j]);
      if (!nearly_equal(got, want, opt.tolerance)) {
        report({ViolationKind::terminal, inst.terminals[i], inst.terminals[j], 0, std::abs(got - want)});
      }
    }
  }
  return out;
}

// Labeling: terminal ordinal per vertex.
using Labeling = std::vector<std::uint32_t>;

inline void validate_labeling(const Labeling& f, const ZeroExtInstance& inst) {
  if (f.size() != inst.vertex_count()) fail("labeling: ", f.size(), " entries for ", inst.vertex_count(), " vertices");
  for (VertexId v = 0; v < f.size(); ++v) {
    if (f[v] >= inst.terminal_count()) fail("labeling: vertex ", v, " maps to unknown terminal ordinal ", f[v]);
    if (inst.is_terminal(v) && f[v] != inst.ordinal[v]) {
      fail("labeling: terminal vertex ", v, " is not fixed (maps to ordinal ", f[v], ")");
    }
  }
}

// delta(u, v) = D(f(u), f(v)).
inline SemiMetric induced_semimetric(const Labeling& f, const ZeroExtInstance& inst) {
  validate_labeling(f, inst);
  const std::size_t n = inst.vertex_count();
  SemiMetric d(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) d(a, b) = f[a] == f[b] ? 0.0 : inst.metric(f[a], f[b]);
  }
  return d;
}

inline constexpr std::size_t kLpVertexCap = 200;

inline std::string lp_variable(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  return "d_" + std::to_string(a) + "_" + std::to_string(b);
}

// CPLEX LP text for the metric relaxation. Variables d_u_v (u < v) are
// emitted in lexicographic order; each unordered triple contributes its
// three rotations; parallel edges are merged into one objective term.
inline void export_lp(const ZeroExtInstance& inst, std::ostream& os, std::size_t cap = kLpVertexCap) {
  const std::size_t n = inst.vertex_count();
  if (n > cap) {
    const double triples = static_cast<double>(n) * static_cast<double>(n - 1) * static_cast<double>(n - 2) / 6.0;
    throw TooLarge(detail::concat("export_lp: |V| = ", n, " exceeds cap ", cap, " (about ", 3.0 * triples,
                                  " triangle constraints)"),
                   3.0 * triples);
  }
  const auto old_flags = os.flags();
  const auto old_precision = os.precision();
  os << std::setprecision(17);

  std::vector<double> coef(n * n, 0.0);
  for (EdgeId e = 0; e < inst.graph.edge_count(); ++e) {
    const Edge& ed = inst.graph.edge(e);
    if (ed.u == ed.v) continue;
    const auto a = std::min(ed.u, ed.v);
    const auto b = std::max(ed.u, ed.v);
    coef[a * n + b] += inst.weights[e];
  }

  os << "\\ metric relaxation of a 0-extension instance: " << n << " vertices, " << inst.terminal_count()
     << " terminals\n";
  os << "Minimize\n obj:";
  bool any = false;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (coef[a * n + b] == 0.0) continue;
      os << (any ? " + " : " ") << coef[a * n + b] << ' ' << lp_variable(a, b);
      any = true;
    }
  }
  if (!any) os << " 0 " << (n >= 2 ? lp_variable(0, 1) : std::string("d_0_0"));
  os << "\nSubject To\n";
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        const std::size_t tri[3][3] = {{a, c, b}, {a, b, c}, {b, c, a}};
        for (int r = 0; r < 3; ++r) {
          const auto [x, y, z] = tri[r];
          // d(x,y) <= d(x,z) + d(z,y)
          os << " t_" << a << '_' << b << '_' << c << '_' << r << ": " << lp_variable(x, y) << " - "
             << lp_variable(x, z) << " - " << lp_variable(z, y) << " <= 0\n";
        }
      }
    }
  }
  const std::size_t k = inst.terminal_count();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto a = inst.terminals[i];
      const auto b = inst.terminals[j];
      os << " e_" << std::min(a, b) << '_' << std::max(a, b) << ": " << lp_variable(a, b) << " = "
         << inst.metric(i, j) << '\n';
    }
  }
  os << "Bounds\n";
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) os << ' ' << lp_variable(a, b) << " >= 0\n";
  }
  os << "End\n";
  os.flags(old_flags);
  os.precision(old_precision);
}

}  // namespace zext
