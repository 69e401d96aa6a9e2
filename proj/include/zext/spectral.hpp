#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "zext/error.hpp"
#include "zext/graph.hpp"
#include "zext/rng.hpp"

namespace zext {

struct ExpansionEstimate {
  double lambda2 = 0.0;      // second largest eigenvalue of A/d
  double abs_lambda2 = 0.0;  // |lambda2|
  std::size_t iterations = 0;
};

// Power iteration on (I + A/d)/2 restricted to the complement of the
// all-ones vector. The shift makes the spectrum non-negative, so the
// dominant eigenvalue of the deflated operator is (1 + lambda2)/2.
inline ExpansionEstimate expansion_estimate(const Graph& g, std::size_t iterations, std::uint64_t seed) {
  const std::size_t n = g.vertex_count();
  std::size_t d = 0;
  if (n < 2) fail("expansion_estimate: need at least two vertices");
  if (!is_regular(g, &d) || d == 0) fail("expansion_estimate: graph is not regular");
  if (component_count(g) != 1) fail("expansion_estimate: graph is disconnected");

  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& xi : x) xi = rng.uniform(-1.0, 1.0);
  auto deflate_normalize = [&](std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double norm = 0.0;
    for (auto& vi : v) {
      vi -= mean;
      norm += vi * vi;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) fail("expansion_estimate: iteration collapsed");
    for (auto& vi : v) vi /= norm;
  };
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(n, 0.0);
    for (const Edge& e : g.edges()) {
      out[e.u] += v[e.v];
      out[e.v] += v[e.u];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (v[i] + out[i] / static_cast<double>(d));
    return out;
  };

  deflate_normalize(x);
  double mu = 0.0;
  ExpansionEstimate est;
  for (std::size_t it = 0; it < iterations; ++it) {
    auto y = apply(x);
    mu = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
    x = std::move(y);
    deflate_normalize(x);
    est.iterations = it + 1;
  }
  est.lambda2 = 2.0 * mu - 1.0;
  est.abs_lambda2 = std::abs(est.lambda2);
  return est;
}

}  // namespace zext
