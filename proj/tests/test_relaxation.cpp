#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "zext/generators.hpp"
#include "zext/relaxation.hpp"
#include "zext/solvers.hpp"

using namespace zext;

namespace {

ZeroExtInstance star_instance() {
  Graph star(3);
  star.add_edge(0, 1);
  star.add_edge(1, 2);
  DistanceMatrix d(2, 0.0);
  d(0, 1) = d(1, 0) = 1.0;
  return build_generic_instance(star, {1.0, 1.0}, {0, 2}, d);
}

}  // namespace

TEST(Canonical, CostEqualsEdgeCount) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto b = default_gap_instance(8, 4, seed);
    const auto sol = canonical_fractional(b.instance);
    EXPECT_NEAR(sol.cost, static_cast<double>(b.instance.graph.edge_count()), 1e-9 * 320);
    EXPECT_TRUE(is_feasible(sol.delta, b.instance).empty());
    const CanonicalMetricView view(b.instance);
    for (std::size_t a = 0; a < view.size(); a += 7) {
      for (std::size_t c = 0; c < view.size(); c += 3) EXPECT_NEAR(view(a, c), sol.delta(a, c), 1e-9);
    }
  }
}

TEST(Canonical, C3ByC3UnitCaseCosts27) {
  const Graph c3 = cycle_graph(3);
  auto x = std::make_shared<const ExtendedGraph>(
      sample_extension(c3, EdgeLengths::uniform(c3, 1.0), c3, EdgeLengths::uniform(c3, 1.0), 6));
  const auto inst = build_gap_instance(x, 1.0);
  EXPECT_DOUBLE_EQ(canonical_fractional(inst).cost, 27.0);
}

TEST(Canonical, GenericInstanceRefused) { EXPECT_THROW(canonical_fractional(star_instance()), Error); }

TEST(Feasibility, ZeroedTerminalEntryReported) {
  const auto b = default_gap_instance(8, 4, 4);
  auto sol = canonical_fractional(b.instance);
  const auto t0 = b.instance.terminals[0];
  const auto t1 = b.instance.terminals[1];
  sol.delta(t0, t1) = sol.delta(t1, t0) = 0.0;
  const auto v = is_feasible(sol.delta, b.instance);
  bool found = false;
  for (const auto& x : v) found = found || (x.kind == ViolationKind::terminal && x.a == t0 && x.b == t1);
  EXPECT_TRUE(found);
}

TEST(Feasibility, AllZeroNamesTheTerminalPair) {
  const auto inst = star_instance();
  const DistanceMatrix zero(3, 0.0);
  const auto v = is_feasible(zero, inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::terminal);
  EXPECT_EQ(v[0].a, 0u);
  EXPECT_EQ(v[0].b, 2u);
  EXPECT_EQ(fractional_cost(zero, inst), 0.0);
}

TEST(Feasibility, DetectsTriangleAndAsymmetry) {
  const auto inst = star_instance();
  DistanceMatrix d(3, 0.0);
  d(0, 2) = d(2, 0) = 1.0;
  d(0, 1) = d(1, 0) = 0.2;
  d(1, 2) = d(2, 1) = 0.2;
  auto v = is_feasible(d, inst);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].kind, ViolationKind::triangle);
  d(0, 1) = 0.6;
  d(1, 0) = 0.5;
  d(1, 2) = d(2, 1) = 0.5;
  v = is_feasible(d, inst);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::asymmetric);
}

TEST(Induced, StarLabelings) {
  const auto inst = star_instance();
  const Labeling f{0, 0, 1};
  const auto d = induced_semimetric(f, inst);
  EXPECT_EQ(d(1, 2), 1.0);
  EXPECT_EQ(d(0, 1), 0.0);
  EXPECT_EQ(fractional_cost(d, inst), integral_cost(f, inst));
}

TEST(Induced, OneTerminalEverywhereVanishesOffTerminals) {
  const auto b = default_gap_instance(8, 4, 5);
  const auto f = constant_labeling(b.instance, 3);
  const auto d = induced_semimetric(f, b.instance);
  for (VertexId u = 0; u < 64; ++u) {
    for (VertexId v = 0; v < 64; ++v) EXPECT_EQ(d(u, v), 0.0);
  }
}

TEST(Induced, RandomLabelingsAreFeasibleAndMatchIntegralCost) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 30; ++t) {
    const auto inst = oracle::random_instance(rng, 2 + rng() % 3, 1 + rng() % 6);
    Labeling f = constant_labeling(inst, 0);
    for (VertexId v : inst.non_terminals()) f[v] = static_cast<std::uint32_t>(rng() % inst.terminal_count());
    const auto d = induced_semimetric(f, inst);
    EXPECT_TRUE(is_feasible(d, inst).empty());
    EXPECT_NEAR(fractional_cost(d, inst), integral_cost(f, inst), 1e-9);
  }
}

TEST(Lp, StarCounts) {
  std::ostringstream os;
  export_lp(star_instance(), os);
  const std::string s = os.str();
  auto count = [&](const std::string& needle) {
    std::size_t c = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++c;
    return c;
  };
  EXPECT_EQ(count(" t_"), 3u);
  EXPECT_EQ(count(" e_"), 1u);
  EXPECT_EQ(count(" >= 0"), 3u);
  EXPECT_NE(s.find("e_0_2: d_0_2 = 1"), std::string::npos);
}

TEST(Lp, GoldenFile) {
  std::ostringstream os;
  export_lp(star_instance(), os);
  std::ifstream in(std::filesystem::path(ZEXT_TEST_DATA) / "star.lp");
  ASSERT_TRUE(in) << "missing golden file";
  std::stringstream want;
  want << in.rdbuf();
  EXPECT_EQ(os.str(), want.str());
}

TEST(Lp, CapEnforced) {
  const auto b = default_gap_instance(8, 4, 1);
  std::ostringstream os;
  EXPECT_THROW(export_lp(b.instance, os, 63), TooLarge);
  EXPECT_TRUE(os.str().empty());
}
