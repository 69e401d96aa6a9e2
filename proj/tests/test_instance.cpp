#include <gtest/gtest.h>

#include <memory>

#include "oracles.hpp"
#include "zext/generators.hpp"
#include "zext/instance.hpp"
#include "zext/io.hpp"

using namespace zext;

namespace {

std::shared_ptr<const ExtendedGraph> unit_c3_by_c3() {
  const Graph c3 = cycle_graph(3);
  return std::make_shared<const ExtendedGraph>(
      sample_extension(c3, EdgeLengths::uniform(c3, 1.0), c3, EdgeLengths::uniform(c3, 1.0), 42));
}

}  // namespace

TEST(GapInstance, SingleInterEdge) {
  const Graph base = path_graph(2);
  const Graph fiber(1);
  auto x = std::make_shared<const ExtendedGraph>(base, EdgeLengths({5.0}), fiber, EdgeLengths(std::vector<double>{}),
                                                 std::vector<std::vector<VertexId>>{{0}}, 0);
  const auto inst = build_gap_instance(x, 7.0);
  ASSERT_EQ(inst.terminal_count(), 2u);
  EXPECT_DOUBLE_EQ(inst.metric(0, 1), 19.0);
  EXPECT_DOUBLE_EQ(inst.metric(0, 0), 0.0);
  ASSERT_EQ(inst.graph.edge_count(), 3u);
  EXPECT_DOUBLE_EQ(inst.weights[0], 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(inst.weights[1], 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(inst.weights[2], 1.0 / 7.0);
  EXPECT_EQ(inst.terminals, (std::vector<VertexId>{2, 3}));
}

TEST(GapInstance, C3ByC3MetricMatchesFloydWarshallPlusTwo) {
  auto x = unit_c3_by_c3();
  const auto inst = build_gap_instance(x, 1.0);
  std::vector<double> len(x->flat_graph().edge_count(), 1.0);
  const auto fw = oracle::floyd_warshall(x->flat_graph(), len);
  ASSERT_EQ(inst.terminal_count(), 9u);
  for (std::size_t a = 0; a < 9; ++a) {
    for (std::size_t b = 0; b < 9; ++b) EXPECT_DOUBLE_EQ(inst.metric(a, b), a == b ? 0.0 : fw[a][b] + 2.0);
  }
}

TEST(GapInstance, LazyMetricAgreesWithDense) {
  auto x = unit_c3_by_c3();
  const auto dense = build_gap_instance(x, 1.5);
  const auto lazy = TerminalMetric::lazy(x, 1.5);
  for (std::size_t a = 0; a < 9; ++a) {
    for (std::size_t b = 0; b < 9; ++b) EXPECT_DOUBLE_EQ(lazy(a, b), dense.metric(a, b));
  }
}

TEST(GapInstance, DisconnectedExtensionRejected) {
  const Graph base(2);
  const Graph fiber = cycle_graph(3);
  auto x = std::make_shared<const ExtendedGraph>(
      sample_extension(base, EdgeLengths(std::vector<double>{}), fiber, EdgeLengths::uniform(fiber, 1.0), 1));
  EXPECT_THROW(build_gap_instance(x, 1.0), Error);
}

TEST(GapParams, ValuesForSixteen) {
  // high-precision reference values (mpmath, 30 digits)
  const auto p = GapParams::make(16, 4);
  EXPECT_NEAR(p.ell_G, 1.97359014674595702660, 1e-12);
  EXPECT_NEAR(p.ell_H, 1.40484523942886927042, 1e-12);
  EXPECT_NEAR(p.L, 2.77258872223978123767, 1e-12);
  EXPECT_THROW(GapParams::make(2, 4), Error);
  EXPECT_THROW(GapParams::make(8, 2), Error);
}

TEST(DefaultGap, SizesForEight) {
  const auto b = default_gap_instance(8, 4, 1);
  EXPECT_EQ(b.instance.terminal_count(), 64u);
  EXPECT_EQ(b.instance.vertex_count(), 128u);
  EXPECT_GE(b.provenance.girth, b.provenance.girth_floor);
  EXPECT_EQ(b.provenance.girth_floor, default_girth_floor(8, 4));
}

TEST(DefaultGap, DeterministicFiles) {
  const auto a = default_gap_instance(8, 4, 17);
  const auto b = default_gap_instance(8, 4, 17);
  EXPECT_EQ(instance_json(a.instance, to_json(a.provenance)).dump(), instance_json(b.instance, to_json(b.provenance)).dump());
  const auto c = default_gap_instance(8, 4, 18);
  EXPECT_NE(to_json(a.instance).dump(), to_json(c.instance).dump());
}

TEST(DefaultGap, CirculantFiberIsCayley) {
  GapOptions o;
  o.fiber = FiberKind::circulant;
  const auto b = default_gap_instance(8, 4, 2, o);
  EXPECT_EQ(b.extension->fiber_mode(), LabelMode::cayley);
  EXPECT_EQ(b.provenance.fiber_kind, "circulant");
}

TEST(GenericInstance, StarAndUniformMetric) {
  Graph star(3);
  star.add_edge(0, 1);
  star.add_edge(1, 2);
  DistanceMatrix d(2, 0.0);
  d(0, 1) = d(1, 0) = 1.0;
  const auto inst = build_generic_instance(star, {1.0, 1.0}, {0, 2}, d);
  EXPECT_EQ(inst.vertex_count(), 3u);
  EXPECT_EQ(inst.non_terminals(), (std::vector<VertexId>{1}));

  Graph k4 = complete_graph(4);
  DistanceMatrix u(3, 1.0);
  for (std::size_t i = 0; i < 3; ++i) u(i, i) = 0.0;
  EXPECT_NO_THROW(build_generic_instance(k4, std::vector<double>(6, 1.0), {0, 1, 2}, u));
}

TEST(GenericInstance, RejectsTriangleViolationAndBadInput) {
  Graph g = path_graph(3);
  DistanceMatrix d(3, 0.0);
  d(0, 1) = d(1, 0) = 1.0;
  d(1, 2) = d(2, 1) = 1.0;
  d(0, 2) = d(2, 0) = 3.0;
  EXPECT_THROW(build_generic_instance(g, {1.0, 1.0}, {0, 1, 2}, d), Error);
  DistanceMatrix ok(2, 0.0);
  ok(0, 1) = ok(1, 0) = 1.0;
  EXPECT_THROW(build_generic_instance(g, {1.0, -1.0}, {0, 2}, ok), Error);
  EXPECT_THROW(build_generic_instance(g, {1.0, 1.0}, {0, 0}, ok), Error);
  EXPECT_THROW(build_generic_instance(g, {1.0}, {0, 2}, ok), Error);
}

TEST(InstanceJson, RoundTripGapAndGeneric) {
  const auto b = default_gap_instance(8, 4, 3);
  const auto back = instance_from_json(Json::parse(to_json(b.instance).dump()));
  EXPECT_TRUE(back.graph == b.instance.graph);
  EXPECT_EQ(back.weights, b.instance.weights);
  EXPECT_TRUE(*back.metric.dense_matrix() == *b.instance.metric.dense_matrix());

  std::mt19937_64 rng(3);
  const auto g = oracle::random_instance(rng, 3, 4);
  const auto gb = instance_from_json(Json::parse(to_json(g).dump()));
  EXPECT_EQ(gb.terminals, g.terminals);
  EXPECT_TRUE(*gb.metric.dense_matrix() == *g.metric.dense_matrix());
}

TEST(InstanceJson, RejectsUnknownFormat) {
  EXPECT_THROW(instance_from_json(Json::parse(R"({"format":"other","version":1})")), Error);
}
