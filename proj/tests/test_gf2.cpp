#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "zext/generators.hpp"
#include "zext/gf2.hpp"

using namespace zext;

TEST(Incidence, SingleEdge) {
  Graph g(2);
  g.add_edge(0, 1);
  const auto m = incidence_matrix(g);
  ASSERT_EQ(m.rows(), 2u);
  ASSERT_EQ(m.cols(), 1u);
  EXPECT_TRUE(m.get(0, 0));
  EXPECT_TRUE(m.get(1, 0));
}

TEST(Incidence, TriangleColumnsHaveTwoOnes) {
  const auto m = incidence_matrix(cycle_graph(3));
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t ones = 0;
    for (std::size_t r = 0; r < 3; ++r) ones += m.get(r, c);
    EXPECT_EQ(ones, 2u);
  }
}

TEST(Incidence, CycleIndicatorInKernel) {
  std::mt19937_64 rng(4);
  Graph g = oracle::random_connected_graph(rng, 5, 3);
  const auto basis = cycle_basis(g);
  ASSERT_FALSE(basis.empty());
  const auto m = incidence_matrix(g);
  for (const auto& cyc : basis) {
    // direct summation per vertex
    for (VertexId v = 0; v < 5; ++v) {
      int sum = 0;
      for (std::size_t e : cyc.ones()) sum += (g.edge(static_cast<EdgeId>(e)).u == v) + (g.edge(static_cast<EdgeId>(e)).v == v);
      EXPECT_EQ(sum % 2, 0);
    }
    EXPECT_TRUE(m.apply(cyc).none());
  }
}

TEST(Kernel, IdentityZeroAndK4) {
  EXPECT_EQ(kernel_dim(Gf2Matrix::identity(3)), 0u);
  EXPECT_EQ(kernel_dim(Gf2Matrix(3, 3)), 3u);
  EXPECT_EQ(kernel_dim(incidence_matrix(complete_graph(4))), 3u);
}

TEST(Betti, SmallCases) {
  EXPECT_EQ(betti1(path_graph(9)), 0u);
  EXPECT_EQ(betti1(cycle_graph(7)), 1u);
  Graph two(6);
  for (VertexId b : {0u, 3u}) {
    two.add_edge(b, b + 1);
    two.add_edge(b + 1, b + 2);
    two.add_edge(b + 2, b);
  }
  EXPECT_EQ(betti1(two), 2u);
}

TEST(Betti, SelfLoopsAndParallelEdges) {
  Graph g(2, true);
  g.add_edge(0, 0);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  EXPECT_EQ(betti1(g), 2u);
  EXPECT_EQ(kernel_dim(incidence_matrix(g)), 2u);
  EXPECT_EQ(cycle_basis(g).size(), 2u);
}

TEST(CycleBasis, TreeCycleAndK4) {
  EXPECT_TRUE(cycle_basis(path_graph(5)).empty());
  const auto c = cycle_basis(cycle_graph(6));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].count(), 6u);
  const auto k4 = cycle_basis(complete_graph(4));
  ASSERT_EQ(k4.size(), 3u);
  EXPECT_EQ(Gf2Matrix::from_rows(k4, 6).rank(), 3u);
}

TEST(Betti, EulerMatchesKernelOnRandomGraphs) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 50;
    const std::size_t m = rng() % 121;
    const Graph g = oracle::random_graph(rng, n, n > 1 ? m : 0, t % 2 == 0);
    EXPECT_EQ(betti1(g), kernel_dim(incidence_matrix(g)));
    EXPECT_EQ(betti1(g), oracle::euler_betti(g));
    EXPECT_EQ(cycle_basis(g).size(), betti1(g));
  }
}

TEST(BitVector, XorCountOnes) {
  BitVector a(130);
  BitVector b(130);
  a.set(3);
  a.set(129);
  b.set(3);
  b.set(64);
  a ^= b;
  EXPECT_EQ(a.count(), 2u);
  EXPECT_EQ(a.ones(), (std::vector<std::size_t>{64, 129}));
}
