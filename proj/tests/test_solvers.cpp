#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "zext/generators.hpp"
#include "zext/solvers.hpp"

using namespace zext;

namespace {

ZeroExtInstance star_instance(double w1 = 1.0, double w2 = 1.0) {
  Graph star(3);
  star.add_edge(0, 1);
  star.add_edge(1, 2);
  DistanceMatrix d(2, 0.0);
  d(0, 1) = d(1, 0) = 1.0;
  return build_generic_instance(star, {w1, w2}, {0, 2}, d);
}

}  // namespace

TEST(IntegralCost, AllToOneOnGapInstance) {
  const auto b = default_gap_instance(8, 4, 2);
  const auto& inst = b.instance;
  const std::uint32_t star = 5;
  double want = 0.0;
  for (VertexId v = 0; v < 64; ++v) want += (1.0 / inst.origin->L) * inst.metric(star, v);
  EXPECT_NEAR(integral_cost(constant_labeling(inst, star), inst), want, 1e-9 * want);
}

TEST(IntegralCost, IdentityOnGapInstance) {
  const auto b = default_gap_instance(8, 4, 2);
  const auto& inst = b.instance;
  const auto f = nearest_terminal_labeling(inst);
  for (VertexId v = 0; v < 64; ++v) EXPECT_EQ(f[v], v);
  double want = 0.0;
  const auto& x = *b.extension;
  for (EdgeId e = 0; e < x.flat_graph().edge_count(); ++e) {
    const Edge& ed = x.flat_graph().edge(e);
    want += inst.metric(ed.u, ed.v) / x.flat_lengths()[e];
  }
  EXPECT_NEAR(integral_cost(f, inst), want, 1e-9 * want);
}

TEST(IntegralCost, Star) {
  const auto inst = star_instance(1.0, 2.5);
  EXPECT_DOUBLE_EQ(integral_cost({0, 0, 1}, inst), 2.5);
  EXPECT_THROW(integral_cost({1, 0, 1}, inst), Error);
}

TEST(BruteForce, StarPicksLexicographicWinner) {
  const auto s = brute_force(star_instance());
  EXPECT_DOUBLE_EQ(s.cost, 1.0);
  EXPECT_EQ(s.labeling[1], 0u);
}

TEST(BruteForce, ZeroWeightsGiveZero) {
  std::mt19937_64 rng(3);
  auto inst = oracle::random_instance(rng, 3, 4);
  inst.weights.assign(inst.weights.size(), 0.0);
  EXPECT_EQ(brute_force(inst).cost, 0.0);
}

TEST(BruteForce, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 25; ++t) {
    const auto inst = oracle::random_instance(rng, 2 + rng() % 3, 1 + rng() % 7);
    EXPECT_NEAR(brute_force(inst).cost, oracle::exhaustive_optimum(inst), 1e-9);
  }
}

TEST(BruteForce, CapThrows) {
  const auto b = default_gap_instance(8, 4, 1);
  EXPECT_THROW(brute_force(b.instance), TooLarge);
}

TEST(Ckr, ZeroDistanceGoesToThatTerminal) {
  const auto inst = star_instance();
  DistanceMatrix d(3, 0.0);
  d(0, 2) = d(2, 0) = 1.0;
  d(1, 2) = d(2, 1) = 1.0;
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(ckr_round(inst, d, s)[1], 0u);
}

TEST(Ckr, EquidistantSplitsEvenly) {
  const auto inst = star_instance();
  DistanceMatrix d(3, 0.0);
  d(0, 2) = d(2, 0) = 1.0;
  d(0, 1) = d(1, 0) = d(1, 2) = d(2, 1) = 0.5;
  std::size_t first = 0;
  const std::size_t trials = 10000;
  for (std::uint64_t s = 0; s < trials; ++s) first += ckr_round(inst, d, s)[1] == 0;
  EXPECT_NEAR(static_cast<double>(first) / trials, 0.5, 0.05);
}

TEST(NearestTerminal, TiesGoToSmallestOrdinal) {
  const auto f = nearest_terminal_labeling(star_instance());
  EXPECT_EQ(f[1], 0u);
}

TEST(LocalSearch, OptimalInputUnchanged) {
  const auto inst = star_instance(1.0, 2.0);
  const Labeling f{0, 1, 1};
  EXPECT_EQ(local_search(inst, f, 10), f);
}

TEST(LocalSearch, NeverWorse) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto inst = oracle::random_instance(rng, 3, 6);
    Labeling f = constant_labeling(inst, 0);
    for (VertexId v : inst.non_terminals()) f[v] = static_cast<std::uint32_t>(rng() % 3);
    EXPECT_LE(integral_cost(local_search(inst, f, 5), inst), integral_cost(f, inst) + 1e-12);
  }
}

TEST(Baselines, BestTerminalMinimizesAllToOne) {
  const auto b = default_gap_instance(8, 4, 6);
  const auto base = baseline_labelings(b.instance);
  for (std::uint32_t t = 0; t < 64; ++t) {
    EXPECT_LE(base.all_to_one.cost, integral_cost(constant_labeling(b.instance, t), b.instance) + 1e-9);
  }
}

TEST(LabelingIo, RoundTripAndErrors) {
  const auto inst = star_instance();
  std::stringstream ss;
  write_labeling(ss, {0, 1, 1}, inst);
  EXPECT_EQ(ss.str(), "0 0\n1 2\n2 2\n");
  EXPECT_EQ(read_labeling(ss, inst), (Labeling{0, 1, 1}));
  std::stringstream bad("0 0\n1 1\n2 2\n");
  EXPECT_THROW(read_labeling(bad, inst), Error);
  std::stringstream missing("0 0\n2 2\n");
  EXPECT_THROW(read_labeling(missing, inst), Error);
}
