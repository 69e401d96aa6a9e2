#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "zext/harness.hpp"
#include "zext/io.hpp"

using namespace zext;

TEST(ParseList, RangesAndSingles) {
  EXPECT_EQ(parse_list<std::uint64_t>("1..4,7", "seeds"), (std::vector<std::uint64_t>{1, 2, 3, 4, 7}));
  EXPECT_EQ(parse_list<std::size_t>(" 8, 16 ", "n"), (std::vector<std::size_t>{8, 16}));
  EXPECT_EQ(parse_list<std::size_t>("5..5", "n"), (std::vector<std::size_t>{5}));
  EXPECT_THROW(parse_list<std::size_t>("4..2", "n"), Error);
  EXPECT_THROW(parse_list<std::size_t>("-3", "n"), Error);
  EXPECT_THROW(parse_list<std::size_t>("x", "n"), Error);
  EXPECT_THROW(parse_list<std::size_t>("", "n"), Error);
}

TEST(Config, KeyValueLines) {
  std::istringstream in("# a comment\nn = 8,16\n\nseeds=1..3   # trailing\n  epsilon = 0.05\n");
  const auto kv = read_config(in, "cfg");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"n", "8,16"}));
  EXPECT_EQ(kv[1].second, "1..3");
  EXPECT_EQ(kv[2].first, "epsilon");
  std::istringstream bad("n 8\n");
  EXPECT_THROW(read_config(bad, "cfg"), Error);
}

TEST(Config, Validation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.epsilon = 0.3;  // default threshold 1 - 4 eps = -0.2
  EXPECT_THROW(c.validate(), Error);
  c.threshold = 0.7;
  EXPECT_NO_THROW(c.validate());
  c.solvers = {"magic"};
  EXPECT_THROW(c.validate(), Error);
  ExperimentConfig f;
  f.format = "xml";
  EXPECT_THROW(f.validate(), Error);
}

TEST(Config, AlphaDefault) {
  ExperimentConfig c;
  EXPECT_NEAR(c.alpha_for(16), 0.1 * std::pow(std::log(16.0), 4.0 / 3.0), 1e-15);
  c.alpha = 2.0;
  EXPECT_EQ(c.alpha_for(16), 2.0);
}

TEST(LpTable, Parses) {
  std::istringstream in("# n seed lp\n8 1 300.5\n8 2 301\n");
  const auto t = read_lp_table(in, "lp");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at({8, 1}), 300.5);
  std::istringstream bad("8 1\n");
  EXPECT_THROW(read_lp_table(bad, "lp"), Error);
}

TEST(Median, OddEvenEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_TRUE(std::isnan(median({})));
}

TEST(Gap, DeterministicAndOrdered) {
  ExperimentConfig c;
  c.n = {8};
  c.seeds = {3, 1, 2};
  c.threads = 2;
  const auto a = run_gap(c);
  c.threads = 1;
  const auto b = run_gap(c);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].seed, c.seeds[i]);
    EXPECT_EQ(a[i].best_integral, b[i].best_integral);
    EXPECT_EQ(a[i].frac_cost, 320.0);
    EXPECT_EQ(a[i].k, 64u);
    EXPECT_GE(a[i].ratio, 0.0);
    EXPECT_LE(a[i].best_integral, *a[i].all_to_one);
  }
  std::ostringstream x, y;
  write_gap_csv(x, a, to_json(c));
  write_gap_csv(y, b, to_json(c));
  EXPECT_EQ(x.str(), y.str());
}

TEST(Gap, CsvShape) {
  ExperimentConfig c;
  c.solvers = {"all_to_one"};
  LpTable lp{{{8, 1}, 200.0}};
  const auto rows = run_gap(c, lp);
  std::ostringstream os;
  write_gap_csv(os, rows, to_json(c));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# config {", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, kGapCsvHeader);
  std::getline(in, line);
  const std::string header = kGapCsvHeader;
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_EQ(rows[0].solver, "all_to_one");
  EXPECT_FALSE(rows[0].ckr_best.has_value());
  ASSERT_TRUE(rows[0].lp_ratio().has_value());
  EXPECT_DOUBLE_EQ(*rows[0].lp_ratio(), rows[0].best_integral / 200.0);
}

TEST(Gap, JsonCarriesCaveat) {
  ExperimentConfig c;
  const auto j = gap_json(run_gap(c), to_json(c));
  EXPECT_EQ(j["caveat"], kGapCaveat);
  EXPECT_EQ(j["rows"].size(), 1u);
  EXPECT_TRUE(j["summary"].is_array());
}

TEST(Output, EnvFallback) {
  ::unsetenv(kOutDirEnv);
  EXPECT_EQ(resolve_output("", "a.csv"), "");
  EXPECT_EQ(resolve_output("x.csv", "a.csv"), "x.csv");
  ::setenv(kOutDirEnv, "/tmp/zz", 1);
  EXPECT_EQ(resolve_output("", "a.csv"), "/tmp/zz/a.csv");
  ::unsetenv(kOutDirEnv);
}
