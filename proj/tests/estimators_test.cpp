#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mepf/distribution.hpp"
#include "mepf/error.hpp"
#include "mepf/estimators.hpp"

namespace mepf {
namespace {

ProbabilityVector pv_of(std::initializer_list<double> w) {
  const std::vector<double> v(w);
  return ProbabilityVector::from_weights(v);
}

Partition partition_of(std::initializer_list<std::pair<std::vector<ClassIndex>, Count>> blocks) {
  Partition p;
  for (const auto& [classes, count] : blocks) p.blocks.push_back(Block{classes, count, kNoVertex});
  return p;
}

TEST(EmpiricalMode, Examples) {
  const std::array<Count, 3> a{5, 3, 2};
  const std::array<Count, 3> b{2, 2, 1};
  const std::array<Count, 3> c{0, 0, 0};
  EXPECT_EQ(empirical_mode(a), 0u);
  EXPECT_EQ(empirical_mode(b), 0u);
  EXPECT_THROW(empirical_mode(c), Error);
}

TEST(ExhaustiveSearch, ThreeQueriesPerSampleOverEight) {
  QueryOracle oracle(pv_of({4, 1, 1, 1, 1, 1, 1, 1}), 2);
  const ModeEstimate e = exhaustive_search(oracle, 8, 100);
  EXPECT_EQ(e.queries_used, 300u);
  EXPECT_EQ(e.samples_used, 100u);
  EXPECT_EQ(oracle.query_count(), e.queries_used);
}

TEST(ExhaustiveSearch, OneQueryPerSampleOverTwo) {
  QueryOracle oracle(pv_of({0.6, 0.4}), 2);
  EXPECT_EQ(exhaustive_search(oracle, 2, 50).queries_used, 50u);
}

TEST(AdaptiveSearch, OneQueryPerSampleOverTwo) {
  QueryOracle oracle(pv_of({0.6, 0.4}), 4);
  const ModeEstimate e = adaptive_search(oracle, 2, 200);
  EXPECT_EQ(e.queries_used, 200u);
  EXPECT_EQ(e.mode, 0u);
}

TEST(AdaptiveSearch, ConstantReplayReachesDepthOne) {
  QueryOracle oracle = QueryOracle::replay(std::vector<ClassIndex>(100, 2), 6);
  const ModeEstimate e = adaptive_search(oracle, 6, 100);
  EXPECT_EQ(e.mode, 2u);
  for (std::uint64_t j = 10; j < 100; ++j) ASSERT_EQ(oracle.queries_for(j), 1u) << j;
}

TEST(BatchRebalance, WorkedExample) {
  // a:5, b:3, c:1, d:1
  QueryOracle oracle = QueryOracle::replay({0, 1, 0, 2, 0, 1, 3, 0, 1, 0}, 4);
  const std::array<ClassIndex, 4> classes{0, 1, 2, 3};
  CodeTree tree = CodeTree::balanced(classes);
  const std::array<std::uint64_t, 10> samples{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const RebalanceResult r = batch_tree_rebalance(oracle, samples, tree, 1.0, 0.0);
  EXPECT_EQ(r.mode, 0u);
  EXPECT_DOUBLE_EQ(r.eta, 0.5);
  EXPECT_TRUE(is_admissible(r.partition, 10, r.eta));
  EXPECT_EQ(r.queries, oracle.query_count());
  EXPECT_EQ(tree.validate(), "");
}

TEST(BatchRebalance, SingleLiveClass) {
  QueryOracle oracle = QueryOracle::replay({2, 2, 2}, 4);
  const std::array<ClassIndex, 1> classes{2};
  CodeTree tree = CodeTree::balanced(classes);
  const std::array<std::uint64_t, 3> samples{0, 1, 2};
  const RebalanceResult r = batch_tree_rebalance(oracle, samples, tree, 1.0, 0.0);
  ASSERT_EQ(r.partition.blocks.size(), 1u);
  EXPECT_EQ(r.partition.blocks[0].classes, std::vector<ClassIndex>{2});
  EXPECT_EQ(r.queries, 0u);
}

TEST(BatchRebalance, HugeSlackStopsAtMode) {
  QueryOracle oracle = QueryOracle::replay({0, 1, 0, 2, 0, 1, 3, 0, 1, 0}, 4);
  const std::array<ClassIndex, 4> classes{0, 1, 2, 3};
  CodeTree tree = CodeTree::balanced(classes);
  const std::array<std::uint64_t, 10> samples{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const RebalanceResult r = batch_tree_rebalance(oracle, samples, tree, 1.0, 1.0);
  EXPECT_LE(r.eta, 0.0);
  EXPECT_TRUE(is_admissible(r.partition, 10, r.eta));
}

TEST(BatchRebalance, EmptySamples) {
  QueryOracle oracle = QueryOracle::replay({0, 1}, 2);
  const std::array<ClassIndex, 2> classes{0, 1};
  CodeTree tree = CodeTree::balanced(classes);
  EXPECT_THROW(batch_tree_rebalance(oracle, {}, tree, 1.0, 0.0), Error);
}

TEST(Admissible, Examples) {
  EXPECT_TRUE(is_admissible(partition_of({{{0}, 5}, {{1}, 3}, {{2, 3}, 2}}), 10, 0.5));
  EXPECT_FALSE(is_admissible(partition_of({{{0, 1}, 8}, {{2, 3}, 2}}), 10, 0.5));
  EXPECT_FALSE(is_admissible(partition_of({{{0}, 4}, {{1}, 3}, {{2}, 2}, {{3}, 1}}), 10, 0.45));
}

TEST(TruncatedSearch, TwoClassesCostOneQueryPerSample) {
  QueryOracle oracle(pv_of({0.7, 0.3}), 5);
  std::uint64_t rounds = 0;
  const Schedule schedule;
  const ModeEstimate e = truncated_search(oracle, 2, schedule, 8, [&](const RoundInfo& info) {
    ++rounds;
    EXPECT_EQ(info.queries, schedule.round_size(info.round));
  });
  EXPECT_EQ(rounds, 8u);
  EXPECT_EQ(e.queries_used, oracle.query_count());
}

TEST(Schedule, Values) {
  const Schedule s;
  EXPECT_EQ(s.round_size(1), 2u);
  EXPECT_EQ(s.round_size(5), 32u);
  EXPECT_NEAR(s.slack(2, 4), 1.0 / 16 * 2.0 / 3, 1e-15);
}

TEST(Elimination, Radius) {
  const double direct = std::sqrt(24 * 0.5 * std::log(std::numbers::pi * std::numbers::pi * 10 * 1e4 / 0.1) / 100);
  EXPECT_NEAR(elimination_radius(24, 0.5, 100, 10, 0.1), direct, 1e-12);
  EXPECT_NEAR(elimination_radius(24, 0.5, 100, 10, 0.1), 1.39017856391169, 1e-12);
}

TEST(Elimination, FindsModeAndCountsSkips) {
  QueryOracle oracle(pv_of({0.6, 0.25, 0.15}), 3);
  const ModeEstimate e = elimination(oracle, 3, 0.1);
  EXPECT_TRUE(e.terminated);
  EXPECT_EQ(e.mode, 0u);
  EXPECT_EQ(e.queries_used, oracle.query_count());
  EXPECT_GE(e.queries_paper, e.queries_used);
  EXPECT_LE(e.queries_paper - e.queries_used, e.samples_used);
}

TEST(Elimination, ZeroGapReplayHitsBudget) {
  std::vector<ClassIndex> alternating(200000);
  for (std::size_t j = 0; j < alternating.size(); ++j) alternating[j] = static_cast<ClassIndex>(j % 2);
  QueryOracle oracle = QueryOracle::replay(alternating, 2);
  const ModeEstimate e = elimination(oracle, 2, 0.1, 24.0, 50000);
  EXPECT_FALSE(e.terminated);
  EXPECT_EQ(e.queries_used, 50000u);
}

TEST(SetElimination, FindsModeAndIsDeterministic) {
  const auto pv = pv_of({0.4, 0.3, 0.2, 0.1});
  std::ostringstream ta;
  std::ostringstream tb;
  QueryOracle a(pv, 17);
  QueryOracle b(pv, 17);
  a.set_trace(&ta);
  b.set_trace(&tb);
  const ModeEstimate x = set_elimination(a, 4, 0.2, Schedule{}, 40, {});
  const ModeEstimate y = set_elimination(b, 4, 0.2, Schedule{}, 40, {});
  EXPECT_TRUE(x.terminated);
  EXPECT_EQ(x.mode, 0u);
  EXPECT_EQ(x.queries_used, y.queries_used);
  EXPECT_EQ(x.queries_paper, y.queries_paper);
  EXPECT_EQ(x.rounds, y.rounds);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(x.queries_used, a.query_count());
}

TEST(SetElimination, PartitionsAreAdmissible) {
  const auto pv = make_footnote2(16);
  std::uint64_t checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    QueryOracle oracle(pv, seed);
    set_elimination(oracle, 16, 0.1, Schedule{}, 40, {}, [&](const RoundInfo& info) {
      if (!info.partition || info.round < 4) return;
      ++checked;
      EXPECT_TRUE(is_admissible(*info.partition, info.live_samples, info.eta)) << "round " << info.round;
    });
  }
  EXPECT_GT(checked, 0u);
}

TEST(SetElimination, RoundLimitLeavesUnterminated) {
  QueryOracle oracle(make_footnote1(32), 1);
  const ModeEstimate e = set_elimination(oracle, 32, 0.1, Schedule{}, 3, {});
  EXPECT_FALSE(e.terminated);
  EXPECT_EQ(e.rounds, 3u);
}

}  // namespace
}  // namespace mepf
