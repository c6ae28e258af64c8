#include <gtest/gtest.h>

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <queue>
#include <random>

#include "mepf/code_tree.hpp"
#include "mepf/error.hpp"

namespace mepf {
namespace {

// Value-only Huffman cost: sum of merged weights.
Count huffman_cost(const std::vector<Count>& counts) {
  std::priority_queue<Count, std::vector<Count>, std::greater<>> pq(counts.begin(), counts.end());
  Count total = 0;
  while (pq.size() > 1) {
    Count a = pq.top();
    pq.pop();
    Count b = pq.top();
    pq.pop();
    total += a + b;
    pq.push(a + b);
  }
  return total;
}

TEST(CodeTree, ExampleCodes) {
  auto t = CodeTree::build_huffman({{0, 69}, {1, 14}, {2, 8}, {3, 6}, {4, 3}});
  EXPECT_EQ(t.code_of(0).to_string(), "1");
  EXPECT_EQ(t.code_of(1).to_string(), "00");
  EXPECT_EQ(t.code_of(2).to_string(), "010");
  EXPECT_EQ(t.code_of(4).to_string(), "0110");
  EXPECT_EQ(t.code_of(3).to_string(), "0111");
  EXPECT_EQ(t.validate(), "");
  EXPECT_TRUE(t.ordering_compatible());
}

TEST(CodeTree, RandomIncrementsMatchRebuild) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t m = 2 + rng() % 15;
    std::map<ClassIndex, Count> counts;
    std::vector<Count> c(m, 1);
    for (ClassIndex y = 0; y < m; ++y) counts[y] = 1;
    auto t = CodeTree::build_huffman(counts);
    const int len = 1 + rng() % 200;
    for (int s = 0; s < len; ++s) {
      const ClassIndex y = rng() % m;
      t.increment(y);
      ++c[y];
      ASSERT_EQ(t.validate(), "") << rep << " " << s;
      ASSERT_EQ(t.weighted_path_length(), huffman_cost(c)) << rep << " " << s;
      ASSERT_TRUE(t.ordering_compatible());
    }
  }
}

TEST(CodeTree, FreshObserveMatchesRebuild) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t m = 2 + rng() % 20;
    auto t = CodeTree::fresh(m);
    std::vector<Count> c(m, 0);
    const int len = 1 + rng() % 300;
    for (int s = 0; s < len; ++s) {
      const ClassIndex y = static_cast<ClassIndex>(std::min<std::size_t>(m - 1, std::geometric_distribution<int>(0.3)(rng)));
      t.observe(y);
      ++c[y];
      ASSERT_EQ(t.validate(), "") << rep << " " << s << "\n" << t.dump();
      std::vector<Count> pos;
      for (Count x : c)
        if (x) pos.push_back(x);
      if (pos.size() < m) pos.push_back(0);  // NYT
      ASSERT_EQ(t.weighted_path_length(), huffman_cost(pos)) << rep << " " << s << "\n" << t.dump();
      ASSERT_TRUE(t.ordering_compatible()) << t.dump();
    }
  }
}


std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(MEPF_GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CodeTree, GoldenDumps) {
  EXPECT_EQ(CodeTree::build_huffman({{0, 69}, {1, 14}, {2, 8}, {3, 3}, {4, 6}}).dump(),
            read_golden("huffman_example.txt"));
  CodeTree t = CodeTree::fresh(4);
  for (ClassIndex y : {2, 0, 3, 1, 1}) t.observe(y);
  EXPECT_EQ(t.dump(), read_golden("observe_sequence.txt"));
}

TEST(CodeTree, ExampleDepthsAndDecode) {
  auto t = CodeTree::build_huffman({{0, 69}, {1, 14}, {2, 8}, {3, 6}, {4, 3}});
  const std::array<std::size_t, 5> depths{1, 2, 3, 4, 4};
  for (ClassIndex y = 0; y < 5; ++y) {
    EXPECT_EQ(t.depth(t.leaf_of(y)), depths[y]);
    EXPECT_EQ(t.decode(t.code_of(y)), y);
  }
  EXPECT_EQ(t.decode(VertexCode::from_string("01")), kNoClass);
  EXPECT_EQ(VertexCode::from_string("1001").to_string(), "1001");
  EXPECT_EQ(t.weighted_path_length(), 69u * 1 + 14 * 2 + 8 * 3 + 6 * 4 + 3 * 4);
}

TEST(CodeTree, SingleClass) {
  auto t = CodeTree::build_huffman({{0, 5}});
  EXPECT_EQ(t.code_of(0).to_string(), "");
  EXPECT_EQ(t.depth(t.leaf_of(0)), 0u);
  EXPECT_TRUE(t.check_balanced(1.0));
  EXPECT_TRUE(t.check_balanced(0.1));
}

TEST(CodeTree, TwoLeavesStayAtDepthOne) {
  auto t = CodeTree::build_huffman({{0, 3}, {1, 1}});
  t.increment(1);
  EXPECT_EQ(t.count(1), 2u);
  EXPECT_EQ(t.depth(t.leaf_of(0)), 1u);
  EXPECT_EQ(t.depth(t.leaf_of(1)), 1u);
  EXPECT_EQ(t.validate(), "");
}

TEST(CodeTree, IncrementingExampleMatchesRebuild) {
  auto t = CodeTree::build_huffman({{0, 69}, {1, 14}, {2, 8}, {3, 6}, {4, 3}});
  for (int k = 0; k < 6; ++k) t.increment(4);
  EXPECT_EQ(t.weighted_path_length(),
            CodeTree::build_huffman({{0, 69}, {1, 14}, {2, 8}, {3, 6}, {4, 9}}).weighted_path_length());
  EXPECT_TRUE(t.ordering_compatible());
}

TEST(CodeTree, ObserveFresh) {
  CodeTree t = CodeTree::fresh(4);
  t.observe(2);
  EXPECT_EQ(t.depth(t.leaf_of(2)), 1u);
  ASSERT_NE(t.nyt(), kNoVertex);
  EXPECT_EQ(t.classes_under(t.nyt()), (std::vector<ClassIndex>{0, 1, 3}));
  EXPECT_THROW(t.insert_new_symbol(2), Error);
  EXPECT_THROW(t.increment(0), Error);
  for (ClassIndex y : {0, 3, 1}) t.observe(y);
  EXPECT_EQ(t.nyt(), kNoVertex);
  for (ClassIndex y = 0; y < 4; ++y) EXPECT_EQ(t.count(y), 1u);
  EXPECT_EQ(t.validate(), "");
}

TEST(CodeTree, BalancedCheck) {
  auto t = CodeTree::build_huffman({{0, 3}, {1, 1}, {2, 1}, {3, 1}});
  EXPECT_TRUE(t.check_balanced(2.0));
  EXPECT_FALSE(t.check_balanced(0.5));
  EXPECT_THROW(CodeTree::fresh(3).check_balanced(2.0), Error);
}

}  // namespace
}  // namespace mepf
