#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mepf/code_tree.hpp"
#include "mepf/oracle.hpp"
#include "mepf/types.hpp"

namespace mepf {

struct Block {
  std::vector<ClassIndex> classes;  // ascending
  Count count = 0;
  VertexId node = kNoVertex;
};

struct Partition {
  std::vector<Block> blocks;
};

struct ModeEstimate {
  ClassIndex mode = 0;
  std::uint64_t queries_used = 0;
  /// Queries plus one per sample whose eliminated-set test was skipped
  /// because nothing had been eliminated yet.
  std::uint64_t queries_paper = 0;
  std::uint64_t samples_used = 0;
  std::uint64_t rounds = 0;
  /// False when an elimination-family run stopped on a query cap or round
  /// limit with more than one candidate left.
  bool terminated = true;
};

/// Round sizes n_r = first_round * 2^(r-1) and slack
/// eps_r = eps_scale / (4m) * (2/3)^(r/2), r >= 1.
struct Schedule {
  std::uint64_t first_round = 2;
  double eps_scale = 1.0;
  double c = 24.0;

  std::uint64_t round_size(std::uint64_t r) const;
  double slack(std::uint64_t r, std::size_t m) const;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// What a batch round saw; handed to RoundObserver.
struct RoundInfo {
  std::uint64_t round = 0;
  std::uint64_t samples = 0;        // n_r
  std::uint64_t live_samples = 0;   // samples outside the eliminated set
  std::uint64_t queries = 0;        // spent in this round
  ClassIndex mode = 0;              // round's empirical mode among live classes
  double eta = 0.0;                 // admissibility level, mass units of live_samples
  const Partition* partition = nullptr;  // null for skipped rounds
  /// Depth of each surviving block in the tree handed to the next round.
  std::vector<std::size_t> block_depths;
};

using RoundObserver = std::function<void(const RoundInfo&)>;

/// argmax, lowest index on ties. Throws kNoData when every count is zero.
ClassIndex empirical_mode(std::span<const Count> counts);

/// Each sample identified by the fixed binary code of its index, MSB first.
ModeEstimate exhaustive_search(QueryOracle& oracle, std::size_t m, std::uint64_t n);

/// Each sample identified by walking an adaptive Huffman tree with an NYT
/// subtree, updated after every sample.
ModeEstimate adaptive_search(QueryOracle& oracle, std::size_t m, std::uint64_t n);

struct RebalanceResult {
  Partition partition;
  ClassIndex mode = 0;
  std::uint64_t queries = 0;
  double eta = 0.0;  // gamma * N(mode) / n - eps
  std::vector<std::size_t> block_depths;  // in the rebuilt tree
};

/// Splits tree vertices, heaviest first, until the remaining blocks are below
/// gamma * N(mode) - eps * n, then rebuilds the tree top by Huffman over the
/// blocks. `samples` are sample indices known to lie in the tree's classes.
RebalanceResult batch_tree_rebalance(QueryOracle& oracle, std::span<const std::uint64_t> samples,
                                     CodeTree& tree, double gamma, double eps);

/// Masses are block counts over n. With eta <= 0 only the unique
/// max-singleton clause applies.
bool is_admissible(const Partition& partition, std::uint64_t n, double eta);

ModeEstimate truncated_search(QueryOracle& oracle, std::size_t m, const Schedule& schedule,
                              std::uint64_t max_rounds, const RoundObserver& observer = {});

/// sqrt(c * max_p * ln(pi^2 m r^2 / delta) / r)
double elimination_radius(double c, double max_p, std::uint64_t r, std::size_t m, double delta);

ModeEstimate elimination(QueryOracle& oracle, std::size_t m, double delta, double c = 24.0,
                         std::optional<std::uint64_t> query_cap = {});

ModeEstimate set_elimination(QueryOracle& oracle, std::size_t m, double delta, const Schedule& schedule,
                             std::uint64_t max_rounds, std::optional<std::uint64_t> query_cap = {},
                             const RoundObserver& observer = {});

}  // namespace mepf
