#include "mepf/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

#include "mepf/error.hpp"

namespace mepf {
namespace {

ClassSet subtree_set(const CodeTree& tree, VertexId v, std::size_t m, std::vector<ClassIndex>& scratch) {
  tree.classes_under(v, scratch);
  return ClassSet(m, scratch);
}

// Walks from the root, asking for the right subtree at every internal vertex.
ClassIndex identify(QueryOracle& oracle, std::uint64_t j, const CodeTree& tree, std::size_t m,
                    std::vector<ClassIndex>& scratch) {
  VertexId v = tree.root();
  while (!tree.vertex(v).is_leaf()) {
    const Vertex& x = tree.vertex(v);
    v = oracle.query(j, subtree_set(tree, x.right, m, scratch)) ? x.right : x.left;
  }
  return tree.vertex(v).leaf_class;
}

std::vector<ClassIndex> iota_classes(std::size_t m) {
  std::vector<ClassIndex> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = static_cast<ClassIndex>(i);
  return all;
}

void require_classes(std::size_t m) {
  if (m < 2) throw Error(Errc::kInvalidArgument, "need at least two classes");
}

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::kInvalidArgument, "delta must lie in (0, 1)");
}

}  // namespace

std::uint64_t Schedule::round_size(std::uint64_t r) const {
  if (r == 0 || r > 62) throw Error(Errc::kInvalidArgument, "round index out of range");
  return first_round << (r - 1);
}

double Schedule::slack(std::uint64_t r, std::size_t m) const {
  return eps_scale / (4.0 * static_cast<double>(m)) * std::pow(2.0 / 3.0, static_cast<double>(r) / 2.0);
}

ClassIndex empirical_mode(std::span<const Count> counts) {
  auto best = std::max_element(counts.begin(), counts.end());
  if (best == counts.end() || *best == 0) throw Error(Errc::kNoData, "no observations");
  return static_cast<ClassIndex>(best - counts.begin());
}

ModeEstimate exhaustive_search(QueryOracle& oracle, std::size_t m, std::uint64_t n) {
  require_classes(m);
  if (n == 0) throw Error(Errc::kInvalidArgument, "need at least one sample");
  const unsigned bits = std::bit_width(m - 1);
  std::vector<ClassSet> bit_sets;
  for (unsigned k = 0; k < bits; ++k) {
    ClassSet s(m);
    for (std::size_t y = 0; y < m; ++y) {
      if ((y >> k) & 1U) s.insert(static_cast<ClassIndex>(y));
    }
    bit_sets.push_back(std::move(s));
  }

  const std::uint64_t before = oracle.query_count();
  std::vector<Count> counts(m, 0);
  for (std::uint64_t j = 0; j < n; ++j) {
    std::size_t base = 0;
    for (unsigned k = bits; k-- > 0;) {
      // classes sharing the prefix read so far
      const std::size_t span = std::min(m, base + (std::size_t{2} << k)) - base;
      if (span <= 1) break;
      if (oracle.query(j, bit_sets[k])) base |= std::size_t{1} << k;
    }
    ++counts[base];
  }

  ModeEstimate est;
  est.mode = empirical_mode(counts);
  est.queries_used = oracle.query_count() - before;
  est.queries_paper = est.queries_used;
  est.samples_used = n;
  est.rounds = 1;
  return est;
}

ModeEstimate adaptive_search(QueryOracle& oracle, std::size_t m, std::uint64_t n) {
  require_classes(m);
  if (n == 0) throw Error(Errc::kInvalidArgument, "need at least one sample");
  const std::uint64_t before = oracle.query_count();
  CodeTree tree = CodeTree::fresh(m);
  std::vector<Count> counts(m, 0);
  std::vector<ClassIndex> scratch;
  for (std::uint64_t j = 0; j < n; ++j) {
    const ClassIndex y = identify(oracle, j, tree, m, scratch);
    tree.observe(y);
    ++counts[y];
  }

  ModeEstimate est;
  est.mode = empirical_mode(counts);
  est.queries_used = oracle.query_count() - before;
  est.queries_paper = est.queries_used;
  est.samples_used = n;
  est.rounds = 1;
  return est;
}

RebalanceResult batch_tree_rebalance(QueryOracle& oracle, std::span<const std::uint64_t> samples,
                                     CodeTree& tree, double gamma, double eps) {
  if (samples.empty()) throw Error(Errc::kNoData, "no samples to rebalance on");
  const std::size_t m = oracle.classes();
  const double n = static_cast<double>(samples.size());
  const std::uint64_t before = oracle.query_count();

  struct Item {
    VertexId id;
    Count count;
    bool leaf;
    ClassIndex leaf_class;
    std::uint64_t serial;
  };
  // Max-heap by count; ties pop leaves first, then lower class / earlier serial.
  auto lower = [](const Item& a, const Item& b) {
    if (a.count != b.count) return a.count < b.count;
    if (a.leaf != b.leaf) return b.leaf;
    if (a.leaf) return a.leaf_class > b.leaf_class;
    return a.serial > b.serial;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(lower)> heap(lower);
  auto make_item = [&tree](VertexId v, Count c) {
    const Vertex& x = tree.vertex(v);
    return Item{v, c, x.is_leaf(), x.leaf_class, x.serial};
  };

  std::vector<std::vector<std::uint64_t>> bucket(tree.id_bound());
  bucket[tree.root()].assign(samples.begin(), samples.end());
  heap.push(make_item(tree.root(), samples.size()));

  std::vector<std::pair<VertexId, Count>> kept;
  double threshold = -std::numeric_limits<double>::infinity();
  bool have_mode = false;
  RebalanceResult result;
  std::vector<ClassIndex> scratch;

  while (!heap.empty()) {
    const Item top = heap.top();
    heap.pop();
    if (static_cast<double>(top.count) < threshold) {
      kept.emplace_back(top.id, top.count);
      break;
    }
    if (top.leaf) {
      if (!have_mode) {
        have_mode = true;
        result.mode = top.leaf_class;
        threshold = gamma * static_cast<double>(top.count) - eps * n;
        result.eta = threshold / n;
      }
      kept.emplace_back(top.id, top.count);
      continue;
    }
    const Vertex& x = tree.vertex(top.id);
    const VertexId l = x.left;
    const VertexId r = x.right;
    std::vector<std::uint64_t> mine = std::move(bucket[top.id]);
    if (!mine.empty()) {
      const ClassSet right_set = subtree_set(tree, r, m, scratch);
      for (std::uint64_t j : mine) bucket[oracle.query(j, right_set) ? r : l].push_back(j);
    }
    heap.push(make_item(l, bucket[l].size()));
    heap.push(make_item(r, bucket[r].size()));
  }
  while (!heap.empty()) {
    kept.emplace_back(heap.top().id, heap.top().count);
    heap.pop();
  }

  const std::vector<CodeTree::Merge> merges = tree.rebuild_top(kept);

  // The partition is the block list after the Huffman merges that pair up
  // blocks below eta / 2, stopping once at most one such block is left.
  std::map<VertexId, Count> blocks(kept.begin(), kept.end());
  const double half = result.eta * n / 2.0;
  auto small = [half](Count c) { return static_cast<double>(c) < half; };
  std::size_t small_blocks = 0;
  for (const auto& [v, c] : blocks) small_blocks += small(c) ? 1 : 0;
  for (const CodeTree::Merge& mg : merges) {
    if (small_blocks <= 1) break;
    const Count a = blocks.at(mg.left);
    const Count b = blocks.at(mg.right);
    blocks.erase(mg.left);
    blocks.erase(mg.right);
    blocks[mg.node] = a + b;
    small_blocks -= (small(a) ? 1 : 0) + (small(b) ? 1 : 0);
    small_blocks += small(a + b) ? 1 : 0;
  }
  for (const auto& [v, c] : blocks) {
    Block blk;
    blk.node = v;
    blk.count = c;
    tree.classes_under(v, blk.classes);
    result.partition.blocks.push_back(std::move(blk));
    result.block_depths.push_back(tree.depth(v));
  }
  result.queries = oracle.query_count() - before;
  return result;
}

bool is_admissible(const Partition& partition, std::uint64_t n, double eta) {
  if (partition.blocks.empty() || n == 0) return false;
  const double total = static_cast<double>(n);
  Count top = 0;
  for (const Block& b : partition.blocks) top = std::max(top, b.count);
  std::size_t at_top = 0;
  for (const Block& b : partition.blocks) {
    if (b.count == top) {
      ++at_top;
      if (b.classes.size() != 1) return false;
    }
  }
  if (at_top != 1) return false;
  if (eta <= 0.0) return true;

  std::size_t below_half = 0;
  for (const Block& b : partition.blocks) {
    const double mass = static_cast<double>(b.count) / total;
    if (mass >= eta && b.classes.size() != 1) return false;
    if (mass < eta / 2.0) ++below_half;
  }
  return below_half <= 1;
}

ModeEstimate truncated_search(QueryOracle& oracle, std::size_t m, const Schedule& schedule,
                              std::uint64_t max_rounds, const RoundObserver& observer) {
  require_classes(m);
  if (max_rounds == 0) throw Error(Errc::kInvalidArgument, "need at least one round");
  const std::uint64_t before = oracle.query_count();
  const std::vector<ClassIndex> all = iota_classes(m);
  CodeTree tree = CodeTree::balanced(all);

  ModeEstimate est;
  std::uint64_t next = 0;
  std::vector<std::uint64_t> idx;
  for (std::uint64_t r = 1; r <= max_rounds; ++r) {
    const std::uint64_t n_r = schedule.round_size(r);
    idx.resize(n_r);
    for (std::uint64_t k = 0; k < n_r; ++k) idx[k] = next + k;
    next += n_r;
    RebalanceResult res = batch_tree_rebalance(oracle, idx, tree, 1.0, schedule.slack(r, m));
    est.mode = res.mode;
    est.rounds = r;
    if (observer) {
      RoundInfo info;
      info.round = r;
      info.samples = n_r;
      info.live_samples = n_r;
      info.queries = res.queries;
      info.mode = res.mode;
      info.eta = res.eta;
      info.partition = &res.partition;
      info.block_depths = res.block_depths;
      observer(info);
    }
  }
  est.queries_used = oracle.query_count() - before;
  est.queries_paper = est.queries_used;
  est.samples_used = next;
  return est;
}

double elimination_radius(double c, double max_p, std::uint64_t r, std::size_t m, double delta) {
  const double rr = static_cast<double>(r);
  const double log_term =
      std::log(std::numbers::pi * std::numbers::pi * static_cast<double>(m) * rr * rr / delta);
  return std::sqrt(c * max_p * log_term / rr);
}

ModeEstimate elimination(QueryOracle& oracle, std::size_t m, double delta, double c,
                         std::optional<std::uint64_t> query_cap) {
  require_classes(m);
  require_delta(delta);
  const std::uint64_t before = oracle.query_count();
  std::vector<Count> counts(m, 0);
  std::vector<std::uint8_t> live(m, 1);
  std::size_t live_count = m;
  ClassSet eliminated(m);
  CodeTree tree = CodeTree::fresh(m);
  std::vector<ClassIndex> scratch;

  ModeEstimate est;
  std::uint64_t r = 0;
  std::uint64_t skipped = 0;
  while (live_count > 1) {
    if (query_cap && oracle.query_count() - before >= *query_cap) {
      est.terminated = false;
      break;
    }
    const std::uint64_t j = r++;
    if (eliminated.empty()) {
      ++skipped;
    } else if (oracle.query(j, eliminated)) {
      continue;
    }
    const ClassIndex y = identify(oracle, j, tree, m, scratch);
    tree.observe(y);
    ++counts[y];

    Count top = 0;
    for (std::size_t z = 0; z < m; ++z) {
      if (live[z]) top = std::max(top, counts[z]);
    }
    const double radius_counts =
        elimination_radius(c, static_cast<double>(top) / static_cast<double>(r), r, m, delta) *
        static_cast<double>(r);
    bool changed = false;
    for (std::size_t z = 0; z < m; ++z) {
      if (live[z] && static_cast<double>(counts[z]) + radius_counts < static_cast<double>(top)) {
        live[z] = 0;
        --live_count;
        eliminated.insert(static_cast<ClassIndex>(z));
        changed = true;
      }
    }
    if (changed && live_count > 1) {
      std::map<ClassIndex, Count> seen;
      std::vector<ClassIndex> unseen;
      for (std::size_t z = 0; z < m; ++z) {
        if (!live[z]) continue;
        if (counts[z] > 0) {
          seen[static_cast<ClassIndex>(z)] = counts[z];
        } else {
          unseen.push_back(static_cast<ClassIndex>(z));
        }
      }
      tree = CodeTree::build_adaptive(seen, unseen);
    }
  }

  Count best = 0;
  est.mode = kNoClass;
  for (std::size_t z = 0; z < m; ++z) {
    if (live[z] && (est.mode == kNoClass || counts[z] > best)) {
      est.mode = static_cast<ClassIndex>(z);
      best = counts[z];
    }
  }
  est.queries_used = oracle.query_count() - before;
  est.queries_paper = est.queries_used + skipped;
  est.samples_used = r;
  est.rounds = r;
  return est;
}

ModeEstimate set_elimination(QueryOracle& oracle, std::size_t m, double delta, const Schedule& schedule,
                             std::uint64_t max_rounds, std::optional<std::uint64_t> query_cap,
                             const RoundObserver& observer) {
  require_classes(m);
  require_delta(delta);
  if (max_rounds == 0) throw Error(Errc::kInvalidArgument, "need at least one round");
  const std::uint64_t before = oracle.query_count();
  const std::vector<ClassIndex> all = iota_classes(m);
  CodeTree tree = CodeTree::balanced(all);
  ClassSet eliminated(m);
  std::size_t live_count = m;

  ModeEstimate est;
  est.terminated = false;
  bool have_mode = false;
  std::uint64_t next = 0;
  std::uint64_t skipped = 0;
  std::vector<std::uint64_t> idx;
  for (std::uint64_t r = 1; r <= max_rounds; ++r) {
    if (live_count <= 1) break;
    if (query_cap && oracle.query_count() - before >= *query_cap) break;
    const std::uint64_t n_r = schedule.round_size(r);
    const std::uint64_t round_start = oracle.query_count();
    idx.clear();
    for (std::uint64_t k = 0; k < n_r; ++k) {
      const std::uint64_t j = next + k;
      if (eliminated.empty()) {
        ++skipped;
        idx.push_back(j);
      } else if (!oracle.query(j, eliminated)) {
        idx.push_back(j);
      }
    }
    next += n_r;
    est.rounds = r;

    RoundInfo info;
    info.round = r;
    info.samples = n_r;
    info.live_samples = idx.size();
    if (idx.empty()) {
      info.queries = oracle.query_count() - round_start;
      info.mode = est.mode;
      if (observer) observer(info);
      continue;
    }

    const double live_mass = static_cast<double>(idx.size()) / static_cast<double>(n_r);
    RebalanceResult res = batch_tree_rebalance(oracle, idx, tree, 0.5, schedule.slack(r, m) / live_mass);
    est.mode = res.mode;
    have_mode = true;

    Count top = 0;
    for (const Block& b : res.partition.blocks) {
      if (b.classes.size() == 1 && b.classes.front() == res.mode) top = b.count;
    }
    const double radius_counts =
        elimination_radius(schedule.c, static_cast<double>(top) / static_cast<double>(n_r), n_r, m, delta) *
        static_cast<double>(n_r);
    std::vector<std::pair<VertexId, Count>> survivors;
    std::vector<std::size_t> survivor_depths;
    for (std::size_t b = 0; b < res.partition.blocks.size(); ++b) {
      const Block& blk = res.partition.blocks[b];
      if (static_cast<double>(blk.count) + radius_counts < static_cast<double>(top)) {
        for (ClassIndex y : blk.classes) eliminated.insert(y);
        live_count -= blk.classes.size();
      } else {
        survivors.emplace_back(blk.node, blk.count);
      }
    }
    if (survivors.size() < res.partition.blocks.size()) tree.rebuild_top(survivors);
    for (const auto& [v, c] : survivors) survivor_depths.push_back(tree.depth(v));

    info.queries = oracle.query_count() - round_start;
    info.mode = res.mode;
    info.eta = res.eta;
    info.partition = &res.partition;
    info.block_depths = std::move(survivor_depths);
    if (observer) observer(info);
  }
  if (live_count <= 1) {
    est.terminated = true;
    for (ClassIndex y = 0; y < m; ++y) {
      if (!eliminated.contains(y)) est.mode = y;
    }
  } else if (!have_mode) {
    est.mode = 0;
  }
  est.queries_used = oracle.query_count() - before;
  est.queries_paper = est.queries_used + skipped;
  est.samples_used = next;
  return est;
}

}  // namespace mepf
