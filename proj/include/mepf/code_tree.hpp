#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mepf/types.hpp"

namespace mepf {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr ClassIndex kNoClass = std::numeric_limits<ClassIndex>::max();

/// Root-to-vertex path; true = right child.
struct VertexCode {
  std::vector<bool> bits;

  std::size_t size() const noexcept { return bits.size(); }
  std::string to_string() const;
  static VertexCode from_string(std::string_view text);
  friend bool operator==(const VertexCode&, const VertexCode&) = default;
};

struct Vertex {
  VertexId parent = kNoVertex;
  VertexId left = kNoVertex;
  VertexId right = kNoVertex;
  Count value = 0;
  ClassIndex leaf_class = kNoClass;
  std::uint64_t serial = 0;             // creation order, residual tie-break
  std::uint32_t slot = kUnnumbered;     // position in the sibling numbering
  bool alive = false;

  static constexpr std::uint32_t kUnnumbered = std::numeric_limits<std::uint32_t>::max();

  bool is_leaf() const noexcept { return left == kNoVertex; }
};

/// Arena-backed binary code tree over classes 0..universe-1.
///
/// Supports batch Huffman construction, Vitter-style incremental updates with a
/// "not yet observed" (NYT) subtree for zero-count classes, and top-of-tree
/// rebuilding used by the batch rebalancing of the truncated estimators.
///
/// Incremental updates rely on a sibling numbering (slots) that lists the
/// observed part of the tree in non-decreasing (value, leaf-before-node) order,
/// siblings paired at slots (2i, 2i+1). The NYT subtree occupies slot 0 as a
/// single zero-weight entry.
class CodeTree {
 public:
  CodeTree() = default;

  /// Huffman tree on positive counts (Algorithm "pop two smallest").
  /// First pop becomes the left child.
  static CodeTree build_huffman(const std::map<ClassIndex, Count>& counts);

  /// Huffman tree over the positive counts plus an NYT subtree for every
  /// class listed in `unobserved`. Either part may be empty, not both.
  static CodeTree build_adaptive(const std::map<ClassIndex, Count>& counts,
                                 std::span<const ClassIndex> unobserved);

  /// All classes 0..m-1 unobserved: the tree is a single NYT subtree.
  static CodeTree fresh(std::size_t m);

  /// Left-complete tree over the given classes (in index order), zero values.
  static CodeTree balanced(std::span<const ClassIndex> classes);

  /// +1 to the class's count with the sibling-property cascade.
  /// Throws kUnknownClass if the class has no observed leaf.
  void increment(ClassIndex y);

  /// Moves an unobserved class out of the NYT subtree with count 1.
  /// Throws kAlreadyObserved / kUnknownClass.
  void insert_new_symbol(ClassIndex y);

  /// increment() or insert_new_symbol() depending on the class state.
  void observe(ClassIndex y);

  VertexCode code_of(ClassIndex y) const;
  /// Walks the code from the root; returns the class of the reached leaf or
  /// kNoClass if the walk ends on an internal vertex or falls off the tree.
  ClassIndex decode(const VertexCode& code) const;

  /// depth(V) <= c * ceil(log2(root / v(V))) for every vertex with v(V) > 0.
  /// Throws kZeroRootValue.
  bool check_balanced(double c) const;

  // --- structure access -------------------------------------------------
  VertexId root() const noexcept { return root_; }
  const Vertex& vertex(VertexId v) const { return arena_[v]; }
  VertexId nyt() const noexcept { return nyt_; }
  std::size_t universe() const noexcept { return leaf_of_class_.size(); }
  bool contains(ClassIndex y) const noexcept;
  bool is_observed(ClassIndex y) const noexcept;
  VertexId leaf_of(ClassIndex y) const;
  std::size_t depth(VertexId v) const;
  std::size_t leaf_count() const noexcept { return leaf_count_; }
  /// Upper bound on vertex ids, for id-indexed side tables.
  std::size_t id_bound() const noexcept { return arena_.size(); }
  Count count(ClassIndex y) const;

  /// Classes of the leaves below v, ascending.
  std::vector<ClassIndex> classes_under(VertexId v) const;
  void classes_under(VertexId v, std::vector<ClassIndex>& out) const;

  /// Sum over observed leaves of count * depth.
  Count weighted_path_length() const;

  struct Merge {
    VertexId left;
    VertexId right;
    VertexId node;
  };

  /// Replaces everything above `blocks` by a Huffman merge of the blocks with
  /// the given values. Subtrees under the blocks are kept as they are; their
  /// internal values become stale. Classes not under any block are dropped
  /// from the tree. Disables incremental updates. Returns the merges in order.
  std::vector<Merge> rebuild_top(std::span<const std::pair<VertexId, Count>> blocks);

  /// Structural and bookkeeping invariants; returns a description of the first
  /// violation, or an empty string.
  std::string validate() const;

  /// True iff listing numbered vertices bottom-up, left-to-right never places
  /// a vertex after one that should come later under (value, leaf<node).
  bool ordering_compatible() const;

  /// Indented rendering, left child first: "Node: 31" / "Leaf: 14 (y1)".
  std::string dump() const;

 private:
  VertexId alloc(Count value, ClassIndex leaf_class);
  void release(VertexId v);
  void release_subtree(VertexId v);
  void attach(VertexId parent, bool right_side, VertexId child);

  struct HeapItem {
    VertexId id;
    Count value;
  };
  // Merges items by the node ordering, returns the root; `pop_order` receives
  // the vertices in pop order followed by the root.
  VertexId huffman_merge(std::vector<HeapItem> items, std::vector<VertexId>* pop_order,
                         std::vector<Merge>* merges = nullptr);

  VertexId build_complete(std::span<const ClassIndex> classes);
  bool leaf_kind(VertexId v) const noexcept { return arena_[v].is_leaf() || v == nyt_; }
  bool key_less(VertexId a, VertexId b) const noexcept;
  bool same_key(VertexId a, VertexId b) const noexcept;
  std::uint32_t block_leader_slot(std::uint32_t slot) const;
  // Re-seats `occupants` into the tree positions of slots first..first+n-1.
  void place(std::uint32_t first, std::span<const VertexId> occupants);
  VertexId slide_and_increment(VertexId p);
  void cascade(VertexId q, VertexId leaf_to_increment);
  void number(std::vector<VertexId> order);

  std::vector<Vertex> arena_;
  std::vector<VertexId> free_;
  std::vector<VertexId> leaf_of_class_;
  std::vector<std::uint8_t> observed_;
  std::vector<VertexId> order_;  // slot -> vertex
  VertexId root_ = kNoVertex;
  VertexId nyt_ = kNoVertex;
  std::uint64_t next_serial_ = 0;
  std::size_t leaf_count_ = 0;
  bool numbered_ = false;
  std::vector<VertexId> frontier_;  // blocks from the last rebuild_top
};

}  // namespace mepf
