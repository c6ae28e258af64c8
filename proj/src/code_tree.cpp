#include "mepf/code_tree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "mepf/error.hpp"

namespace mepf {

std::string VertexCode::to_string() const {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

VertexCode VertexCode::from_string(std::string_view text) {
  VertexCode c;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw Error(Errc::kInvalidArgument, "code must be 0/1 digits");
    c.bits.push_back(ch == '1');
  }
  return c;
}

VertexId CodeTree::alloc(Count value, ClassIndex leaf_class) {
  VertexId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<VertexId>(arena_.size());
    arena_.emplace_back();
  }
  Vertex& v = arena_[id];
  v = Vertex{};
  v.value = value;
  v.leaf_class = leaf_class;
  v.serial = next_serial_++;
  v.alive = true;
  if (leaf_class != kNoClass) {
    if (leaf_class >= leaf_of_class_.size()) {
      leaf_of_class_.resize(leaf_class + 1, kNoVertex);
      observed_.resize(leaf_class + 1, 0);
    }
    leaf_of_class_[leaf_class] = id;
    ++leaf_count_;
  }
  return id;
}

void CodeTree::release(VertexId v) {
  Vertex& x = arena_[v];
  if (x.leaf_class != kNoClass) {
    if (leaf_of_class_[x.leaf_class] == v) {
      leaf_of_class_[x.leaf_class] = kNoVertex;
      observed_[x.leaf_class] = 0;
    }
    --leaf_count_;
  }
  x.alive = false;
  free_.push_back(v);
}

void CodeTree::release_subtree(VertexId v) {
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    if (!arena_[u].is_leaf()) {
      stack.push_back(arena_[u].left);
      stack.push_back(arena_[u].right);
    }
    release(u);
  }
}

void CodeTree::attach(VertexId parent, bool right_side, VertexId child) {
  arena_[child].parent = parent;
  if (parent == kNoVertex) {
    root_ = child;
    return;
  }
  (right_side ? arena_[parent].right : arena_[parent].left) = child;
}

bool CodeTree::key_less(VertexId a, VertexId b) const noexcept {
  const Vertex& x = arena_[a];
  const Vertex& y = arena_[b];
  if (x.value != y.value) return x.value < y.value;
  const bool xl = leaf_kind(a);
  const bool yl = leaf_kind(b);
  if (xl != yl) return xl;
  return false;
}

bool CodeTree::same_key(VertexId a, VertexId b) const noexcept {
  return !key_less(a, b) && !key_less(b, a);
}

VertexId CodeTree::huffman_merge(std::vector<HeapItem> items, std::vector<VertexId>* pop_order,
                                 std::vector<Merge>* merges) {
  // Min-heap under the node ordering; residual ties: lowest class for leaves,
  // earliest serial for nodes.
  auto later = [this](const HeapItem& a, const HeapItem& b) {
    if (a.value != b.value) return a.value > b.value;
    const bool al = leaf_kind(a.id);
    const bool bl = leaf_kind(b.id);
    if (al != bl) return bl;
    const Vertex& x = arena_[a.id];
    const Vertex& y = arena_[b.id];
    if (al && x.leaf_class != y.leaf_class) return x.leaf_class > y.leaf_class;
    return x.serial > y.serial;
  };
  for (const HeapItem& it : items) {
    arena_[it.id].value = it.value;
    arena_[it.id].parent = kNoVertex;
  }
  std::priority_queue<HeapItem, std::vector<HeapItem>, decltype(later)> heap(later, std::move(items));
  while (heap.size() > 1) {
    const HeapItem a = heap.top();
    heap.pop();
    const HeapItem b = heap.top();
    heap.pop();
    const VertexId node = alloc(a.value + b.value, kNoClass);
    attach(node, false, a.id);
    attach(node, true, b.id);
    if (pop_order) {
      pop_order->push_back(a.id);
      pop_order->push_back(b.id);
    }
    if (merges) merges->push_back({a.id, b.id, node});
    heap.push({node, a.value + b.value});
  }
  const VertexId top = heap.top().id;
  arena_[top].parent = kNoVertex;
  root_ = top;
  if (pop_order) pop_order->push_back(top);
  return top;
}

VertexId CodeTree::build_complete(std::span<const ClassIndex> classes) {
  // Heap layout 1..2k-1, leaves are k..2k-1; in-order leaves get the classes
  // in ascending order so deeper leaves sit on the left.
  const std::size_t k = classes.size();
  std::vector<VertexId> ids(2 * k);
  std::size_t next_class = 0;
  std::vector<ClassIndex> sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());

  // Iterative in-order walk to assign classes; vertices are created on the way.
  struct Frame {
    std::size_t idx;
    bool expanded;
  };
  std::vector<Frame> stack{{1, false}};
  std::vector<std::size_t> inorder_leaves;
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.idx >= k) {
      inorder_leaves.push_back(f.idx);
      continue;
    }
    if (!f.expanded) {
      stack.push_back({2 * f.idx + 1, false});
      stack.push_back({f.idx, true});
      stack.push_back({2 * f.idx, false});
    }
  }
  std::vector<ClassIndex> class_of(2 * k, kNoClass);
  for (std::size_t idx : inorder_leaves) class_of[idx] = sorted[next_class++];

  for (std::size_t idx = 2 * k - 1; idx >= 1; --idx) {
    if (idx >= k) {
      ids[idx] = alloc(0, class_of[idx]);
    } else {
      ids[idx] = alloc(0, kNoClass);
      attach(ids[idx], false, ids[2 * idx]);
      attach(ids[idx], true, ids[2 * idx + 1]);
    }
  }
  arena_[ids[1]].parent = kNoVertex;
  return ids[1];
}

void CodeTree::number(std::vector<VertexId> order) {
  order_ = std::move(order);
  for (std::uint32_t s = 0; s < order_.size(); ++s) arena_[order_[s]].slot = s;
  numbered_ = true;
}

CodeTree CodeTree::build_huffman(const std::map<ClassIndex, Count>& counts) {
  if (counts.empty()) throw Error(Errc::kEmptyInput, "no classes");
  for (const auto& [y, c] : counts) {
    if (c == 0) throw Error(Errc::kNonPositiveCount, "count for class " + std::to_string(y));
  }
  return build_adaptive(counts, {});
}

CodeTree CodeTree::build_adaptive(const std::map<ClassIndex, Count>& counts,
                                  std::span<const ClassIndex> unobserved) {
  if (counts.empty() && unobserved.empty()) throw Error(Errc::kEmptyInput, "no classes");
  CodeTree t;
  std::vector<HeapItem> items;
  items.reserve(counts.size() + 1);
  for (const auto& [y, c] : counts) {
    if (c == 0) throw Error(Errc::kNonPositiveCount, "count for class " + std::to_string(y));
    const VertexId leaf = t.alloc(c, y);
    t.observed_[y] = 1;
    items.push_back({leaf, c});
  }
  if (!unobserved.empty()) {
    for (ClassIndex y : unobserved) {
      if (counts.count(y)) throw Error(Errc::kInvalidArgument, "class both observed and unobserved");
    }
    t.nyt_ = t.build_complete(unobserved);
    items.push_back({t.nyt_, 0});
  }
  std::vector<VertexId> order;
  order.reserve(2 * items.size());
  t.huffman_merge(std::move(items), &order);
  t.number(std::move(order));
  return t;
}

CodeTree CodeTree::fresh(std::size_t m) {
  std::vector<ClassIndex> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = static_cast<ClassIndex>(i);
  return build_adaptive({}, all);
}

CodeTree CodeTree::balanced(std::span<const ClassIndex> classes) {
  if (classes.empty()) throw Error(Errc::kEmptyInput, "no classes");
  CodeTree t;
  t.root_ = t.build_complete(classes);
  return t;
}

bool CodeTree::contains(ClassIndex y) const noexcept {
  return y < leaf_of_class_.size() && leaf_of_class_[y] != kNoVertex;
}

bool CodeTree::is_observed(ClassIndex y) const noexcept {
  return contains(y) && observed_[y] != 0;
}

VertexId CodeTree::leaf_of(ClassIndex y) const {
  if (!contains(y)) throw Error(Errc::kUnknownClass, "class " + std::to_string(y));
  return leaf_of_class_[y];
}

Count CodeTree::count(ClassIndex y) const { return arena_[leaf_of(y)].value; }

std::size_t CodeTree::depth(VertexId v) const {
  std::size_t d = 0;
  while (arena_[v].parent != kNoVertex) {
    v = arena_[v].parent;
    ++d;
  }
  return d;
}

void CodeTree::classes_under(VertexId v, std::vector<ClassIndex>& out) const {
  out.clear();
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    const Vertex& x = arena_[u];
    if (x.is_leaf()) {
      out.push_back(x.leaf_class);
    } else {
      stack.push_back(x.left);
      stack.push_back(x.right);
    }
  }
  std::sort(out.begin(), out.end());
}

std::vector<ClassIndex> CodeTree::classes_under(VertexId v) const {
  std::vector<ClassIndex> out;
  classes_under(v, out);
  return out;
}

VertexCode CodeTree::code_of(ClassIndex y) const {
  VertexId v = leaf_of(y);
  VertexCode c;
  while (arena_[v].parent != kNoVertex) {
    const VertexId p = arena_[v].parent;
    c.bits.push_back(arena_[p].right == v);
    v = p;
  }
  std::reverse(c.bits.begin(), c.bits.end());
  return c;
}

ClassIndex CodeTree::decode(const VertexCode& code) const {
  VertexId v = root_;
  for (bool bit : code.bits) {
    if (arena_[v].is_leaf()) return kNoClass;
    v = bit ? arena_[v].right : arena_[v].left;
  }
  return arena_[v].is_leaf() ? arena_[v].leaf_class : kNoClass;
}

Count CodeTree::weighted_path_length() const {
  Count total = 0;
  std::vector<std::pair<VertexId, Count>> stack{{root_, 0}};
  while (!stack.empty()) {
    const auto [u, d] = stack.back();
    stack.pop_back();
    const Vertex& x = arena_[u];
    if (x.is_leaf()) {
      total += x.value * d;
    } else {
      stack.push_back({x.left, d + 1});
      stack.push_back({x.right, d + 1});
    }
  }
  return total;
}

bool CodeTree::check_balanced(double c) const {
  const Count total = arena_[root_].value;
  if (total == 0) throw Error(Errc::kZeroRootValue, "root value is zero");
  std::vector<std::pair<VertexId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    const auto [u, d] = stack.back();
    stack.pop_back();
    const Vertex& x = arena_[u];
    if (x.value > 0) {
      // smallest k with value * 2^k >= total, i.e. ceil(log2(total / value))
      unsigned k = 0;
      unsigned __int128 scaled = x.value;
      while (scaled < total) {
        scaled <<= 1;
        ++k;
      }
      if (static_cast<double>(d) > c * static_cast<double>(k)) return false;
    }
    if (!x.is_leaf()) {
      stack.push_back({x.left, d + 1});
      stack.push_back({x.right, d + 1});
    }
  }
  return true;
}

// --- incremental updates ------------------------------------------------

std::uint32_t CodeTree::block_leader_slot(std::uint32_t slot) const {
  const VertexId v = order_[slot];
  auto it = std::upper_bound(order_.begin() + slot, order_.end(), v,
                             [this](VertexId a, VertexId b) { return key_less(a, b); });
  return static_cast<std::uint32_t>(it - order_.begin()) - 1;
}

void CodeTree::place(std::uint32_t first, std::span<const VertexId> occupants) {
  struct Seat {
    VertexId parent;
    bool right;
  };
  std::vector<Seat> seats(occupants.size());
  for (std::size_t k = 0; k < occupants.size(); ++k) {
    const VertexId cur = order_[first + k];
    const VertexId p = arena_[cur].parent;
    seats[k] = {p, p != kNoVertex && arena_[p].right == cur};
  }
  for (std::size_t k = 0; k < occupants.size(); ++k) {
    const VertexId w = occupants[k];
    order_[first + k] = w;
    arena_[w].slot = static_cast<std::uint32_t>(first + k);
    attach(seats[k].parent, seats[k].right, w);
  }
}

VertexId CodeTree::slide_and_increment(VertexId p) {
  const VertexId former_parent = arena_[p].parent;
  const Count wt = arena_[p].value;
  const std::uint32_t s = arena_[p].slot;
  const bool p_leaf = leaf_kind(p);
  if (s + 1 < order_.size()) {
    const VertexId b = order_[s + 1];
    const bool b_leaf = leaf_kind(b);
    const bool slide = (!p_leaf && b_leaf && arena_[b].value == wt + 1) ||
                       (p_leaf && !b_leaf && arena_[b].value == wt);
    if (slide) {
      const std::uint32_t j = block_leader_slot(s + 1);
      std::vector<VertexId> occupants(order_.begin() + s + 1, order_.begin() + j + 1);
      occupants.push_back(p);
      place(s, occupants);
    }
  }
  arena_[p].value = wt + 1;
  return p_leaf ? arena_[p].parent : former_parent;
}

void CodeTree::cascade(VertexId q, VertexId leaf_to_increment) {
  while (q != root_) q = slide_and_increment(q);
  arena_[root_].value += 1;
  if (leaf_to_increment != kNoVertex) slide_and_increment(leaf_to_increment);
}

void CodeTree::increment(ClassIndex y) {
  if (!is_observed(y)) throw Error(Errc::kUnknownClass, "class " + std::to_string(y) + " not observed");
  if (!numbered_) throw Error(Errc::kInvalidArgument, "tree does not support incremental updates");
  VertexId q = leaf_of_class_[y];

  const std::uint32_t leader = block_leader_slot(arena_[q].slot);
  if (leader != arena_[q].slot) {
    const VertexId other = order_[leader];
    const std::uint32_t qs = arena_[q].slot;
    // Two seats, each gets the other's occupant.
    const VertexId pair_a[] = {other};
    const VertexId pair_b[] = {q};
    // Seats must be captured before either move; place() handles one range at
    // a time, so swap through the generic path with a two-element view.
    struct Seat {
      VertexId parent;
      bool right;
    };
    auto seat_of = [this](VertexId v) {
      const VertexId p = arena_[v].parent;
      return Seat{p, p != kNoVertex && arena_[p].right == v};
    };
    const Seat sq = seat_of(q);
    const Seat so = seat_of(other);
    (void)pair_a;
    (void)pair_b;
    order_[qs] = other;
    arena_[other].slot = qs;
    order_[leader] = q;
    arena_[q].slot = leader;
    attach(sq.parent, sq.right, other);
    attach(so.parent, so.right, q);
  }

  VertexId leaf_to_increment = kNoVertex;
  if (nyt_ != kNoVertex) {
    const VertexId p = arena_[q].parent;
    if (p != kNoVertex && (arena_[p].left == nyt_ || arena_[p].right == nyt_)) {
      leaf_to_increment = q;
      q = p;
    }
  }
  cascade(q, leaf_to_increment);
}

void CodeTree::insert_new_symbol(ClassIndex y) {
  if (!contains(y)) throw Error(Errc::kUnknownClass, "class " + std::to_string(y));
  if (is_observed(y)) throw Error(Errc::kAlreadyObserved, "class " + std::to_string(y));
  if (!numbered_) throw Error(Errc::kInvalidArgument, "tree does not support incremental updates");

  std::vector<ClassIndex> remaining = classes_under(nyt_);
  remaining.erase(std::remove(remaining.begin(), remaining.end(), y), remaining.end());

  const VertexId old = nyt_;
  const VertexId parent = arena_[old].parent;
  const bool right = parent != kNoVertex && arena_[parent].right == old;
  release_subtree(old);
  nyt_ = kNoVertex;

  const VertexId leaf = alloc(0, y);
  observed_[y] = 1;

  if (remaining.empty()) {
    attach(parent, right, leaf);
    order_[0] = leaf;
    arena_[leaf].slot = 0;
    cascade(leaf, kNoVertex);
    return;
  }

  nyt_ = build_complete(remaining);
  const VertexId node = alloc(0, kNoClass);
  attach(node, false, nyt_);
  attach(node, true, leaf);
  attach(parent, right, node);

  std::vector<VertexId> order;
  order.reserve(order_.size() + 2);
  order.push_back(nyt_);
  order.push_back(leaf);
  order.push_back(node);
  order.insert(order.end(), order_.begin() + 1, order_.end());
  number(std::move(order));
  cascade(node, leaf);
}

void CodeTree::observe(ClassIndex y) {
  if (is_observed(y)) {
    increment(y);
  } else {
    insert_new_symbol(y);
  }
}

// --- batch top rebuild --------------------------------------------------

std::vector<CodeTree::Merge> CodeTree::rebuild_top(std::span<const std::pair<VertexId, Count>> blocks) {
  if (blocks.empty()) throw Error(Errc::kEmptyInput, "no blocks");
  if (nyt_ != kNoVertex) throw Error(Errc::kInvalidArgument, "rebuild_top on a tree with an NYT subtree");

  std::vector<std::uint8_t> is_block(arena_.size(), 0);
  for (const auto& [v, c] : blocks) {
    if (v >= arena_.size() || !arena_[v].alive) throw Error(Errc::kInvalidArgument, "dead block vertex");
    is_block[v] = 1;
  }

  // Release everything that is not inside a block subtree.
  std::vector<VertexId> stack{root_};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    if (is_block[u]) continue;
    if (!arena_[u].is_leaf()) {
      stack.push_back(arena_[u].left);
      stack.push_back(arena_[u].right);
    }
    release(u);
  }

  std::vector<HeapItem> items;
  items.reserve(blocks.size());
  for (const auto& [v, c] : blocks) items.push_back({v, c});
  std::vector<Merge> merges;
  merges.reserve(blocks.size());
  huffman_merge(std::move(items), nullptr, &merges);

  numbered_ = false;
  order_.clear();
  for (Vertex& x : arena_) x.slot = Vertex::kUnnumbered;
  frontier_.clear();
  for (const auto& [v, c] : blocks) frontier_.push_back(v);
  return merges;
}

// --- checks -------------------------------------------------------------

std::string CodeTree::validate() const {
  if (root_ == kNoVertex) return "no root";
  if (arena_[root_].parent != kNoVertex) return "root has a parent";

  std::vector<std::uint8_t> below_frontier(arena_.size(), 0);
  for (VertexId f : frontier_) {
    if (!arena_[f].alive || arena_[f].is_leaf()) continue;
    below_frontier[f] = 1;  // block value, stale children
    std::vector<VertexId> st{arena_[f].left, arena_[f].right};
    while (!st.empty()) {
      const VertexId u = st.back();
      st.pop_back();
      below_frontier[u] = 1;
      if (!arena_[u].is_leaf()) {
        st.push_back(arena_[u].left);
        st.push_back(arena_[u].right);
      }
    }
  }

  std::size_t reachable = 0;
  std::size_t leaves = 0;
  std::vector<std::uint8_t> seen_class(leaf_of_class_.size(), 0);
  std::vector<VertexId> stack{root_};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    const Vertex& x = arena_[u];
    ++reachable;
    if (!x.alive) return "dead vertex reachable: " + std::to_string(u);
    if ((x.left == kNoVertex) != (x.right == kNoVertex)) return "vertex with one child: " + std::to_string(u);
    if (x.is_leaf()) {
      ++leaves;
      if (x.leaf_class == kNoClass) return "leaf without class";
      if (x.leaf_class >= leaf_of_class_.size() || leaf_of_class_[x.leaf_class] != u) {
        return "leaf_of_class mismatch for class " + std::to_string(x.leaf_class);
      }
      if (seen_class[x.leaf_class]++) return "duplicate class leaf";
    } else {
      if (x.leaf_class != kNoClass) return "internal vertex carries a class";
      for (VertexId c : {x.left, x.right}) {
        if (arena_[c].parent != u) return "child/parent link mismatch at " + std::to_string(u);
        stack.push_back(c);
      }
      if (!below_frontier[u] && x.value != arena_[x.left].value + arena_[x.right].value) {
        return "value is not the sum of children at vertex " + std::to_string(u);
      }
    }
  }
  std::size_t alive = 0;
  for (const Vertex& x : arena_) alive += x.alive ? 1 : 0;
  if (alive != reachable) return "unreachable live vertices";
  if (leaves != leaf_count_) return "leaf count mismatch";
  for (std::size_t y = 0; y < leaf_of_class_.size(); ++y) {
    if (leaf_of_class_[y] != kNoVertex && !seen_class[y]) return "class mapped to unreachable leaf";
  }

  if (numbered_) {
    for (std::uint32_t s = 0; s < order_.size(); ++s) {
      const VertexId v = order_[s];
      if (!arena_[v].alive || arena_[v].slot != s) return "slot bookkeeping broken at " + std::to_string(s);
      if (s > 0 && key_less(v, order_[s - 1])) return "numbering not sorted at slot " + std::to_string(s);
    }
    if (order_.back() != root_) return "root is not the last slot";
    for (std::uint32_t s = 0; s + 1 < order_.size(); s += 2) {
      const VertexId a = order_[s];
      const VertexId b = order_[s + 1];
      if (arena_[a].parent != arena_[b].parent || arena_[a].parent == kNoVertex) {
        return "slots " + std::to_string(s) + "/" + std::to_string(s + 1) + " are not siblings";
      }
    }
    std::size_t numbered_expected = reachable;
    if (nyt_ != kNoVertex) {
      std::vector<ClassIndex> tmp;
      classes_under(nyt_, tmp);
      numbered_expected -= 2 * tmp.size() - 2;
    }
    if (order_.size() != numbered_expected) return "numbering does not cover the observed tree";
  }
  return {};
}

bool CodeTree::ordering_compatible() const {
  struct Entry {
    std::size_t depth;
    std::vector<bool> code;
    VertexId id;
  };
  std::vector<Entry> entries;
  std::vector<Entry> stack{{0, {}, root_}};
  while (!stack.empty()) {
    Entry e = std::move(stack.back());
    stack.pop_back();
    const Vertex& x = arena_[e.id];
    if (!x.is_leaf() && e.id != nyt_) {
      Entry l{e.depth + 1, e.code, x.left};
      l.code.push_back(false);
      Entry r{e.depth + 1, e.code, x.right};
      r.code.push_back(true);
      stack.push_back(std::move(l));
      stack.push_back(std::move(r));
    }
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.code < b.code;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (key_less(entries[i].id, entries[i - 1].id)) return false;
  }
  return true;
}

std::string CodeTree::dump() const {
  std::ostringstream out;
  std::vector<std::pair<VertexId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    const auto [u, d] = stack.back();
    stack.pop_back();
    const Vertex& x = arena_[u];
    out << std::string(2 * d, ' ');
    if (x.is_leaf()) {
      out << "Leaf: " << x.value << " (y" << x.leaf_class << ")";
    } else {
      out << "Node: " << x.value;
    }
    if (u == nyt_) out << " [NYT]";
    out << '\n';
    if (!x.is_leaf()) {
      stack.push_back({x.right, d + 1});
      stack.push_back({x.left, d + 1});
    }
  }
  return out.str();
}

}  // namespace mepf
