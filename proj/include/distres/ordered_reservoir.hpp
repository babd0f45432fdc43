/*
 * Copyright 2026 The distres Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "distres/errors.hpp"
#include "distres/keyed_item.hpp"

namespace distres {

/*!
 * Order-statistic B+ tree holding the local reservoir of one PE.
 *
 * Inner nodes store, per child, the subtree size and the largest element of
 * the subtree. The size annotations give rank and select in O(log n); the
 * maxima route insertions and key probes. Leaves are doubly linked.
 *
 * split_at_rank cuts the tree along one root-to-leaf path and glues the
 * pieces back together with height-aware joins, so it runs in O(log n) and
 * both halves satisfy the B+ tree fill invariant (every non-root node holds
 * between ceil(Degree/2) and Degree entries).
 */
template <std::size_t Degree = 16>
class BasicReservoir {
  static_assert(Degree >= 4, "B+ tree degree must be at least 4");

 public:
  static constexpr std::size_t kDegree = Degree;
  static constexpr std::size_t kMinFill = (Degree + 1) / 2;

  BasicReservoir() = default;
  ~BasicReservoir() { destroy(root_, height_); }

  BasicReservoir(BasicReservoir&& other) noexcept
      : root_(std::exchange(other.root_, nullptr)),
        height_(std::exchange(other.height_, 0)),
        size_(std::exchange(other.size_, 0)),
        visits_(other.visits_) {}

  BasicReservoir& operator=(BasicReservoir&& other) noexcept {
    if (this != &other) {
      destroy(root_, height_);
      root_ = std::exchange(other.root_, nullptr);
      height_ = std::exchange(other.height_, 0);
      size_ = std::exchange(other.size_, 0);
      visits_ = other.visits_;
    }
    return *this;
  }

  BasicReservoir(const BasicReservoir& other)
      : BasicReservoir(from_sorted(other.to_vector())) {}

  BasicReservoir& operator=(const BasicReservoir& other) {
    if (this != &other) *this = from_sorted(other.to_vector());
    return *this;
  }

  /// Bulk-loads a tree from items already sorted by the total order.
  static BasicReservoir from_sorted(std::span<const KeyedItem> items) {
    if (!std::is_sorted(items.begin(), items.end())) {
      throw RangeError("from_sorted requires sorted input");
    }
    BasicReservoir tree;
    if (items.empty()) return tree;

    std::vector<Node*> level;
    const auto leaf_sizes = even_groups(items.size());
    std::size_t offset = 0;
    Leaf* prev = nullptr;
    for (std::size_t n : leaf_sizes) {
      auto* leaf = new Leaf;
      std::copy_n(items.begin() + static_cast<std::ptrdiff_t>(offset), n,
                  leaf->items.begin());
      leaf->count = static_cast<std::uint16_t>(n);
      leaf->prev = prev;
      if (prev) prev->next = leaf;
      prev = leaf;
      offset += n;
      level.push_back(leaf);
    }
    std::size_t height = 0;
    while (level.size() > 1) {
      std::vector<Node*> parents;
      std::size_t pos = 0;
      for (std::size_t n : even_groups(level.size())) {
        auto* inner = new Inner;
        for (std::size_t i = 0; i < n; ++i) {
          set_entry(inner, i, level[pos + i]);
        }
        inner->count = static_cast<std::uint16_t>(n);
        pos += n;
        parents.push_back(inner);
      }
      level = std::move(parents);
      ++height;
    }
    tree.root_ = level.front();
    tree.height_ = height;
    tree.size_ = items.size();
    return tree;
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool empty() const { return size_ == 0; }
  /// Number of inner levels above the leaves.
  [[nodiscard]] std::size_t height() const { return height_; }

  void clear() {
    destroy(root_, height_);
    root_ = nullptr;
    height_ = 0;
    size_ = 0;
  }

  void insert(const KeyedItem& item) {
    if (!root_) {
      auto* leaf = new Leaf;
      leaf->items[0] = item;
      leaf->count = 1;
      root_ = leaf;
      height_ = 0;
      size_ = 1;
      ++visits_;
      return;
    }
    if (Node* sibling = insert_rec(root_, item)) {
      auto* root = new Inner;
      set_entry(root, 0, root_);
      set_entry(root, 1, sibling);
      root->count = 2;
      root_ = root;
      ++height_;
    }
    ++size_;
  }

  /// Element of 1-based rank `rank` under the total order.
  [[nodiscard]] const KeyedItem& select(std::size_t rank) const {
    if (rank < 1 || rank > size_) {
      throw RangeError("select: rank " + std::to_string(rank) +
                       " outside 1.." + std::to_string(size_));
    }
    const Node* node = root_;
    std::size_t r = rank;
    while (true) {
      ++visits_;
      if (node->is_leaf) return as_leaf(node)->items[r - 1];
      const Inner* inner = as_inner(node);
      std::size_t i = 0;
      while (r > inner->sizes[i]) {
        r -= inner->sizes[i];
        ++i;
      }
      node = inner->child[i];
    }
  }

  /// Number of stored elements strictly smaller than `probe`.
  [[nodiscard]] std::size_t rank_of(const KeyedItem& probe) const {
    return count_where([&](const KeyedItem& e) { return e < probe; });
  }

  /// Number of stored elements whose key is strictly below `key`; a bare key
  /// therefore ranks below every element carrying the same key.
  [[nodiscard]] std::size_t rank_of_key(double key) const {
    return count_where([&](const KeyedItem& e) { return e.key < key; });
  }

  /// Number of stored elements less than or equal to `probe`.
  [[nodiscard]] std::size_t count_le(const KeyedItem& probe) const {
    return count_where([&](const KeyedItem& e) { return !(probe < e); });
  }

  [[nodiscard]] const KeyedItem& min() const {
    if (empty()) throw RangeError("min of empty reservoir");
    return first_leaf(root_, height_)->items[0];
  }

  [[nodiscard]] const KeyedItem& max() const {
    if (empty()) throw RangeError("max of empty reservoir");
    return node_max(root_);
  }

  /// Splits into (the `rank` smallest elements, the rest). Leaves *this
  /// empty.
  [[nodiscard]] std::pair<BasicReservoir, BasicReservoir> split_at_rank(
      std::size_t rank) {
    if (rank > size_) {
      throw RangeError("split_at_rank: rank " + std::to_string(rank) +
                       " exceeds size " + std::to_string(size_));
    }
    BasicReservoir left;
    BasicReservoir right;
    const std::size_t total = size_;
    split_visits() = 0;
    Subtree whole{std::exchange(root_, nullptr), std::exchange(height_, 0)};
    size_ = 0;
    if (rank == 0) {
      right.adopt(whole, total);
    } else if (rank == total) {
      left.adopt(whole, total);
    } else {
      auto [l, r] = split_rec(whole, rank);
      Leaf* l_last = last_leaf(l.root, l.height);
      Leaf* r_first = first_leaf(r.root, r.height);
      l_last->next = nullptr;
      r_first->prev = nullptr;
      left.adopt(l, rank);
      right.adopt(r, total - rank);
    }
    left.visits_ = right.visits_ = visits_ + split_visits();
    return {std::move(left), std::move(right)};
  }

  /// Splits into (elements <= probe, elements > probe). Leaves *this empty.
  [[nodiscard]] std::pair<BasicReservoir, BasicReservoir> split_at_probe(
      const KeyedItem& probe) {
    return split_at_rank(count_le(probe));
  }

  /// Keeps only the `rank` smallest elements.
  void truncate(std::size_t rank) {
    if (rank >= size_) return;
    *this = split_at_rank(rank).first;
  }

  /// In-order contents, read off the leaf chain.
  [[nodiscard]] std::vector<KeyedItem> to_vector() const {
    std::vector<KeyedItem> out;
    out.reserve(size_);
    for_each([&](const KeyedItem& e) { out.push_back(e); });
    return out;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    if (!root_) return;
    for (const Leaf* leaf = first_leaf(root_, height_); leaf;
         leaf = leaf->next) {
      for (std::size_t i = 0; i < leaf->count; ++i) fn(leaf->items[i]);
    }
  }

  /// Nodes touched by insert/select/rank queries since the last reset.
  [[nodiscard]] std::uint64_t node_visits() const { return visits_; }
  void reset_node_visits() { visits_ = 0; }

  /// Walks the whole tree; returns an empty string when every structural
  /// invariant holds, otherwise a description of the first violation.
  [[nodiscard]] std::string check_invariants() const {
    std::ostringstream err;
    if (!root_) {
      if (size_ != 0 || height_ != 0) err << "empty root with nonzero size";
      return err.str();
    }
    std::vector<const Leaf*> leaves;
    const KeyedItem* prev = nullptr;
    const std::size_t counted =
        check_node(root_, height_, true, leaves, prev, err);
    if (!err.str().empty()) return err.str();
    if (counted != size_) {
      err << "size counter " << size_ << " but " << counted << " elements";
      return err.str();
    }
    const Leaf* walk = first_leaf(root_, height_);
    if (walk->prev != nullptr) err << "first leaf has a predecessor";
    for (std::size_t i = 0; i < leaves.size(); ++i, walk = walk->next) {
      if (walk != leaves[i]) {
        err << "leaf chain diverges from tree order at leaf " << i;
        return err.str();
      }
      if (i > 0 && walk->prev != leaves[i - 1]) {
        err << "broken prev link at leaf " << i;
        return err.str();
      }
    }
    if (walk != nullptr) err << "leaf chain continues past the last leaf";
    return err.str();
  }

 private:
  struct Node {
    explicit Node(bool leaf) : is_leaf(leaf) {}
    bool is_leaf;
    std::uint16_t count = 0;
  };

  // One spare slot absorbs the overflow before a node splits.
  struct Leaf : Node {
    Leaf() : Node(true) {}
    std::array<KeyedItem, Degree + 1> items;
    Leaf* prev = nullptr;
    Leaf* next = nullptr;
  };

  struct Inner : Node {
    Inner() : Node(false) {}
    std::array<Node*, Degree + 1> child{};
    std::array<std::size_t, Degree + 1> sizes{};
    std::array<KeyedItem, Degree + 1> maxes;
  };

  struct Subtree {
    Node* root = nullptr;
    std::size_t height = 0;
    [[nodiscard]] bool empty() const { return root == nullptr; }
  };

  static Leaf* as_leaf(Node* n) { return static_cast<Leaf*>(n); }
  static const Leaf* as_leaf(const Node* n) {
    return static_cast<const Leaf*>(n);
  }
  static Inner* as_inner(Node* n) { return static_cast<Inner*>(n); }
  static const Inner* as_inner(const Node* n) {
    return static_cast<const Inner*>(n);
  }

  static void destroy(Node* node, std::size_t height) {
    if (!node) return;
    if (node->is_leaf) {
      delete as_leaf(node);
      return;
    }
    Inner* inner = as_inner(node);
    for (std::size_t i = 0; i < inner->count; ++i) {
      destroy(inner->child[i], height - 1);
    }
    delete inner;
  }

  // Splits m entries into ceil(m / Degree) groups of near-equal size. Each
  // group has at least ceil(Degree / 2) entries whenever there are two or
  // more groups.
  static std::vector<std::size_t> even_groups(std::size_t m) {
    const std::size_t groups = (m + Degree - 1) / Degree;
    std::vector<std::size_t> out(groups, m / groups);
    for (std::size_t i = 0; i < m % groups; ++i) ++out[i];
    return out;
  }

  static std::size_t node_size(const Node* n) {
    if (n->is_leaf) return n->count;
    const Inner* inner = as_inner(n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < inner->count; ++i) total += inner->sizes[i];
    return total;
  }

  static const KeyedItem& node_max(const Node* n) {
    if (n->is_leaf) return as_leaf(n)->items[n->count - 1];
    return as_inner(n)->maxes[n->count - 1];
  }

  static void set_entry(Inner* inner, std::size_t slot, Node* child) {
    inner->child[slot] = child;
    inner->sizes[slot] = node_size(child);
    inner->maxes[slot] = node_max(child);
  }

  static Leaf* first_leaf(Node* n, std::size_t height) {
    for (; height > 0; --height) n = as_inner(n)->child[0];
    return as_leaf(n);
  }
  static const Leaf* first_leaf(const Node* n, std::size_t height) {
    return first_leaf(const_cast<Node*>(n), height);
  }
  static Leaf* last_leaf(Node* n, std::size_t height) {
    for (; height > 0; --height) {
      n = as_inner(n)->child[n->count - 1];
    }
    return as_leaf(n);
  }

  template <class Less>
  std::size_t count_where(Less&& less) const {
    std::size_t acc = 0;
    const Node* node = root_;
    while (node) {
      ++visits_;
      if (node->is_leaf) {
        const Leaf* leaf = as_leaf(node);
        const auto* end = leaf->items.data() + leaf->count;
        return acc + static_cast<std::size_t>(
                         std::partition_point(leaf->items.data(), end, less) -
                         leaf->items.data());
      }
      const Inner* inner = as_inner(node);
      const Node* next = nullptr;
      for (std::size_t i = 0; i < inner->count; ++i) {
        if (less(inner->maxes[i])) {
          acc += inner->sizes[i];
        } else {
          next = inner->child[i];
          break;
        }
      }
      node = next;
    }
    return acc;
  }

  // Moves entries [from, from + n) of src to dst starting at slot `at`
  // (dst entries at and after `at` are shifted right).
  static void move_leaf_items(Leaf* dst, std::size_t at, Leaf* src,
                              std::size_t from, std::size_t n) {
    std::move_backward(dst->items.begin() + at,
                       dst->items.begin() + dst->count,
                       dst->items.begin() + dst->count + n);
    std::copy_n(src->items.begin() + from, n, dst->items.begin() + at);
    std::copy(src->items.begin() + from + n, src->items.begin() + src->count,
              src->items.begin() + from);
    dst->count = static_cast<std::uint16_t>(dst->count + n);
    src->count = static_cast<std::uint16_t>(src->count - n);
  }

  static void move_inner_entries(Inner* dst, std::size_t at, Inner* src,
                                 std::size_t from, std::size_t n) {
    auto shift = [&](auto& arr_dst, auto& arr_src) {
      std::move_backward(arr_dst.begin() + at, arr_dst.begin() + dst->count,
                         arr_dst.begin() + dst->count + n);
      std::copy_n(arr_src.begin() + from, n, arr_dst.begin() + at);
      std::copy(arr_src.begin() + from + n, arr_src.begin() + src->count,
                arr_src.begin() + from);
    };
    shift(dst->child, src->child);
    shift(dst->sizes, src->sizes);
    shift(dst->maxes, src->maxes);
    dst->count = static_cast<std::uint16_t>(dst->count + n);
    src->count = static_cast<std::uint16_t>(src->count - n);
  }

  static void insert_entry(Inner* inner, std::size_t slot, Node* child) {
    for (std::size_t i = inner->count; i > slot; --i) {
      inner->child[i] = inner->child[i - 1];
      inner->sizes[i] = inner->sizes[i - 1];
      inner->maxes[i] = inner->maxes[i - 1];
    }
    set_entry(inner, slot, child);
    ++inner->count;
  }

  static void erase_entry(Inner* inner, std::size_t slot) {
    for (std::size_t i = slot + 1; i < inner->count; ++i) {
      inner->child[i - 1] = inner->child[i];
      inner->sizes[i - 1] = inner->sizes[i];
      inner->maxes[i - 1] = inner->maxes[i];
    }
    --inner->count;
  }

  static Leaf* split_leaf(Leaf* leaf) {
    auto* right = new Leaf;
    const std::size_t keep = (leaf->count + 1) / 2;
    move_leaf_items(right, 0, leaf, keep, leaf->count - keep);
    right->next = leaf->next;
    if (right->next) right->next->prev = right;
    leaf->next = right;
    right->prev = leaf;
    return right;
  }

  static Inner* split_inner(Inner* inner) {
    auto* right = new Inner;
    const std::size_t keep = (inner->count + 1) / 2;
    move_inner_entries(right, 0, inner, keep, inner->count - keep);
    return right;
  }

  // Returns the new right sibling if `node` overflowed and split.
  Node* insert_rec(Node* node, const KeyedItem& item) {
    ++visits_;
    if (node->is_leaf) {
      Leaf* leaf = as_leaf(node);
      auto* begin = leaf->items.data();
      auto* pos = std::upper_bound(begin, begin + leaf->count, item);
      std::move_backward(pos, begin + leaf->count, begin + leaf->count + 1);
      *pos = item;
      ++leaf->count;
      return leaf->count > Degree ? split_leaf(leaf) : nullptr;
    }
    Inner* inner = as_inner(node);
    std::size_t i = 0;
    while (i + 1 < inner->count && inner->maxes[i] < item) ++i;
    Node* sibling = insert_rec(inner->child[i], item);
    ++inner->sizes[i];
    if (inner->maxes[i] < item) inner->maxes[i] = item;
    if (sibling) {
      set_entry(inner, i, inner->child[i]);
      insert_entry(inner, i + 1, sibling);
      if (inner->count > Degree) return split_inner(inner);
    }
    return nullptr;
  }

  // Nodes touched by the static split/join helpers of the current split.
  static std::uint64_t& split_visits() {
    static thread_local std::uint64_t n = 0;
    return n;
  }

  // Merges `right` into `left` when both fit in one node (deleting `right`),
  // otherwise redistributes so both are at least half full. Returns true on
  // merge.
  static bool merge_or_balance(Node* left, Node* right) {
    const std::size_t total = left->count + right->count;
    if (left->is_leaf) {
      Leaf* l = as_leaf(left);
      Leaf* r = as_leaf(right);
      if (total <= Degree) {
        move_leaf_items(l, l->count, r, 0, r->count);
        l->next = r->next;
        if (l->next) l->next->prev = l;
        delete r;
        return true;
      }
      const std::size_t want = (total + 1) / 2;
      if (l->count < want) {
        move_leaf_items(l, l->count, r, 0, want - l->count);
      } else if (l->count > want) {
        move_leaf_items(r, 0, l, want, l->count - want);
      }
      return false;
    }
    Inner* l = as_inner(left);
    Inner* r = as_inner(right);
    if (total <= Degree) {
      move_inner_entries(l, l->count, r, 0, r->count);
      delete r;
      return true;
    }
    const std::size_t want = (total + 1) / 2;
    if (l->count < want) {
      move_inner_entries(l, l->count, r, 0, want - l->count);
    } else if (l->count > want) {
      move_inner_entries(r, 0, l, want, l->count - want);
    }
    return false;
  }

  // Collapses inner roots with a single child.
  static Subtree normalize(Subtree t) {
    while (t.root && !t.root->is_leaf && t.root->count == 1) {
      Inner* old = as_inner(t.root);
      t.root = old->child[0];
      --t.height;
      delete old;
    }
    return t;
  }

  // Concatenates two trees, every element of `a` preceding every element of
  // `b`. Roots may be underfull; all other nodes must be valid.
  static Subtree join(Subtree a, Subtree b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Leaf* a_last = last_leaf(a.root, a.height);
    Leaf* b_first = first_leaf(b.root, b.height);
    a_last->next = b_first;
    b_first->prev = a_last;

    if (a.height == b.height) {
      if (merge_or_balance(a.root, b.root)) return a;
      auto* root = new Inner;
      set_entry(root, 0, a.root);
      set_entry(root, 1, b.root);
      root->count = 2;
      return {root, a.height + 1};
    }

    const bool append = a.height > b.height;
    Subtree& tall = append ? a : b;
    const Subtree& shorter = append ? b : a;

    // Spine of the taller tree down to the level just above the shorter
    // root: right spine when appending, left spine when prepending.
    std::vector<Inner*> path;
    Node* node = tall.root;
    for (std::size_t h = tall.height; h > shorter.height; --h) {
      ++split_visits();
      Inner* inner = as_inner(node);
      path.push_back(inner);
      node = append ? inner->child[inner->count - 1] : inner->child[0];
    }

    Inner* parent = path.back();
    if (append) {
      insert_entry(parent, parent->count, shorter.root);
      if (shorter.root->count < kMinFill) {
        const std::size_t s = parent->count - 2;
        if (merge_or_balance(parent->child[s], shorter.root)) {
          erase_entry(parent, s + 1);
          set_entry(parent, s, parent->child[s]);
        } else {
          set_entry(parent, s, parent->child[s]);
          set_entry(parent, s + 1, parent->child[s + 1]);
        }
      }
    } else {
      insert_entry(parent, 0, shorter.root);
      if (shorter.root->count < kMinFill) {
        if (merge_or_balance(parent->child[0], parent->child[1])) {
          erase_entry(parent, 1);
          set_entry(parent, 0, parent->child[0]);
        } else {
          set_entry(parent, 0, parent->child[0]);
          set_entry(parent, 1, parent->child[1]);
        }
      }
    }

    // Bottom-up: refresh the spine entry, absorb a split from below, split
    // on overflow.
    Inner* carry = nullptr;
    for (std::size_t j = path.size(); j-- > 0;) {
      Inner* p = path[j];
      if (j + 1 < path.size()) {
        const std::size_t slot = append ? p->count - 1 : 0;
        set_entry(p, slot, p->child[slot]);
        if (carry) insert_entry(p, slot + 1, carry);
      }
      carry = p->count > Degree ? split_inner(p) : nullptr;
    }
    if (carry) {
      auto* root = new Inner;
      set_entry(root, 0, tall.root);
      set_entry(root, 1, carry);
      root->count = 2;
      return {root, tall.height + 1};
    }
    return tall;
  }

  // Returns a subtree made of the inner node's first `n` entries; consumes
  // the node.
  static Subtree make_piece(Inner* inner, std::size_t height) {
    if (inner->count == 0) {
      delete inner;
      return {};
    }
    return normalize({inner, height});
  }

  static std::pair<Subtree, Subtree> split_rec(Subtree t, std::size_t rank) {
    ++split_visits();
    const std::size_t total = node_size(t.root);
    if (rank == 0) return {Subtree{}, t};
    if (rank == total) return {t, Subtree{}};
    if (t.root->is_leaf) {
      Leaf* leaf = as_leaf(t.root);
      auto* right = new Leaf;
      move_leaf_items(right, 0, leaf, rank, leaf->count - rank);
      right->next = leaf->next;
      if (right->next) right->next->prev = right;
      leaf->next = right;
      right->prev = leaf;
      return {Subtree{leaf, 0}, Subtree{right, 0}};
    }
    Inner* inner = as_inner(t.root);
    std::size_t i = 0;
    std::size_t before = 0;
    while (before + inner->sizes[i] <= rank) {
      before += inner->sizes[i];
      ++i;
    }
    Node* mid = inner->child[i];
    auto* right_node = new Inner;
    move_inner_entries(right_node, 0, inner, i + 1, inner->count - i - 1);
    inner->count = static_cast<std::uint16_t>(i);  // drop `mid`

    Subtree left_piece = make_piece(inner, t.height);
    Subtree right_piece = make_piece(right_node, t.height);
    auto [mid_left, mid_right] =
        split_rec(Subtree{mid, t.height - 1}, rank - before);
    return {normalize(join(left_piece, mid_left)),
            normalize(join(mid_right, right_piece))};
  }

  void adopt(Subtree t, std::size_t size) {
    t = normalize(t);
    root_ = t.root;
    height_ = t.height;
    size_ = size;
  }

  std::size_t check_node(const Node* node, std::size_t height, bool is_root,
                         std::vector<const Leaf*>& leaves,
                         const KeyedItem*& prev,
                         std::ostringstream& err) const {
    if (node->is_leaf != (height == 0)) {
      err << "leaf at wrong depth";
      return 0;
    }
    if (node->count > Degree) {
      err << "node over capacity";
      return 0;
    }
    if (!is_root && node->count < kMinFill) {
      err << "non-root node below half full (" << node->count << " < "
          << kMinFill << ")";
      return 0;
    }
    if (is_root && !node->is_leaf && node->count < 2) {
      err << "inner root with fewer than two children";
      return 0;
    }
    if (node->is_leaf) {
      const Leaf* leaf = as_leaf(node);
      if (leaf->count == 0) {
        err << "empty leaf";
        return 0;
      }
      for (std::size_t i = 0; i < leaf->count; ++i) {
        if (prev && leaf->items[i] < *prev) {
          err << "in-order sequence not sorted";
          return 0;
        }
        prev = &leaf->items[i];
      }
      leaves.push_back(leaf);
      return leaf->count;
    }
    const Inner* inner = as_inner(node);
    std::size_t total = 0;
    for (std::size_t i = 0; i < inner->count; ++i) {
      const std::size_t sub =
          check_node(inner->child[i], height - 1, false, leaves, prev, err);
      if (!err.str().empty()) return 0;
      if (sub != inner->sizes[i]) {
        err << "subtree size annotation " << inner->sizes[i] << " but "
            << sub << " elements";
        return 0;
      }
      if (!(node_max(inner->child[i]) == inner->maxes[i])) {
        err << "stale subtree maximum";
        return 0;
      }
      total += sub;
    }
    return total;
  }

  Node* root_ = nullptr;
  std::size_t height_ = 0;
  std::size_t size_ = 0;
  mutable std::uint64_t visits_ = 0;
};

using Reservoir = BasicReservoir<16>;

}  // namespace distres
