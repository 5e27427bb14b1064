#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "hullwrap/geom_core.hpp"

namespace hullwrap {

/// Dynamic bounding-volume hierarchy over axis-aligned boxes with
/// height-balancing rotations. Leaves carry a caller-supplied id.
class AabbTree {
 public:
  static constexpr std::int32_t kNull = -1;

  std::int32_t insert(const Aabb& box, std::uint32_t id) {
    const std::int32_t leaf = allocate();
    Node& n = nodes_[static_cast<std::size_t>(leaf)];
    n.box = box;
    n.id = id;
    n.height = 0;
    insert_leaf(leaf);
    ++leaf_count_;
    return leaf;
  }

  void remove(std::int32_t leaf) {
    remove_leaf(leaf);
    release(leaf);
    --leaf_count_;
  }

  void update(std::int32_t leaf, const Aabb& box, std::uint32_t id) {
    remove_leaf(leaf);
    node(leaf).box = box;
    node(leaf).id = id;
    insert_leaf(leaf);
  }

  std::size_t size() const { return leaf_count_; }
  int height() const { return root_ == kNull ? 0 : node(root_).height; }

  /// Calls `visit(id)` for every leaf whose box overlaps `box`.
  template <typename Visit>
  void query(const Aabb& box, Visit&& visit) const {
    traverse([&](const Aabb& b) { return b.overlaps(box); }, visit);
  }

  /// Generic descent: subtrees whose box fails `accept` are pruned.
  template <typename Accept, typename Visit>
  void traverse(Accept&& accept, Visit&& visit) const {
    if (root_ == kNull) return;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
      const std::int32_t i = stack.back();
      stack.pop_back();
      const Node& n = node(i);
      if (!accept(n.box)) continue;
      if (n.is_leaf()) {
        visit(n.id);
      } else {
        stack.push_back(n.child1);
        stack.push_back(n.child2);
      }
    }
  }

  /// The `k` leaves with the smallest `leaf_distance(id)`, ties by id, among
  /// those passing `keep`. `leaf_distance` must never be smaller than the
  /// distance from `p` to the leaf box.
  template <typename LeafDistance, typename Keep>
  std::vector<std::pair<double, std::uint32_t>> nearest(const Point3& p, std::size_t k, LeafDistance&& leaf_distance,
                                                        Keep&& keep) const {
    std::vector<std::pair<double, std::uint32_t>> best;
    if (root_ == kNull || k == 0) return best;
    using Entry = std::pair<double, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> frontier;
    frontier.emplace(std::sqrt(node(root_).box.squared_distance(p)), root_);
    const auto worst = [&] { return best.size() < k ? std::numeric_limits<double>::infinity() : best.back().first; };
    while (!frontier.empty()) {
      const auto [bound, i] = frontier.top();
      frontier.pop();
      if (bound > worst()) break;
      const Node& n = node(i);
      if (n.is_leaf()) {
        if (!keep(n.id)) continue;
        const std::pair<double, std::uint32_t> candidate{leaf_distance(n.id), n.id};
        if (best.size() == k && !(candidate < best.back())) continue;
        best.insert(std::upper_bound(best.begin(), best.end(), candidate), candidate);
        if (best.size() > k) best.pop_back();
      } else {
        for (std::int32_t c : {n.child1, n.child2}) {
          const double d = std::sqrt(node(c).box.squared_distance(p));
          if (d <= worst()) frontier.emplace(d, c);
        }
      }
    }
    return best;
  }

 private:
  struct Node {
    Aabb box;
    std::int32_t parent = kNull;
    std::int32_t child1 = kNull;
    std::int32_t child2 = kNull;
    std::int32_t next_free = kNull;
    int height = -1;
    std::uint32_t id = 0;

    bool is_leaf() const { return child1 == kNull; }
  };

  Node& node(std::int32_t i) { return nodes_[static_cast<std::size_t>(i)]; }
  const Node& node(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }

  std::int32_t allocate() {
    if (free_list_ == kNull) {
      nodes_.emplace_back();
      return static_cast<std::int32_t>(nodes_.size() - 1);
    }
    const std::int32_t i = free_list_;
    free_list_ = node(i).next_free;
    node(i) = Node{};
    return i;
  }

  void release(std::int32_t i) {
    node(i).next_free = free_list_;
    node(i).height = -1;
    free_list_ = i;
  }

  void insert_leaf(std::int32_t leaf) {
    if (root_ == kNull) {
      root_ = leaf;
      node(leaf).parent = kNull;
      return;
    }
    // Descend by the surface-area insertion cost.
    const Aabb leaf_box = node(leaf).box;
    std::int32_t index = root_;
    while (!node(index).is_leaf()) {
      const Node& n = node(index);
      const double area = n.box.surface_area();
      const double combined = Aabb::merge(n.box, leaf_box).surface_area();
      const double cost = 2.0 * combined;
      const double inheritance = 2.0 * (combined - area);
      const auto child_cost = [&](std::int32_t c) {
        const Aabb merged = Aabb::merge(leaf_box, node(c).box);
        if (node(c).is_leaf()) return merged.surface_area() + inheritance;
        return merged.surface_area() - node(c).box.surface_area() + inheritance;
      };
      const double cost1 = child_cost(n.child1);
      const double cost2 = child_cost(n.child2);
      if (cost < cost1 && cost < cost2) break;
      index = cost1 <= cost2 ? n.child1 : n.child2;
    }

    const std::int32_t sibling = index;
    const std::int32_t old_parent = node(sibling).parent;
    const std::int32_t new_parent = allocate();
    node(new_parent).parent = old_parent;
    node(new_parent).box = Aabb::merge(leaf_box, node(sibling).box);
    node(new_parent).height = node(sibling).height + 1;
    node(new_parent).child1 = sibling;
    node(new_parent).child2 = leaf;
    node(sibling).parent = new_parent;
    node(leaf).parent = new_parent;
    if (old_parent == kNull) {
      root_ = new_parent;
    } else if (node(old_parent).child1 == sibling) {
      node(old_parent).child1 = new_parent;
    } else {
      node(old_parent).child2 = new_parent;
    }
    refit_upwards(node(leaf).parent);
  }

  void remove_leaf(std::int32_t leaf) {
    if (leaf == root_) {
      root_ = kNull;
      return;
    }
    const std::int32_t parent = node(leaf).parent;
    const std::int32_t grand = node(parent).parent;
    const std::int32_t sibling = node(parent).child1 == leaf ? node(parent).child2 : node(parent).child1;
    if (grand == kNull) {
      root_ = sibling;
      node(sibling).parent = kNull;
      release(parent);
      return;
    }
    if (node(grand).child1 == parent) {
      node(grand).child1 = sibling;
    } else {
      node(grand).child2 = sibling;
    }
    node(sibling).parent = grand;
    release(parent);
    refit_upwards(grand);
  }

  void refit_upwards(std::int32_t index) {
    while (index != kNull) {
      index = balance(index);
      Node& n = node(index);
      n.height = 1 + std::max(node(n.child1).height, node(n.child2).height);
      n.box = Aabb::merge(node(n.child1).box, node(n.child2).box);
      index = n.parent;
    }
  }

  // Rotates a grandchild up when the subtree heights differ by more than one;
  // returns the index now rooting this subtree.
  std::int32_t balance(std::int32_t a) {
    if (node(a).is_leaf() || node(a).height < 2) return a;
    const std::int32_t b = node(a).child1;
    const std::int32_t c = node(a).child2;
    const int diff = node(c).height - node(b).height;
    if (diff > 1) return rotate_up(a, c, b, /*a_child_is_child2=*/true);
    if (diff < -1) return rotate_up(a, b, c, /*a_child_is_child2=*/false);
    return a;
  }

  std::int32_t rotate_up(std::int32_t a, std::int32_t up, std::int32_t other, bool up_was_child2) {
    const std::int32_t f = node(up).child1;
    const std::int32_t g = node(up).child2;

    node(up).child1 = a;
    node(up).parent = node(a).parent;
    node(a).parent = up;
    if (node(up).parent == kNull) {
      root_ = up;
    } else if (node(node(up).parent).child1 == a) {
      node(node(up).parent).child1 = up;
    } else {
      node(node(up).parent).child2 = up;
    }

    const bool keep_f = node(f).height > node(g).height;
    const std::int32_t stays = keep_f ? f : g;
    const std::int32_t moves = keep_f ? g : f;
    node(up).child2 = stays;
    if (up_was_child2) {
      node(a).child2 = moves;
    } else {
      node(a).child1 = moves;
    }
    node(moves).parent = a;
    node(a).box = Aabb::merge(node(other).box, node(moves).box);
    node(a).height = 1 + std::max(node(other).height, node(moves).height);
    node(up).box = Aabb::merge(node(a).box, node(stays).box);
    node(up).height = 1 + std::max(node(a).height, node(stays).height);
    return up;
  }

  std::vector<Node> nodes_;
  std::int32_t root_ = kNull;
  std::int32_t free_list_ = kNull;
  std::size_t leaf_count_ = 0;
};

}  // namespace hullwrap
