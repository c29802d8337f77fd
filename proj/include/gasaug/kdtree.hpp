#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gasaug/core.hpp"

namespace gasaug {

/// Static 3-d tree for exact nearest-neighbour queries. Among equidistant
/// candidates the lowest point index wins, so results equal a linear scan.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!points_.empty()) nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    if (!points_.empty()) build(0, order_.size());
  }

  std::size_t size() const { return points_.size(); }

  static double squared_distance(Vec3 a, Vec3 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
  }

  /// Index of the nearest point; size() when the tree is empty.
  std::size_t nearest(Vec3 q) const {
    if (nodes_.empty()) return size();
    Best best;
    search(0, q, best);
    return best.index;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  struct Best {
    double dist2 = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
  };

  static double coord(Vec3 p, int axis) { return axis == 0 ? p.x : (axis == 1 ? p.y : p.z); }

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end, -1, 0.0, 0, 0});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[order_[begin]];
    Vec3 hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      const Vec3 p = points_[order_[i]];
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    const Vec3 ext = hi - lo;
    const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    const std::size_t mid = begin + (end - begin) / 2;
    auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
    std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                       return coord(points_[a], axis) < coord(points_[b], axis);
                     });
    const double split = coord(points_[order_[mid]], axis);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::size_t id, Vec3 q, Best& best) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = squared_distance(points_[idx], q);
        if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) best = {d2, idx};
      }
      return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double delta = coord(q, node.axis) - node.split;
    const std::size_t near = delta <= 0.0 ? node.left : node.right;
    const std::size_t far = delta <= 0.0 ? node.right : node.left;
    search(near, q, best);
    // Non-strict so equidistant candidates with lower indices are still seen.
    if (delta * delta <= best.dist2) search(far, q, best);
  }

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace gasaug
