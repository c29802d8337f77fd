#pragma once

// Oriented 3D IoU and the noise-robustness loss built on it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gasaug/core.hpp"
#include "gasaug/error.hpp"

namespace gasaug {

inline constexpr double kDefaultBeta = 0.1;

namespace detail {

using Vec2 = std::array<double, 2>;

inline double cross2(Vec2 o, Vec2 a, Vec2 b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); }

inline double shoelace(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(twice);
}

// Sutherland-Hodgman clip of a convex polygon against the half-plane to the
// left of the directed edge (e0 -> e1). Contact within eps counts as inside.
inline std::vector<Vec2> clip(const std::vector<Vec2>& poly, Vec2 e0, Vec2 e1) {
  constexpr double eps = 1e-12;
  std::vector<Vec2> out;
  if (poly.empty()) return out;
  const double len = std::hypot(e1[0] - e0[0], e1[1] - e0[1]);
  auto side = [&](Vec2 p) { return cross2(e0, e1, p) / len; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& cur = poly[i];
    const Vec2& nxt = poly[(i + 1) % poly.size()];
    const double sc = side(cur);
    const double sn = side(nxt);
    const bool in_c = sc >= -eps;
    const bool in_n = sn >= -eps;
    if (in_c) out.push_back(cur);
    if (in_c != in_n) {
      const double t = sc / (sc - sn);
      out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
    }
  }
  return out;
}

}  // namespace detail

/// Area of the intersection of two yaw-rotated footprints (m^2).
inline double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const auto fa = box_footprint(a);
  const auto fb = box_footprint(b);
  std::vector<detail::Vec2> poly(fa.begin(), fa.end());
  for (std::size_t i = 0; i < 4 && !poly.empty(); ++i) poly = detail::clip(poly, fb[i], fb[(i + 1) % 4]);
  if (poly.size() < 3) return 0.0;
  return detail::shoelace(poly);
}

/// Footprint IoU, ignoring height.
inline double bev_iou(const Box3D& a, const Box3D& b) {
  const double inter = bev_intersection_area(a, b);
  const double uni = a.length() * a.width() + b.length() * b.width() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline double intersection_volume(const Box3D& a, const Box3D& b) {
  const double overlap_h = std::max(0.0, std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom()));
  if (overlap_h == 0.0) return 0.0;
  return bev_intersection_area(a, b) * overlap_h;
}

inline double iou3d(const Box3D& a, const Box3D& b) {
  const double inter = intersection_volume(a, b);
  const double uni = a.volume() + b.volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// |P| x |B| IoU values, row-major (rows follow predictions).
struct IoUMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

inline IoUMatrix iou_matrix(std::span<const Box3D> preds, std::span<const Box3D> gas) {
  IoUMatrix m{preds.size(), gas.size(), std::vector<double>(preds.size() * gas.size())};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gas.size(); ++j) m.values[i * m.cols + j] = iou3d(preds[i], gas[j]);
  }
  return m;
}

/// Mean over predictions of the best IoU against any gas box; 0 when either
/// set is empty.
inline double noise_loss(std::span<const Box3D> preds, std::span<const Box3D> gas) {
  if (preds.empty() || gas.empty()) return 0.0;
  const auto m = iou_matrix(preds, gas);
  double sum = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) best = std::max(best, m(i, j));
    sum += best;
  }
  return sum / static_cast<double>(m.rows);
}

struct LossBreakdown {
  double l_train = 0.0;
  double l_noise = 0.0;
  double beta = kDefaultBeta;
  double total = 0.0;
};

/// total = l_train + beta * l_noise.
inline LossBreakdown total_loss(double l_train, double l_noise, double beta = kDefaultBeta) {
  if (!(l_train >= 0.0) || !(l_noise >= 0.0 && l_noise <= 1.0) || !(beta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "loss terms need l_train >= 0, l_noise in [0, 1], beta >= 0");
  }
  return {l_train, l_noise, beta, l_train + beta * l_noise};
}

}  // namespace gasaug
