#pragma once

// Shared geometric types. Sensor frame convention: x forward, y left, z up;
// every yaw is a rotation about +z.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasaug/error.hpp"

namespace gasaug {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// One LiDAR return. Reflectivity is unitless in [0, 1].
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double reflectivity = 0.0;

  constexpr Vec3 position() const { return {x, y, z}; }
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

inline Point make_point(Vec3 p, double reflectivity) { return {p.x, p.y, p.z, reflectivity}; }

struct PointCloud {
  std::vector<Point> points;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

inline std::vector<Vec3> positions(const PointCloud& cloud) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points) out.push_back(p.position());
  return out;
}

/// Maps any angle into (-pi, pi].
inline double normalize_yaw(double yaw) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::remainder(yaw, two_pi);
  if (y <= -std::numbers::pi) y += two_pi;
  if (y > std::numbers::pi) y -= two_pi;
  return y;
}

/// Yaw-only oriented box. Dimensions are (length along local x, width along
/// local y, height along z); yaw is normalized on construction.
class Box3D {
 public:
  Box3D() : Box3D(Vec3{}, 1.0, 1.0, 1.0, 0.0) {}

  Box3D(Vec3 center, double length, double width, double height, double yaw)
      : center_(center), length_(length), width_(width), height_(height), yaw_(normalize_yaw(yaw)) {
    if (!(length > 0.0 && width > 0.0 && height > 0.0) || !std::isfinite(length) ||
        !std::isfinite(width) || !std::isfinite(height)) {
      throw Error(ErrorCode::InvalidArgument, "box dimensions must be positive and finite");
    }
    if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(center.z) ||
        !std::isfinite(yaw)) {
      throw Error(ErrorCode::InvalidArgument, "box center and yaw must be finite");
    }
  }

  Vec3 center() const { return center_; }
  double length() const { return length_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double yaw() const { return yaw_; }

  double volume() const { return length_ * width_ * height_; }
  double bottom() const { return center_.z - 0.5 * height_; }
  double top() const { return center_.z + 0.5 * height_; }

  Box3D scaled(double factor) const {
    return {center_, length_ * factor, width_ * factor, height_ * factor, yaw_};
  }

  friend bool operator==(const Box3D&, const Box3D&) = default;

 private:
  Vec3 center_;
  double length_;
  double width_;
  double height_;
  double yaw_;
};

/// Rotation of (x, y) by yaw about +z.
inline Vec3 rotate_z(Vec3 p, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * p.x - s * p.y, s * p.x + c * p.y, p.z};
}

/// Translate by -center, then rotate by -yaw.
inline Vec3 to_box_frame(Vec3 p, const Box3D& box) { return rotate_z(p - box.center(), -box.yaw()); }

inline Vec3 from_box_frame(Vec3 local, const Box3D& box) {
  return rotate_z(local, box.yaw()) + box.center();
}

inline bool box_contains(const Box3D& box, Vec3 p) {
  const Vec3 local = to_box_frame(p, box);
  return std::abs(local.x) <= 0.5 * box.length() && std::abs(local.y) <= 0.5 * box.width() &&
         std::abs(local.z) <= 0.5 * box.height();
}

/// Corners 0-3 are the bottom face counter-clockwise seen from above, starting
/// at front-right (+l/2, -w/2); corners 4-7 repeat that order on the top face.
inline std::array<Vec3, 8> box_corners(const Box3D& box) {
  const double hl = 0.5 * box.length();
  const double hw = 0.5 * box.width();
  const double hh = 0.5 * box.height();
  constexpr std::array<std::array<double, 2>, 4> footprint{{{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}};
  std::array<Vec3, 8> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec3 lo{footprint[i][0] * hl, footprint[i][1] * hw, -hh};
    const Vec3 hi{lo.x, lo.y, hh};
    out[i] = from_box_frame(lo, box);
    out[i + 4] = from_box_frame(hi, box);
  }
  return out;
}

/// The 4 footprint corners (x, y), counter-clockwise.
inline std::array<std::array<double, 2>, 4> box_footprint(const Box3D& box) {
  const auto c = box_corners(box);
  return {{{c[0].x, c[0].y}, {c[1].x, c[1].y}, {c[2].x, c[2].y}, {c[3].x, c[3].y}}};
}

/// Indices of points inside or on the boundary of the box.
inline std::vector<std::size_t> points_in_box(const PointCloud& cloud, const Box3D& box) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (box_contains(box, cloud.points[i].position())) out.push_back(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detection containers

struct LabeledBox {
  Box3D box;
  std::string label;
  int occlusion = 0;         // 0..3
  double truncation = 0.0;   // [0, 1]
  std::optional<double> score;  // present on predictions

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct ScoredBox {
  Box3D box;
  double score = 0.0;
  std::string label = "Car";

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

struct DetectionFrame {
  PointCloud cloud;
  std::vector<LabeledBox> gt_boxes;
  std::vector<ScoredBox> pred_boxes;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

inline bool is_vehicle_label(std::string_view label) {
  return label == "Car" || label == "Van" || label == "Truck" || label == "Vehicle" ||
         label == "PassengerCar" || label == "LargeVehicle";
}

}  // namespace gasaug
