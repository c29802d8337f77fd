#pragma once

// Imposes a rotating LiDAR's scan structure on a cloud. Each point falls into
// one (layer, azimuth bin) cell; a cell keeps only its nearest return. Points
// are selected, never moved.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasaug/augment.hpp"
#include "gasaug/core.hpp"
#include "gasaug/error.hpp"

namespace gasaug {

/// Layer elevations are polar angles phi measured from +z (so a horizontal
/// beam has phi = pi/2), strictly increasing.
class SensorSpec {
 public:
  SensorSpec(std::vector<double> layer_elevations, double azimuth_bin_width,
             double max_range = std::numeric_limits<double>::infinity())
      : layers_(std::move(layer_elevations)), bin_width_(azimuth_bin_width), max_range_(max_range) {
    if (layers_.size() < 2) throw Error(ErrorCode::InvalidSensorSpec, "sensor needs at least 2 layers");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (!std::isfinite(layers_[i]) || layers_[i] < 0.0 || layers_[i] > std::numbers::pi) {
        throw Error(ErrorCode::InvalidSensorSpec, "layer elevation outside [0, pi]");
      }
      if (i > 0 && !(layers_[i] > layers_[i - 1])) {
        throw Error(ErrorCode::InvalidSensorSpec, "layer elevations must be strictly increasing");
      }
    }
    if (!(bin_width_ > 0.0 && bin_width_ <= 2.0 * std::numbers::pi)) {
      throw Error(ErrorCode::InvalidSensorSpec, "azimuth bin width must lie in (0, 2 pi]");
    }
    if (!(max_range_ > 0.0)) throw Error(ErrorCode::InvalidSensorSpec, "max range must be positive");
    bins_ = static_cast<std::size_t>(std::llround(2.0 * std::numbers::pi / bin_width_));
    if (bins_ == 0) bins_ = 1;
  }

  const std::vector<double>& layer_elevations() const { return layers_; }
  double azimuth_bin_width() const { return bin_width_; }
  double max_range() const { return max_range_; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t bins_per_revolution() const { return bins_; }
  std::size_t cell_count() const { return layers_.size() * bins_; }

  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;

 private:
  std::vector<double> layers_;
  double bin_width_;
  double max_range_;
  std::size_t bins_ = 0;
};

namespace sensors {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

/// Evenly spaced layers between two elevation angles above the horizon (degrees).
inline SensorSpec uniform_layers(std::size_t layers, double upper_deg, double lower_deg, double bin_deg,
                                 double max_range) {
  std::vector<double> phi(layers);
  for (std::size_t i = 0; i < layers; ++i) {
    const double elevation = upper_deg + (lower_deg - upper_deg) * static_cast<double>(i) / static_cast<double>(layers - 1);
    phi[i] = deg(90.0 - elevation);
  }
  return {std::move(phi), deg(bin_deg), max_range};
}

/// 64 layers from +2.0 to -24.8 degrees elevation, 0.18 degree bins.
inline SensorSpec velodyne64_like() { return uniform_layers(64, 2.0, -24.8, 0.18, 120.0); }

/// 40 layers from +7 to -16 degrees elevation, 0.2 degree bins.
inline SensorSpec layer40_like() { return uniform_layers(40, 7.0, -16.0, 0.2, 200.0); }

inline std::optional<SensorSpec> preset(std::string_view name) {
  if (name == "velodyne64") return velodyne64_like();
  if (name == "layer40") return layer40_like();
  return std::nullopt;
}

}  // namespace sensors

struct SphericalPoint {
  double r = 0.0;
  double phi = 0.0;    // [0, pi] from +z
  double theta = 0.0;  // (-pi, pi]
  double reflectivity = 0.0;
};

inline constexpr double kOriginRadius = 1e-9;

/// r = |p|, phi = atan2(sqrt(x^2 + y^2), z), theta = atan2(y, x).
inline SphericalPoint cartesian_to_spherical(const Point& p) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (!(r > kOriginRadius)) throw Error(ErrorCode::OriginPoint, "point at the sensor origin");
  double theta = std::atan2(p.y, p.x);
  if (theta <= -std::numbers::pi) theta = std::numbers::pi;
  return {r, std::atan2(std::sqrt(p.x * p.x + p.y * p.y), p.z), theta, p.reflectivity};
}

inline Point spherical_to_cartesian(const SphericalPoint& s) {
  const double rho = s.r * std::sin(s.phi);
  return {rho * std::cos(s.theta), rho * std::sin(s.theta), s.r * std::cos(s.phi), s.reflectivity};
}

struct SensorCell {
  std::size_t layer = 0;
  std::size_t bin = 0;
  friend bool operator==(const SensorCell&, const SensorCell&) = default;
};

/// Cell hit by a point, or nothing when the sensor cannot see it (origin,
/// beyond max range, or outside the vertical field of view). Ties between two
/// layers go to the lower layer index.
inline std::optional<SensorCell> sensor_cell(const Point& p, const SensorSpec& spec, double* range = nullptr) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (!(r > kOriginRadius) || r > spec.max_range()) return std::nullopt;
  const auto s = cartesian_to_spherical(p);
  const auto& layers = spec.layer_elevations();
  const std::size_t L = layers.size();
  const auto it = std::lower_bound(layers.begin(), layers.end(), s.phi);
  std::size_t layer = 0;
  if (it == layers.end()) {
    layer = L - 1;
  } else {
    layer = static_cast<std::size_t>(it - layers.begin());
    if (layer > 0 && s.phi - layers[layer - 1] <= layers[layer] - s.phi) --layer;
  }
  const double delta = s.phi - layers[layer];
  double gap = 0.0;
  if (delta < 0.0) {
    gap = layer > 0 ? layers[layer] - layers[layer - 1] : layers[1] - layers[0];
  } else {
    gap = layer + 1 < L ? layers[layer + 1] - layers[layer] : layers[L - 1] - layers[L - 2];
  }
  if (std::abs(delta) > 0.5 * gap) return std::nullopt;
  auto bin = static_cast<std::size_t>(std::floor((s.theta + std::numbers::pi) / spec.azimuth_bin_width()));
  bin %= spec.bins_per_revolution();
  if (range) *range = r;
  return SensorCell{layer, bin};
}

struct ResampleOptions {
  /// Within a cell, prefer points not flagged in `inserted` over nearer
  /// inserted ones. Off by default: nearest return wins.
  bool prefer_original = false;
  std::span<const bool> inserted{};
};

/// Indices (ascending) of the points that survive resampling.
inline std::vector<std::size_t> resample_indices(const PointCloud& cloud, const SensorSpec& spec,
                                                 const ResampleOptions& options = {}) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> winner(spec.cell_count(), none);
  std::vector<double> winner_range(spec.cell_count(), 0.0);
  auto inserted = [&](std::size_t i) { return i < options.inserted.size() && options.inserted[i]; };

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double r = 0.0;
    const auto cell = sensor_cell(cloud.points[i], spec, &r);
    if (!cell) continue;
    const std::size_t key = cell->layer * spec.bins_per_revolution() + cell->bin;
    const std::size_t cur = winner[key];
    bool take = cur == none;
    if (!take) {
      if (options.prefer_original && inserted(i) != inserted(cur)) {
        take = !inserted(i);
      } else {
        // Ascending scan: an equal range keeps the earlier index.
        take = r < winner_range[key];
      }
    }
    if (take) {
      winner[key] = i;
      winner_range[key] = r;
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t w : winner) {
    if (w != none) kept.push_back(w);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline PointCloud resample_to_sensor(const PointCloud& cloud, const SensorSpec& spec,
                                     const ResampleOptions& options = {}) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  for (std::size_t i : resample_indices(cloud, spec, options)) out.points.push_back(cloud.points[i]);
  return out;
}

/// Resamples an augmented frame, remapping gas indices and dropping gas boxes
/// whose points were all occluded away.
inline AugmentedFrame resample_to_sensor(const AugmentedFrame& in, const SensorSpec& spec,
                                         const ResampleOptions& options = {}) {
  const auto kept = resample_indices(in.frame.cloud, spec, options);
  AugmentedFrame out;
  out.frame.gt_boxes = in.frame.gt_boxes;
  out.frame.pred_boxes = in.frame.pred_boxes;
  out.frame.cloud.frame_id = in.frame.cloud.frame_id;

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> box_of(in.frame.cloud.size(), none);
  for (std::size_t k = 0; k < in.gas_point_indices.size(); ++k) box_of[in.gas_point_indices[k]] = in.gas_point_box[k];

  std::vector<std::size_t> surviving(in.gas_boxes.size(), 0);
  for (std::size_t i : kept) {
    if (box_of[i] != none) ++surviving[box_of[i]];
  }
  std::vector<std::size_t> new_box_id(in.gas_boxes.size(), none);
  for (std::size_t b = 0; b < in.gas_boxes.size(); ++b) {
    if (surviving[b] == 0) continue;
    new_box_id[b] = out.gas_boxes.size();
    out.gas_boxes.push_back(in.gas_boxes[b]);
    out.placements.push_back(in.placements[b]);
  }
  for (std::size_t i : kept) {
    if (box_of[i] != none) {
      out.gas_point_indices.push_back(out.frame.cloud.size());
      out.gas_point_box.push_back(new_box_id[box_of[i]]);
    }
    out.frame.cloud.points.push_back(in.frame.cloud.points[i]);
  }
  return out;
}

}  // namespace gasaug
