#pragma once

// Copy-paste insertion of gas clouds next to vehicles.
//
// Per vehicle: with probability p_top the cloud goes on the roof; otherwise,
// with probability p_gas, it goes behind the vehicle at the rear-center,
// rear-left or rear-right anchor (equally likely). The whole frame is
// augmented only with probability p_aug.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gasaug/core.hpp"
#include "gasaug/error.hpp"
#include "gasaug/gas_gen.hpp"
#include "gasaug/rng.hpp"

namespace gasaug {

struct AugmentParams {
  double p_gas = 0.5;
  double p_top = 0.1;
  double p_aug = 0.0;
  double standoff = 0.3;  // m behind the rear face
  double jitter = 0.2;    // m, uniform in x and y for rear anchors

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(p_gas) || !prob(p_top) || !prob(p_aug)) {
      throw Error(ErrorCode::InvalidArgument, "augmentation probabilities must lie in [0, 1]");
    }
    if (!(standoff >= 0.0) || !(jitter >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "standoff and jitter must be non-negative");
    }
  }
};

/// p_aug after `epoch` completed epochs out of `total_epochs`: min(epoch / T, 1).
inline double schedule_p_aug(std::int64_t epoch, std::int64_t total_epochs) {
  if (epoch < 0 || total_epochs < 1) {
    throw Error(ErrorCode::InvalidArgument, "schedule needs epoch >= 0 and T >= 1");
  }
  if (epoch >= total_epochs) return 1.0;
  return static_cast<double>(epoch) / static_cast<double>(total_epochs);
}

enum class AnchorKind { Top, RearCenter, RearLeft, RearRight };

inline std::string_view to_string(AnchorKind k) {
  switch (k) {
    case AnchorKind::Top: return "top";
    case AnchorKind::RearCenter: return "rear-center";
    case AnchorKind::RearLeft: return "rear-left";
    case AnchorKind::RearRight: return "rear-right";
  }
  return "unknown";
}

/// Where a cloud goes. `anchor` holds the world x, y of the gas box center;
/// its z is resolved at insertion as `base_z` plus half the cloud's height,
/// so the cloud rests on the vehicle floor level (rear) or roof (top).
struct Placement {
  AnchorKind kind = AnchorKind::RearCenter;
  Vec3 local_offset;  // anchor in the vehicle frame (z unused)
  Vec3 anchor;
  double base_z = 0.0;
  double yaw = 0.0;
};

/// Draw order: u_top; if rear, u_gas, then anchor index and (jx, jy).
inline std::optional<Placement> choose_placement(const Box3D& vehicle, SeededRng& rng, const AugmentParams& params) {
  Placement pl;
  pl.yaw = vehicle.yaw();
  if (rng.uniform01() < params.p_top) {
    pl.kind = AnchorKind::Top;
    pl.local_offset = {0.0, 0.0, 0.0};
    pl.base_z = vehicle.top();
  } else if (rng.uniform01() < params.p_gas) {
    const auto which = rng.uniform_int(0, 2);
    const double jx = rng.uniform(-params.jitter, params.jitter);
    const double jy = rng.uniform(-params.jitter, params.jitter);
    const double rear_x = -0.5 * vehicle.length() - params.standoff;
    const double side = which == 0 ? 0.0 : (which == 1 ? 0.5 * vehicle.width() : -0.5 * vehicle.width());
    pl.kind = which == 0 ? AnchorKind::RearCenter : (which == 1 ? AnchorKind::RearLeft : AnchorKind::RearRight);
    pl.local_offset = {rear_x + jx, side + jy, 0.0};
    pl.base_z = vehicle.bottom();
  } else {
    return std::nullopt;
  }
  const Vec3 world = rotate_z(pl.local_offset, vehicle.yaw());
  pl.anchor = {vehicle.center().x + world.x, vehicle.center().y + world.y, 0.0};
  return pl;
}

struct AugmentedFrame {
  DetectionFrame frame;
  std::vector<Box3D> gas_boxes;
  std::vector<std::size_t> gas_point_indices;  // ascending
  std::vector<std::size_t> gas_point_box;      // box index per entry of gas_point_indices
  std::vector<Placement> placements;           // one per gas box
};

/// Added to each face of a placed gas box so rotated points stay inside it
/// after rounding (including float32 storage at ranges up to ~128 m).
inline constexpr double kGasBoxPad = 1e-5;

/// Pose of a placed gas box: tight box dimensions, centered at the anchor
/// with z resolved from the cloud height, rotated by the placement yaw.
inline Box3D placed_gas_box(const GasCloud& gas, const Placement& placement) {
  const Box3D& tb = gas.tight_box;
  const Vec3 center{placement.anchor.x, placement.anchor.y, placement.base_z + 0.5 * tb.height()};
  return {center, tb.length() + 2 * kGasBoxPad, tb.width() + 2 * kGasBoxPad, tb.height() + 2 * kGasBoxPad,
          placement.yaw};
}

/// Rigidly moves the cloud so its tight box lands on the placement and
/// appends the points; returns the gas box added to `target.gas_boxes`.
inline const Box3D& insert_cloud(AugmentedFrame& target, const GasCloud& gas, const Placement& placement) {
  const Box3D box = placed_gas_box(gas, placement);
  const Vec3 tb_center = gas.tight_box.center();
  auto& pts = target.frame.cloud.points;
  const std::size_t box_id = target.gas_boxes.size();
  pts.reserve(pts.size() + gas.cloud.size());
  for (const auto& p : gas.cloud.points) {
    const Vec3 world = rotate_z(p.position() - tb_center, placement.yaw) + box.center();
    target.gas_point_indices.push_back(pts.size());
    target.gas_point_box.push_back(box_id);
    pts.push_back(make_point(world, p.reflectivity));
  }
  target.gas_boxes.push_back(box);
  target.placements.push_back(placement);
  return target.gas_boxes.back();
}

/// Draw order: u_aug; then per vehicle box in label order, the placement
/// draws followed by the pool index for an accepted placement.
inline AugmentedFrame augment_frame(const DetectionFrame& frame, const GasCloudPool& pool,
                                    const AugmentParams& params, SeededRng& rng) {
  params.validate();
  if (pool.generated.empty()) throw Error(ErrorCode::EmptyPool, "gas cloud pool has no generated clouds");
  AugmentedFrame out;
  out.frame = frame;
  if (!(rng.uniform01() < params.p_aug)) return out;
  for (const auto& gt : frame.gt_boxes) {
    if (!is_vehicle_label(gt.label)) continue;
    const auto placement = choose_placement(gt.box, rng, params);
    if (!placement) continue;
    const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(pool.generated.size()) - 1);
    insert_cloud(out, pool.generated[static_cast<std::size_t>(pick)], *placement);
  }
  return out;
}

}  // namespace gasaug
