// Library walk-through: grow a pool from one synthetic gas source, augment a
// frame with one car, resample it to a 40-layer sensor and score a detector
// that mistook the gas for a second car.

#include <cmath>
#include <iostream>
#include <numbers>

#include "gasaug/gasaug.hpp"

using namespace gasaug;

namespace {

// A squashed ellipsoid of points standing in for a labeled exhaust plume.
PointCloud plume(SeededRng& rng) {
  PointCloud c;
  c.frame_id = "plume";
  for (int i = 0; i < 400; ++i) {
    const double u = rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double s = std::sqrt(1.0 - u * u);
    c.points.push_back({0.6 * s * std::cos(t), 0.4 * s * std::sin(t), 0.3 * u, rng.uniform01()});
  }
  return c;
}

}  // namespace

int main() {
  const std::uint64_t master = 7;

  GasCloudPool pool;
  SeededRng src_rng(derive_seed(master, "source", "sample"));
  pool.add_source("plume", plume(src_rng));
  for (std::size_t i = 0; i < 8; ++i) {
    SeededRng rng(derive_seed(master, io::generated_id(i), stage::generate));
    pool.generated.push_back(generate_cloud(pool.sources[0].cloud, rng, "plume"));
  }
  std::cout << "pool: " << pool.generated.size() << " clouds, first has " << pool.generated[0].cloud.size()
            << " points (alpha " << pool.generated[0].provenance.alpha << ")\n";

  DetectionFrame frame;
  frame.cloud.frame_id = "000000";
  const Box3D car({12.0, 3.0, -0.9}, 4.2, 1.8, 1.5, 0.3);
  frame.gt_boxes.push_back({car, "Car", 0, 0.0, std::nullopt});

  AugmentParams params;
  params.p_aug = 1.0;
  params.p_gas = 1.0;
  SeededRng aug_rng(derive_seed(master, frame.cloud.frame_id, stage::augment));
  const auto augmented = augment_frame(frame, pool, params, aug_rng);
  std::cout << "inserted " << augmented.gas_boxes.size() << " gas cloud(s), " << augmented.frame.cloud.size()
            << " points\n";

  const auto scanned = resample_to_sensor(augmented, sensors::layer40_like());
  std::cout << "after resampling: " << scanned.frame.cloud.size() << " points, " << scanned.gas_boxes.size()
            << " gas box(es)\n";

  if (!scanned.gas_boxes.empty()) {
    const std::vector<Box3D> preds{car, scanned.gas_boxes[0]};
    const double l_noise = noise_loss(preds, scanned.gas_boxes);
    const auto loss = total_loss(1.25, l_noise);
    std::cout << "noise loss " << loss.l_noise << ", total " << loss.total << "\n";
  }
}
