#pragma once

// Small on-disk datasets for end-to-end tests.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "gasaug/io.hpp"

namespace fixture {

namespace fs = std::filesystem;
using namespace gasaug;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("gasaug_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

inline std::string frame_name(int i) {
  char b[16];
  std::snprintf(b, sizeof b, "%06d", i);
  return b;
}

/// Frames with a ring of background returns, a few cars in front of the
/// sensor, and perfect predictions (score falls with index).
inline void write_dataset(const fs::path& root, int frames, std::uint64_t seed, bool with_pred = true) {
  fs::create_directories(root / "velodyne");
  fs::create_directories(root / "label");
  if (with_pred) fs::create_directories(root / "pred");
  const io::DatasetLayout layout{root};
  SeededRng rng(seed);
  for (int f = 0; f < frames; ++f) {
    const std::string id = frame_name(f);
    PointCloud cloud;
    for (int i = 0; i < 3000; ++i) {
      const double r = rng.uniform(3.0, 60.0);
      const double th = rng.uniform(-3.14159, 3.14159);
      cloud.points.push_back({r * std::cos(th), r * std::sin(th), rng.uniform(-1.8, 0.5), rng.uniform01()});
    }
    std::vector<LabeledBox> gts;
    std::vector<ScoredBox> preds;
    const int cars = 1 + static_cast<int>(rng.uniform_int(0, 3));
    for (int c = 0; c < cars; ++c) {
      const Box3D b({8.0 + 7.0 * c, rng.uniform(-6, 6), -0.95}, 4.1, 1.8, 1.55, rng.uniform(-3, 3));
      gts.push_back({b, c % 2 ? "Van" : "Car", static_cast<int>(rng.uniform_int(0, 2)), 0.1 * c, std::nullopt});
      preds.push_back({b, 0.9 - 0.1 * c, "Car"});
      for (int i = 0; i < 150; ++i) {
        const Vec3 local{rng.uniform(-2, 2), rng.uniform(-0.9, 0.9), rng.uniform(-0.75, 0.75)};
        cloud.points.push_back(make_point(from_box_frame(local, b), rng.uniform01()));
      }
    }
    gts.push_back({Box3D({30, 20, -1}, 2, 2, 2, 0), "Pedestrian", 0, 0.0, std::nullopt});
    io::write_point_cloud(cloud, layout.cloud_path(id));
    io::write_labels(layout.label_path(id), gts);
    if (with_pred) io::write_predictions(layout.pred_path(id), preds);
  }
}

/// A pool directory holding source plumes only.
inline void write_sources(const fs::path& dir, int sources, std::uint64_t seed) {
  GasCloudPool pool;
  SeededRng rng(seed);
  for (int s = 0; s < sources; ++s) {
    PointCloud c;
    for (int i = 0; i < 150; ++i) {
      const double t = rng.uniform01();
      c.points.push_back({-1.5 * t + 0.25 * rng.normal(), 0.3 * (1 + t) * rng.normal(), 0.2 * (1 + t) * rng.normal(),
                          0.05 + 0.1 * rng.uniform01()});
    }
    pool.add_source("plume" + std::to_string(s), c);
  }
  io::write_pool(pool, dir);
}

}  // namespace fixture
