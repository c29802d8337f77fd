#pragma once

// Synthetic gas-exhaust clouds: reconstruct a labeled source cloud with a
// random alpha, sample N points uniformly on the surface, and copy each
// sample's reflectivity from its nearest source point. The random-noise
// baseline draws isotropic Gaussian blobs instead.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gasaug/alpha_shape.hpp"
#include "gasaug/core.hpp"
#include "gasaug/delaunay.hpp"
#include "gasaug/error.hpp"
#include "gasaug/kdtree.hpp"
#include "gasaug/rng.hpp"

namespace gasaug {

inline constexpr int kMinSamples = 100;
inline constexpr int kMaxSamples = 1000;
inline constexpr double kMaxNoiseSigma = 0.2;
inline constexpr int kAlphaRetries = 5;

struct GasProvenance {
  enum class Kind { Surface, RandomNoise, Loaded };

  Kind kind = Kind::Loaded;
  std::string source_id;
  double alpha = 0.0;   // surface: alpha actually used (after retries)
  int count = 0;        // N (surface) or k (noise)
  double sigma = 0.0;   // noise only

  friend bool operator==(const GasProvenance&, const GasProvenance&) = default;
};

/// A gas cloud centred on its centroid, with its tight axis-aligned box.
struct GasCloud {
  PointCloud cloud;
  Box3D tight_box;
  GasProvenance provenance;

  friend bool operator==(const GasCloud&, const GasCloud&) = default;
};

/// Smallest axis-aligned (yaw 0) box whose closed extent contains every point.
/// Half-extents are measured from the chosen center with the same arithmetic
/// box_contains uses, so containment holds exactly.
inline Box3D tight_box(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptySource, "tight box of an empty cloud");
  Vec3 lo = cloud.points.front().position();
  Vec3 hi = lo;
  for (const auto& p : cloud.points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Vec3 center = 0.5 * (lo + hi);
  Vec3 half{};
  for (const auto& p : cloud.points) {
    const Vec3 d = p.position() - center;
    half = {std::max(half.x, std::abs(d.x)), std::max(half.y, std::abs(d.y)), std::max(half.z, std::abs(d.z))};
  }
  // Flat clouds still need a valid box.
  constexpr double min_half = 0.5e-6;
  return {center, 2.0 * std::max(half.x, min_half), 2.0 * std::max(half.y, min_half),
          2.0 * std::max(half.z, min_half), 0.0};
}

inline Vec3 centroid(const PointCloud& cloud) {
  Vec3 sum{};
  for (const auto& p : cloud.points) sum = sum + p.position();
  return (1.0 / static_cast<double>(cloud.size())) * sum;
}

/// Shifts the cloud so its centroid is the origin.
inline void recenter(PointCloud& cloud) {
  if (cloud.empty()) return;
  const Vec3 c = centroid(cloud);
  for (auto& p : cloud.points) {
    p.x -= c.x;
    p.y -= c.y;
    p.z -= c.z;
  }
}

inline GasCloud make_gas_cloud(PointCloud cloud, GasProvenance provenance) {
  GasCloud gas{std::move(cloud), Box3D{}, std::move(provenance)};
  gas.tight_box = tight_box(gas.cloud);
  return gas;
}

struct SurfaceSample {
  Vec3 position;
  std::uint32_t triangle = 0;
};

/// Area-weighted triangle choice followed by folded uniform barycentric
/// coordinates; per sample the draws are (triangle, u, v).
inline std::vector<SurfaceSample> sample_surface_detailed(const TriangleMesh& mesh, int n, SeededRng& rng) {
  if (n < kMinSamples || n > kMaxSamples) {
    throw Error(ErrorCode::NOutOfRange, "sample count " + std::to_string(n) + " outside [100, 1000]");
  }
  if (mesh.triangles.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");
  std::vector<double> cdf(mesh.areas.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.areas.size(); ++i) {
    total += mesh.areas[i];
    cdf[i] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyMesh, "mesh has zero area");

  std::vector<SurfaceSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const double pick = rng.uniform01() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    if (it == cdf.end()) --it;
    const auto tri = static_cast<std::size_t>(it - cdf.begin());
    double u = rng.uniform01();
    double v = rng.uniform01();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& t = mesh.triangles[tri];
    const Vec3 a = mesh.vertices[t[0]];
    const Vec3 b = mesh.vertices[t[1]];
    const Vec3 c = mesh.vertices[t[2]];
    out.push_back({a + u * (b - a) + v * (c - a), static_cast<std::uint32_t>(tri)});
  }
  return out;
}

inline std::vector<Vec3> sample_surface(const TriangleMesh& mesh, int n, SeededRng& rng) {
  const auto detailed = sample_surface_detailed(mesh, n, rng);
  std::vector<Vec3> out;
  out.reserve(detailed.size());
  for (const auto& s : detailed) out.push_back(s.position);
  return out;
}

/// Each sample takes the reflectivity of its nearest source point (lowest
/// source index on ties).
inline PointCloud transfer_reflectivity(std::span<const Vec3> samples, const PointCloud& source) {
  if (source.empty()) throw Error(ErrorCode::EmptySource, "reflectivity source is empty");
  const auto src = positions(source);
  const KdTree tree(src);
  PointCloud out;
  out.frame_id = source.frame_id;
  out.points.reserve(samples.size());
  for (const auto& s : samples) {
    out.points.push_back(make_point(s, source.points[tree.nearest(s)].reflectivity));
  }
  return out;
}

/// One synthetic cloud from a labeled source. Draw order: alpha ~ U(0, 1],
/// N ~ U{100..1000}, then the surface samples. An empty alpha complex is
/// retried with alpha <- min(1, 2 alpha), at most kAlphaRetries times.
inline GasCloud generate_cloud(const PointCloud& source, SeededRng& rng, const std::string& source_id = {}) {
  if (source.size() < kMinReconstructPoints) {
    throw Error(ErrorCode::TooFewPoints, "pool source has " + std::to_string(source.size()) + " points");
  }
  double alpha = rng.uniform_open_closed();
  const int n = static_cast<int>(rng.uniform_int(kMinSamples, kMaxSamples));

  const auto pts = positions(source);
  const auto complex = delaunay3d(pts);
  const double scale = bounding_diagonal(pts);
  std::optional<TriangleMesh> mesh;
  for (int attempt = 0; attempt <= kAlphaRetries; ++attempt) {
    try {
      mesh = alpha_complex_boundary(complex, AlphaParam(alpha), scale);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAlphaComplex) throw;
      if (attempt == kAlphaRetries) break;
      alpha = std::min(1.0, 2.0 * alpha);
    }
  }
  if (!mesh) {
    throw Error(ErrorCode::GenerationFailed, "alpha complex empty after " + std::to_string(kAlphaRetries) + " retries");
  }

  const auto samples = sample_surface(*mesh, n, rng);
  PointCloud cloud = transfer_reflectivity(samples, source);
  cloud.frame_id = source_id;
  recenter(cloud);
  return make_gas_cloud(std::move(cloud), {GasProvenance::Kind::Surface, source_id, alpha, n, 0.0});
}

/// Isotropic Gaussian blob of k points with the given sigma; reflectivity
/// ~ U[0, 1]. Per point the draws are (x, y, z, reflectivity).
inline GasCloud make_gaussian_noise_cloud(double sigma, int k, SeededRng& rng) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (k < kMinSamples || k > kMaxSamples) {
    throw Error(ErrorCode::NOutOfRange, "noise point count " + std::to_string(k) + " outside [100, 1000]");
  }
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double x = rng.normal(0.0, sigma);
    const double y = rng.normal(0.0, sigma);
    const double z = rng.normal(0.0, sigma);
    cloud.points.push_back({x, y, z, rng.uniform01()});
  }
  recenter(cloud);
  return make_gas_cloud(std::move(cloud), {GasProvenance::Kind::RandomNoise, "random_noise", 0.0, k, sigma});
}

/// Random-noise baseline: sigma ~ U(0, 0.2], k ~ U{100..1000}.
inline GasCloud generate_random_noise_cloud(SeededRng& rng) {
  const double sigma = kMaxNoiseSigma * rng.uniform_open_closed();
  const int k = static_cast<int>(rng.uniform_int(kMinSamples, kMaxSamples));
  return make_gaussian_noise_cloud(sigma, k, rng);
}

struct PoolSource {
  std::string id;
  PointCloud cloud;

  friend bool operator==(const PoolSource&, const PoolSource&) = default;
};

/// Labeled source clouds plus the generated variants drawn during augmentation.
struct GasCloudPool {
  std::vector<PoolSource> sources;
  std::vector<GasCloud> generated;

  /// Rejects sources below the reconstruction minimum.
  void add_source(std::string id, PointCloud cloud) {
    if (cloud.size() < kMinReconstructPoints) {
      throw Error(ErrorCode::TooFewPoints, "source '" + id + "' has " + std::to_string(cloud.size()) +
                                               " points; at least " + std::to_string(kMinReconstructPoints) +
                                               " required");
    }
    sources.push_back({std::move(id), std::move(cloud)});
  }

  bool empty() const { return generated.empty(); }

  friend bool operator==(const GasCloudPool&, const GasCloudPool&) = default;
};

}  // namespace gasaug
