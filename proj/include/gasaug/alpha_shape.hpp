#pragma once

// Alpha-shape surface reconstruction over a Delaunay tetrahedralization.
//
// The unitless alpha in (0, 1] is scaled by the input's bounding-box diagonal
// to give a length alpha_eff; alpha = 1 is the convex-hull limit and maps to
// alpha_eff = infinity (Delaunay slivers on the hull can have circumradii far
// beyond the diagonal, so a finite cap would not close the hull).
// A tetrahedron is interior when its circumradius is at most alpha_eff.
// The surface keeps
//   - regular faces: exactly one incident tetrahedron is interior;
//   - singular faces: no incident tetrahedron is interior, but the triangle's
//     own circumradius is at most alpha_eff and its diametral ball holds
//     neither opposite apex (the triangle is alpha-exposed).
// Faces between two interior tetrahedra are dropped.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "gasaug/core.hpp"
#include "gasaug/delaunay.hpp"
#include "gasaug/error.hpp"
#include "gasaug/predicates.hpp"

namespace gasaug {

/// Minimum number of points a cloud needs before it is worth reconstructing.
inline constexpr std::size_t kMinReconstructPoints = 30;
inline constexpr double kMinTriangleArea = 1e-12;

class AlphaParam {
 public:
  explicit AlphaParam(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
    }
  }
  double value() const { return alpha_; }

 private:
  double alpha_;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::vector<double> areas;

  double total_area() const { return std::accumulate(areas.begin(), areas.end(), 0.0); }
  bool empty() const { return triangles.empty(); }
  friend bool operator==(const TriangleMesh&, const TriangleMesh&) = default;
};

inline double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * norm(cross(b - a, c - a)); }

/// Center of the smallest sphere through a triangle (its circumcircle center).
inline Vec3 triangle_circumcenter(Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  const Vec3 n = cross(u, v);
  const double denom = 2.0 * dot(n, n);
  const Vec3 num = dot(u, u) * cross(v, n) + dot(v, v) * cross(n, u);
  return a + (1.0 / denom) * num;
}

inline double bounding_diagonal(std::span<const Vec3> points) {
  if (points.empty()) return 0.0;
  Vec3 lo = points.front();
  Vec3 hi = lo;
  for (const auto& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return distance(lo, hi);
}

/// Length form of alpha: alpha * scale, or infinity at alpha = 1.
inline double effective_alpha(AlphaParam alpha, double scale) {
  return alpha.value() >= 1.0 ? std::numeric_limits<double>::infinity() : alpha.value() * scale;
}

/// Interior flags of the alpha complex at length alpha_eff.
inline std::vector<bool> interior_tetrahedra(const TetraComplex& complex, double alpha_eff) {
  std::vector<bool> interior(complex.size());
  for (std::size_t t = 0; t < complex.size(); ++t) interior[t] = complex.circumradii[t] <= alpha_eff;
  return interior;
}

namespace detail {

inline std::array<int, 3> face_of(const std::array<int, 4>& tet, int opposite) {
  std::array<int, 3> f{};
  int n = 0;
  for (int s = 0; s < 4; ++s) {
    if (s != opposite) f[static_cast<std::size_t>(n++)] = tet[static_cast<std::size_t>(s)];
  }
  return f;
}

inline int apex_of(const std::array<int, 4>& tet, int opposite) { return tet[static_cast<std::size_t>(opposite)]; }

}  // namespace detail

/// Boundary surface of the alpha complex; `scale` converts alpha into a length.
inline TriangleMesh alpha_complex_boundary(const TetraComplex& complex, AlphaParam alpha, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidArgument, "alpha scale must be positive");
  }
  const double alpha_eff = effective_alpha(alpha, scale);
  const auto interior = interior_tetrahedra(complex, alpha_eff);
  const auto& V = complex.vertices;
  auto at = [&](int i) { return V[static_cast<std::size_t>(i)]; };

  std::vector<std::array<int, 3>> faces;
  for (std::size_t t = 0; t < complex.size(); ++t) {
    const auto& tet = complex.tetrahedra[t];
    for (int s = 0; s < 4; ++s) {
      const int n = complex.neighbors[t][static_cast<std::size_t>(s)];
      if (n >= 0 && static_cast<std::size_t>(n) < t) continue;  // visit shared faces once
      const bool in_t = interior[t];
      const bool in_n = n >= 0 && interior[static_cast<std::size_t>(n)];
      auto f = detail::face_of(tet, s);
      if (in_t && in_n) continue;
      if (in_t != in_n) {
        // Orient the triangle away from the interior tetrahedron.
        const int apex = in_t ? detail::apex_of(tet, s) : -1;
        int inner_apex = apex;
        if (!in_t) {
          const auto& other = complex.tetrahedra[static_cast<std::size_t>(n)];
          for (int r = 0; r < 4; ++r) {
            if (complex.neighbors[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] == static_cast<int>(t)) {
              inner_apex = detail::apex_of(other, r);
            }
          }
        }
        if (predicates::orient3d(at(f[0]), at(f[1]), at(f[2]), at(inner_apex)) > 0) std::swap(f[1], f[2]);
        faces.push_back(f);
        continue;
      }
      // Neither side interior: keep the face only if it is alpha-exposed.
      const Vec3 a = at(f[0]);
      const Vec3 b = at(f[1]);
      const Vec3 c = at(f[2]);
      const Vec3 center = triangle_circumcenter(a, b, c);
      const double r2 = dot(a - center, a - center);
      if (!std::isfinite(r2) || std::sqrt(r2) > alpha_eff) continue;
      auto attached = [&](int apex) { return dot(at(apex) - center, at(apex) - center) < r2; };
      if (attached(detail::apex_of(tet, s))) continue;
      if (n >= 0) {
        const auto& other = complex.tetrahedra[static_cast<std::size_t>(n)];
        bool hit = false;
        for (int r = 0; r < 4; ++r) {
          if (complex.neighbors[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)] == static_cast<int>(t)) {
            hit = attached(detail::apex_of(other, r));
          }
        }
        if (hit) continue;
      }
      faces.push_back(f);
    }
  }

  TriangleMesh mesh;
  std::vector<int> remap(V.size(), -1);
  for (const auto& f : faces) {
    const double area = triangle_area(at(f[0]), at(f[1]), at(f[2]));
    if (!(area > kMinTriangleArea)) continue;
    std::array<std::uint32_t, 3> tri{};
    for (std::size_t k = 0; k < 3; ++k) {
      auto& slot = remap[static_cast<std::size_t>(f[k])];
      if (slot < 0) {
        slot = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(at(f[k]));
      }
      tri[k] = static_cast<std::uint32_t>(slot);
    }
    mesh.triangles.push_back(tri);
    mesh.areas.push_back(area);
  }
  if (mesh.triangles.empty()) {
    throw Error(ErrorCode::EmptyAlphaComplex, "no boundary triangles at alpha_eff=" + std::to_string(alpha_eff));
  }
  return mesh;
}

/// Delaunay tetrahedralization followed by alpha-boundary extraction, with
/// alpha scaled by the cloud's bounding-box diagonal.
inline TriangleMesh reconstruct(const PointCloud& cloud, AlphaParam alpha) {
  if (cloud.size() < kMinReconstructPoints) {
    throw Error(ErrorCode::TooFewPoints, "reconstruction needs at least " +
                                             std::to_string(kMinReconstructPoints) + " points, got " +
                                             std::to_string(cloud.size()));
  }
  const auto pts = positions(cloud);
  const auto complex = delaunay3d(pts);
  return alpha_complex_boundary(complex, alpha, bounding_diagonal(pts));
}

}  // namespace gasaug
