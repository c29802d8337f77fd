#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "gasaug/alpha_shape.hpp"
#include "oracles.hpp"

using namespace gasaug;
using oracle::IPoint;

namespace {

PointCloud cloud_of(const std::vector<Vec3>& v) {
  PointCloud c;
  for (const auto& p : v) c.points.push_back(make_point(p, 0.5));
  return c;
}

std::vector<Vec3> sphere_points(std::mt19937_64& g, int n) {
  std::normal_distribution<double> nd;
  std::vector<Vec3> p;
  for (int i = 0; i < n; ++i) {
    Vec3 v{nd(g), nd(g), nd(g)};
    p.push_back((1.0 / norm(v)) * v);
  }
  return p;
}

// Closest distance from p to triangle abc (region-based, after Ericson).
double point_triangle_distance(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0 && d2 <= 0) return distance(p, a);
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0 && d4 <= d3) return distance(p, b);
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return distance(p, a + (d1 / (d1 - d3)) * ab);
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0 && d5 <= d6) return distance(p, c);
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return distance(p, a + (d2 / (d2 - d6)) * ac);
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    return distance(p, b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b));
  }
  const double denom = 1.0 / (va + vb + vc);
  return distance(p, a + (vb * denom) * ab + (vc * denom) * ac);
}

}  // namespace

TEST(AlphaParam, Range) {
  EXPECT_NO_THROW(AlphaParam(1.0));
  EXPECT_NO_THROW(AlphaParam(1e-9));
  EXPECT_THROW(AlphaParam(0.0), Error);
  EXPECT_THROW(AlphaParam(1.0000001), Error);
  EXPECT_THROW(AlphaParam(std::nan("")), Error);
}

TEST(AlphaShape, RegularTetrahedronGivesItsFourFaces) {
  const std::vector<Vec3> p{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  const auto tc = delaunay3d(p);
  const auto mesh = alpha_complex_boundary(tc, AlphaParam(1.0), bounding_diagonal(p));
  ASSERT_EQ(mesh.triangles.size(), 4u);
  EXPECT_EQ(mesh.vertices.size(), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    const Vec3 normal = cross(b - a, c - a);
    const Vec3 centroid = (1.0 / 3.0) * (a + b + c);
    EXPECT_GT(dot(normal, centroid), 0.0) << "triangle " << t << " faces inward";
    EXPECT_NEAR(mesh.areas[t], triangle_area(a, b, c), 1e-15);
  }
  EXPECT_NEAR(mesh.total_area(), 4 * std::sqrt(3.0) / 4 * 8, 1e-12);
}

TEST(AlphaShape, ConvexLimitMatchesHullOracle) {
  std::mt19937_64 g(50);
  std::uniform_int_distribution<std::int64_t> u(-100000, 100000);
  int checked = 0;
  while (checked < 50) {
    std::vector<IPoint> ip;
    for (int i = 0; i < 50; ++i) ip.push_back({u(g), u(g), u(g)});
    const auto hull = oracle::hull_vertices(ip);
    if (!hull) continue;
    std::vector<Vec3> v;
    std::map<std::array<double, 3>, std::size_t> index;
    for (std::size_t i = 0; i < ip.size(); ++i) {
      v.push_back({double(ip[i].x), double(ip[i].y), double(ip[i].z)});
      index[{v.back().x, v.back().y, v.back().z}] = i;
    }
    const auto mesh = reconstruct(cloud_of(v), AlphaParam(1.0));
    std::set<std::size_t> got;
    for (const auto& mv : mesh.vertices) got.insert(index.at({mv.x, mv.y, mv.z}));
    EXPECT_EQ(got, *hull) << "cloud " << checked;
    ++checked;
  }
}

TEST(AlphaShape, SphereFidelity) {
  std::mt19937_64 g(2000);
  const auto p = sphere_points(g, 2000);
  const double diag = bounding_diagonal(p);
  const auto tc = delaunay3d(p);
  const auto mesh = alpha_complex_boundary(tc, AlphaParam(0.3 / diag), diag);
  for (const auto& v : mesh.vertices) EXPECT_NEAR(norm(v), 1.0, 1e-6);
  EXPECT_NEAR(mesh.total_area(), 4 * std::numbers::pi, 0.05 * 4 * std::numbers::pi);

  // Closed surface: every edge is shared by exactly two triangles.
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      auto a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  }
  for (const auto& [e, c] : edges) EXPECT_EQ(c, 2);
}

TEST(AlphaShape, InteriorSetsAreMonotoneInAlpha) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> p;
  for (int i = 0; i < 300; ++i) p.push_back({u(g), u(g), 0.3 * u(g)});
  const auto tc = delaunay3d(p);
  const double diag = bounding_diagonal(p);
  std::vector<bool> prev(tc.size(), false);
  for (double a : {0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 1.0}) {
    const auto cur = interior_tetrahedra(tc, effective_alpha(AlphaParam(a), diag));
    for (std::size_t t = 0; t < tc.size(); ++t) {
      EXPECT_TRUE(!prev[t] || cur[t]) << "tet " << t;
    }
    prev = cur;
  }
  for (bool b : prev) EXPECT_TRUE(b);
}

TEST(AlphaShape, BoundaryTrianglesTouchAtMostOneInteriorTet) {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> p;
  for (int i = 0; i < 400; ++i) p.push_back({u(g), 0.6 * u(g), 0.4 * u(g)});
  const auto tc = delaunay3d(p);
  const double diag = bounding_diagonal(p);
  for (double a : {0.08, 0.15, 0.3}) {
    const auto mesh = alpha_complex_boundary(tc, AlphaParam(a), diag);
    const auto interior = interior_tetrahedra(tc, effective_alpha(AlphaParam(a), diag));
    std::map<std::array<double, 3>, int> vid;
    for (std::size_t i = 0; i < p.size(); ++i) vid[{p[i].x, p[i].y, p[i].z}] = static_cast<int>(i);
    std::map<std::array<int, 3>, int> interior_count;
    for (std::size_t t = 0; t < tc.size(); ++t) {
      for (int s = 0; s < 4; ++s) {
        std::array<int, 3> f{};
        int k = 0;
        for (int j = 0; j < 4; ++j) {
          if (j != s) f[k++] = tc.tetrahedra[t][j];
        }
        std::sort(f.begin(), f.end());
        interior_count[f] += interior[t];
      }
    }
    for (const auto& tri : mesh.triangles) {
      std::array<int, 3> f{};
      for (int k = 0; k < 3; ++k) {
        const Vec3 v = mesh.vertices[tri[k]];
        f[k] = vid.at({v.x, v.y, v.z});
      }
      std::sort(f.begin(), f.end());
      EXPECT_LE(interior_count.at(f), 1);
    }
    for (double area : mesh.areas) EXPECT_GT(area, kMinTriangleArea);
    std::vector<bool> referenced(mesh.vertices.size(), false);
    for (const auto& tri : mesh.triangles)
      for (auto v : tri) referenced[v] = true;
    for (bool r : referenced) EXPECT_TRUE(r);
  }
}

TEST(Reconstruct, TetrahedronSurfaceSamplesAtAlphaOne) {
  std::mt19937_64 g(30);
  std::uniform_real_distribution<double> u(0, 1);
  const std::array<Vec3, 4> corner{Vec3{0, 0, 0}, Vec3{2, 0, 0}, Vec3{0, 2, 0}, Vec3{0, 0, 2}};
  std::vector<Vec3> p(corner.begin(), corner.end());
  const std::array<std::array<int, 3>, 4> faces{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
  while (p.size() < 30) {
    const auto& f = faces[p.size() % 4];
    double a = u(g), b = u(g);
    if (a + b > 1) {
      a = 1 - a;
      b = 1 - b;
    }
    p.push_back(corner[f[0]] + a * (corner[f[1]] - corner[f[0]]) + b * (corner[f[2]] - corner[f[0]]));
  }
  const auto mesh = reconstruct(cloud_of(p), AlphaParam(1.0));
  const double tet_area = 3 * 2.0 + std::sqrt(3.0) / 4 * 8;
  EXPECT_NEAR(mesh.total_area(), tet_area, 1e-9);
  // Every triangle lies in one of the four face planes.
  for (const auto& t : mesh.triangles) {
    const Vec3 c = (1.0 / 3.0) * (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]);
    const bool on_face = std::abs(c.x) < 1e-9 || std::abs(c.y) < 1e-9 || std::abs(c.z) < 1e-9 ||
                         std::abs(c.x + c.y + c.z - 2) < 1e-9;
    EXPECT_TRUE(on_face);
  }
}

TEST(Reconstruct, DeterministicAndErrors) {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> p;
  for (int i = 0; i < 120; ++i) p.push_back({u(g), u(g), u(g)});
  const auto c = cloud_of(p);
  EXPECT_EQ(reconstruct(c, AlphaParam(0.4)), reconstruct(c, AlphaParam(0.4)));

  const auto small = cloud_of(std::vector<Vec3>(p.begin(), p.begin() + 29));
  try {
    reconstruct(small, AlphaParam(1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewPoints);
  }
  try {
    reconstruct(c, AlphaParam(1e-6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyAlphaComplex);
  }
}

TEST(Reconstruct, MeshStaysCloseToPlumeCloud) {
  // Plume-like cloud: a dense core with a sparse halo.
  std::mt19937_64 g(32);
  std::normal_distribution<double> nd;
  std::vector<Vec3> p;
  for (int i = 0; i < 400; ++i) p.push_back({0.5 * nd(g), 0.3 * nd(g), 0.2 * nd(g)});
  const auto mesh = reconstruct(cloud_of(p), AlphaParam(0.5));
  const double alpha_eff = 0.5 * bounding_diagonal(p);
  int close = 0;
  for (const auto& q : p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : mesh.triangles) {
      best = std::min(best, point_triangle_distance(q, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]));
    }
    close += best <= 2 * alpha_eff;
  }
  EXPECT_GE(close, static_cast<int>(0.95 * p.size()));
}
