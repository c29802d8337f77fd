#pragma once

// Incremental (Bowyer-Watson) 3D Delaunay tetrahedralization.
//
// The convex hull is closed off with "ghost" tetrahedra sharing a symbolic
// vertex at infinity, so the finite tetrahedra always tile the exact convex
// hull. Conflict tests use exact predicates and a strict in-sphere rule:
// cospherical configurations are resolved by insertion order, which is fixed,
// so identical input always gives identical output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gasaug/core.hpp"
#include "gasaug/error.hpp"
#include "gasaug/predicates.hpp"
#include "gasaug/rng.hpp"

namespace gasaug {

/// Finite Delaunay tetrahedra over `vertices`. Tetrahedra are positively
/// oriented (orient3d > 0). neighbors[t][i] is the tetra across the face
/// opposite vertex i, or -1 on the convex hull.
struct TetraComplex {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tetrahedra;
  std::vector<std::array<int, 4>> neighbors;
  std::vector<Vec3> circumcenters;
  std::vector<double> circumradii;
  std::vector<double> volumes;

  std::size_t size() const { return tetrahedra.size(); }
};

/// Minimum spread of the centered input along its thinnest principal direction.
inline constexpr double kCoplanarExtent = 1e-6;

/// Extent of `points` along the eigenvector of the smallest covariance eigenvalue.
inline double thinnest_extent(std::span<const Vec3> points) {
  if (points.empty()) return 0.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += Eigen::Vector3d(p.x, p.y, p.z);
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d axis = solver.eigenvectors().col(0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : points) {
    const double s = (Eigen::Vector3d(p.x, p.y, p.z) - mean).dot(axis);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

/// Circumcenter of a tetrahedron; non-finite when it is flat in floating point.
inline Vec3 tetra_circumcenter(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  const Vec3 u = b - a;
  const Vec3 v = c - a;
  const Vec3 w = d - a;
  const double denom = 2.0 * dot(u, cross(v, w));
  const Vec3 num = dot(u, u) * cross(v, w) + dot(v, v) * cross(w, u) + dot(w, w) * cross(u, v);
  if (denom == 0.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, inf};
  }
  return a + (1.0 / denom) * num;
}

namespace detail {

class DelaunayBuilder {
 public:
  static constexpr int kInfinite = -1;

  explicit DelaunayBuilder(std::span<const Vec3> points) : points_(points) {}

  TetraComplex build() {
    std::vector<int> order(points_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    // Fixed-seed shuffle: expected-case walk lengths without giving up determinism.
    SeededRng rng(0x5EEDDE1A0A7ULL);
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    const auto seed = initial_simplex(order);
    for (int idx : order) {
      if (std::find(seed.begin(), seed.end(), idx) != seed.end()) continue;
      insert(idx);
    }
    return extract();
  }

 private:
  struct Tet {
    std::array<int, 4> v{};
    std::array<int, 4> nbr{};
    bool alive = true;
  };

  Vec3 pos(int v) const { return points_[static_cast<std::size_t>(v)]; }

  bool is_ghost(const Tet& t) const {
    return t.v[0] == kInfinite || t.v[1] == kInfinite || t.v[2] == kInfinite || t.v[3] == kInfinite;
  }

  std::array<int, 4> initial_simplex(const std::vector<int>& order) {
    const int a = order[0];
    int b = -1;
    int c = -1;
    int d = -1;
    for (int idx : order) {
      if (b < 0) {
        if (!(pos(idx) == pos(a))) b = idx;
      } else if (c < 0) {
        const Vec3 n = cross(pos(b) - pos(a), pos(idx) - pos(a));
        if (dot(n, n) > 0.0) c = idx;
      } else if (predicates::orient3d(pos(a), pos(b), pos(c), pos(idx)) != 0) {
        d = idx;
        break;
      }
    }
    if (d < 0) throw Error(ErrorCode::DegenerateGeometry, "input has no four affinely independent points");
    std::array<int, 4> tet{a, b, c, d};
    if (predicates::orient3d(pos(a), pos(b), pos(c), pos(d)) < 0) std::swap(tet[2], tet[3]);

    std::vector<int> created;
    created.push_back(new_tet(tet));
    for (int i = 0; i < 4; ++i) {
      std::array<int, 4> ghost = tet;
      ghost[i] = kInfinite;
      // Odd permutation: the ghost's infinite vertex lies beyond face i.
      const int j = (i + 1) % 4;
      const int k = (i + 2) % 4;
      std::swap(ghost[j], ghost[k]);
      created.push_back(new_tet(ghost));
    }
    link_unmatched(created);
    last_ = created.front();
    return tet;
  }

  int new_tet(const std::array<int, 4>& v) {
    Tet t;
    t.v = v;
    t.nbr = {-1, -1, -1, -1};
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      tets_[static_cast<std::size_t>(id)] = t;
      stamp_[static_cast<std::size_t>(id)] = 0;
      return id;
    }
    tets_.push_back(t);
    stamp_.push_back(0);
    state_.push_back(0);
    return static_cast<int>(tets_.size()) - 1;
  }

  static std::array<int, 3> face_key(const std::array<int, 4>& v, int opposite) {
    std::array<int, 3> key{};
    int n = 0;
    for (int s = 0; s < 4; ++s) {
      if (s != opposite) key[static_cast<std::size_t>(n++)] = v[static_cast<std::size_t>(s)];
    }
    std::sort(key.begin(), key.end());
    return key;
  }

  // Pairs up faces of the given tets whose neighbor slot is still empty.
  void link_unmatched(const std::vector<int>& ids) {
    std::map<std::array<int, 3>, std::pair<int, int>> open;
    for (int id : ids) {
      for (int s = 0; s < 4; ++s) {
        Tet& t = tets_[static_cast<std::size_t>(id)];
        if (t.nbr[static_cast<std::size_t>(s)] >= 0) continue;
        const auto key = face_key(t.v, s);
        auto it = open.find(key);
        if (it == open.end()) {
          open.emplace(key, std::make_pair(id, s));
        } else {
          const auto [other, os] = it->second;
          t.nbr[static_cast<std::size_t>(s)] = other;
          tets_[static_cast<std::size_t>(other)].nbr[static_cast<std::size_t>(os)] = id;
          open.erase(it);
        }
      }
    }
  }

  // Orientation of tet `t` with vertex slot `slot` replaced by point p.
  int orient_with(const Tet& t, int slot, Vec3 p) const {
    std::array<Vec3, 4> q{};
    for (int s = 0; s < 4; ++s) q[static_cast<std::size_t>(s)] = s == slot ? p : pos(t.v[static_cast<std::size_t>(s)]);
    return predicates::orient3d(q[0], q[1], q[2], q[3]);
  }

  bool in_conflict(const Tet& t, Vec3 p) const {
    for (int s = 0; s < 4; ++s) {
      if (t.v[static_cast<std::size_t>(s)] != kInfinite) continue;
      const int o = orient_with(t, s, p);
      if (o != 0) return o > 0;
      std::array<Vec3, 3> f{};
      int n = 0;
      for (int r = 0; r < 4; ++r) {
        if (r != s) f[static_cast<std::size_t>(n++)] = pos(t.v[static_cast<std::size_t>(r)]);
      }
      return predicates::coplanar_incircle(f[0], f[1], f[2], p) > 0;
    }
    return predicates::insphere(pos(t.v[0]), pos(t.v[1]), pos(t.v[2]), pos(t.v[3]), p) > 0;
  }

  // Visibility walk toward p. Returns a tet that contains p or a ghost whose
  // hull face p lies strictly beyond; -1 if the walk did not terminate.
  int locate(Vec3 p) {
    int t = last_;
    if (!tets_[static_cast<std::size_t>(t)].alive) t = first_alive();
    {
      const Tet& start = tets_[static_cast<std::size_t>(t)];
      if (is_ghost(start)) {
        for (int s = 0; s < 4; ++s) {
          if (start.v[static_cast<std::size_t>(s)] == kInfinite) t = start.nbr[static_cast<std::size_t>(s)];
        }
      }
    }
    const std::size_t limit = 4 * tets_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tet& cur = tets_[static_cast<std::size_t>(t)];
      if (is_ghost(cur)) return t;
      walk_state_ = walk_state_ * 6364136223846793005ULL + 1442695040888963407ULL;
      const int offset = static_cast<int>(walk_state_ >> 62);
      bool moved = false;
      for (int r = 0; r < 4; ++r) {
        const int s = (r + offset) % 4;
        if (orient_with(cur, s, p) < 0) {
          t = cur.nbr[static_cast<std::size_t>(s)];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    return -1;
  }

  int first_alive() const {
    for (std::size_t i = 0; i < tets_.size(); ++i) {
      if (tets_[i].alive) return static_cast<int>(i);
    }
    return -1;
  }

  void insert(int idx) {
    const Vec3 p = pos(idx);
    ++generation_;
    int seed = locate(p);
    if (seed >= 0 && !in_conflict(tets_[static_cast<std::size_t>(seed)], p)) seed = -1;
    if (seed < 0) {
      for (std::size_t i = 0; i < tets_.size(); ++i) {
        if (tets_[i].alive && in_conflict(tets_[i], p)) {
          seed = static_cast<int>(i);
          break;
        }
      }
    }
    if (seed < 0) return;  // duplicate of an existing vertex

    std::vector<int> cavity{seed};
    std::vector<std::pair<int, int>> boundary;
    mark(seed, 1);
    for (std::size_t c = 0; c < cavity.size(); ++c) {
      const int t = cavity[c];
      for (int s = 0; s < 4; ++s) {
        const int n = tets_[static_cast<std::size_t>(t)].nbr[static_cast<std::size_t>(s)];
        int st = status(n);
        if (st == 0) {
          st = in_conflict(tets_[static_cast<std::size_t>(n)], p) ? 1 : 2;
          mark(n, st);
          if (st == 1) cavity.push_back(n);
        }
        if (st == 2) boundary.emplace_back(t, s);
      }
    }

    struct Pending {
      std::array<int, 4> v;
      int slot;
      int outside;
      int outside_slot;
    };
    std::vector<Pending> pending;
    pending.reserve(boundary.size());
    for (const auto& [t, s] : boundary) {
      const Tet& old = tets_[static_cast<std::size_t>(t)];
      const int out = old.nbr[static_cast<std::size_t>(s)];
      const Tet& o = tets_[static_cast<std::size_t>(out)];
      int back = -1;
      for (int r = 0; r < 4; ++r) {
        if (o.nbr[static_cast<std::size_t>(r)] == t) back = r;
      }
      std::array<int, 4> v = old.v;
      v[static_cast<std::size_t>(s)] = idx;
      pending.push_back({v, s, out, back});
    }
    for (int t : cavity) {
      tets_[static_cast<std::size_t>(t)].alive = false;
      free_.push_back(t);
    }
    std::vector<int> created;
    created.reserve(pending.size());
    for (const auto& pd : pending) {
      const int id = new_tet(pd.v);
      Tet& nt = tets_[static_cast<std::size_t>(id)];
      nt.nbr[static_cast<std::size_t>(pd.slot)] = pd.outside;
      tets_[static_cast<std::size_t>(pd.outside)].nbr[static_cast<std::size_t>(pd.outside_slot)] = id;
      created.push_back(id);
    }
    link_unmatched(created);
    last_ = created.front();
  }

  void mark(int t, int st) {
    stamp_[static_cast<std::size_t>(t)] = generation_;
    state_[static_cast<std::size_t>(t)] = st;
  }
  int status(int t) const {
    return stamp_[static_cast<std::size_t>(t)] == generation_ ? state_[static_cast<std::size_t>(t)] : 0;
  }

  TetraComplex extract() const {
    TetraComplex out;
    out.vertices.assign(points_.begin(), points_.end());
    std::vector<int> remap(tets_.size(), -1);
    for (std::size_t i = 0; i < tets_.size(); ++i) {
      if (tets_[i].alive && !is_ghost(tets_[i])) {
        remap[i] = static_cast<int>(out.tetrahedra.size());
        out.tetrahedra.push_back(tets_[i].v);
      }
    }
    out.neighbors.reserve(out.tetrahedra.size());
    for (std::size_t i = 0; i < tets_.size(); ++i) {
      if (remap[i] < 0) continue;
      std::array<int, 4> nb{};
      for (int s = 0; s < 4; ++s) nb[static_cast<std::size_t>(s)] = remap[static_cast<std::size_t>(tets_[i].nbr[static_cast<std::size_t>(s)])];
      out.neighbors.push_back(nb);
    }
    for (const auto& t : out.tetrahedra) {
      const Vec3 a = pos(t[0]);
      const Vec3 b = pos(t[1]);
      const Vec3 c = pos(t[2]);
      const Vec3 d = pos(t[3]);
      const Vec3 center = tetra_circumcenter(a, b, c, d);
      out.circumcenters.push_back(center);
      out.circumradii.push_back(std::isfinite(center.x) ? distance(center, a)
                                                        : std::numeric_limits<double>::infinity());
      out.volumes.push_back(dot(b - a, cross(c - a, d - a)) / 6.0);
    }
    return out;
  }

  std::span<const Vec3> points_;
  std::vector<Tet> tets_;
  std::vector<int> free_;
  std::vector<std::uint64_t> stamp_;
  std::vector<int> state_;
  std::uint64_t generation_ = 0;
  std::uint64_t walk_state_ = 0x2545F4914F6CDD1DULL;
  int last_ = 0;
};

}  // namespace detail

/// Delaunay tetrahedralization of `points`. Vertex indices in the result refer
/// to positions in `points`; exact duplicates appear in no tetrahedron.
inline TetraComplex delaunay3d(std::span<const Vec3> points) {
  if (points.size() < 4) throw Error(ErrorCode::TooFewPoints, "delaunay3d needs at least 4 points");
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
    }
  }
  if (thinnest_extent(points) <= kCoplanarExtent) {
    throw Error(ErrorCode::DegenerateGeometry, "points are coplanar or collinear");
  }
  return detail::DelaunayBuilder(points).build();
}

}  // namespace gasaug
