#pragma once

// Orientation and in-sphere predicates. A floating-point evaluation is
// accepted when its magnitude exceeds a forward error bound; otherwise the
// determinant is recomputed exactly with floating-point expansions
// (nonoverlapping sums of doubles, after Shewchuk).

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gasaug/core.hpp"

namespace gasaug::predicates {

namespace detail {

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void fast_two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  y = b - (x - a);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

}  // namespace detail

/// Exact real number held as a nonoverlapping, increasing-magnitude sum of
/// doubles with zero components removed.
class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double v) {
    if (v != 0.0) terms_.push_back(v);
  }

  static Expansion difference(double a, double b) {
    double x = 0.0;
    double y = 0.0;
    detail::two_sum(a, -b, x, y);
    Expansion e;
    if (y != 0.0) e.terms_.push_back(y);
    if (x != 0.0) e.terms_.push_back(x);
    return e;
  }

  int sign() const {
    if (terms_.empty()) return 0;
    return terms_.back() > 0.0 ? 1 : -1;
  }

  /// Approximate value (sum of components).
  double estimate() const {
    double s = 0.0;
    for (double t : terms_) s += t;
    return s;
  }

  friend Expansion operator+(const Expansion& a, const Expansion& b) {
    const Expansion& big = a.terms_.size() >= b.terms_.size() ? a : b;
    const Expansion& small = a.terms_.size() >= b.terms_.size() ? b : a;
    Expansion h = big;
    for (double f : small.terms_) h = h.grow(f);
    return h;
  }

  friend Expansion operator-(const Expansion& a) {
    Expansion n = a;
    for (double& t : n.terms_) t = -t;
    return n;
  }

  friend Expansion operator-(const Expansion& a, const Expansion& b) { return a + (-b); }

  friend Expansion operator*(const Expansion& a, const Expansion& b) {
    const Expansion& big = a.terms_.size() >= b.terms_.size() ? a : b;
    const Expansion& small = a.terms_.size() >= b.terms_.size() ? b : a;
    Expansion sum;
    for (double f : small.terms_) sum = sum + big.scale(f);
    return sum;
  }

 private:
  Expansion grow(double b) const {
    Expansion h;
    h.terms_.reserve(terms_.size() + 1);
    double q = b;
    for (double e : terms_) {
      double sum = 0.0;
      double err = 0.0;
      detail::two_sum(q, e, sum, err);
      q = sum;
      if (err != 0.0) h.terms_.push_back(err);
    }
    if (q != 0.0) h.terms_.push_back(q);
    return h;
  }

  Expansion scale(double b) const {
    Expansion h;
    if (terms_.empty() || b == 0.0) return h;
    h.terms_.reserve(2 * terms_.size());
    double q = 0.0;
    double hh = 0.0;
    detail::two_product(terms_[0], b, q, hh);
    if (hh != 0.0) h.terms_.push_back(hh);
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      double p1 = 0.0;
      double p0 = 0.0;
      detail::two_product(terms_[i], b, p1, p0);
      double sum = 0.0;
      detail::two_sum(q, p0, sum, hh);
      if (hh != 0.0) h.terms_.push_back(hh);
      detail::fast_two_sum(p1, sum, q, hh);
      if (hh != 0.0) h.terms_.push_back(hh);
    }
    if (q != 0.0) h.terms_.push_back(q);
    return h;
  }

  std::vector<double> terms_;
};

namespace detail {

// Magnitude-tracking number: every operation adds absolute values. Evaluating
// a determinant formula with it yields the permanent used in error bounds.
struct Magnitude {
  double v = 0.0;
  friend Magnitude operator+(Magnitude a, Magnitude b) { return {a.v + b.v}; }
  friend Magnitude operator-(Magnitude a, Magnitude b) { return {a.v + b.v}; }
  friend Magnitude operator*(Magnitude a, Magnitude b) { return {a.v * b.v}; }
};

template <class T>
struct Row3 {
  T x, y, z;
};

template <class T>
T det3(const Row3<T>& u, const Row3<T>& v, const Row3<T>& w) {
  return u.x * (v.y * w.z - v.z * w.y) + u.y * (v.z * w.x - v.x * w.z) +
         u.z * (v.x * w.y - v.y * w.x);
}

// Rows are (p_i - e) for the four tetra vertices; lifted coordinate is the
// squared norm. Cofactor expansion along the lift column.
template <class T>
T insphere_det(const Row3<T>& a, const Row3<T>& b, const Row3<T>& c, const Row3<T>& d) {
  const T alift = a.x * a.x + a.y * a.y + a.z * a.z;
  const T blift = b.x * b.x + b.y * b.y + b.z * b.z;
  const T clift = c.x * c.x + c.y * c.y + c.z * c.z;
  const T dlift = d.x * d.x + d.y * d.y + d.z * d.z;
  return (dlift * det3(a, b, c) - clift * det3(a, b, d)) + (blift * det3(a, c, d) - alift * det3(b, c, d));
}

inline Row3<double> diff(Vec3 p, Vec3 q) { return {p.x - q.x, p.y - q.y, p.z - q.z}; }
inline Row3<Magnitude> abs_row(const Row3<double>& r) {
  return {{std::abs(r.x)}, {std::abs(r.y)}, {std::abs(r.z)}};
}
inline Row3<Expansion> exact_diff(Vec3 p, Vec3 q) {
  return {Expansion::difference(p.x, q.x), Expansion::difference(p.y, q.y),
          Expansion::difference(p.z, q.z)};
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Generous multiples of the evaluation depth of each formula.
constexpr double kOrientBound = 16.0 * kEps;
constexpr double kInsphereBound = 32.0 * kEps;

}  // namespace detail

/// Sign of det[b - a, c - a, d - a]: positive when d lies on the side of the
/// plane (a, b, c) that (b - a) x (c - a) points to.
inline int orient3d(Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  using namespace detail;
  const auto u = diff(b, a);
  const auto v = diff(c, a);
  const auto w = diff(d, a);
  const double det = det3(u, v, w);
  const double permanent = det3(abs_row(u), abs_row(v), abs_row(w)).v;
  if (std::abs(det) > kOrientBound * permanent) return sign_of(det);
  return det3(exact_diff(b, a), exact_diff(c, a), exact_diff(d, a)).sign();
}

/// Positive when e lies strictly inside the circumsphere of (a, b, c, d),
/// assuming orient3d(a, b, c, d) > 0; zero when cospherical.
inline int insphere(Vec3 a, Vec3 b, Vec3 c, Vec3 d, Vec3 e) {
  using namespace detail;
  const auto ra = diff(a, e);
  const auto rb = diff(b, e);
  const auto rc = diff(c, e);
  const auto rd = diff(d, e);
  const double det = insphere_det(ra, rb, rc, rd);
  const double permanent = insphere_det(abs_row(ra), abs_row(rb), abs_row(rc), abs_row(rd)).v;
  if (std::abs(det) > kInsphereBound * permanent) return -sign_of(det);
  return -insphere_det(exact_diff(a, e), exact_diff(b, e), exact_diff(c, e), exact_diff(d, e)).sign();
}

/// For p coplanar with the non-degenerate triangle (a, b, c): positive when p
/// is strictly inside the triangle's circumcircle, zero on it. Exact.
inline int coplanar_incircle(Vec3 a, Vec3 b, Vec3 c, Vec3 p) {
  using detail::Row3;
  const Row3<Expansion> u = detail::exact_diff(b, a);
  const Row3<Expansion> v = detail::exact_diff(c, a);
  const Row3<Expansion> w = detail::exact_diff(p, a);
  auto cross_e = [](const Row3<Expansion>& s, const Row3<Expansion>& t) {
    return Row3<Expansion>{s.y * t.z - s.z * t.y, s.z * t.x - s.x * t.z, s.x * t.y - s.y * t.x};
  };
  auto dot_e = [](const Row3<Expansion>& s, const Row3<Expansion>& t) {
    return s.x * t.x + s.y * t.y + s.z * t.z;
  };
  const Row3<Expansion> n = cross_e(u, v);
  const Expansion uu = dot_e(u, u);
  const Expansion vv = dot_e(v, v);
  const Row3<Expansion> vn = cross_e(v, n);
  const Row3<Expansion> nu = cross_e(n, u);
  const Row3<Expansion> twice_center_scaled{uu * vn.x + vv * nu.x, uu * vn.y + vv * nu.y,
                                            uu * vn.z + vv * nu.z};
  return (dot_e(w, twice_center_scaled) - dot_e(w, w) * dot_e(n, n)).sign();
}

}  // namespace gasaug::predicates
