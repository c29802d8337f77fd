#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gasaug/loss.hpp"
#include "oracles.hpp"

using namespace gasaug;
using std::numbers::pi;

namespace {

Box3D random_box(std::mt19937_64& g, double spread = 1.5) {
  std::uniform_real_distribution<double> c(-spread, spread), d(0.3, 3.0), y(-pi, pi);
  return {{c(g), c(g), c(g) * 0.5}, d(g), d(g), d(g), y(g)};
}

}  // namespace

TEST(IoU, AnalyticCases) {
  const Box3D a({0, 0, 0}, 1, 1, 1, 0);
  EXPECT_NEAR(iou3d(a, a), 1.0, 1e-12);
  EXPECT_NEAR(iou3d(a, Box3D({0.5, 0, 0}, 1, 1, 1, 0)), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(iou3d(a, Box3D({0, 0, 0.5}, 1, 1, 1, 0)), 1.0 / 3.0, 1e-9);
  EXPECT_EQ(iou3d(a, Box3D({3, 0, 0}, 1, 1, 1, 0)), 0.0);
  const Box3D r({0, 0, 0}, 1, 1, 1, pi / 4);
  const double octagon = 2.0 * (std::sqrt(2.0) - 1.0);
  EXPECT_NEAR(bev_intersection_area(a, r), octagon, 1e-9);
  EXPECT_NEAR(bev_iou(a, r), octagon / (2.0 - octagon), 1e-9);
  EXPECT_NEAR(iou3d(a, r), octagon / (2.0 - octagon), 1e-9);
  // Nested box.
  EXPECT_NEAR(iou3d(a, Box3D({0, 0, 0}, 0.5, 0.5, 0.5, 0.3)), 0.125, 1e-12);
  // Touching faces have zero overlap.
  EXPECT_NEAR(iou3d(a, Box3D({1, 0, 0}, 1, 1, 1, 0)), 0.0, 1e-12);
}

TEST(IoU, MatchesMonteCarlo) {
  std::mt19937_64 g(1);
  for (int i = 0; i < 40; ++i) {
    const Box3D a = random_box(g), b = random_box(g);
    EXPECT_NEAR(iou3d(a, b), oracle::monte_carlo_iou(a, b, 200000, g), 0.01);
  }
}

TEST(IoU, SymmetryPeriodicityInvariance) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 300; ++i) {
    const Box3D a = random_box(g), b = random_box(g);
    const double v = iou3d(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, iou3d(b, a), 1e-12);
    const Box3D a_pi(a.center(), a.length(), a.width(), a.height(), a.yaw() + pi);
    EXPECT_NEAR(v, iou3d(a_pi, b), 1e-9);
    // Rigid motion of both boxes.
    const double t = u(g);
    const Vec3 shift{u(g), u(g), u(g)};
    auto move = [&](const Box3D& x) {
      return Box3D(rotate_z(x.center(), t) + shift, x.length(), x.width(), x.height(), x.yaw() + t);
    };
    EXPECT_NEAR(v, iou3d(move(a), move(b)), 1e-9);
    EXPECT_LE(bev_intersection_area(a, b), std::min(a.length() * a.width(), b.length() * b.width()) + 1e-12);
  }
}

TEST(IoU, Matrix) {
  std::mt19937_64 g(3);
  std::vector<Box3D> p, b;
  for (int i = 0; i < 4; ++i) p.push_back(random_box(g));
  for (int i = 0; i < 3; ++i) b.push_back(random_box(g));
  const auto m = iou_matrix(p, b);
  ASSERT_EQ(m.rows, 4u);
  ASSERT_EQ(m.cols, 3u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), iou3d(p[i], b[j]));
}

TEST(NoiseLoss, MeanOfMax) {
  const Box3D gas({0, 0, 0}, 1, 1, 1, 0);
  const Box3D same = gas, half({0.5, 0, 0}, 1, 1, 1, 0), far({9, 0, 0}, 1, 1, 1, 0);
  EXPECT_EQ(noise_loss(std::vector<Box3D>{}, std::vector<Box3D>{gas}), 0.0);
  EXPECT_EQ(noise_loss(std::vector<Box3D>{same}, std::vector<Box3D>{}), 0.0);
  EXPECT_NEAR(noise_loss(std::vector<Box3D>{same}, std::vector<Box3D>{gas}), 1.0, 1e-12);
  EXPECT_NEAR(noise_loss(std::vector<Box3D>{half, far}, std::vector<Box3D>{gas}), 1.0 / 6.0, 1e-9);
  EXPECT_NEAR(noise_loss(std::vector<Box3D>{same, half, far}, std::vector<Box3D>{gas}), 4.0 / 9.0, 1e-9);
  // Max over gas boxes, not sum.
  EXPECT_NEAR(noise_loss(std::vector<Box3D>{half}, std::vector<Box3D>{far, gas}), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(noise_loss(std::vector<Box3D>{same}, std::vector<Box3D>{half, far, gas}), 1.0, 1e-12);
}

TEST(NoiseLoss, GrowsAsPredictionApproachesGas) {
  const Box3D gas({0, 0, 0}, 1, 1, 1, 0);
  double prev = -1;
  for (double x = 2.0; x >= 0.0; x -= 0.1) {
    const double v = noise_loss(std::vector<Box3D>{Box3D({x, 0, 0}, 1, 1, 1, 0)}, std::vector<Box3D>{gas});
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(TotalLoss, Combination) {
  EXPECT_EQ(kDefaultBeta, 0.1);
  const auto l = total_loss(2.0, 0.5);
  EXPECT_DOUBLE_EQ(l.total, 2.05);
  EXPECT_EQ(l.beta, 0.1);
  EXPECT_EQ(total_loss(1.25, 0.5, 0.0).total, 1.25);
  EXPECT_EQ(total_loss(1.0, 0.25, 2.0).total, 1.5);
  EXPECT_THROW(total_loss(-1, 0.5), Error);
  EXPECT_THROW(total_loss(1, 1.5), Error);
  EXPECT_THROW(total_loss(1, 0.5, -0.1), Error);
}
