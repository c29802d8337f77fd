#include <gtest/gtest.h>

#include <random>

#include "gasaug/kdtree.hpp"
#include "oracles.hpp"

using namespace gasaug;

TEST(KdTree, MatchesBruteForceOnRandomClouds) {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (std::size_t n : {1u, 2u, 7u, 9u, 100u, 2000u}) {
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({u(g), u(g), u(g)});
    const KdTree tree(pts);
    for (int q = 0; q < 500; ++q) {
      const Vec3 query{u(g) * 1.5, u(g) * 1.5, u(g) * 1.5};
      ASSERT_EQ(tree.nearest(query), oracle::brute_nearest(pts, query));
    }
  }
}

TEST(KdTree, TiesGoToLowestIndex) {
  // Lattice with duplicates: many exact distance ties.
  std::vector<Vec3> pts;
  for (int rep = 0; rep < 2; ++rep)
    for (int x = 0; x < 6; ++x)
      for (int y = 0; y < 6; ++y)
        for (int z = 0; z < 3; ++z) pts.push_back({double(x), double(y), double(z)});
  const KdTree tree(pts);
  std::mt19937_64 g(2);
  std::uniform_int_distribution<int> h(-1, 11);
  for (int q = 0; q < 3000; ++q) {
    // Half-integer queries sit equidistant from several lattice points.
    const Vec3 query{h(g) * 0.5, h(g) * 0.5, h(g) * 0.25};
    ASSERT_EQ(tree.nearest(query), oracle::brute_nearest(pts, query));
  }
  EXPECT_LT(tree.nearest({2, 3, 1}), pts.size() / 2);
}

TEST(KdTree, EmptyTree) {
  const KdTree tree(std::span<const Vec3>{});
  EXPECT_EQ(tree.size(), 0u);
  EXPECT_EQ(tree.nearest({0, 0, 0}), 0u);
}
