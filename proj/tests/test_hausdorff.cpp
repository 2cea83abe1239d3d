#include "ghkit/hausdorff.hpp"

#include <gtest/gtest.h>

#include <random>

#include "ghkit/generators.hpp"
#include "test_util.hpp"

using namespace ghkit;
using namespace ghkit::testing;

TEST(Hausdorff, Path3Cases) {
  const FiniteMetricSpace p3 = path3();
  EXPECT_DOUBLE_EQ(hausdorff(p3, {0}, {0, 2}), 2.0);
  EXPECT_DOUBLE_EQ(hausdorff(p3, {0, 1}, {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff(p3, {0, 1, 2}, {1}), 1.0);
  EXPECT_THROW(hausdorff(p3, {}, {0}), Error);
}

TEST(Hausdorff, PointedCases) {
  const FiniteMetricSpace p3 = path3();
  EXPECT_DOUBLE_EQ(pointed_hausdorff(p3, {0, 2}, 0, {0, 2}, 2), 2.0);
  EXPECT_DOUBLE_EQ(pointed_hausdorff(p3, {0, 2}, 0, {0, 2}, 0), 0.0);
  EXPECT_DOUBLE_EQ(pointed_hausdorff(p3, {0}, 0, {2}, 2), 4.0);
  EXPECT_THROW(pointed_hausdorff(p3, {0, 2}, 1, {0}, 0), Error);
}

TEST(Hausdorff, MetricOnSubsets) {
  std::mt19937 rng(31);
  for (int t = 0; t < 60; ++t) {
    const FiniteMetricSpace s = random_space(rng, 3, 6);
    auto random_subset = [&]() {
      SubsetRef out;
      std::uniform_int_distribution<int> coin(0, 1);
      while (out.empty())
        for (int i = 0; i < s.n; ++i)
          if (coin(rng)) out.push_back(i);
      return out;
    };
    const SubsetRef a = random_subset(), b = random_subset(), c = random_subset();
    EXPECT_DOUBLE_EQ(hausdorff(s, a, b), hausdorff(s, b, a));
    EXPECT_GE(hausdorff(s, a, b) + hausdorff(s, b, c),
              hausdorff(s, a, c) - 1e-9);
    EXPECT_EQ(hausdorff(s, a, b) == 0.0, a == b);
  }
}

TEST(Hausdorff, PointedLowerBoundLemma) {
  // d_H((A,a),({b},b)) >= sup d(a,a') with equality at b = a.
  std::mt19937 rng(37);
  for (int t = 0; t < 60; ++t) {
    const FiniteMetricSpace s = random_space(rng, 2, 6);
    SubsetRef a_set;
    for (int i = 0; i < s.n; ++i)
      if (i % 2 == 0 || s.n < 3) a_set.push_back(i);
    const int a = a_set.front();
    Dist sup = 0.0;
    for (int q : a_set) sup = std::max(sup, s.at(a, q));
    for (int b = 0; b < s.n; ++b)
      EXPECT_GE(pointed_hausdorff(s, a_set, a, {b}, b), sup - 1e-12);
    EXPECT_NEAR(pointed_hausdorff(s, a_set, a, {a}, a), sup, 1e-12);
  }
}

TEST(Hausdorff, BallLemmaOnLengthLikeSamples) {
  // d_H(ball_r(p), ball_s(q)) <= d(p,q) + |r-s| + mesh on cycles and lattices.
  const PointedSpace c12 = cycle_space(12, 1.0);
  for (int q = 0; q < 12; ++q)
    for (double r : {1.0, 2.0, 4.0})
      for (double s : {1.0, 3.0})
        EXPECT_LE(ball_lemma_violation(c12.space, 0, q, r, s), 1.0 + 1e-12);

  const SequenceItem lat = lattice_space(4.0, 0.25);
  const FiniteMetricSpace& ls = lat.space.space;
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> pd(0, ls.n - 1);
  for (int t = 0; t < 40; ++t) {
    const int p = pd(rng), q = pd(rng);
    EXPECT_LE(ball_lemma_violation(ls, p, q, 1.0, 2.0), 0.25 + 1e-12);
  }
}

TEST(Hausdorff, BallCompositionOnCycle) {
  const PointedSpace c8 = cycle_space(8, 1.0);
  EXPECT_DOUBLE_EQ(ball_composition_violation(c8.space, 0, 1.5, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(ball_composition_violation(c8.space, 2, 2.5, 1.5), 0.0);
}
