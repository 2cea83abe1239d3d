#include "ghkit/gh.hpp"

#include <gtest/gtest.h>

#include <random>

#include "ghkit/generators.hpp"
#include "test_util.hpp"

using namespace ghkit;
using namespace ghkit::testing;

TEST(GhOracle, ClosedForms) {
  const FiniteMetricSpace s2 = segment(2.0);
  EXPECT_DOUBLE_EQ(gh_oracle(s2, s2).value, 0.0);
  EXPECT_DOUBLE_EQ(gh_oracle(s2, one_point()).value, 1.0);
  EXPECT_DOUBLE_EQ(gh_oracle(s2, segment(1.0)).value, 0.5);
}

TEST(GhExact, ClosedFormsAndWitnesses) {
  const FiniteMetricSpace s2 = segment(2.0);

  const GhResult to_point = gh_exact(s2, one_point());
  EXPECT_DOUBLE_EQ(to_point.value, 1.0);
  // The witness is the constant-column extension at diam/2.
  EXPECT_DOUBLE_EQ(to_point.witness.cross_at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(to_point.witness.cross_at(1, 0), 1.0);

  const GhResult self = gh_exact(s2, s2);
  EXPECT_DOUBLE_EQ(self.value, 0.0);
  // Matched cross pairs collapse to the solver floor.
  EXPECT_DOUBLE_EQ(self.witness.cross_at(0, 0), default_tols().solver);

  EXPECT_DOUBLE_EQ(gh_exact(s2, segment(1.0)).value, 0.5);
}

TEST(GhPointedExact, EccentricityFormula) {
  const FiniteMetricSpace p3 = path3();
  const PointedSpace pt{one_point(), 0};
  for (int base = 0; base < 3; ++base)
    EXPECT_NEAR(gh_pointed_exact(PointedSpace{p3, base}, pt).value,
                eccentricity(p3, base), 1e-9);
  EXPECT_DOUBLE_EQ(gh_pointed_exact(PointedSpace{p3, 0}, PointedSpace{p3, 0}).value,
                   0.0);
}

TEST(GhPointedExact, SegmentSampleBaseDependence) {
  // [-1,1] sampled at {-1,0,1}: pointed distance to the one-point space is
  // 1 + |x|, the 1-D analog of the disk example.
  const FiniteMetricSpace seg = validate_space({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  const PointedSpace pt{one_point(), 0};
  const Dist unpointed = gh_exact(seg, one_point()).value;
  EXPECT_DOUBLE_EQ(unpointed, 1.0);
  EXPECT_NEAR(gh_pointed_exact(PointedSpace{seg, 1}, pt).value, 1.0, 1e-9);  // |x|=0
  EXPECT_NEAR(gh_pointed_exact(PointedSpace{seg, 0}, pt).value, 2.0, 1e-9);  // |x|=1
}

TEST(Gh, OracleAgreementOnRandomPairs) {
  std::mt19937 rng(83);
  for (int t = 0; t < 60; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 5);
    const FiniteMetricSpace y = random_space(rng, 2, 5);
    EXPECT_NEAR(gh_exact(x, y).value, gh_oracle(x, y).value, 1e-7);
  }
}

TEST(Gh, WitnessValidatesAndReproducesObjective) {
  std::mt19937 rng(89);
  for (int t = 0; t < 25; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const GhResult r = gh_exact(x, y);
    EXPECT_NO_THROW(validate_admissible(r.witness.left, r.witness.right,
                                        r.witness.cross));
    EXPECT_NEAR(hausdorff_under(r.witness), r.value, 3 * default_tols().solver);

    const GhResult rp = gh_pointed_exact(PointedSpace{x, 0}, PointedSpace{y, 0});
    EXPECT_NEAR(hausdorff_under(rp.witness, std::make_pair(0, 0)), rp.value,
                3 * default_tols().solver);
  }
}

TEST(Gh, ZeroExactlyOnIsometry) {
  std::mt19937 rng(97);
  for (int t = 0; t < 40; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y =
        t % 3 == 0 ? x : random_space(rng, 2, 4);  // force some isometric pairs
    const Dist gh = gh_exact(x, y).value;
    EXPECT_EQ(gh == 0.0, find_isometry(x, y).has_value());
  }
}

TEST(Gh, ScalingLaw) {
  std::mt19937 rng(101);
  for (int t = 0; t < 20; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const Dist base = gh_exact(x, y).value;
    const Dist pbase = gh_pointed_exact(PointedSpace{x, 0}, PointedSpace{y, 0}).value;
    for (double lam : {0.5, 2.0, 3.0}) {
      EXPECT_NEAR(gh_exact(rescale(x, lam), rescale(y, lam)).value, lam * base,
                  lam * 1e-7);
      EXPECT_NEAR(gh_pointed_exact(PointedSpace{rescale(x, lam), 0},
                                   PointedSpace{rescale(y, lam), 0})
                      .value,
                  lam * pbase, lam * 1e-7);
    }
  }
}

TEST(Gh, PointedDominatesUnpointedWithinFactorTwo) {
  std::mt19937 rng(103);
  for (int t = 0; t < 15; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const Dist unpointed = gh_exact(x, y).value;
    for (int xb = 0; xb < x.n; ++xb) {
      Dist best = std::numeric_limits<Dist>::infinity();
      for (int yb = 0; yb < y.n; ++yb) {
        const Dist p =
            gh_pointed_exact(PointedSpace{x, xb}, PointedSpace{y, yb}).value;
        EXPECT_GE(p, unpointed - 1e-9);
        best = std::min(best, p);
      }
      EXPECT_LE(best, 2.0 * unpointed + 1e-7);
    }
  }
}

TEST(Gh, DiameterBound) {
  std::mt19937 rng(107);
  for (int t = 0; t < 30; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 5);
    const FiniteMetricSpace y = random_space(rng, 2, 5);
    EXPECT_LE(std::abs(diameter(x) - diameter(y)),
              2.0 * gh_exact(x, y).value + 1e-9);
  }
}

TEST(GhBounds, SandwichContainsExactValue) {
  const FiniteMetricSpace s2 = segment(2.0);
  const Interval to_pt = gh_bounds(s2, one_point());
  EXPECT_DOUBLE_EQ(to_pt.lo, 1.0);
  EXPECT_DOUBLE_EQ(to_pt.hi, 4.0);

  const Interval self = gh_bounds(s2, s2);
  EXPECT_DOUBLE_EQ(self.lo, 0.0);
  EXPECT_DOUBLE_EQ(self.hi, 0.0);

  const Interval shrink = gh_bounds(s2, segment(1.0));
  EXPECT_DOUBLE_EQ(shrink.lo, 0.5);
  EXPECT_DOUBLE_EQ(shrink.hi, 2.0);

  std::mt19937 rng(109);
  for (int t = 0; t < 25; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const Interval iv = gh_bounds(x, y);
    const Dist gh = gh_exact(x, y).value;
    EXPECT_GE(gh, iv.lo - 1e-9);
    EXPECT_LE(gh, iv.hi + 1e-9);
    const Interval piv = gh_bounds_pointed(PointedSpace{x, 0}, PointedSpace{y, 0});
    const Dist pgh = gh_pointed_exact(PointedSpace{x, 0}, PointedSpace{y, 0}).value;
    EXPECT_GE(pgh, piv.lo - 1e-9);
    EXPECT_LE(pgh, piv.hi + 1e-9);
  }
}

TEST(Gh, TriangleInequalityOnRandomTriples) {
  std::mt19937 rng(113);
  for (int t = 0; t < 40; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const FiniteMetricSpace z = random_space(rng, 2, 4);
    EXPECT_LE(gh_exact(x, z).value,
              gh_exact(x, y).value + gh_exact(y, z).value + 3e-7);
  }
}

TEST(Gh, BudgetExceeded) {
  const SequenceItem big = lattice_space(4.0, 1.0);  // 9 points
  EXPECT_THROW(gh_exact(big.space.space, big.space.space, 1e6), Error);
  EXPECT_THROW(gh_oracle(big.space.space, big.space.space, 1e6), Error);
}

TEST(Gh, ParallelMatchesSequential) {
  std::mt19937 rng(127);
  for (int t = 0; t < 4; ++t) {
    const FiniteMetricSpace x = random_space(rng, 4, 5);
    const FiniteMetricSpace y = random_space(rng, 4, 5);
    const GhResult seq = gh_exact(x, y, 1e8, default_tols(), 1);
    const GhResult par = gh_exact(x, y, 1e8, default_tols(), 2);
    EXPECT_DOUBLE_EQ(seq.value, par.value);
    EXPECT_EQ(seq.assign_xy, par.assign_xy);
    EXPECT_EQ(seq.assign_yx, par.assign_yx);
  }
}
