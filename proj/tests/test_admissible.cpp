#include "ghkit/admissible.hpp"

#include <gtest/gtest.h>

#include <random>

#include "ghkit/gh.hpp"
#include "test_util.hpp"

using namespace ghkit;
using namespace ghkit::testing;

TEST(ValidateAdmissible, BasicCases) {
  const FiniteMetricSpace pt = one_point();
  EXPECT_NO_THROW(validate_admissible(pt, pt, {1.0}));

  const FiniteMetricSpace s2 = segment(2.0);
  EXPECT_NO_THROW(validate_admissible(s2, pt, {1.0, 1.0}));  // the diam/2 witness

  try {
    validate_admissible(s2, pt, {0.5, 0.5});
    FAIL() << "expected TriangleViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TriangleViolation);
  }
  EXPECT_THROW(validate_admissible(s2, pt, {1.0, -1.0}), Error);
  EXPECT_THROW(validate_admissible(s2, pt, {1.0, 0.0}), Error);
}

TEST(GlueFromPair, IdentityShiftsByHalfEps) {
  const FiniteMetricSpace s2 = segment(2.0);
  const AdmissibleMetric adm = glue_from_pair(s2, s2, {0, 1}, 1.0);
  EXPECT_DOUBLE_EQ(adm.cross_at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(adm.cross_at(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(adm.cross_at(0, 1), 2.5);
  EXPECT_DOUBLE_EQ(hausdorff_under(adm), 0.5);
}

TEST(GlueFromPair, CollapsingScaleMap) {
  const AdmissibleMetric adm = glue_from_pair(segment(2.0), segment(1.0), {0, 1}, 1.2);
  EXPECT_LE(hausdorff_under(adm), 1.8 + 1e-12);
  for (int i = 0; i < 2; ++i) EXPECT_DOUBLE_EQ(adm.cross_at(i, i), 0.6);
}

TEST(GlueFromPair, RequiresSmallDistortion) {
  try {
    glue_from_pair(segment(2.0), one_point(), {0, 0}, 1.0);
    FAIL() << "expected DistortionTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DistortionTooLarge);
    EXPECT_DOUBLE_EQ(e.value(), 2.0);
  }
}

TEST(GlueFromPair, PointedPairGivesHalfEpsBasePair) {
  // For a pointed Isom_eps pair, cross(p, q) = eps/2 exactly and
  // d(y, g(y)) < 3*eps/2.
  std::mt19937 rng(67);
  for (int t = 0; t < 40; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const BestPairResult bp = best_pair(x, y, std::make_pair(0, 0));
    const Dist eps = bp.eps_star + 0.125;  // strict membership
    const AdmissibleMetric adm = glue_from_pair(x, y, bp.pair.f, eps);
    EXPECT_DOUBLE_EQ(adm.cross_at(0, 0), 0.5 * eps);
    for (int i = 0; i < x.n; ++i)
      EXPECT_DOUBLE_EQ(adm.cross_at(i, bp.pair.f[i]), 0.5 * eps);
    for (int j = 0; j < y.n; ++j)
      EXPECT_LT(adm.cross_at(bp.pair.g[j], j), 1.5 * eps);
    EXPECT_LE(hausdorff_under(adm, std::make_pair(0, 0)), 2.0 * eps + 1e-12);
  }
}

TEST(GlueThree, OnePointThroughSegment) {
  const FiniteMetricSpace pt = one_point();
  const FiniteMetricSpace s2 = segment(2.0);
  const AdmissibleMetric xy = validate_admissible(pt, s2, {1.0, 1.0});
  const AdmissibleMetric yz = validate_admissible(s2, pt, {1.0, 1.0});
  const ThreeSpaceGluing glued = glue_three(xy, yz);
  EXPECT_DOUBLE_EQ(glued.xz.cross_at(0, 0), 2.0);  // min over 2 middle points
}

TEST(GlueThree, EpsShiftThroughIdentity) {
  // Y = X glued by the identity shift: d_XZ(x,z) <= eps/2 + d_YZ(x,z).
  const FiniteMetricSpace s2 = segment(2.0);
  const AdmissibleMetric xy = glue_from_pair(s2, s2, {0, 1}, 0.5);
  const AdmissibleMetric yz = validate_admissible(s2, one_point(), {1.0, 1.0});
  const ThreeSpaceGluing glued = glue_three(xy, yz);
  for (int i = 0; i < 2; ++i)
    EXPECT_LE(glued.xz.cross_at(i, 0), 0.25 + yz.cross_at(i, 0) + 1e-12);
}

TEST(GlueThree, MiddleMismatchRejected) {
  const AdmissibleMetric xy = validate_admissible(one_point(), segment(2.0), {1, 1});
  const AdmissibleMetric yz = validate_admissible(segment(1.0), one_point(), {1, 1});
  EXPECT_THROW(glue_three(xy, yz), Error);
}

TEST(GlueThree, RandomTriplesStayMetric) {
  std::mt19937 rng(71);
  for (int t = 0; t < 30; ++t) {
    const FiniteMetricSpace x = random_space(rng, 3, 3);
    const FiniteMetricSpace y = random_space(rng, 3, 3);
    const FiniteMetricSpace z = random_space(rng, 3, 3);
    const Dist ex = best_pair(x, y).eps_star + 0.125;
    const Dist ez = best_pair(y, z).eps_star + 0.125;
    const AdmissibleMetric xy = glue_from_pair(x, y, best_pair(x, y).pair.f, ex);
    const AdmissibleMetric yz = glue_from_pair(y, z, best_pair(y, z).pair.f, ez);
    // glue_three validates the triple-union metric; no violation expected.
    EXPECT_NO_THROW(glue_three(xy, yz));
  }
}

TEST(OnePointExtension, DiamOverTwoWitness) {
  const FiniteMetricSpace s2 = segment(2.0);
  const AdmissibleMetric adm = one_point_extension(s2, 1.0);
  EXPECT_DOUBLE_EQ(hausdorff_under(adm), 1.0);
  EXPECT_NO_THROW(one_point_extension(one_point(), 0.1));
  try {
    one_point_extension(s2, 0.9);
    FAIL() << "expected DeltaTooSmall";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DeltaTooSmall);
  }
}

TEST(ProductEmbedding, OnePointFactor) {
  const FiniteMetricSpace s2 = segment(2.0);
  const AdmissibleMetric adm = product_embedding_metric(s2, one_point(), 0, 0.1);
  EXPECT_NEAR(hausdorff_under(adm), 0.1, 1e-12);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      EXPECT_DOUBLE_EQ(adm.cross_at(i, j),
                       std::sqrt(s2.at(i, j) * s2.at(i, j) + 0.01));
}

TEST(ProductEmbedding, BoundedByFactorDiameter) {
  const AdmissibleMetric adm =
      product_embedding_metric(segment(2.0), segment(1.0), 0, 0.01);
  EXPECT_LE(hausdorff_under(adm), std::sqrt(1.0 + 0.0001) + 1e-12);
}

TEST(ProductEmbedding, MinkowskiAuditOnRandomProducts) {
  std::mt19937 rng(73);
  for (int t = 0; t < 15; ++t) {
    const FiniteMetricSpace x = random_space(rng, 3, 3);
    const FiniteMetricSpace y = random_space(rng, 3, 3);
    EXPECT_NO_THROW(product_embedding_metric(x, y, 0, 0.05));
  }
}

TEST(HausdorffUnder, DominatesExactDistance) {
  std::mt19937 rng(79);
  for (int t = 0; t < 25; ++t) {
    const FiniteMetricSpace x = random_space(rng, 2, 4);
    const FiniteMetricSpace y = random_space(rng, 2, 4);
    const Dist gh = gh_exact(x, y).value;
    const Dist eps = best_pair(x, y).eps_star + 0.125;
    EXPECT_GE(hausdorff_under(glue_from_pair(x, y, best_pair(x, y).pair.f, eps)),
              gh - 1e-7);
  }
}
