#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "ghkit/approximation.hpp"
#include "ghkit/space.hpp"

namespace ghkit {

// A joint metric on the disjoint union X ⨿ Y: the two intra blocks are the
// original matrices exactly, the cross block carries the gluing.
struct AdmissibleMetric {
  FiniteMetricSpace left;   // X
  FiniteMetricSpace right;  // Y
  std::vector<Dist> cross;  // |X| x |Y|, row-major

  Dist cross_at(int i, int j) const {
    return cross[static_cast<std::size_t>(i) * right.n + j];
  }
  Dist& cross_at(int i, int j) {
    return cross[static_cast<std::size_t>(i) * right.n + j];
  }

  // Distance in the assembled joint space; indices 0..|X|-1 are X,
  // |X|..|X|+|Y|-1 are Y.
  Dist joint_at(int a, int b) const {
    const int n = left.n;
    const bool ax = a < n, bx = b < n;
    if (ax && bx) return left.at(a, b);
    if (!ax && !bx) return right.at(a - n, b - n);
    return ax ? cross_at(a, b - n) : cross_at(b, a - n);
  }

  int joint_size() const { return left.n + right.n; }
};

// Checks that the assembled matrix is a metric within tau_metric. The two
// restrictions are the stored blocks, hence exact by construction; what can
// fail is positivity of the cross block and the mixed triangle inequalities.
inline AdmissibleMetric validate_admissible(FiniteMetricSpace x, FiniteMetricSpace y,
                                            std::vector<Dist> cross,
                                            Dist tau_metric = default_tols().metric) {
  if (static_cast<int>(cross.size()) != x.n * y.n)
    throw Error(ErrorCode::FileFormat, "cross block has wrong shape");
  AdmissibleMetric adm{std::move(x), std::move(y), std::move(cross)};
  for (int i = 0; i < adm.left.n; ++i)
    for (int j = 0; j < adm.right.n; ++j)
      if (!(adm.cross_at(i, j) > 0.0) || !std::isfinite(adm.cross_at(i, j)))
        throw Error(ErrorCode::NonpositiveCross, "cross distance must be positive",
                    {i, j});
  const int total = adm.joint_size();
  for (int a = 0; a < total; ++a)
    for (int b = 0; b < total; ++b) {
      if (a == b) continue;
      for (int c = 0; c < total; ++c) {
        if (c == a || c == b) continue;
        const Dist slack = adm.joint_at(a, b) - adm.joint_at(a, c) - adm.joint_at(c, b);
        if (slack > tau_metric)
          throw Error(ErrorCode::TriangleViolation,
                      "joint triangle inequality violated", {a, b, c}, slack);
      }
    }
  return adm;
}

// Hausdorff distance of the two sides under the joint metric, plus the
// cross distance of the base points in the pointed variant.
inline Dist hausdorff_under(const AdmissibleMetric& adm,
                            std::optional<std::pair<int, int>> pointed = std::nullopt) {
  Dist h = 0.0;
  for (int i = 0; i < adm.left.n; ++i) {
    Dist best = adm.cross_at(i, 0);
    for (int j = 1; j < adm.right.n; ++j) best = std::min(best, adm.cross_at(i, j));
    h = std::max(h, best);
  }
  for (int j = 0; j < adm.right.n; ++j) {
    Dist best = adm.cross_at(0, j);
    for (int i = 1; i < adm.left.n; ++i) best = std::min(best, adm.cross_at(i, j));
    h = std::max(h, best);
  }
  if (pointed) {
    detail::check_index(adm.left, pointed->first);
    detail::check_index(adm.right, pointed->second);
    h += adm.cross_at(pointed->first, pointed->second);
  }
  return h;
}

// Gluing along a map of distortion < eps:
//   cross(x,y) = eps/2 + min over x' of (d_X(x,x') + d_Y(f(x'),y)).
// In particular cross(x, f(x)) = eps/2 exactly.
inline AdmissibleMetric glue_from_pair(const FiniteMetricSpace& x,
                                       const FiniteMetricSpace& y,
                                       const std::vector<int>& f, Dist eps,
                                       Dist tau_metric = default_tols().metric) {
  const Dist dis = distortion(x, y, f);
  if (!(dis < eps))
    throw Error(ErrorCode::DistortionTooLarge,
                "gluing needs a map of distortion < eps", {}, dis);
  std::vector<Dist> cross(static_cast<std::size_t>(x.n) * y.n, 0.0);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < y.n; ++j) {
      Dist best = x.at(i, 0) + y.at(f[0], j);
      for (int k = 1; k < x.n; ++k)
        best = std::min(best, x.at(i, k) + y.at(f[k], j));
      cross[static_cast<std::size_t>(i) * y.n + j] = 0.5 * eps + best;
    }
  return validate_admissible(x, y, std::move(cross), tau_metric);
}

struct ThreeSpaceGluing {
  AdmissibleMetric xz;
  // Joint metric on X ⨿ Y ⨿ Z assembled from the three pairwise blocks.
  std::vector<Dist> joint;
  int nx = 0, ny = 0, nz = 0;

  Dist joint_at(int a, int b) const {
    return joint[static_cast<std::size_t>(a) * (nx + ny + nz) + b];
  }
};

// Composition through the shared middle space:
//   d_XZ(x,z) = min over y of (d_XY(x,y) + d_YZ(y,z)),
// together with the case-split metric on the triple union. Both are
// validated before returning.
inline ThreeSpaceGluing glue_three(const AdmissibleMetric& dxy,
                                   const AdmissibleMetric& dyz,
                                   Dist tau_metric = default_tols().metric) {
  const FiniteMetricSpace& y1 = dxy.right;
  const FiniteMetricSpace& y2 = dyz.left;
  if (y1.n != y2.n || y1.d != y2.d)
    throw Error(ErrorCode::MiddleSpaceMismatch,
                "the two gluings do not share the middle space");
  const FiniteMetricSpace& x = dxy.left;
  const FiniteMetricSpace& y = y1;
  const FiniteMetricSpace& z = dyz.right;

  std::vector<Dist> cross_xz(static_cast<std::size_t>(x.n) * z.n, 0.0);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < z.n; ++k) {
      Dist best = dxy.cross_at(i, 0) + dyz.cross_at(0, k);
      for (int j = 1; j < y.n; ++j)
        best = std::min(best, dxy.cross_at(i, j) + dyz.cross_at(j, k));
      cross_xz[static_cast<std::size_t>(i) * z.n + k] = best;
    }

  ThreeSpaceGluing out;
  out.xz = validate_admissible(x, z, cross_xz, tau_metric);
  out.nx = x.n;
  out.ny = y.n;
  out.nz = z.n;
  const int total = x.n + y.n + z.n;
  out.joint.assign(static_cast<std::size_t>(total) * total, 0.0);
  auto put = [&](int a, int b, Dist v) {
    out.joint[static_cast<std::size_t>(a) * total + b] = v;
    out.joint[static_cast<std::size_t>(b) * total + a] = v;
  };
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) put(i, j, x.at(i, j));
  for (int i = 0; i < y.n; ++i)
    for (int j = 0; j < y.n; ++j) put(x.n + i, x.n + j, y.at(i, j));
  for (int i = 0; i < z.n; ++i)
    for (int j = 0; j < z.n; ++j) put(x.n + y.n + i, x.n + y.n + j, z.at(i, j));
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < y.n; ++j) put(i, x.n + j, dxy.cross_at(i, j));
  for (int j = 0; j < y.n; ++j)
    for (int k = 0; k < z.n; ++k) put(x.n + j, x.n + y.n + k, dyz.cross_at(j, k));
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < z.n; ++k) put(i, x.n + y.n + k, out.xz.cross_at(i, k));

  for (int a = 0; a < total; ++a)
    for (int b = 0; b < total; ++b) {
      if (a == b) continue;
      for (int c = 0; c < total; ++c) {
        if (c == a || c == b) continue;
        const Dist slack = out.joint_at(a, b) - out.joint_at(a, c) - out.joint_at(c, b);
        if (slack > tau_metric)
          throw Error(ErrorCode::TriangleViolation,
                      "triple-union triangle inequality violated", {a, b, c}, slack);
      }
    }
  return out;
}

// Constant-column extension X ⨿ {pt} with d(x, pt) = delta. The triangle
// inequality 2*delta >= diam(X) forces delta >= diam(X)/2.
inline AdmissibleMetric one_point_extension(const FiniteMetricSpace& x, Dist delta,
                                            Dist tau_metric = default_tols().metric) {
  if (2.0 * delta + tau_metric < diameter(x))
    throw Error(ErrorCode::DeltaTooSmall, "need delta >= diam(X)/2", {}, delta);
  FiniteMetricSpace pt;
  pt.n = 1;
  pt.d = {0.0};
  std::vector<Dist> cross(static_cast<std::size_t>(x.n), delta);
  return validate_admissible(x, pt, std::move(cross), tau_metric);
}

// Gluing of X to the l2 product X x Y along the slice through y0:
//   cross(x', (x,y)) = sqrt(d_X(x,x')^2 + d_Y(y,y0)^2 + delta^2).
// Left side is X, right side is product_l2(X, Y) with index ix*|Y| + iy.
inline AdmissibleMetric product_embedding_metric(const FiniteMetricSpace& x,
                                                 const FiniteMetricSpace& y, int y0,
                                                 Dist delta,
                                                 Dist tau_metric = default_tols().metric) {
  detail::check_index(y, y0);
  if (!(delta > 0.0))
    throw Error(ErrorCode::NonpositiveCross, "delta must be positive", {}, delta);
  FiniteMetricSpace prod = product_l2(x, y);
  std::vector<Dist> cross(static_cast<std::size_t>(x.n) * prod.n, 0.0);
  for (int i = 0; i < x.n; ++i)
    for (int jx = 0; jx < x.n; ++jx)
      for (int jy = 0; jy < y.n; ++jy) {
        const Dist a = x.at(i, jx);
        const Dist b = y.at(jy, y0);
        cross[static_cast<std::size_t>(i) * prod.n + jx * y.n + jy] =
            std::sqrt(a * a + b * b + delta * delta);
      }
  return validate_admissible(x, prod, std::move(cross), tau_metric);
}

}  // namespace ghkit
