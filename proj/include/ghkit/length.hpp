#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ghkit/space.hpp"

namespace ghkit {

struct Midpoint {
  int point = -1;
  Dist defect = 0.0;
};

// Best eps-midpoint of x and y: the point z minimizing
// max(|2 d(x,z) - d(x,y)|, |2 d(y,z) - d(x,y)|), smallest index on ties.
inline Midpoint best_midpoint(const FiniteMetricSpace& sp, int x, int y) {
  detail::check_index(sp, x);
  detail::check_index(sp, y);
  const Dist dxy = sp.at(x, y);
  Midpoint best;
  for (int z = 0; z < sp.n; ++z) {
    const Dist v = std::max(std::abs(2.0 * sp.at(x, z) - dxy),
                            std::abs(2.0 * sp.at(y, z) - dxy));
    if (best.point < 0 || v < best.defect) best = Midpoint{z, v};
  }
  return best;
}

// Worst best-midpoint defect over all pairs; 0 characterizes
// midpoint-closed finite samples.
inline Dist midpoint_defect(const FiniteMetricSpace& sp) {
  Dist worst = 0.0;
  for (int x = 0; x < sp.n; ++x)
    for (int y = x + 1; y < sp.n; ++y)
      worst = std::max(worst, best_midpoint(sp, x, y).defect);
  return worst;
}

inline Dist discrete_length(const FiniteMetricSpace& sp, const std::vector<int>& curve) {
  Dist len = 0.0;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k)
    len += sp.at(curve[k], curve[k + 1]);
  return len;
}

struct DyadicCurve {
  std::vector<int> points;  // gamma(k / 2^m), k = 0..2^m
  std::vector<Dist> required_tol;  // eps / 2^(2l+1) per refinement level l
  std::vector<Dist> achieved_tol;  // worst midpoint defect met at that level
  std::vector<Dist> surplus;       // max(0, achieved - required)
  Dist length = 0.0;
};

// Dyadic approximate geodesic: each refinement level inserts best midpoints
// between consecutive points; the proof's per-level tolerance is
// eps / 2^(2l+1), and the achieved tolerances are reported rather than
// assumed, since every finite space has positive midpoint defect.
inline DyadicCurve dyadic_curve(const FiniteMetricSpace& sp, int x, int y, int depth,
                                Dist eps) {
  detail::check_index(sp, x);
  detail::check_index(sp, y);
  DyadicCurve out;
  out.points = {x, y};
  for (int level = 0; level < depth; ++level) {
    std::vector<int> refined;
    refined.reserve(out.points.size() * 2 - 1);
    Dist achieved = 0.0;
    for (std::size_t k = 0; k + 1 < out.points.size(); ++k) {
      refined.push_back(out.points[k]);
      const Midpoint mid = best_midpoint(sp, out.points[k], out.points[k + 1]);
      achieved = std::max(achieved, mid.defect);
      refined.push_back(mid.point);
    }
    refined.push_back(out.points.back());
    out.points = std::move(refined);
    const Dist required = eps / std::pow(2.0, 2 * level + 1);
    out.required_tol.push_back(required);
    out.achieved_tol.push_back(achieved);
    out.surplus.push_back(std::max(0.0, achieved - required));
  }
  out.length = discrete_length(sp, out.points);
  return out;
}

}  // namespace ghkit
