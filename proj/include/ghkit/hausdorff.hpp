#pragma once

#include <algorithm>
#include <cmath>

#include "ghkit/space.hpp"

namespace ghkit {

// Witness points attaining the Hausdorff max-min on each side.
struct HausdorffWitness {
  int far_a = -1;   // point of A farthest from B
  int near_b = -1;  // its nearest point in B
  int far_b = -1;   // point of B farthest from A
  int near_a = -1;  // its nearest point in A
};

namespace detail {

inline Dist directed_hausdorff(const FiniteMetricSpace& ambient, const SubsetRef& from,
                               const SubsetRef& to, int* far, int* near) {
  Dist worst = -1.0;
  for (int a : from) {
    Dist best = -1.0;
    int best_b = -1;
    for (int b : to) {
      const Dist v = ambient.at(a, b);
      if (best < 0.0 || v < best) {
        best = v;
        best_b = b;
      }
    }
    if (best > worst) {
      worst = best;
      if (far) *far = a;
      if (near) *near = best_b;
    }
  }
  return worst;
}

}  // namespace detail

// Hausdorff distance of two nonempty subsets of one ambient space:
// max of the two directed max-min distances. On finite sets this equals
// the infimum over eps of the mutual open-ball inclusion definition.
inline Dist hausdorff(const FiniteMetricSpace& ambient, const SubsetRef& a,
                      const SubsetRef& b, HausdorffWitness* witness = nullptr) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::EmptySubset, "hausdorff needs nonempty subsets");
  for (int i : a) detail::check_index(ambient, i);
  for (int i : b) detail::check_index(ambient, i);
  HausdorffWitness w;
  const Dist ab = detail::directed_hausdorff(ambient, a, b, &w.far_a, &w.near_b);
  const Dist ba = detail::directed_hausdorff(ambient, b, a, &w.far_b, &w.near_a);
  if (witness) *witness = w;
  return std::max(ab, ba);
}

// Pointed Hausdorff distance: d_H(A,B) + d(a,b) with base points a in A,
// b in B.
inline Dist pointed_hausdorff(const FiniteMetricSpace& ambient, const SubsetRef& a,
                              int base_a, const SubsetRef& b, int base_b,
                              HausdorffWitness* witness = nullptr) {
  if (std::find(a.begin(), a.end(), base_a) == a.end())
    throw Error(ErrorCode::BasePointNotInSubset, "base of A not in A", {base_a});
  if (std::find(b.begin(), b.end(), base_b) == b.end())
    throw Error(ErrorCode::BasePointNotInSubset, "base of B not in B", {base_b});
  return hausdorff(ambient, a, b, witness) + ambient.at(base_a, base_b);
}

// Measured violation of the length-space ball lemma
// d_H(ball_r(p), ball_s(q)) <= d(p,q) + |r-s|. Nonpositive return means the
// inequality holds; genuine length spaces give <= 0, finite samples may
// exceed it by a mesh term.
inline Dist ball_lemma_violation(const FiniteMetricSpace& x, int p, int q, Dist r,
                                 Dist s) {
  const Dist lhs = hausdorff(x, closed_ball(x, p, r), closed_ball(x, q, s));
  return lhs - (x.at(p, q) + std::abs(r - s));
}

// Measured violation of B_r(B_s(p)) = B_{r+s}(p) for open balls: the
// Hausdorff distance between the two index sets (one inclusion always
// holds, so this is 0 exactly when they coincide).
inline Dist ball_composition_violation(const FiniteMetricSpace& x, int p, Dist r,
                                       Dist s) {
  SubsetRef inner = open_ball(x, p, s);
  SubsetRef grown;
  for (int q = 0; q < x.n; ++q) {
    for (int c : inner)
      if (x.at(c, q) < r) {
        grown.push_back(q);
        break;
      }
  }
  SubsetRef direct = open_ball(x, p, r + s);
  if (grown.empty() || direct.empty()) return 0.0;
  return hausdorff(x, grown, direct);
}

}  // namespace ghkit
