#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ghkit/errors.hpp"

namespace ghkit {

// All distances are nonnegative finite doubles in abstract length units.
using Dist = double;

// Comparison tolerances used across the library. One configurable family,
// no scattered magic constants:
//   metric — validation of metric axioms,
//   iso    — isometry matching,
//   solver — distance-solver outputs (bisection targets, cross checks).
struct Tolerances {
  Dist metric = 1e-9;
  Dist iso = 1e-9;
  Dist solver = 1e-7;
};

inline const Tolerances& default_tols() {
  static const Tolerances t{};
  return t;
}

// A finite point set with a validated distance matrix, the carrier for
// every computation in the library. The matrix is stored row-major and
// exactly symmetric after validation.
struct FiniteMetricSpace {
  int n = 0;
  std::vector<Dist> d;  // n*n, row-major
  std::vector<std::string> labels;  // optional, empty or size n

  Dist at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  Dist& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

// A space with a distinguished base point index.
struct PointedSpace {
  FiniteMetricSpace space;
  int base = 0;
};

// Sorted unique point indices of some ambient space.
using SubsetRef = std::vector<int>;

namespace detail {

inline void check_index(const FiniteMetricSpace& x, int i) {
  if (i < 0 || i >= x.n)
    throw Error(ErrorCode::IndexOutOfRange, "point index out of range", {i});
}

}  // namespace detail

// Validates the metric axioms and returns the space. The first violated
// axiom is reported with witness indices: Asymmetric(i,j),
// NonzeroDiagonal(i), NonpositiveOffDiagonal(i,j), then
// TriangleViolation(i,j,k) meaning d(i,j) > d(i,k) + d(k,j) + tau.
// The stored matrix is symmetrized, so downstream code may rely on
// exact symmetry.
inline FiniteMetricSpace validate_space(const std::vector<std::vector<Dist>>& matrix,
                                        Dist tau_metric = default_tols().metric,
                                        std::vector<std::string> labels = {}) {
  const int n = static_cast<int>(matrix.size());
  if (n < 1) throw Error(ErrorCode::FileFormat, "matrix must have at least one row");
  for (const auto& row : matrix)
    if (static_cast<int>(row.size()) != n)
      throw Error(ErrorCode::FileFormat, "matrix must be square");

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(matrix[i][j] - matrix[j][i]) > tau_metric)
        throw Error(ErrorCode::Asymmetric, "d(i,j) != d(j,i)", {i, j});
  for (int i = 0; i < n; ++i)
    if (matrix[i][i] != 0.0)
      throw Error(ErrorCode::NonzeroDiagonal, "d(i,i) != 0", {i});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!(matrix[i][j] > 0.0) || !std::isfinite(matrix[i][j]))
        throw Error(ErrorCode::NonpositiveOffDiagonal, "d(i,j) <= 0", {i, j});
    }

  FiniteMetricSpace x;
  x.n = n;
  x.d.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      x.at(i, j) = i == j ? 0.0 : 0.5 * (matrix[i][j] + matrix[j][i]);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const Dist slack = x.at(i, j) - x.at(i, k) - x.at(k, j);
        if (slack > tau_metric)
          throw Error(ErrorCode::TriangleViolation, "d(i,j) > d(i,k) + d(k,j)",
                      {i, j, k}, slack);
      }
    }

  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw Error(ErrorCode::FileFormat, "labels size must match point count");
  x.labels = std::move(labels);
  return x;
}

inline Dist diameter(const FiniteMetricSpace& x) {
  Dist m = 0.0;
  for (int i = 0; i < x.n; ++i)
    for (int j = i + 1; j < x.n; ++j) m = std::max(m, x.at(i, j));
  return m;
}

// Max distance from p to any point; the pointed GH distance to a one-point
// space equals this value.
inline Dist eccentricity(const FiniteMetricSpace& x, int p) {
  detail::check_index(x, p);
  Dist m = 0.0;
  for (int j = 0; j < x.n; ++j) m = std::max(m, x.at(p, j));
  return m;
}

// Closed ball {q | d(center,q) <= r}; always contains the center.
inline SubsetRef closed_ball(const FiniteMetricSpace& x, int center, Dist r) {
  detail::check_index(x, center);
  SubsetRef out;
  for (int q = 0; q < x.n; ++q)
    if (x.at(center, q) <= r) out.push_back(q);
  return out;
}

inline SubsetRef closed_ball(const PointedSpace& x, Dist r) {
  return closed_ball(x.space, x.base, r);
}

// Open ball {q | d(center,q) < r}, the neighborhood used by the Hausdorff
// distance definition.
inline SubsetRef open_ball(const FiniteMetricSpace& x, int center, Dist r) {
  detail::check_index(x, center);
  SubsetRef out;
  for (int q = 0; q < x.n; ++q)
    if (x.at(center, q) < r) out.push_back(q);
  return out;
}

inline FiniteMetricSpace rescale(const FiniteMetricSpace& x, Dist lambda) {
  if (!(lambda > 0.0))
    throw Error(ErrorCode::NonpositiveScale, "scale factor must be positive", {},
                lambda);
  FiniteMetricSpace y = x;
  for (auto& v : y.d) v *= lambda;
  return y;
}

// Induced submatrix on a nonempty subset. Subsets are index sets, so the
// input is normalized to sorted unique indices and points are renumbered in
// that order.
inline FiniteMetricSpace restrict(const FiniteMetricSpace& x, SubsetRef s) {
  if (s.empty()) throw Error(ErrorCode::EmptySubset, "subset must be nonempty");
  for (int i : s) detail::check_index(x, i);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  FiniteMetricSpace y;
  y.n = static_cast<int>(s.size());
  y.d.assign(static_cast<std::size_t>(y.n) * y.n, 0.0);
  for (int a = 0; a < y.n; ++a)
    for (int b = 0; b < y.n; ++b) y.at(a, b) = x.at(s[a], s[b]);
  if (!x.labels.empty()) {
    y.labels.reserve(s.size());
    for (int i : s) y.labels.push_back(x.labels[i]);
  }
  return y;
}

// l2 product: point set X x Y with index ix*|Y| + iy and
// d((x,y),(x',y')) = sqrt(d_X(x,x')^2 + d_Y(y,y')^2).
inline FiniteMetricSpace product_l2(const FiniteMetricSpace& x,
                                    const FiniteMetricSpace& y) {
  FiniteMetricSpace p;
  p.n = x.n * y.n;
  p.d.assign(static_cast<std::size_t>(p.n) * p.n, 0.0);
  for (int ix = 0; ix < x.n; ++ix)
    for (int iy = 0; iy < y.n; ++iy)
      for (int jx = 0; jx < x.n; ++jx)
        for (int jy = 0; jy < y.n; ++jy) {
          const Dist a = x.at(ix, jx);
          const Dist b = y.at(iy, jy);
          p.at(ix * y.n + iy, jx * y.n + jy) = std::sqrt(a * a + b * b);
        }
  if (!x.labels.empty() && !y.labels.empty()) {
    p.labels.reserve(p.n);
    for (int ix = 0; ix < x.n; ++ix)
      for (int iy = 0; iy < y.n; ++iy)
        p.labels.push_back(x.labels[ix] + "|" + y.labels[iy]);
  }
  return p;
}

namespace detail {

// Sorted distance profile of one row; bijective isometries must match
// profiles point-to-point, which prunes the backtracking early.
inline std::vector<Dist> row_profile(const FiniteMetricSpace& x, int i) {
  std::vector<Dist> row;
  row.reserve(x.n);
  for (int j = 0; j < x.n; ++j) row.push_back(x.at(i, j));
  std::sort(row.begin(), row.end());
  return row;
}

inline bool profiles_match(const std::vector<Dist>& a, const std::vector<Dist>& b,
                           Dist tau) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > tau) return false;
  return true;
}

inline bool isometry_backtrack(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                               const std::vector<std::vector<Dist>>& py, Dist tau,
                               std::vector<int>& image, std::vector<char>& used,
                               int next) {
  const int n = x.n;
  if (next == n) return true;
  if (image[next] >= 0) return isometry_backtrack(x, y, py, tau, image, used, next + 1);
  const std::vector<Dist> px = row_profile(x, next);
  for (int cand = 0; cand < n; ++cand) {
    if (used[cand]) continue;
    if (!profiles_match(px, py[cand], tau)) continue;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      if (image[j] >= 0 && std::abs(y.at(cand, image[j]) - x.at(next, j)) > tau)
        ok = false;
    if (!ok) continue;
    image[next] = cand;
    used[cand] = 1;
    if (isometry_backtrack(x, y, py, tau, image, used, next + 1)) return true;
    image[next] = -1;
    used[cand] = 0;
  }
  return false;
}

}  // namespace detail

// Base-point-preserving bijective isometry witness, or nullopt. Candidates
// are tried in increasing index order, so the returned image sequence is
// the lexicographically smallest one.
inline std::optional<std::vector<int>> find_isometry(const PointedSpace& x,
                                                     const PointedSpace& y,
                                                     Dist tau_iso = default_tols().iso) {
  detail::check_index(x.space, x.base);
  detail::check_index(y.space, y.base);
  if (x.space.n != y.space.n) return std::nullopt;
  const int n = x.space.n;
  std::vector<std::vector<Dist>> py;
  py.reserve(n);
  for (int j = 0; j < n; ++j) py.push_back(detail::row_profile(y.space, j));

  std::vector<int> image(n, -1);
  std::vector<char> used(n, 0);
  image[x.base] = y.base;
  used[y.base] = 1;
  if (!detail::profiles_match(detail::row_profile(x.space, x.base), py[y.base],
                              tau_iso))
    return std::nullopt;
  if (detail::isometry_backtrack(x.space, y.space, py, tau_iso, image, used, 0))
    return image;
  return std::nullopt;
}

// Unpointed variant: any bijective isometry, lexicographically smallest
// image sequence (point 0 of X tries images in increasing order).
inline std::optional<std::vector<int>> find_isometry(const FiniteMetricSpace& x,
                                                     const FiniteMetricSpace& y,
                                                     Dist tau_iso = default_tols().iso) {
  if (x.n != y.n) return std::nullopt;
  for (int q = 0; q < y.n; ++q) {
    auto w = find_isometry(PointedSpace{x, 0}, PointedSpace{y, q}, tau_iso);
    if (w) return w;
  }
  return std::nullopt;
}

}  // namespace ghkit
