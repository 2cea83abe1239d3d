#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghkit/space.hpp"

namespace ghkit {

// One element of a generated sequence. Spaces that sample the real line
// carry their coordinates, which convergence cells use to build an explicit
// admissible cross metric.
struct SequenceItem {
  PointedSpace space;
  std::optional<std::vector<double>> line_coords;
};

// A generator of pointed finite spaces, one per index, plus an optional
// base-point override installed by rebase().
struct SpaceSequence {
  std::function<SequenceItem(int)> make;
  std::string kind;
  std::optional<std::function<int(int)>> base_override;

  SequenceItem at(int i) const {
    SequenceItem item = make(i);
    if (base_override) item.space.base = (*base_override)(i);
    return item;
  }
};

// Lattice sample of the segment [-R, R] at the given mesh, base at 0.
inline SequenceItem lattice_space(double R, double mesh) {
  if (!(mesh > 0.0) || !(R >= 0.0))
    throw Error(ErrorCode::BadDescriptor, "lattice needs mesh > 0 and R >= 0");
  const int k_max = static_cast<int>(std::floor(R / mesh + 1e-12));
  std::vector<double> coords;
  coords.reserve(2 * k_max + 1);
  for (int k = -k_max; k <= k_max; ++k) coords.push_back(k * mesh);
  FiniteMetricSpace sp;
  sp.n = static_cast<int>(coords.size());
  sp.d.assign(static_cast<std::size_t>(sp.n) * sp.n, 0.0);
  for (int i = 0; i < sp.n; ++i)
    for (int j = 0; j < sp.n; ++j) sp.at(i, j) = std::abs(coords[i] - coords[j]);
  SequenceItem item;
  item.space = PointedSpace{std::move(sp), k_max};  // the point 0
  item.line_coords = std::move(coords);
  return item;
}

// Cycle C_n with edge length `scale` under the path metric, base at 0.
inline PointedSpace cycle_space(int n, double scale) {
  if (n < 1 || !(scale > 0.0))
    throw Error(ErrorCode::BadDescriptor, "cycle needs n >= 1 and scale > 0");
  FiniteMetricSpace sp;
  sp.n = n;
  sp.d.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int hop = std::abs(i - j);
      sp.at(i, j) = scale * std::min(hop, n - hop);
    }
  return PointedSpace{std::move(sp), 0};
}

inline SpaceSequence seq_scaled_lattice(double R, std::function<double(int)> mesh) {
  SpaceSequence seq;
  seq.kind = "scaled_lattice";
  seq.make = [R, mesh = std::move(mesh)](int i) { return lattice_space(R, mesh(i)); };
  return seq;
}

inline SpaceSequence seq_cycle(std::function<int(int)> points,
                               std::function<double(int)> scale) {
  SpaceSequence seq;
  seq.kind = "cycle";
  seq.make = [points = std::move(points), scale = std::move(scale)](int i) {
    return SequenceItem{cycle_space(points(i), scale(i)), std::nullopt};
  };
  return seq;
}

inline SpaceSequence seq_rescaled(FiniteMetricSpace base, int base_point,
                                  std::function<double(int)> alpha) {
  SpaceSequence seq;
  seq.kind = "rescaled";
  seq.make = [base = std::move(base), base_point, alpha = std::move(alpha)](int i) {
    return SequenceItem{PointedSpace{rescale(base, alpha(i)), base_point},
                        std::nullopt};
  };
  return seq;
}

inline SpaceSequence seq_constant(PointedSpace space) {
  SpaceSequence seq;
  seq.kind = "constant";
  seq.make = [space = std::move(space)](int) {
    return SequenceItem{space, std::nullopt};
  };
  return seq;
}

// Recovers coordinates for a space that is (within tau) a sample of the
// real line: distances from one diameter endpoint, verified against every
// pair. Returns nullopt when the space does not embed.
inline std::optional<std::vector<double>> try_line_embedding(
    const FiniteMetricSpace& sp, Dist tau = default_tols().metric) {
  int left = 0;
  for (int j = 0; j < sp.n; ++j)
    if (sp.at(0, j) > sp.at(0, left)) left = j;
  std::vector<double> coords(sp.n);
  for (int j = 0; j < sp.n; ++j) coords[j] = sp.at(left, j);
  for (int i = 0; i < sp.n; ++i)
    for (int j = i + 1; j < sp.n; ++j)
      if (std::abs(std::abs(coords[i] - coords[j]) - sp.at(i, j)) > tau)
        return std::nullopt;
  return coords;
}

// Product X x (shrink_i * Y); converges to X as the shrink factors vanish.
inline SpaceSequence seq_product_shrink(PointedSpace x, PointedSpace y,
                                        std::function<double(int)> shrink) {
  SpaceSequence seq;
  seq.kind = "product_shrink";
  seq.make = [x = std::move(x), y = std::move(y), shrink = std::move(shrink)](int i) {
    FiniteMetricSpace prod = product_l2(x.space, rescale(y.space, shrink(i)));
    const int base = x.base * y.space.n + y.base;
    return SequenceItem{PointedSpace{std::move(prod), base}, std::nullopt};
  };
  return seq;
}

}  // namespace ghkit
