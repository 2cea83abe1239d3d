#pragma once

#include <algorithm>
#include <vector>

#include "ghkit/space.hpp"

namespace ghkit {

struct GreedyNet {
  SubsetRef points;   // global indices, sorted
  Dist radius = 0.0;  // covering radius of the net within the subset
};

// Farthest-point greedy net of a subset, seeded at a required point (the
// base, so pointed computations keep their base inside the net). Stops at
// max_points or when everything is covered. The result is both separated
// and covering at the returned radius.
inline GreedyNet greedy_net(const FiniteMetricSpace& sp, const SubsetRef& subset,
                            int seed, int max_points) {
  detail::check_index(sp, seed);
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "net of empty subset");
  std::vector<int> net = {seed};
  std::vector<Dist> dist_to_net;
  dist_to_net.reserve(subset.size());
  for (int p : subset) dist_to_net.push_back(sp.at(seed, p));

  while (static_cast<int>(net.size()) < max_points) {
    int far = -1;
    Dist far_d = 0.0;
    for (std::size_t k = 0; k < subset.size(); ++k)
      if (dist_to_net[k] > far_d) {
        far_d = dist_to_net[k];
        far = subset[k];
      }
    if (far < 0) break;  // fully covered
    net.push_back(far);
    for (std::size_t k = 0; k < subset.size(); ++k)
      dist_to_net[k] = std::min(dist_to_net[k], sp.at(far, subset[k]));
  }

  GreedyNet out;
  out.points = net;
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::unique(out.points.begin(), out.points.end()),
                   out.points.end());
  for (std::size_t k = 0; k < subset.size(); ++k)
    out.radius = std::max(out.radius, dist_to_net[k]);
  return out;
}

}  // namespace ghkit
