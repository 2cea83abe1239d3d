#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "ghkit/convergence.hpp"
#include "ghkit/gh.hpp"
#include "ghkit/space.hpp"

namespace ghkit {

// Finite stand-in for "a set of omega-measure 1": at prefix length N a set
// of indices counts as large when it holds at least ceil(sqrt(N)) of them.
inline std::size_t large_set_threshold(std::size_t n) {
  return detail::large_threshold(n);
}

struct AccumulationPoint {
  Dist value = 0.0;          // cluster representative (medoid by total distance)
  std::vector<int> indices;  // certificate: prefix positions within tau of it
};

// Accumulation points of a bounded sequence prefix: single-linkage clusters
// at gap tau; a cluster counts when its medoid has at least ceil(sqrt(N))
// prefix terms within tau, and those terms are the returned certificate.
inline std::vector<AccumulationPoint> accumulation_points(
    const std::vector<Dist>& a, Dist tau) {
  std::vector<AccumulationPoint> out;
  const int n = static_cast<int>(a.size());
  if (n == 0) return out;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return a[i] < a[j] || (a[i] == a[j] && i < j);
  });

  const std::size_t need = large_set_threshold(a.size());
  std::vector<std::vector<int>> clusters;
  clusters.emplace_back();
  clusters.back().push_back(order[0]);
  for (int k = 1; k < n; ++k) {
    if (a[order[k]] - a[order[k - 1]] > tau) clusters.emplace_back();
    clusters.back().push_back(order[k]);
  }

  for (const auto& cluster : clusters) {
    int best = -1;
    Dist best_sum = 0.0;
    for (int i : cluster) {
      Dist sum = 0.0;
      for (int j : cluster) sum += std::abs(a[i] - a[j]);
      if (best < 0 || sum < best_sum || (sum == best_sum && i < best)) {
        best = i;
        best_sum = sum;
      }
    }
    AccumulationPoint pt;
    pt.value = a[best];
    for (int i = 0; i < n; ++i)
      if (std::abs(a[i] - pt.value) <= tau) pt.indices.push_back(i);
    if (pt.indices.size() >= need) out.push_back(std::move(pt));
  }
  return out;
}

// Indices where every sequence sits within tau of its target, the
// certificate replacing "the intersection of measure-1 sets has measure 1".
inline std::vector<int> common_subsequence(const std::vector<std::vector<Dist>>& seqs,
                                           const std::vector<Dist>& targets, Dist tau) {
  if (seqs.empty() || seqs.size() != targets.size())
    throw Error(ErrorCode::NoCommonSubsequence,
                "need one target per sequence");
  std::size_t n = seqs.front().size();
  for (const auto& s : seqs) n = std::min(n, s.size());
  std::vector<int> hits;
  for (std::size_t i = 0; i < n; ++i) {
    bool all = true;
    for (std::size_t k = 0; k < seqs.size() && all; ++k)
      if (std::abs(seqs[k][i] - targets[k]) > tau) all = false;
    if (all) hits.push_back(static_cast<int>(i));
  }
  if (hits.size() < large_set_threshold(n))
    throw Error(ErrorCode::NoCommonSubsequence,
                "targets are not jointly realized often enough", {},
                static_cast<double>(hits.size()));
  return hits;
}

struct SublimitResult {
  int medoid_index = -1;  // sequence index of the representative space
  Dist spread = 0.0;      // its max pointed GH distance of r-balls to the others
  std::vector<std::vector<Dist>> pairwise;  // [k][l] over the subsequence
};

// Representative of a subsequence of pointed spaces: the element whose
// r-ball minimizes the maximum pairwise pointed GH distance to the others.
// Small spread certifies the element as a sublimit sample.
inline SublimitResult sublimit_space(const std::function<PointedSpace(int)>& spaces,
                                     const std::vector<int>& subseq, Dist r,
                                     double gh_budget = 1e8,
                                     const Tolerances& tols = default_tols(),
                                     int threads = 0) {
  const int k = static_cast<int>(subseq.size());
  if (k == 0) throw Error(ErrorCode::EmptySubset, "empty subsequence");

  std::vector<PointedSpace> balls;
  balls.reserve(k);
  for (int idx : subseq) {
    const PointedSpace ps = spaces(idx);
    const SubsetRef ball = closed_ball(ps.space, ps.base, r);
    const FiniteMetricSpace restricted = restrict(ps.space, ball);
    balls.push_back(PointedSpace{restricted, detail::subset_position(ball, ps.base)});
  }

  SublimitResult out;
  out.pairwise.assign(k, std::vector<Dist>(k, 0.0));
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      const Dist v =
          gh_pointed_exact(balls[a], balls[b], gh_budget, tols, threads).value;
      out.pairwise[a][b] = v;
      out.pairwise[b][a] = v;
    }

  Dist best = std::numeric_limits<Dist>::infinity();
  int best_pos = 0;
  for (int a = 0; a < k; ++a) {
    const Dist worst = *std::max_element(out.pairwise[a].begin(), out.pairwise[a].end());
    if (worst < best) {
      best = worst;
      best_pos = a;
    }
  }
  out.medoid_index = subseq[best_pos];
  out.spread = best;
  return out;
}

// Same schedule selection as the convergence module, but success is judged
// on the subsequence: the feasible set must hold at least ceil(sqrt(N)) of
// its indices, the measure-1 surrogate.
inline ScheduleResult radius_schedule_measured(const EpsTable& table,
                                               const std::vector<int>& subseq,
                                               const std::function<Dist(Dist)>& h) {
  EpsTable restricted;
  restricted.radii = table.radii;
  std::vector<std::size_t> positions;
  for (std::size_t k = 0; k < table.indices.size(); ++k)
    if (std::find(subseq.begin(), subseq.end(), table.indices[k]) != subseq.end()) {
      positions.push_back(k);
      restricted.indices.push_back(table.indices[k]);
    }
  restricted.eps.assign(table.radii.size(), {});
  for (std::size_t r = 0; r < table.radii.size(); ++r)
    for (std::size_t k : positions) restricted.eps[r].push_back(table.eps[r][k]);

  ScheduleResult res = select_radius_schedule(restricted, h);
  const std::size_t feasible = restricted.indices.size() - res.exceptional.size();
  if (feasible < large_set_threshold(table.indices.size()))
    throw Error(ErrorCode::NoFeasibleSchedule,
                "feasible set is not large on the subsequence", res.exceptional);
  return res;
}

}  // namespace ghkit
