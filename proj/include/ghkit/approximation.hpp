#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "ghkit/hausdorff.hpp"
#include "ghkit/space.hpp"

namespace ghkit {

// A pair of index maps f: X -> Y, g: Y -> X, optionally pointed with
// f(p) = q and g(q) = p.
struct MapPair {
  std::vector<int> f;
  std::vector<int> g;
  std::optional<std::pair<int, int>> pointed;
};

// The four quantities whose strict sup bounds membership in Isom_eps:
// both distortions and both round-trip displacements. defect is their max;
// the pair lies in Isom_eps exactly when defect < eps.
struct ApproximationReport {
  Dist dis_f = 0.0;
  Dist dis_g = 0.0;
  Dist roundtrip_x = 0.0;
  Dist roundtrip_y = 0.0;
  Dist defect = 0.0;
};

// Max change of pairwise distances under f.
inline Dist distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                       const std::vector<int>& f) {
  if (static_cast<int>(f.size()) != x.n)
    throw Error(ErrorCode::IndexOutOfRange, "map must be total on X");
  for (int v : f)
    if (v < 0 || v >= y.n)
      throw Error(ErrorCode::IndexOutOfRange, "map value out of range", {v});
  Dist m = 0.0;
  for (int i = 0; i < x.n; ++i)
    for (int j = i + 1; j < x.n; ++j)
      m = std::max(m, std::abs(y.at(f[i], f[j]) - x.at(i, j)));
  return m;
}

inline ApproximationReport defect(const FiniteMetricSpace& x,
                                  const FiniteMetricSpace& y, const MapPair& pair) {
  if (pair.pointed) {
    const auto [p, q] = *pair.pointed;
    detail::check_index(x, p);
    detail::check_index(y, q);
    if (pair.f[p] != q || pair.g[q] != p)
      throw Error(ErrorCode::PointedConstraintViolated,
                  "pair does not fix the base points", {p, q});
  }
  ApproximationReport r;
  r.dis_f = distortion(x, y, pair.f);
  r.dis_g = distortion(y, x, pair.g);
  for (int i = 0; i < x.n; ++i)
    r.roundtrip_x = std::max(r.roundtrip_x, x.at(pair.g[pair.f[i]], i));
  for (int j = 0; j < y.n; ++j)
    r.roundtrip_y = std::max(r.roundtrip_y, y.at(pair.f[pair.g[j]], j));
  r.defect = std::max({r.dis_f, r.dis_g, r.roundtrip_x, r.roundtrip_y});
  return r;
}

struct CompletedPair {
  MapPair pair;
  ApproximationReport report;
};

// Completes a single map of distortion < eps into a pair (f,h): on the
// image, h picks the smallest-index preimage; every other y is redirected
// to its nearest image point (required to lie strictly within eps).
// The resulting defect is < 3*eps.
inline CompletedPair complete_distortion_map(const FiniteMetricSpace& x,
                                             const FiniteMetricSpace& y,
                                             const std::vector<int>& f, Dist eps) {
  const Dist dis = distortion(x, y, f);
  if (!(dis < eps))
    throw Error(ErrorCode::DistortionTooLarge, "distortion(f) must be < eps", {},
                dis);
  std::vector<int> preimage(y.n, -1);
  for (int i = x.n - 1; i >= 0; --i) preimage[f[i]] = i;

  std::vector<int> h(y.n, -1);
  for (int j = 0; j < y.n; ++j) {
    if (preimage[j] >= 0) {
      h[j] = preimage[j];
      continue;
    }
    int best = -1;
    Dist bestd = 0.0;
    for (int k = 0; k < y.n; ++k) {
      if (preimage[k] < 0) continue;
      const Dist v = y.at(j, k);
      if (best < 0 || v < bestd) {
        best = k;
        bestd = v;
      }
    }
    if (best < 0 || !(bestd < eps))
      throw Error(ErrorCode::CoverageFailure,
                  "point of Y has no image point strictly within eps", {j}, bestd);
    h[j] = preimage[best];
  }
  CompletedPair out;
  out.pair = MapPair{f, h, std::nullopt};
  out.report = defect(x, y, out.pair);
  return out;
}

// eps_star is the attained minimum defect of the finite pair family;
// membership in Isom_eps is strict, so Isom_eps is nonempty exactly for
// eps > eps_star.
struct BestPairResult {
  MapPair pair;
  Dist eps_star = 0.0;
  ApproximationReport report;
};

namespace detail {

inline double pair_search_size(int n, int m, bool pointed) {
  const double fx = std::pow(static_cast<double>(m), pointed ? n - 1 : n);
  const double gy = std::pow(static_cast<double>(n), pointed ? m - 1 : m);
  return fx * gy;
}

// Exhaustive minimum-defect search over map pairs, depth-first in
// lexicographic order of (f, g) with branch-and-bound on the partial max.
// The first minimizer found is kept, so ties resolve to the
// lexicographically smallest pair.
class PairSearch {
 public:
  PairSearch(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
             std::optional<std::pair<int, int>> pointed,
             const std::atomic<Dist>* shared_best)
      : x_(x), y_(y), pointed_(pointed), shared_(shared_best) {
    f_.assign(x_.n, -1);
    g_.assign(y_.n, -1);
    if (pointed_) {
      f_[pointed_->first] = pointed_->second;
      g_[pointed_->second] = pointed_->first;
    }
  }

  // fix: optional preassignment (position in f, value) used by the
  // parallel driver to split the root of the search tree.
  void run(std::optional<std::pair<int, int>> fix = std::nullopt) {
    if (fix) {
      if (f_[fix->first] >= 0) {
        if (f_[fix->first] == fix->second) descend_f(0, 0.0);
        return;
      }
      Dist cur = place_f_cost(fix->first, fix->second, 0.0);
      f_[fix->first] = fix->second;
      descend_f(0, cur);
      f_[fix->first] = -1;
      return;
    }
    descend_f(0, 0.0);
  }

  Dist best_value() const { return best_; }
  bool found() const { return best_ < std::numeric_limits<Dist>::infinity(); }
  MapPair best_pair() const { return MapPair{best_f_, best_g_, pointed_}; }

 private:
  Dist place_f_cost(int i, int v, Dist cur) const {
    for (int j = 0; j < x_.n; ++j)
      if (j != i && f_[j] >= 0)
        cur = std::max(cur, std::abs(y_.at(f_[j], v) - x_.at(j, i)));
    return cur;
  }

  Dist place_g_cost(int j, int u, Dist cur) const {
    for (int k = 0; k < y_.n; ++k)
      if (k != j && g_[k] >= 0)
        cur = std::max(cur, std::abs(x_.at(g_[k], u) - y_.at(k, j)));
    cur = std::max(cur, y_.at(f_[u], j));  // round trip through Y at j
    for (int i = 0; i < x_.n; ++i)
      if (f_[i] == j) cur = std::max(cur, x_.at(u, i));  // round trip through X
    return cur;
  }

  bool pruned(Dist cur) const {
    if (cur >= best_) return true;
    return shared_ && cur > shared_->load(std::memory_order_relaxed);
  }

  void descend_f(int i, Dist cur) {
    while (i < x_.n && f_[i] >= 0) ++i;
    if (i == x_.n) {
      descend_g(0, cur);
      return;
    }
    for (int v = 0; v < y_.n; ++v) {
      const Dist next = place_f_cost(i, v, cur);
      if (pruned(next)) continue;
      f_[i] = v;
      descend_f(i + 1, next);
      f_[i] = -1;
    }
  }

  void descend_g(int j, Dist cur) {
    while (j < y_.n && g_[j] >= 0) ++j;
    if (j == y_.n) {
      if (cur < best_) {
        best_ = cur;
        best_f_ = f_;
        best_g_ = g_;
      }
      return;
    }
    for (int u = 0; u < x_.n; ++u) {
      const Dist next = place_g_cost(j, u, cur);
      if (pruned(next)) continue;
      g_[j] = u;
      descend_g(j + 1, next);
      g_[j] = -1;
    }
  }

  const FiniteMetricSpace& x_;
  const FiniteMetricSpace& y_;
  std::optional<std::pair<int, int>> pointed_;
  const std::atomic<Dist>* shared_;
  std::vector<int> f_, g_;
  Dist best_ = std::numeric_limits<Dist>::infinity();
  std::vector<int> best_f_, best_g_;
};

inline void shared_min(std::atomic<Dist>& target, Dist v) {
  Dist cur = target.load(std::memory_order_relaxed);
  while (v < cur && !target.compare_exchange_weak(cur, v)) {
  }
}

}  // namespace detail

// Minimal-defect pair by exhaustive enumeration with branch-and-bound,
// lexicographically smallest among the minimizers. The enumeration may be
// split over the values of the first free f-slot across threads; the
// reduction takes the minimum by (defect, branch index), which equals the
// sequential result.
inline BestPairResult best_pair(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                std::optional<std::pair<int, int>> pointed = std::nullopt,
                                double budget = 5e9, int threads = 0) {
  if (pointed) {
    detail::check_index(x, pointed->first);
    detail::check_index(y, pointed->second);
  }
  const double size = detail::pair_search_size(x.n, y.n, pointed.has_value());
  if (size > budget)
    throw Error(ErrorCode::BudgetExceeded, "pair enumeration too large", {}, size);

  int split_pos = -1;
  for (int i = 0; i < x.n; ++i)
    if (!pointed || pointed->first != i) {
      split_pos = i;
      break;
    }

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  const bool parallel = threads > 1 && split_pos >= 0 && y.n > 1 && size > 2e5;

  MapPair best;
  Dist best_val = std::numeric_limits<Dist>::infinity();
  if (!parallel) {
    detail::PairSearch s(x, y, pointed, nullptr);
    s.run();
    best_val = s.best_value();
    best = s.best_pair();
  } else {
    std::atomic<Dist> shared{std::numeric_limits<Dist>::infinity()};
    std::vector<std::future<std::pair<Dist, MapPair>>> futs;
    futs.reserve(y.n);
    for (int v = 0; v < y.n; ++v)
      futs.push_back(std::async(std::launch::async, [&, v] {
        detail::PairSearch s(x, y, pointed, &shared);
        s.run(std::make_pair(split_pos, v));
        if (s.found()) detail::shared_min(shared, s.best_value());
        return std::make_pair(s.best_value(), s.best_pair());
      }));
    for (auto& fut : futs) {
      auto [val, pair] = fut.get();
      if (val < best_val) {
        best_val = val;
        best = pair;
      }
    }
  }

  BestPairResult out;
  out.pair = std::move(best);
  out.eps_star = best_val;
  out.report = defect(x, y, out.pair);
  return out;
}

struct RestrictedPairResult {
  SubsetRef ball_x;  // closed r-ball around the new base of X, global indices
  SubsetRef ball_y;
  FiniteMetricSpace ball_x_space;  // restricted metrics on the balls
  FiniteMetricSpace ball_y_space;
  MapPair pair;           // on ball positions, pointed at the new bases
  ApproximationReport report;
  Dist delta = 0.0;             // max(d(f(p'),q'), d(p',g(q')))
  Dist bound = 0.0;             // 4*eps + delta
  Dist projection_surplus = 0.0;  // beyond eps + delta of the proof's pull-in
};

// Restricts a pair defined on closed R-balls around (p,q) to closed r-balls
// around changed base points (p',q'). The proof's point on a shortest
// geodesic is replaced by the nearest point of the target ball with
// lexicographic tie-break; the surplus over the proof's eps + delta bound
// is measured and reported, since finite spaces need not realize geodesics.
inline RestrictedPairResult restrict_pair(const FiniteMetricSpace& x, int p, int p_alt,
                                          const FiniteMetricSpace& y, int q, int q_alt,
                                          const MapPair& pair, Dist eps, Dist r,
                                          Dist R) {
  detail::check_index(x, p);
  detail::check_index(x, p_alt);
  detail::check_index(y, q);
  detail::check_index(y, q_alt);

  const SubsetRef big_x = closed_ball(x, p, R);
  const SubsetRef big_y = closed_ball(y, q, R);
  const SubsetRef small_x = closed_ball(x, p_alt, r);
  const SubsetRef small_y = closed_ball(y, q_alt, r);
  if (!(r <= R) || !std::includes(big_x.begin(), big_x.end(), small_x.begin(),
                                  small_x.end()))
    throw Error(ErrorCode::BallNotNested, "r-ball around p' not inside R-ball around p");
  if (!std::includes(big_y.begin(), big_y.end(), small_y.begin(), small_y.end()))
    throw Error(ErrorCode::BallNotNested, "r-ball around q' not inside R-ball around q");

  const Dist delta_f = y.at(pair.f[p_alt], q_alt);
  const Dist delta_g = x.at(p_alt, pair.g[q_alt]);

  auto nearest_in = [](const FiniteMetricSpace& sp, const SubsetRef& set, int from) {
    int best = set.front();
    for (int c : set)
      if (sp.at(c, from) < sp.at(best, from)) best = c;
    return best;
  };
  auto in_ball = [](const FiniteMetricSpace& sp, int center, Dist rad, int pt) {
    return sp.at(center, pt) <= rad;
  };

  Dist surplus = 0.0;
  std::vector<int> f_tilde;  // global Y indices, per position of small_x
  f_tilde.reserve(small_x.size());
  for (int gx : small_x) {
    int target;
    if (gx == p_alt) {
      target = q_alt;
    } else if (in_ball(y, q_alt, r, pair.f[gx])) {
      target = pair.f[gx];
    } else {
      target = nearest_in(y, small_y, pair.f[gx]);
      surplus = std::max(surplus, y.at(pair.f[gx], target) - (eps + delta_f));
    }
    f_tilde.push_back(target);
  }
  std::vector<int> g_tilde;
  g_tilde.reserve(small_y.size());
  for (int gy : small_y) {
    int target;
    if (gy == q_alt) {
      target = p_alt;
    } else if (in_ball(x, p_alt, r, pair.g[gy])) {
      target = pair.g[gy];
    } else {
      target = nearest_in(x, small_x, pair.g[gy]);
      surplus = std::max(surplus, x.at(pair.g[gy], target) - (eps + delta_g));
    }
    g_tilde.push_back(target);
  }

  RestrictedPairResult out;
  out.ball_x = small_x;
  out.ball_y = small_y;
  out.ball_x_space = restrict(x, small_x);
  out.ball_y_space = restrict(y, small_y);

  auto position = [](const SubsetRef& set, int global) {
    return static_cast<int>(std::lower_bound(set.begin(), set.end(), global) -
                            set.begin());
  };
  out.pair.f.reserve(f_tilde.size());
  for (int t : f_tilde) out.pair.f.push_back(position(small_y, t));
  out.pair.g.reserve(g_tilde.size());
  for (int t : g_tilde) out.pair.g.push_back(position(small_x, t));
  out.pair.pointed = std::make_pair(position(small_x, p_alt), position(small_y, q_alt));

  out.report = defect(out.ball_x_space, out.ball_y_space, out.pair);
  out.delta = std::max(delta_f, delta_g);
  out.bound = 4.0 * eps + out.delta;
  out.projection_surplus = std::max(surplus, 0.0);
  return out;
}

}  // namespace ghkit
