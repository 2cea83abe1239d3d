#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ghkit/generators.hpp"
#include "ghkit/gh.hpp"
#include "ghkit/net.hpp"

namespace ghkit {

struct HarnessConfig {
  int n_max = 5;            // exact-cell size cap per side
  double gh_budget = 1e8;
  double pair_budget = 5e9;
  Dist tol_verdict = -1.0;  // < 0: use 3 * h_ref + 1e-3
  Dist tau_cluster = -1.0;  // < 0: use 2 * h_ref
  Tolerances tols;
  int threads = 0;
};

enum class CellMode { Exact, Sandwich };

inline const char* cell_mode_name(CellMode m) {
  return m == CellMode::Exact ? "exact" : "sandwich";
}

// One entry of the ball-distance curve: the pointed GH distance of the
// closed r-balls, either exact or as an enclosing interval.
struct CurveCell {
  Dist lo = 0.0;
  Dist hi = 0.0;
  CellMode mode = CellMode::Exact;
  Dist net_radius_seq = 0.0;
  Dist net_radius_ref = 0.0;
};

// Composed index maps between the i-th ball and the reference ball,
// recorded for point/base-point/map convergence.
struct RecordedPair {
  SubsetRef ball;            // global indices of the r-ball in X_i
  SubsetRef ref_ball;        // global indices of the r-ball in the reference
  std::vector<int> to_ref;   // per ball position: global reference index
  std::vector<int> from_ref; // per reference-ball position: global X_i index
  Dist defect = 0.0;         // defect of the underlying pair
};

struct ConvergenceReport {
  std::vector<Dist> radii;
  std::vector<int> indices;
  std::vector<std::vector<CurveCell>> cells;     // [radius][position]
  std::vector<std::vector<RecordedPair>> pairs;  // [radius][position]
  std::vector<Dist> diam_curve;                  // per position, full space
  Dist diam_reference = 0.0;
  Dist h_ref = 0.0;
  Dist tol_verdict = 0.0;
  std::vector<bool> radius_converged;
  bool converged = false;

  // Upper-bound table (one row per radius), the measured input for
  // select_radius_schedule.
  std::vector<std::vector<Dist>> eps_table() const {
    std::vector<std::vector<Dist>> t;
    t.reserve(cells.size());
    for (const auto& row : cells) {
      std::vector<Dist> r;
      r.reserve(row.size());
      for (const auto& c : row) r.push_back(c.hi);
      t.push_back(std::move(r));
    }
    return t;
  }
};

namespace detail {

inline int subset_position(const SubsetRef& set, int global) {
  const auto it = std::lower_bound(set.begin(), set.end(), global);
  return static_cast<int>(it - set.begin());
}

inline int nearest_member(const FiniteMetricSpace& sp, const SubsetRef& set,
                          int from) {
  int best = set.front();
  for (int c : set)
    if (sp.at(c, from) < sp.at(best, from)) best = c;
  return best;
}

// Pointed Hausdorff objective of the coordinate gluing |x - y| between two
// real-line samples; an explicit admissible cross metric, so a valid upper
// bound for the pointed GH distance of the balls. Embeddings are determined
// only up to a shift and a reflection, so both sides are anchored at their
// base points and both orientations are tried.
inline Dist line_glue_objective(const std::vector<double>& cx, const SubsetRef& bx,
                                int base_x, const std::vector<double>& cy,
                                const SubsetRef& by, int base_y) {
  Dist best_glue = std::numeric_limits<Dist>::infinity();
  for (double orient : {1.0, -1.0}) {
    Dist h = 0.0;
    for (int u : bx) {
      const double pu = cx[u] - cx[base_x];
      Dist best = std::numeric_limits<Dist>::infinity();
      for (int v : by)
        best = std::min(best, std::abs(pu - orient * (cy[v] - cy[base_y])));
      h = std::max(h, best);
    }
    for (int v : by) {
      const double pv = orient * (cy[v] - cy[base_y]);
      Dist best = std::numeric_limits<Dist>::infinity();
      for (int u : bx) best = std::min(best, std::abs(cx[u] - cx[base_x] - pv));
      h = std::max(h, best);
    }
    best_glue = std::min(best_glue, h);
  }
  return best_glue;
}

struct CellOutput {
  CurveCell cell;
  RecordedPair pair;
};

inline CellOutput evaluate_cell(const SequenceItem& item, const SequenceItem& ref,
                                Dist r, const HarnessConfig& cfg) {
  CellOutput out;
  const FiniteMetricSpace& xs = item.space.space;
  const FiniteMetricSpace& rs = ref.space.space;
  const SubsetRef ball_x = closed_ball(xs, item.space.base, r);
  const SubsetRef ball_ref = closed_ball(rs, ref.space.base, r);
  out.pair.ball = ball_x;
  out.pair.ref_ball = ball_ref;

  const FiniteMetricSpace bx = restrict(xs, ball_x);
  const FiniteMetricSpace bref = restrict(rs, ball_ref);
  const int px = subset_position(ball_x, item.space.base);
  const int pref = subset_position(ball_ref, ref.space.base);

  const bool exact = bx.n <= cfg.n_max && bref.n <= cfg.n_max;
  if (exact) {
    const GhResult gh = gh_pointed_exact(PointedSpace{bx, px}, PointedSpace{bref, pref},
                                         cfg.gh_budget, cfg.tols, cfg.threads);
    out.cell.lo = out.cell.hi = gh.value;
    out.cell.mode = CellMode::Exact;
    const BestPairResult bp = best_pair(bx, bref, std::make_pair(px, pref),
                                        cfg.pair_budget, cfg.threads);
    out.pair.defect = bp.eps_star;
    out.pair.to_ref.reserve(ball_x.size());
    for (std::size_t k = 0; k < ball_x.size(); ++k)
      out.pair.to_ref.push_back(ball_ref[bp.pair.f[k]]);
    out.pair.from_ref.reserve(ball_ref.size());
    for (std::size_t k = 0; k < ball_ref.size(); ++k)
      out.pair.from_ref.push_back(ball_x[bp.pair.g[k]]);
    return out;
  }

  const GreedyNet net_x = greedy_net(xs, ball_x, item.space.base, cfg.n_max);
  const GreedyNet net_ref = greedy_net(rs, ball_ref, ref.space.base, cfg.n_max);
  const FiniteMetricSpace nx = restrict(xs, net_x.points);
  const FiniteMetricSpace nref = restrict(rs, net_ref.points);
  const int npx = subset_position(net_x.points, item.space.base);
  const int npref = subset_position(net_ref.points, ref.space.base);
  const BestPairResult bp =
      best_pair(nx, nref, std::make_pair(npx, npref), cfg.pair_budget, cfg.threads);

  const Dist pad = net_x.radius + net_ref.radius;
  const Dist diam_lo = 0.5 * std::abs(diameter(bx) - diameter(bref));
  out.cell.mode = CellMode::Sandwich;
  out.cell.net_radius_seq = net_x.radius;
  out.cell.net_radius_ref = net_ref.radius;
  out.cell.lo = std::max({0.0, diam_lo, 0.5 * bp.eps_star - pad});
  out.cell.hi = 2.0 * bp.eps_star + pad;
  if (item.line_coords && ref.line_coords) {
    const Dist glue = line_glue_objective(*item.line_coords, ball_x, item.space.base,
                                          *ref.line_coords, ball_ref, ref.space.base);
    out.cell.hi = std::min(out.cell.hi, glue);
  }

  out.pair.defect = bp.eps_star;
  out.pair.to_ref.reserve(ball_x.size());
  for (int u : ball_x) {
    const int nu = nearest_member(xs, net_x.points, u);
    const int pos = subset_position(net_x.points, nu);
    out.pair.to_ref.push_back(net_ref.points[bp.pair.f[pos]]);
  }
  out.pair.from_ref.reserve(ball_ref.size());
  for (int v : ball_ref) {
    const int nv = nearest_member(rs, net_ref.points, v);
    const int pos = subset_position(net_ref.points, nv);
    out.pair.from_ref.push_back(net_x.points[bp.pair.g[pos]]);
  }
  return out;
}

inline double least_squares_slope(const std::vector<int>& xs,
                                  const std::vector<Dist>& ys) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) * (xs[k] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace detail

// One row of the convergence curve: the pointed GH distance of closed
// r-balls against the reference, per sequence index.
inline std::pair<std::vector<CurveCell>, std::vector<RecordedPair>> ball_curve(
    const SpaceSequence& seq, const SequenceItem& reference, Dist r,
    const std::vector<int>& indices, const HarnessConfig& cfg = {}) {
  std::vector<CurveCell> cells;
  std::vector<RecordedPair> pairs;
  cells.reserve(indices.size());
  pairs.reserve(indices.size());
  for (int i : indices) {
    detail::CellOutput cell = detail::evaluate_cell(seq.at(i), reference, r, cfg);
    cells.push_back(cell.cell);
    pairs.push_back(std::move(cell.pair));
  }
  return {std::move(cells), std::move(pairs)};
}

// Full harness run: curves for every radius, diameters, verdicts. Every
// verdict is relative to the declared reference mesh h_ref: the curves
// measure convergence up to that additive discretization error.
inline ConvergenceReport run_harness(const SpaceSequence& seq,
                                     const SequenceItem& reference, Dist h_ref,
                                     const std::vector<Dist>& radii,
                                     const std::vector<int>& indices,
                                     const HarnessConfig& cfg = {}) {
  ConvergenceReport rep;
  rep.radii = radii;
  rep.indices = indices;
  rep.h_ref = h_ref;
  rep.tol_verdict = cfg.tol_verdict >= 0.0 ? cfg.tol_verdict : 3.0 * h_ref + 1e-3;
  rep.diam_reference = diameter(reference.space.space);
  for (int i : indices) rep.diam_curve.push_back(diameter(seq.at(i).space.space));

  for (Dist r : radii) {
    auto [cells, pairs] = ball_curve(seq, reference, r, indices, cfg);
    rep.cells.push_back(std::move(cells));
    rep.pairs.push_back(std::move(pairs));
  }

  rep.converged = true;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    std::vector<Dist> his;
    his.reserve(indices.size());
    for (const auto& c : rep.cells[ri]) his.push_back(c.hi);
    const std::size_t tail_start = his.size() - (his.size() + 2) / 3;
    bool tail_ok = true;
    for (std::size_t k = tail_start; k < his.size(); ++k)
      if (his[k] > rep.tol_verdict) tail_ok = false;
    const bool trend_ok = detail::least_squares_slope(indices, his) <= 0.0;
    rep.radius_converged.push_back(tail_ok && trend_ok);
    if (!(tail_ok && trend_ok)) rep.converged = false;
  }
  return rep;
}

struct EpsTable {
  std::vector<Dist> radii;
  std::vector<int> indices;
  std::vector<std::vector<Dist>> eps;  // [radius][position]
};

inline EpsTable measured_table(const ConvergenceReport& rep) {
  return EpsTable{rep.radii, rep.indices, rep.eps_table()};
}

struct ScheduleResult {
  std::vector<Dist> schedule;    // per position; 0 on the exceptional prefix
  std::vector<int> exceptional;  // sequence indices with no feasible radius
};

// Radius schedule r_i with eps^{r_i}_i <= h(1/r_i) for all but a reported
// finite prefix. Implements the proof's sup-monotonization followed by a
// greedy pick of the largest feasible radius; the pick is nondecreasing and
// must reach the table's largest radius, the finite stand-in for r_i -> inf.
inline ScheduleResult select_radius_schedule(const EpsTable& table,
                                             const std::function<Dist(Dist)>& h) {
  const std::size_t nr = table.radii.size();
  const std::size_t ni = table.indices.size();
  if (nr == 0 || ni == 0)
    throw Error(ErrorCode::NoFeasibleSchedule, "empty table");

  std::vector<std::vector<Dist>> env(nr, std::vector<Dist>(ni, 0.0));
  for (std::size_t r = 0; r < nr; ++r) {
    Dist running = -std::numeric_limits<Dist>::infinity();
    for (std::size_t k = ni; k-- > 0;) {
      running = std::max(running, table.eps[r][k]);
      env[r][k] = running;
    }
  }

  ScheduleResult out;
  out.schedule.assign(ni, 0.0);
  for (std::size_t k = 0; k < ni; ++k) {
    Dist pick = -1.0;
    for (std::size_t r = 0; r < nr; ++r)
      if (env[r][k] <= h(1.0 / table.radii[r]))
        pick = std::max(pick, table.radii[r]);
    if (pick < 0.0)
      out.exceptional.push_back(table.indices[k]);
    else
      out.schedule[k] = pick;
  }

  if (out.exceptional.size() == ni)
    throw Error(ErrorCode::NoFeasibleSchedule, "no index admits any radius",
                out.exceptional);
  const Dist top = *std::max_element(table.radii.begin(), table.radii.end());
  if (out.schedule.back() != top) {
    std::vector<int> offending;
    for (std::size_t k = 0; k < ni; ++k)
      if (out.schedule[k] != top) offending.push_back(table.indices[k]);
    throw Error(ErrorCode::NoFeasibleSchedule,
                "schedule never reaches the largest radius", offending);
  }
  return out;
}

struct PointLimitResult {
  bool unique = false;
  std::vector<int> representatives;  // global reference indices
  std::vector<std::vector<int>> cluster_members;  // per rep: sequence indices
  std::vector<int> images;  // per position: image of q_i in the reference
};

namespace detail {

// Single-linkage components at gap tau, accumulation rule: a component is
// an accumulation cluster when it holds at least ceil(sqrt(N)) members.
inline std::vector<std::vector<int>> single_linkage(
    const std::vector<int>& items, const std::function<Dist(int, int)>& dist,
    Dist tau) {
  const int n = static_cast<int>(items.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (dist(items[a], items[b]) <= tau) parent[find(a)] = find(b);
  std::vector<std::vector<int>> comps;
  std::vector<int> comp_of(n, -1);
  for (int a = 0; a < n; ++a) {
    const int root = find(a);
    if (comp_of[root] < 0) {
      comp_of[root] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[root]].push_back(a);
  }
  return comps;
}

inline std::size_t large_threshold(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

}  // namespace detail

// Convergence of the point selections q_i through the recorded pairs: the
// images f_i(q_i) in the reference are clustered; one accumulation cluster
// is a limit, several are a legitimate ambiguity (the choice of pairs
// matters, so all accumulation representatives are returned).
inline PointLimitResult point_limit(const std::vector<RecordedPair>& pairs,
                                    const std::vector<int>& indices,
                                    const FiniteMetricSpace& reference,
                                    const std::function<int(int)>& q,
                                    Dist tau_cluster) {
  PointLimitResult out;
  const int n = static_cast<int>(indices.size());
  out.images.reserve(n);
  for (int k = 0; k < n; ++k) {
    const RecordedPair& rec = pairs[k];
    const int qi = q(indices[k]);
    if (!std::binary_search(rec.ball.begin(), rec.ball.end(), qi))
      throw Error(ErrorCode::IndexOutOfRange,
                  "selected point lies outside the recorded ball",
                  {indices[k], qi});
    out.images.push_back(rec.to_ref[detail::subset_position(rec.ball, qi)]);
  }

  std::vector<int> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  const auto comps = detail::single_linkage(
      positions,
      [&](int a, int b) { return reference.at(out.images[a], out.images[b]); },
      tau_cluster);
  const std::size_t need = detail::large_threshold(n);
  for (const auto& comp : comps) {
    if (comp.size() < need) continue;
    int best = -1;
    Dist best_sum = 0.0;
    for (int a : comp) {
      Dist sum = 0.0;
      for (int b : comp) sum += reference.at(out.images[a], out.images[b]);
      if (best < 0 || sum < best_sum ||
          (sum == best_sum && out.images[a] < out.images[best])) {
        best = a;
        best_sum = sum;
      }
    }
    out.representatives.push_back(out.images[best]);
    std::vector<int> members;
    members.reserve(comp.size());
    for (int a : comp) members.push_back(indices[a]);
    out.cluster_members.push_back(std::move(members));
  }
  out.unique = out.representatives.size() == 1;
  return out;
}

// Base-point change: same generator with new base points; the reference is
// rebased to the unique limit of the q_i.
inline std::pair<SpaceSequence, SequenceItem> rebase(const SpaceSequence& seq,
                                                     const SequenceItem& reference,
                                                     const std::function<int(int)>& q,
                                                     const PointLimitResult& limit) {
  if (!limit.unique)
    throw Error(ErrorCode::AmbiguousLimitPoint,
                "point limit has several accumulation representatives",
                limit.representatives);
  SpaceSequence rebased = seq;
  rebased.base_override = q;
  SequenceItem new_ref = reference;
  new_ref.space.base = limit.representatives.front();
  return {std::move(rebased), std::move(new_ref)};
}

// Per-index map with domain K_i in X_i and values in Y_i.
struct IndexedMap {
  SubsetRef domain;
  std::vector<int> values;  // per domain position, global Y_i index
};

struct TransportResult {
  SubsetRef ref_domain;  // global reference-X indices the maps act on
  std::vector<std::vector<int>> h;  // [position][ref_domain position] -> ref-Y index
  Dist max_violation = 0.0;  // beyond alpha*d + (alpha+1)*eps_i
  std::vector<std::vector<int>> candidates;       // sublimit map candidates
  std::vector<std::vector<int>> candidate_members;  // sequence indices per candidate
  bool unique = false;
  Dist candidate_bilipschitz_violation = 0.0;
};

// Transports alpha-bi-Lipschitz maps f_i: K_i -> Y_i onto the reference via
// the recorded pairs, h_i = f^Y_i ∘ f_i ∘ g^X_i, measures the Lipschitz
// bound alpha*d + (alpha+1)*eps_i, and clusters the composed maps into
// sublimit candidates.
inline TransportResult transport_map(const std::vector<RecordedPair>& rec_x,
                                     const std::vector<RecordedPair>& rec_y,
                                     const std::vector<int>& indices,
                                     const FiniteMetricSpace& ref_x,
                                     const FiniteMetricSpace& ref_y,
                                     const std::function<const FiniteMetricSpace&(int)>& space_x,
                                     const std::function<const FiniteMetricSpace&(int)>& space_y,
                                     const std::function<IndexedMap(int)>& f, Dist alpha,
                                     Dist tol_bilip, Dist tau_cluster) {
  TransportResult out;
  const int n = static_cast<int>(indices.size());
  if (n == 0) return out;
  out.ref_domain = rec_x.front().ref_ball;

  for (int k = 0; k < n; ++k) {
    const int i = indices[k];
    const IndexedMap fmap = f(i);
    const FiniteMetricSpace& xs = space_x(i);
    const FiniteMetricSpace& ys = space_y(i);
    for (std::size_t a = 0; a < fmap.domain.size(); ++a)
      for (std::size_t b = a + 1; b < fmap.domain.size(); ++b) {
        const Dist dx = xs.at(fmap.domain[a], fmap.domain[b]);
        const Dist dy = ys.at(fmap.values[a], fmap.values[b]);
        if (dy > alpha * dx + tol_bilip || dy < dx / alpha - tol_bilip)
          throw Error(ErrorCode::NotBiLipschitz, "input map violates the bound",
                      {i, fmap.domain[a], fmap.domain[b]});
      }

    const RecordedPair& rx = rec_x[k];
    const RecordedPair& ry = rec_y[k];
    std::vector<int> hk;
    hk.reserve(out.ref_domain.size());
    for (std::size_t pos = 0; pos < rx.ref_ball.size(); ++pos) {
      int u = rx.from_ref[pos];
      if (!std::binary_search(fmap.domain.begin(), fmap.domain.end(), u))
        u = detail::nearest_member(xs, fmap.domain, u);
      int v = fmap.values[detail::subset_position(fmap.domain, u)];
      if (!std::binary_search(ry.ball.begin(), ry.ball.end(), v))
        v = detail::nearest_member(ys, ry.ball, v);
      hk.push_back(ry.to_ref[detail::subset_position(ry.ball, v)]);
    }

    const Dist eps_i = std::max(rx.defect, ry.defect);
    for (std::size_t a = 0; a < hk.size(); ++a)
      for (std::size_t b = a + 1; b < hk.size(); ++b) {
        const Dist dx = ref_x.at(out.ref_domain[a], out.ref_domain[b]);
        const Dist dy = ref_y.at(hk[a], hk[b]);
        out.max_violation =
            std::max(out.max_violation, dy - (alpha * dx + (alpha + 1.0) * eps_i));
        out.max_violation = std::max(
            out.max_violation, dx / alpha - (1.0 + 1.0 / alpha) * eps_i - dy);
      }
    out.h.push_back(std::move(hk));
  }

  std::vector<int> positions(n);
  std::iota(positions.begin(), positions.end(), 0);
  const auto map_dist = [&](int a, int b) {
    Dist worst = 0.0;
    for (std::size_t pos = 0; pos < out.h[a].size(); ++pos)
      worst = std::max(worst, ref_y.at(out.h[a][pos], out.h[b][pos]));
    return worst;
  };
  const auto comps = detail::single_linkage(positions, map_dist, tau_cluster);
  const std::size_t need = detail::large_threshold(n);
  for (const auto& comp : comps) {
    if (comp.size() < need) continue;
    int best = -1;
    Dist best_sum = 0.0;
    for (int a : comp) {
      Dist sum = 0.0;
      for (int b : comp) sum += map_dist(a, b);
      if (best < 0 || sum < best_sum) {
        best = a;
        best_sum = sum;
      }
    }
    out.candidates.push_back(out.h[best]);
    std::vector<int> members;
    for (int a : comp) members.push_back(indices[a]);
    out.candidate_members.push_back(std::move(members));
  }
  out.unique = out.candidates.size() == 1;

  for (const auto& cand : out.candidates)
    for (std::size_t a = 0; a < cand.size(); ++a)
      for (std::size_t b = a + 1; b < cand.size(); ++b) {
        const Dist dx = ref_x.at(out.ref_domain[a], out.ref_domain[b]);
        const Dist dy = ref_y.at(cand[a], cand[b]);
        out.candidate_bilipschitz_violation =
            std::max({out.candidate_bilipschitz_violation, dy - alpha * dx,
                      dx / alpha - dy});
      }
  return out;
}

}  // namespace ghkit
