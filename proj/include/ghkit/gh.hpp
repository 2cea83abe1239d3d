#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "ghkit/admissible.hpp"
#include "ghkit/approximation.hpp"
#include "ghkit/space.hpp"

namespace ghkit {

struct Interval {
  Dist lo = 0.0;
  Dist hi = 0.0;
};

struct GhOracleResult {
  Dist value = 0.0;
  // Witness correspondence graph(f) ∪ graph(g) attaining 2*value distortion.
  std::vector<std::pair<int, int>> relation;
};

struct GhResult {
  Dist value = 0.0;
  AdmissibleMetric witness;
  std::vector<int> assign_xy;  // cross edges (x, a(x)) of the witness
  std::vector<int> assign_yx;  // cross edges (b(y), y)
  Dist level_t = 0.0;          // cross-edge level of the optimal completion
  Dist level_s = 0.0;          // base-pair level in the pointed variant
};

namespace detail {

// ---------------------------------------------------------------------------
// Independent oracle: half the minimal distortion of a relation of the form
// graph(f) ∪ graph(g). Minimal correspondences can always be taken of this
// form because distortion is monotone under relation inclusion. This path
// never touches the shortest-path solver below.
// ---------------------------------------------------------------------------
class OracleSearch {
 public:
  OracleSearch(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
               const std::atomic<Dist>* shared)
      : x_(x), y_(y), shared_(shared) {
    f_.assign(x_.n, -1);
    g_.assign(y_.n, -1);
  }

  void run(std::optional<int> fix_first = std::nullopt) {
    if (fix_first) {
      f_[0] = *fix_first;
      descend_f(1, 0.0);
      f_[0] = -1;
      return;
    }
    descend_f(0, 0.0);
  }

  Dist best_value() const { return best_; }
  bool found() const { return best_ < std::numeric_limits<Dist>::infinity(); }
  std::vector<std::pair<int, int>> relation() const {
    std::vector<std::pair<int, int>> rel;
    for (int i = 0; i < x_.n; ++i) rel.emplace_back(i, best_f_[i]);
    for (int j = 0; j < y_.n; ++j) rel.emplace_back(best_g_[j], j);
    return rel;
  }

 private:
  Dist add_cost(int u, int v, Dist cur, int upto_f, int upto_g) const {
    for (int i = 0; i < upto_f; ++i)
      cur = std::max(cur, std::abs(x_.at(u, i) - y_.at(v, f_[i])));
    for (int j = 0; j < upto_g; ++j)
      cur = std::max(cur, std::abs(x_.at(u, g_[j]) - y_.at(v, j)));
    return cur;
  }

  bool pruned(Dist cur) const {
    if (0.5 * cur >= best_) return true;
    return shared_ && 0.5 * cur > shared_->load(std::memory_order_relaxed);
  }

  void descend_f(int i, Dist cur) {
    if (i == x_.n) {
      descend_g(0, cur);
      return;
    }
    for (int v = 0; v < y_.n; ++v) {
      const Dist next = add_cost(i, v, cur, i, 0);
      if (pruned(next)) continue;
      f_[i] = v;
      descend_f(i + 1, next);
      f_[i] = -1;
    }
  }

  void descend_g(int j, Dist cur) {
    if (j == y_.n) {
      if (0.5 * cur < best_) {
        best_ = 0.5 * cur;
        best_f_ = f_;
        best_g_ = g_;
      }
      return;
    }
    for (int u = 0; u < x_.n; ++u) {
      const Dist next = add_cost(u, j, cur, x_.n, j);
      if (pruned(next)) continue;
      g_[j] = u;
      descend_g(j + 1, next);
      g_[j] = -1;
    }
  }

  const FiniteMetricSpace& x_;
  const FiniteMetricSpace& y_;
  const std::atomic<Dist>* shared_;
  std::vector<int> f_, g_;
  Dist best_ = std::numeric_limits<Dist>::infinity();
  std::vector<int> best_f_, best_g_;
};

// ---------------------------------------------------------------------------
// Completion solver. For an assignment pair (a: X->Y, b: Y->X) and levels
// (t, s), build the graph whose nodes are X ⨿ Y, whose intra edges carry the
// original distances, whose cross edges (x, a(x)) and (b(y), y) carry t, and
// (pointed case) whose extra edge (p, q) carries s. All-pairs shortest paths
// give the maximal metric under these caps. Feasibility test: the completion
// restricts exactly to d_X and d_Y. This decides feasibility of the caps
// outright: any admissible metric obeying them is dominated by the
// shortest-path completion, so if some witness respects the caps then the
// completion itself restricts exactly.
// ---------------------------------------------------------------------------
class CompletionSolver {
 public:
  CompletionSolver(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                   const std::vector<int>& a, const std::vector<int>& b,
                   std::optional<std::pair<int, int>> pointed)
      : x_(x), y_(y), a_(a), b_(b), pointed_(pointed), total_(x.n + y.n) {
    scale_ = std::max(1.0, diameter(x_) + diameter(y_));
    dist_.assign(static_cast<std::size_t>(total_) * total_, 0.0);
    tcnt_.assign(dist_.size(), 0);
  }

  // Minimal feasible t for fixed s: bisection on the bracket down to
  // tau_solver, then exact polish. The polish walks up the piecewise-linear
  // lower envelope: at an infeasible t each violated restriction names the
  // level its current shortest path needs, and the max of those levels is
  // again a lower bound for the minimum, so the walk converges to it from
  // below after finitely many pieces.
  Dist minimal_t(Dist lo, Dist hi, Dist s, Dist tau_solver) {
    if (violation(lo, s) <= feas_eps()) return lo;
    Dist bad = lo;
    Dist good = hi;
    while (good - bad > tau_solver) {
      const Dist mid = 0.5 * (bad + good);
      if (violation(mid, s) <= feas_eps())
        good = mid;
      else
        bad = mid;
    }
    Dist t = bad;
    for (int iter = 0; iter < 200; ++iter) {
      const Dist v = violation(t, s);
      if (v <= feas_eps()) break;
      Dist next = t;
      for (Dist need : violated_) next = std::max(next, need);
      if (!(next > t + 1e-15 * scale_)) {
        t = good;  // safety net; the walk has stalled within rounding
        break;
      }
      t = std::min(next, good);
    }
    return t;
  }

  // Max restriction deficit at levels (t, s); fills violated_ with the
  // levels the current shortest paths would need.
  Dist violation(Dist t, Dist s) {
    run_floyd(t, s);
    violated_.clear();
    Dist worst = 0.0;
    const int n = x_.n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Dist deficit = x_.at(i, j) - at(i, j);
        if (deficit > 0.0) {
          worst = std::max(worst, deficit);
          if (cnt(i, j) > 0)
            violated_.push_back((x_.at(i, j) - (at(i, j) - cnt(i, j) * t)) /
                                cnt(i, j));
        }
      }
    for (int i = 0; i < y_.n; ++i)
      for (int j = i + 1; j < y_.n; ++j) {
        const Dist deficit = y_.at(i, j) - at(n + i, n + j);
        if (deficit > 0.0) {
          worst = std::max(worst, deficit);
          if (cnt(n + i, n + j) > 0)
            violated_.push_back(
                (y_.at(i, j) - (at(n + i, n + j) - cnt(n + i, n + j) * t)) /
                cnt(n + i, n + j));
        }
      }
    return worst;
  }

  // Cross block of the completion at the final levels, floored so the
  // assembled joint matrix stays positive definite.
  std::vector<Dist> cross_block(Dist t, Dist s, Dist floor_value) {
    run_floyd(t, s);
    std::vector<Dist> cross(static_cast<std::size_t>(x_.n) * y_.n, 0.0);
    for (int i = 0; i < x_.n; ++i)
      for (int j = 0; j < y_.n; ++j)
        cross[static_cast<std::size_t>(i) * y_.n + j] =
            std::max(at(i, x_.n + j), floor_value);
    return cross;
  }

  Dist feas_eps() const { return 1e-12 * scale_; }
  Dist scale() const { return scale_; }

 private:
  Dist& at(int i, int j) { return dist_[static_cast<std::size_t>(i) * total_ + j]; }
  int& cnt(int i, int j) { return tcnt_[static_cast<std::size_t>(i) * total_ + j]; }

  void set_edge(int u, int v, Dist w, int c) {
    // Elementwise min; on (near) ties keep the edge with the slower growth
    // in t so the polish follows the binding piece.
    const Dist tie = 1e-15 * scale_;
    if (w < at(u, v) - tie || (w <= at(u, v) + tie && c < cnt(u, v))) {
      at(u, v) = std::min(w, at(u, v));
      at(v, u) = at(u, v);
      cnt(u, v) = c;
      cnt(v, u) = c;
    }
  }

  void run_floyd(Dist t, Dist s) {
    const int n = x_.n;
    const Dist inf = std::numeric_limits<Dist>::infinity();
    std::fill(dist_.begin(), dist_.end(), inf);
    std::fill(tcnt_.begin(), tcnt_.end(), 0);
    for (int i = 0; i < total_; ++i) at(i, i) = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          at(i, j) = x_.at(i, j);
          cnt(i, j) = 0;
        }
    for (int i = 0; i < y_.n; ++i)
      for (int j = 0; j < y_.n; ++j)
        if (i != j) {
          at(n + i, n + j) = y_.at(i, j);
          cnt(n + i, n + j) = 0;
        }
    for (int i = 0; i < n; ++i) set_edge(i, n + a_[i], t, 1);
    for (int j = 0; j < y_.n; ++j) set_edge(b_[j], n + j, t, 1);
    if (pointed_) set_edge(pointed_->first, n + pointed_->second, s, 0);

    const Dist tie = 1e-15 * scale_;
    for (int k = 0; k < total_; ++k)
      for (int i = 0; i < total_; ++i) {
        const Dist dik = at(i, k);
        if (dik == inf) continue;
        for (int j = 0; j < total_; ++j) {
          const Dist alt = dik + at(k, j);
          if (alt < at(i, j) - tie) {
            at(i, j) = alt;
            cnt(i, j) = cnt(i, k) + cnt(k, j);
          } else if (alt <= at(i, j) + tie && cnt(i, k) + cnt(k, j) < cnt(i, j)) {
            at(i, j) = std::min(alt, at(i, j));
            cnt(i, j) = cnt(i, k) + cnt(k, j);
          }
        }
      }
  }

  const FiniteMetricSpace& x_;
  const FiniteMetricSpace& y_;
  const std::vector<int>& a_;
  const std::vector<int>& b_;
  std::optional<std::pair<int, int>> pointed_;
  int total_;
  Dist scale_ = 1.0;
  std::vector<Dist> dist_;
  std::vector<int> tcnt_;
  std::vector<Dist> violated_;
};

// Objective of one assignment pair. Unpointed: the minimal feasible level t.
// Pointed: min over levels of t_min(s) + s, swept over candidate base-pair
// levels. t_min(s) is convex and nonincreasing with one-sided slopes in
// [-1, 0] (every restriction threat through the base edge also crosses at
// least one t-edge), so s + t_min(s) is nondecreasing and the sweep settles
// at s = 0; the candidates and the convexity refinement guard the argument.
inline Dist assignment_objective(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                 const std::vector<int>& a, const std::vector<int>& b,
                                 std::optional<std::pair<int, int>> pointed,
                                 Dist tau_solver, Dist* out_t = nullptr,
                                 Dist* out_s = nullptr) {
  CompletionSolver solver(x, y, a, b, pointed);
  const Dist lo = 0.5 * std::abs(diameter(x) - diameter(y));
  const Dist hi = std::max(lo, diameter(x) + diameter(y)) + 1.0;
  if (!pointed) {
    const Dist t = solver.minimal_t(lo, hi, 0.0, tau_solver);
    if (out_t) *out_t = t;
    if (out_s) *out_s = 0.0;
    return t;
  }
  const Dist s_hi = diameter(x) + diameter(y);
  std::vector<Dist> candidates = {0.0, 0.25 * s_hi, 0.5 * s_hi, 0.75 * s_hi};
  Dist best = std::numeric_limits<Dist>::infinity();
  Dist best_t = 0.0, best_s = 0.0;
  for (Dist s : candidates) {
    const Dist t = solver.minimal_t(0.0, hi, s, tau_solver);
    if (t + s < best) {
      best = t + s;
      best_t = t;
      best_s = s;
    }
  }
  if (best_s > 0.0) {
    // Interior minimum candidate: ternary refinement on the convex sweep.
    Dist a_lo = 0.0, a_hi = s_hi;
    for (int iter = 0; iter < 60; ++iter) {
      const Dist m1 = a_lo + (a_hi - a_lo) / 3.0;
      const Dist m2 = a_hi - (a_hi - a_lo) / 3.0;
      const Dist g1 = m1 + solver.minimal_t(0.0, hi, m1, tau_solver);
      const Dist g2 = m2 + solver.minimal_t(0.0, hi, m2, tau_solver);
      if (g1 <= g2)
        a_hi = m2;
      else
        a_lo = m1;
    }
    const Dist s_ref = a_lo;
    const Dist t_ref = solver.minimal_t(0.0, hi, s_ref, tau_solver);
    if (t_ref + s_ref < best) {
      best = t_ref + s_ref;
      best_t = t_ref;
      best_s = s_ref;
    }
  }
  if (out_t) *out_t = best_t;
  if (out_s) *out_s = best_s;
  return best;
}

// Branch-and-bound over assignment pairs. The pruning bound reads
// restriction threats straight off the graph: with (u,v) and (u',v') among
// the cross pairs, the two-crossing path forces t >= |d_X(u,u') -
// d_Y(v,v')| / 2, and in the pointed case the path through the base edge
// forces t + s >= |d_X(u,p) - d_Y(v,q)|.
class AssignmentSearch {
 public:
  AssignmentSearch(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                   std::optional<std::pair<int, int>> pointed, Dist tau_solver,
                   const std::atomic<Dist>* shared)
      : x_(x), y_(y), pointed_(pointed), tau_(tau_solver), shared_(shared) {
    a_.assign(x_.n, -1);
    b_.assign(y_.n, -1);
  }

  void run(std::optional<int> fix_first = std::nullopt) {
    if (fix_first) {
      const Dist cur = place_a_cost(0, *fix_first, 0.0);
      a_[0] = *fix_first;
      descend_a(1, cur);
      a_[0] = -1;
      return;
    }
    descend_a(0, 0.0);
  }

  Dist best_value() const { return best_; }
  bool found() const { return best_ < std::numeric_limits<Dist>::infinity(); }
  const std::vector<int>& best_a() const { return best_a_; }
  const std::vector<int>& best_b() const { return best_b_; }

 private:
  Dist rel_cost(int u, int v, Dist cur, int upto_a, int upto_b) const {
    for (int i = 0; i < upto_a; ++i)
      cur = std::max(cur, 0.5 * std::abs(x_.at(u, i) - y_.at(v, a_[i])));
    for (int j = 0; j < upto_b; ++j)
      cur = std::max(cur, 0.5 * std::abs(x_.at(u, b_[j]) - y_.at(v, j)));
    if (pointed_)
      cur = std::max(cur, std::abs(x_.at(u, pointed_->first) -
                                   y_.at(v, pointed_->second)));
    return cur;
  }

  Dist place_a_cost(int i, int v, Dist cur) const { return rel_cost(i, v, cur, i, 0); }
  Dist place_b_cost(int j, int u, Dist cur) const {
    return rel_cost(u, j, cur, x_.n, j);
  }

  bool pruned(Dist cur) const {
    if (cur >= best_) return true;
    return shared_ && cur > shared_->load(std::memory_order_relaxed);
  }

  void descend_a(int i, Dist cur) {
    if (i == x_.n) {
      descend_b(0, cur);
      return;
    }
    for (int v = 0; v < y_.n; ++v) {
      const Dist next = place_a_cost(i, v, cur);
      if (pruned(next)) continue;
      a_[i] = v;
      descend_a(i + 1, next);
      a_[i] = -1;
    }
  }

  void descend_b(int j, Dist cur) {
    if (j == y_.n) {
      const Dist obj = assignment_objective(x_, y_, a_, b_, pointed_, tau_);
      if (obj < best_) {
        best_ = obj;
        best_a_ = a_;
        best_b_ = b_;
      }
      return;
    }
    for (int u = 0; u < x_.n; ++u) {
      const Dist next = place_b_cost(j, u, cur);
      if (pruned(next)) continue;
      b_[j] = u;
      descend_b(j + 1, next);
      b_[j] = -1;
    }
  }

  const FiniteMetricSpace& x_;
  const FiniteMetricSpace& y_;
  std::optional<std::pair<int, int>> pointed_;
  Dist tau_;
  const std::atomic<Dist>* shared_;
  std::vector<int> a_, b_;
  Dist best_ = std::numeric_limits<Dist>::infinity();
  std::vector<int> best_a_, best_b_;
};

inline void check_gh_budget(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                            double budget) {
  const double size = pair_search_size(x.n, y.n, false);
  if (size > budget)
    throw Error(ErrorCode::BudgetExceeded, "assignment enumeration too large", {},
                size);
}

inline GhResult finish_gh(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                          const std::vector<int>& a, const std::vector<int>& b,
                          std::optional<std::pair<int, int>> pointed, Dist value,
                          Dist tau_solver, Dist tau_metric) {
  GhResult out;
  out.value = value;
  out.assign_xy = a;
  out.assign_yx = b;
  CompletionSolver solver(x, y, a, b, pointed);
  const Dist lo = 0.5 * std::abs(diameter(x) - diameter(y));
  const Dist hi = std::max(lo, diameter(x) + diameter(y)) + 1.0;
  if (!pointed) {
    out.level_t = solver.minimal_t(lo, hi, 0.0, tau_solver);
    out.level_s = 0.0;
  } else {
    assignment_objective(x, y, a, b, pointed, tau_solver, &out.level_t, &out.level_s);
  }
  out.witness = validate_admissible(
      x, y, solver.cross_block(out.level_t, out.level_s, tau_solver), tau_metric);
  return out;
}

template <typename Search, typename Reduce>
void run_branches(int branch_count, double size, Reduce&& reduce,
                  const std::function<void(Search&, std::optional<int>)>& drive,
                  const std::function<Search(const std::atomic<Dist>*)>& make,
                  int threads) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  const bool parallel = threads > 1 && branch_count > 1 && size > 2e5;
  if (!parallel) {
    Search s = make(nullptr);
    drive(s, std::nullopt);
    reduce(s);
    return;
  }
  std::atomic<Dist> shared{std::numeric_limits<Dist>::infinity()};
  std::vector<std::future<Search>> futs;
  futs.reserve(branch_count);
  for (int v = 0; v < branch_count; ++v)
    futs.push_back(std::async(std::launch::async, [&, v] {
      Search s = make(&shared);
      drive(s, v);
      if (s.found()) shared_min(shared, s.best_value());
      return s;
    }));
  for (auto& f : futs) {
    Search s = f.get();
    reduce(s);
  }
}

}  // namespace detail

// Exact GH distance by the independent correspondence oracle.
inline GhOracleResult gh_oracle(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                double budget = 1e8, int threads = 0) {
  detail::check_gh_budget(x, y, budget);
  GhOracleResult out;
  Dist best = std::numeric_limits<Dist>::infinity();
  detail::run_branches<detail::OracleSearch>(
      y.n, detail::pair_search_size(x.n, y.n, false),
      [&](detail::OracleSearch& s) {
        if (s.found() && s.best_value() < best) {
          best = s.best_value();
          out.relation = s.relation();
        }
      },
      [](detail::OracleSearch& s, std::optional<int> fix) { s.run(fix); },
      [&](const std::atomic<Dist>* shared) {
        return detail::OracleSearch(x, y, shared);
      },
      threads);
  out.value = best;
  return out;
}

// Exact GH distance as the minimum of the Hausdorff objective over
// admissible metrics, realized through shortest-path completions of
// assignment pairs. Agrees with gh_oracle within tau_solver.
inline GhResult gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                         double budget = 1e8, const Tolerances& tols = default_tols(),
                         int threads = 0) {
  detail::check_gh_budget(x, y, budget);
  Dist best = std::numeric_limits<Dist>::infinity();
  std::vector<int> best_a, best_b;
  detail::run_branches<detail::AssignmentSearch>(
      y.n, detail::pair_search_size(x.n, y.n, false),
      [&](detail::AssignmentSearch& s) {
        if (s.found() && s.best_value() < best) {
          best = s.best_value();
          best_a = s.best_a();
          best_b = s.best_b();
        }
      },
      [](detail::AssignmentSearch& s, std::optional<int> fix) { s.run(fix); },
      [&](const std::atomic<Dist>* shared) {
        return detail::AssignmentSearch(x, y, std::nullopt, tols.solver, shared);
      },
      threads);
  return detail::finish_gh(x, y, best_a, best_b, std::nullopt, best, tols.solver,
                           tols.metric);
}

// Pointed variant: minimizes t + s where the construction adds the cross
// edge (p, q) at level s.
inline GhResult gh_pointed_exact(const PointedSpace& px, const PointedSpace& py,
                                 double budget = 1e8,
                                 const Tolerances& tols = default_tols(),
                                 int threads = 0) {
  const FiniteMetricSpace& x = px.space;
  const FiniteMetricSpace& y = py.space;
  detail::check_index(x, px.base);
  detail::check_index(y, py.base);
  detail::check_gh_budget(x, y, budget);
  const auto pointed = std::make_pair(px.base, py.base);
  Dist best = std::numeric_limits<Dist>::infinity();
  std::vector<int> best_a, best_b;
  detail::run_branches<detail::AssignmentSearch>(
      y.n, detail::pair_search_size(x.n, y.n, false),
      [&](detail::AssignmentSearch& s) {
        if (s.found() && s.best_value() < best) {
          best = s.best_value();
          best_a = s.best_a();
          best_b = s.best_b();
        }
      },
      [](detail::AssignmentSearch& s, std::optional<int> fix) { s.run(fix); },
      [&](const std::atomic<Dist>* shared) {
        return detail::AssignmentSearch(x, y, pointed, tols.solver, shared);
      },
      threads);
  return detail::finish_gh(x, y, best_a, best_b, pointed, best, tols.solver,
                           tols.metric);
}

// Sandwich interval [max(|diam difference|/2, eps*/2), 2*eps*]; always
// contains the exact value.
inline Interval gh_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                          double budget = 5e9, int threads = 0) {
  const Dist eps_star = best_pair(x, y, std::nullopt, budget, threads).eps_star;
  const Dist diam_lo = 0.5 * std::abs(diameter(x) - diameter(y));
  return Interval{std::max(diam_lo, 0.5 * eps_star), 2.0 * eps_star};
}

inline Interval gh_bounds_pointed(const PointedSpace& x, const PointedSpace& y,
                                  double budget = 5e9, int threads = 0) {
  const Dist eps_star =
      best_pair(x.space, y.space, std::make_pair(x.base, y.base), budget, threads)
          .eps_star;
  const Dist diam_lo = 0.5 * std::abs(diameter(x.space) - diameter(y.space));
  return Interval{std::max(diam_lo, 0.5 * eps_star), 2.0 * eps_star};
}

}  // namespace ghkit
