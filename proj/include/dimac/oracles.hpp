#pragma once

// Brute-force cross-checks used by the test suite and the `oracle` CLI
// command. Each oracle recomputes a quantity by a method independent of the
// production code path: simplex grid search for the entropy maximizer,
// residual-scanned coupling search for binary confusability, penalized
// random search over full four-variable joints for the S-independence
// reduction, and exact big-integer identities for the type machinery.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "dimac/confusability.hpp"
#include "dimac/prob.hpp"
#include "dimac/rng.hpp"
#include "dimac/types.hpp"

namespace dimac {

// Grid search over the probability simplex (alphabets up to 3) for
// max H(p) subject to the average-cost cap.
inline double oracle_max_entropy_grid(std::size_t a, std::span<const double> phi, double cap,
                                      std::size_t steps = 1000) {
  if (a < 1 || a > 3) throw std::invalid_argument("oracle_max_entropy_grid: alphabet size 1..3");
  double best = -1.0;
  auto consider = [&](std::initializer_list<double> probs) {
    double cost = 0.0, i = 0;
    for (double p : probs) cost += p * phi[static_cast<std::size_t>(i++)];
    if (cost > cap + 1e-12) return;
    std::vector<double> v(probs);
    double h = neg_sum_xlog2x(v);
    best = std::max(best, h);
  };
  if (a == 1) {
    consider({1.0});
  } else if (a == 2) {
    for (std::size_t i = 0; i <= steps; ++i) {
      double p = static_cast<double>(i) / static_cast<double>(steps);
      consider({1.0 - p, p});
    }
  } else {
    for (std::size_t i = 0; i <= steps; ++i)
      for (std::size_t j = 0; i + j <= steps; ++j) {
        double p0 = static_cast<double>(i) / static_cast<double>(steps);
        double p1 = static_cast<double>(j) / static_cast<double>(steps);
        consider({p0, p1, 1.0 - p0 - p1});
      }
  }
  if (best < 0.0) throw std::invalid_argument("oracle_max_entropy_grid: infeasible cap");
  return best;
}

namespace detail {

// Markov joint q(x,x',y) from the one-parameter binary coupling
// (t, P0-t, P0-t, 1-2*P0+t) pushed through V'(y|x').
inline std::vector<double> oracle_markov_joint(double t, const Pmf& p, const Dmc& v) {
  std::size_t ys = v.out_size();
  std::array<double, 4> c{t, p[0] - t, p[0] - t, 1.0 - 2.0 * p[0] + t};
  for (double& e : c) e = std::max(e, 0.0);
  std::vector<double> q(4 * ys);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t xp = 0; xp < 2; ++xp)
      for (std::size_t y = 0; y < ys; ++y) q[(x * 2 + xp) * ys + y] = c[x * 2 + xp] * v(y, xp);
  return q;
}

// Worst-cell deviation of the assembled joint's XY law from P x V.
inline double oracle_channel_residual(std::span<const double> q, const Pmf& p, const Dmc& v) {
  std::size_t ys = v.out_size();
  double worst = 0.0;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < ys; ++y) {
      double got = q[(x * 2 + 0) * ys + y] + q[(x * 2 + 1) * ys + y];
      worst = std::max(worst, std::abs(got - p[x] * v(y, x)));
    }
  return worst;
}

inline double oracle_objective(std::span<const double> q, std::size_t a, std::size_t ys) {
  std::vector<double> mxp(a, 0.0), mxy(a * ys, 0.0);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t xp = 0; xp < a; ++xp)
      for (std::size_t y = 0; y < ys; ++y) {
        double v = q[(x * a + xp) * ys + y];
        mxp[xp] += v;
        mxy[x * ys + y] += v;
      }
  return std::max(neg_sum_xlog2x(mxp) + neg_sum_xlog2x(mxy) - neg_sum_xlog2x(q), 0.0);
}

}  // namespace detail

// Independent recomputation of binary delta=0 min-confusability: scan the
// coupling parameter, locate the channel-consistent set by residual
// bisection (the residual is convex piecewise-linear in t), then minimize
// the mutual information over that set.
inline double oracle_binary_confusability(const Pmf& p, const Dmc& v) {
  if (p.size() != 2 || v.in_size() != 2)
    throw std::invalid_argument("oracle_binary_confusability: binary instances only");
  if (entropy(p) == 0.0) return 0.0;
  double lo = std::max(0.0, 2.0 * p[0] - 1.0), hi = p[0];
  auto res = [&](double t) {
    auto q = detail::oracle_markov_joint(t, p, v);
    return detail::oracle_channel_residual(q, p, v);
  };
  // coarse scan, then ternary descent on the convex residual
  double t_best = lo, r_best = res(lo);
  for (int i = 0; i <= 2000; ++i) {
    double t = lo + (hi - lo) * static_cast<double>(i) / 2000.0;
    double r = res(t);
    if (r < r_best) {
      r_best = r;
      t_best = t;
    }
  }
  double a_pt = std::max(lo, t_best - (hi - lo) / 1000.0);
  double b_pt = std::min(hi, t_best + (hi - lo) / 1000.0);
  for (int it = 0; it < 200 && b_pt - a_pt > 1e-16; ++it) {
    double m1 = a_pt + (b_pt - a_pt) / 3.0, m2 = b_pt - (b_pt - a_pt) / 3.0;
    if (res(m1) < res(m2))
      b_pt = m2;
    else
      a_pt = m1;
  }
  double t_min = 0.5 * (a_pt + b_pt);
  double r_min = res(t_min);
  if (r_min > 1e-7)
    throw std::runtime_error("oracle_binary_confusability: no channel-consistent coupling found");

  // sublevel set {res <= r_min + 1e-9} is an interval; find its endpoints
  double tol = r_min + 1e-9;
  double left = t_min, right = t_min;
  {
    double a2 = lo, b2 = t_min;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (a2 + b2);
      if (res(mid) <= tol)
        b2 = mid;
      else
        a2 = mid;
    }
    left = b2;
    a2 = t_min;
    b2 = hi;
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (a2 + b2);
      if (res(mid) <= tol)
        a2 = mid;
      else
        b2 = mid;
    }
    right = a2;
  }
  auto obj = [&](double t) {
    auto q = detail::oracle_markov_joint(t, p, v);
    return detail::oracle_objective(q, 2, v.out_size());
  };
  double a3 = left, b3 = right;
  for (int it = 0; it < 200 && b3 - a3 > 1e-15; ++it) {
    double m1 = a3 + (b3 - a3) / 3.0, m2 = b3 - (b3 - a3) / 3.0;
    if (obj(m1) > obj(m2))
      a3 = m1;
    else
      b3 = m2;
  }
  return obj(0.5 * (a3 + b3));
}

// Penalized random search over full joints p_{XX'SY}; used to confirm that
// attaching S independently loses nothing. Returns the best value found
// with its constraint residual.
struct FullJointSearchResult {
  double value;
  double residual;
};

inline FullJointSearchResult oracle_full_joint_search(const ConfusabilityProblem& prob,
                                                      std::uint64_t seed,
                                                      std::size_t proposals_per_round = 600) {
  std::size_t a = prob.x_size(), s_n = prob.s_size(), ys = prob.y_size();
  std::size_t dim = a * a * s_n * ys;
  Dmc v = prob.averaged(prob.p_s);

  auto idx = [&](std::size_t x, std::size_t xp, std::size_t s, std::size_t y) {
    return ((x * a + xp) * s_n + s) * ys + y;
  };
  auto residual = [&](const std::vector<double>& q) {
    std::vector<double> mx(a, 0.0), mxp(a, 0.0), ms(s_n, 0.0);
    std::vector<double> mxy(a * ys, 0.0), mxpy(a * ys, 0.0);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t xp = 0; xp < a; ++xp)
        for (std::size_t s = 0; s < s_n; ++s)
          for (std::size_t y = 0; y < ys; ++y) {
            double val = q[idx(x, xp, s, y)];
            mx[x] += val;
            mxp[xp] += val;
            ms[s] += val;
            mxy[x * ys + y] += val;
            mxpy[xp * ys + y] += val;
          }
    double r = 0.0;
    for (std::size_t x = 0; x < a; ++x) r += std::abs(mx[x] - prob.p_x[x]) + std::abs(mxp[x] - prob.p_x[x]);
    for (std::size_t s = 0; s < s_n; ++s) r += std::abs(ms[s] - prob.p_s[s]);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t y = 0; y < ys; ++y) {
        r += std::abs(mxy[x * ys + y] - prob.p_x[x] * v(y, x));
        r += std::abs(mxpy[x * ys + y] - prob.p_x[x] * v(y, x));
      }
    // relaxation constraint I(X;Y|X'S) <= delta
    std::vector<double> mxxs(a * a * s_n, 0.0), mxsy(a * s_n * ys, 0.0), mxs(a * s_n, 0.0);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t xp = 0; xp < a; ++xp)
        for (std::size_t s = 0; s < s_n; ++s)
          for (std::size_t y = 0; y < ys; ++y) {
            double val = q[idx(x, xp, s, y)];
            mxxs[(x * a + xp) * s_n + s] += val;
            mxsy[(xp * s_n + s) * ys + y] += val;
            mxs[xp * s_n + s] += val;
          }
    double i_rel = neg_sum_xlog2x(mxxs) + neg_sum_xlog2x(mxsy) - neg_sum_xlog2x(mxs) -
                   neg_sum_xlog2x(q);
    r += std::max(i_rel - prob.delta, 0.0);
    return r;
  };
  auto objective = [&](const std::vector<double>& q) {
    // I(X'; XSY) = H(X') + H(XSY) - H(XX'SY)
    std::vector<double> mxp(a, 0.0), mxsy(a * s_n * ys, 0.0);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t xp = 0; xp < a; ++xp)
        for (std::size_t s = 0; s < s_n; ++s)
          for (std::size_t y = 0; y < ys; ++y) {
            double val = q[idx(x, xp, s, y)];
            mxp[xp] += val;
            mxsy[(x * s_n + s) * ys + y] += val;
          }
    return std::max(neg_sum_xlog2x(mxp) + neg_sum_xlog2x(mxsy) - neg_sum_xlog2x(q), 0.0);
  };
  Rng rng(seed);
  // start from the production argmin plus random corners
  std::vector<std::vector<double>> starts;
  {
    ConfusabilityResult sol = min_confusability(prob);
    starts.push_back(sol.argmin.probs());
  }
  for (int s = 0; s < 4; ++s) {
    std::vector<double> q(dim);
    double total = 0.0;
    for (double& e : q) total += (e = -std::log(std::max(rng.uniform(), 1e-12)));
    for (double& e : q) e /= total;
    starts.push_back(std::move(q));
  }

  // A fixed penalty weight lets the walk trade constraint violation for
  // objective, so the weight is annealed upward and only points that end
  // up (near-)feasible are eligible as the answer. The production argmin
  // seeds the incumbent, hence the result can only improve on it through
  // a genuinely feasible joint.
  constexpr double kFeasTol = 1e-4;
  std::vector<double> best_q = starts[0];
  double best_obj = objective(best_q);
  double best_res = residual(best_q);
  auto consider = [&](const std::vector<double>& q) {
    double r = residual(q);
    double o = objective(q);
    bool incumbent_feasible = best_res <= kFeasTol;
    bool candidate_feasible = r <= kFeasTol;
    bool better = candidate_feasible ? (!incumbent_feasible || o < best_obj)
                                     : (!incumbent_feasible && r < best_res);
    if (better) {
      best_q = q;
      best_obj = o;
      best_res = r;
    }
  };
  for (const auto& start : starts) {
    std::vector<double> cur = start;
    for (double lambda : {60.0, 600.0, 6e3, 6e4, 6e5}) {
      double f = objective(cur) + lambda * residual(cur);
      for (double radius : {0.2, 0.05, 0.01, 2e-3, 4e-4, 8e-5}) {
        for (std::size_t it = 0; it < proposals_per_round; ++it) {
          std::vector<double> cand = cur;
          for (double& e : cand) e = std::max(e + radius * (rng.uniform() * 2.0 - 1.0), 0.0);
          double mass = 0.0;
          for (double e : cand) mass += e;
          if (mass <= 0.0) continue;
          for (double& e : cand) e /= mass;
          double fc = objective(cand) + lambda * residual(cand);
          if (fc < f) {
            f = fc;
            cur = std::move(cand);
          }
        }
      }
      consider(cur);
    }
  }
  return {best_obj, best_res};
}

// Exact partition identity: the type classes tile the sequence space.
inline bool oracle_type_partition(std::size_t n, std::size_t a) {
  BigInt total = 0;
  for_each_type(n, a, [&](const std::vector<std::size_t>& c) {
    total += type_class_size(std::span<const std::size_t>(c));
  });
  BigInt expect = 1;
  for (std::size_t i = 0; i < n; ++i) expect *= static_cast<unsigned>(a);
  return total == expect;
}

// Random binary confusability instance with a state alphabet: channel rows
// W(y | x, s), transmit state type, and codeword type. When min_gap > 0 the
// averaged rows are guaranteed at least that far apart in total variation.
struct RandomConfusabilityInstance {
  Pmf p_x;
  Pmf p_s;
  Dmc w;  // rows x * |S| + s
};

inline RandomConfusabilityInstance random_binary_instance(Rng& rng, std::size_t s_n, std::size_t ys,
                                                          double min_gap) {
  for (;;) {
    std::vector<double> rows(2 * s_n * ys);
    for (std::size_t r = 0; r < 2 * s_n; ++r) {
      double total = 0.0;
      for (std::size_t y = 0; y < ys; ++y)
        total += (rows[r * ys + y] = -std::log(std::max(rng.uniform(), 1e-12)));
      for (std::size_t y = 0; y < ys; ++y) rows[r * ys + y] /= total;
    }
    std::vector<double> ps(s_n);
    double total = 0.0;
    for (double& e : ps) total += (e = -std::log(std::max(rng.uniform(), 1e-12)));
    for (double& e : ps) e /= total;
    double p0 = 0.05 + 0.9 * rng.uniform();
    RandomConfusabilityInstance inst{Pmf({1.0 - p0, p0}), Pmf(std::move(ps)),
                                     Dmc(2 * s_n, ys, std::move(rows))};
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, 0.0);
    Dmc v = prob.averaged(inst.p_s);
    if (total_variation(v.row(0), v.row(1)) >= min_gap) return inst;
  }
}

}  // namespace dimac
