#pragma once

// Minimum mutual information I(X'; X S Y) over the confusability polytope:
// joints p_{XX'SY} whose marginals match the codeword type P on both X and
// X', whose single-letter channels to Y match the state-averaged channel on
// both sides, and which either form a Markov chain X - X' - Y (delta = 0)
// or satisfy the relaxation I(X; Y | X' S) <= delta.
//
// S enters only through its fixed marginal and the averaged channel, so the
// search runs over p_{XX'Y} with S attached independently; oracles.hpp
// cross-checks that reduction against a brute-force optimizer on the full
// four-variable joint.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dimac/channel.hpp"
#include "dimac/prob.hpp"
#include "dimac/rng.hpp"

namespace dimac {

enum class ConfusabilityMethod { kAuto, kExactBinary, kGridSearch, kProjectedGradient };

// W is the partial channel W(y | x, s) with rows indexed x * |S| + s; p_s is
// the transmit-side state type. state_candidates, if non-empty, extends the
// set of admissible competitor state types beyond {p_s}.
struct ConfusabilityProblem {
  Pmf p_x;
  Pmf p_s;
  Dmc w;
  double delta = 0.0;
  std::vector<Pmf> state_candidates;

  ConfusabilityProblem(Pmf px, Pmf ps, Dmc channel, double d)
      : p_x(std::move(px)), p_s(std::move(ps)), w(std::move(channel)), delta(d) {
    if (delta < 0.0) throw std::invalid_argument("ConfusabilityProblem: delta must be >= 0");
    if (w.in_size() % p_s.size() != 0)
      throw std::invalid_argument("ConfusabilityProblem: channel rows not divisible by |S|");
    if (w.in_size() / p_s.size() != p_x.size())
      throw std::invalid_argument("ConfusabilityProblem: |X| mismatch between p_x and channel");
  }

  std::size_t x_size() const { return p_x.size(); }
  std::size_t s_size() const { return p_s.size(); }
  std::size_t y_size() const { return w.out_size(); }

  // V(y|x) = sum_s ps(s) W(y | x, s).
  Dmc averaged(const Pmf& ps) const {
    std::size_t a = x_size(), s_n = s_size(), ys = y_size();
    if (ps.size() != s_n) throw std::invalid_argument("ConfusabilityProblem: state type size mismatch");
    std::vector<double> rows(a * ys, 0.0);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t s = 0; s < s_n; ++s) {
        if (ps[s] == 0.0) continue;
        auto r = w.row(x * s_n + s);
        for (std::size_t y = 0; y < ys; ++y) rows[x * ys + y] += ps[s] * r[y];
      }
    return Dmc(a, ys, std::move(rows));
  }
};

struct ConfusabilityResult {
  double value = 0.0;
  JointPmf argmin;
  bool converged = true;
  double feasibility_gap = 0.0;
  std::size_t chosen_candidate = 0;  // 0 = p_s itself, i >= 1 = state_candidates[i-1]
};

namespace detail::conf {

// ---- helpers on the reduced joint q(x, x', y), flat index (x*A + x')*Y + y

inline double joint_entropy(std::span<const double> q) { return neg_sum_xlog2x(q); }

inline double objective_value(std::span<const double> q, std::size_t a, std::size_t ys) {
  // I(X'; XY) = H(X') + H(XY) - H(XX'Y)
  std::vector<double> mx(a, 0.0), mxy(a * ys, 0.0);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t xp = 0; xp < a; ++xp)
      for (std::size_t y = 0; y < ys; ++y) {
        double v = q[(x * a + xp) * ys + y];
        mx[xp] += v;
        mxy[x * ys + y] += v;
      }
  double val = neg_sum_xlog2x(mx) + neg_sum_xlog2x(mxy) - joint_entropy(q);
  return std::max(val, 0.0);
}

inline double i_xy_given_xprime(std::span<const double> q, std::size_t a, std::size_t ys) {
  // I(X; Y | X') = H(XX') + H(X'Y) - H(X') - H(XX'Y)
  std::vector<double> mxx(a * a, 0.0), mxpy(a * ys, 0.0), mxp(a, 0.0);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t xp = 0; xp < a; ++xp)
      for (std::size_t y = 0; y < ys; ++y) {
        double v = q[(x * a + xp) * ys + y];
        mxx[x * a + xp] += v;
        mxpy[xp * ys + y] += v;
        mxp[xp] += v;
      }
  double val = neg_sum_xlog2x(mxx) + neg_sum_xlog2x(mxpy) - neg_sum_xlog2x(mxp) - joint_entropy(q);
  return std::max(val, 0.0);
}

inline std::vector<double> markov_assemble(std::span<const double> coupling, const Dmc& vprime) {
  std::size_t a = vprime.in_size(), ys = vprime.out_size();
  std::vector<double> q(a * a * ys, 0.0);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t xp = 0; xp < a; ++xp) {
      double c = coupling[x * a + xp];
      if (c == 0.0) continue;
      auto r = vprime.row(xp);
      for (std::size_t y = 0; y < ys; ++y) q[(x * a + xp) * ys + y] = c * r[y];
    }
  return q;
}

// Margin targets per output letter: row(x) = P(x)V(y|x), col(x') = P(x')V'(y|x').
struct SliceMargins {
  std::vector<double> row;  // a * ys
  std::vector<double> col;  // a * ys
};

inline SliceMargins slice_margins(const Pmf& p, const Dmc& v, const Dmc& vp) {
  std::size_t a = p.size(), ys = v.out_size();
  SliceMargins m;
  m.row.resize(a * ys);
  m.col.resize(a * ys);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t y = 0; y < ys; ++y) {
      m.row[x * ys + y] = p[x] * v(y, x);
      m.col[x * ys + y] = p[x] * vp(y, x);
    }
  return m;
}

// Output-law consistency: the competitor's state type must reproduce the
// same Y marginal, else the candidate is infeasible.
inline bool output_laws_match(const Pmf& p, const Dmc& v, const Dmc& vp, double tol = 1e-7) {
  Pmf a = push_through(p, v);
  Pmf b = push_through(p, vp);
  return total_variation(std::span<const double>(a.probs()), std::span<const double>(b.probs())) <= tol;
}

// Per-slice independent couplings q(x,x'|y) = p(x|y) p(x'|y): the entropy
// maximizer when only the margin constraints bind; optimal whenever its
// I(X;Y|X') already meets delta.
inline std::vector<double> product_slice_assemble(const SliceMargins& m, std::size_t a,
                                                  std::size_t ys) {
  std::vector<double> q(a * a * ys, 0.0);
  for (std::size_t y = 0; y < ys; ++y) {
    double mass = 0.0;
    for (std::size_t x = 0; x < a; ++x) mass += m.row[x * ys + y];
    if (mass <= 0.0) continue;
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t xp = 0; xp < a; ++xp)
        q[(x * a + xp) * ys + y] = m.row[x * ys + y] * m.col[xp * ys + y] / mass;
  }
  return q;
}

struct SolveOutcome {
  std::vector<double> q;  // reduced joint, (x*A + x')*Y + y
  double entropy_q = 0.0;
  bool feasible = false;
  bool converged = true;
  double gap = 0.0;
};

// ---- binary, delta = 0: one free coupling parameter, solved exactly

inline std::optional<SolveOutcome> solve_binary_delta0(const Pmf& p, const Dmc& v, const Dmc& vp) {
  constexpr double kTol = 1e-9;
  double p0 = p[0];
  double lo = std::max(0.0, 2.0 * p0 - 1.0), hi = p0;
  std::size_t ys = v.out_size();
  // Row-mixture equations, linear in t = coupling(0,0):
  //   x=0:  t * (V'(y|0) - V'(y|1)) = P0 * (V(y|0) - V'(y|1))
  //   x=1:  -t * (V'(y|0) - V'(y|1)) = P1 * (V(y|1) - V'(y|1)) - P0 * (V'(y|0) - V'(y|1))
  for (std::size_t y = 0; y < ys; ++y) {
    double d = vp(y, 0) - vp(y, 1);
    std::array<std::array<double, 2>, 2> eqs = {{{d, p0 * (v(y, 0) - vp(y, 1))},
                                                 {-d, p[1] * (v(y, 1) - vp(y, 1)) - p0 * d}}};
    for (auto [a_coef, b_coef] : eqs) {
      if (std::abs(a_coef) <= 1e-12) {
        if (std::abs(b_coef) > kTol) return std::nullopt;
        continue;
      }
      double t = b_coef / a_coef, slack = kTol / std::abs(a_coef);
      lo = std::max(lo, t - slack);
      hi = std::min(hi, t + slack);
    }
  }
  if (hi < lo - 1e-12) return std::nullopt;
  hi = std::max(hi, lo);

  auto coupling_at = [&](double t) {
    return std::array<double, 4>{t, p0 - t, p0 - t, 1.0 - 2.0 * p0 + t};
  };
  auto h_at = [&](double t) {
    auto c = coupling_at(t);
    for (double& e : c) e = std::max(e, 0.0);
    return neg_sum_xlog2x(c);
  };
  double a_pt = lo, b_pt = hi;
  for (int it = 0; it < 200 && b_pt - a_pt > 1e-15; ++it) {
    double m1 = a_pt + (b_pt - a_pt) / 3.0, m2 = b_pt - (b_pt - a_pt) / 3.0;
    if (h_at(m1) < h_at(m2))
      a_pt = m1;
    else
      b_pt = m2;
  }
  double t_star = std::clamp(0.5 * (a_pt + b_pt), std::max(0.0, 2.0 * p0 - 1.0), p0);
  auto c = coupling_at(t_star);
  for (double& e : c) e = std::max(e, 0.0);
  SolveOutcome out;
  out.q = markov_assemble(std::span<const double>(c.data(), 4), vp);
  out.entropy_q = joint_entropy(out.q);
  out.feasible = true;
  return out;
}

// ---- binary, delta > 0, small output alphabet: grid over the per-slice
// transportation parameters u_y = q(0,0,y)

inline std::optional<SolveOutcome> solve_binary_grid(const Pmf& p, const Dmc& v, const Dmc& vp,
                                                     double delta) {
  std::size_t ys = v.out_size();
  if (ys > 3) return std::nullopt;
  SliceMargins m = slice_margins(p, v, vp);
  std::vector<double> lo(ys), hi(ys);
  for (std::size_t y = 0; y < ys; ++y) {
    double a0 = m.row[y], b0 = m.col[y];
    double s_y = m.row[y] + m.row[ys + y];
    lo[y] = std::max(0.0, a0 + b0 - s_y);
    hi[y] = std::min(a0, b0);
    if (hi[y] < lo[y]) lo[y] = hi[y] = std::max(0.5 * (lo[y] + hi[y]), 0.0);
  }
  auto assemble = [&](std::span<const double> u) {
    std::vector<double> q(4 * ys, 0.0);
    for (std::size_t y = 0; y < ys; ++y) {
      double a0 = m.row[y], a1 = m.row[ys + y], b0 = m.col[y];
      q[(0 * 2 + 0) * ys + y] = u[y];
      q[(0 * 2 + 1) * ys + y] = std::max(a0 - u[y], 0.0);
      q[(1 * 2 + 0) * ys + y] = std::max(b0 - u[y], 0.0);
      q[(1 * 2 + 1) * ys + y] = std::max(a1 - (b0 - u[y]), 0.0);
    }
    return q;
  };
  auto feasible_h = [&](std::span<const double> u, double& h) -> bool {
    auto q = assemble(u);
    if (i_xy_given_xprime(q, 2, ys) > delta + 1e-9) return false;
    h = joint_entropy(q);
    return true;
  };

  std::vector<double> best_u;
  double best_h = -1.0;
  auto consider = [&](std::span<const double> u) {
    double h;
    std::vector<double> cu(u.begin(), u.end());
    for (std::size_t y = 0; y < ys; ++y) cu[y] = std::clamp(cu[y], lo[y], hi[y]);
    if (feasible_h(cu, h) && h > best_h) {
      best_h = h;
      best_u = cu;
    }
  };

  // Markov point (identity-forced or solved) and per-slice products as seeds.
  if (auto d0 = solve_binary_delta0(p, v, vp)) {
    std::vector<double> u(ys);
    for (std::size_t y = 0; y < ys; ++y) u[y] = d0->q[y];
    consider(u);
  }
  {
    auto prod = product_slice_assemble(m, 2, ys);
    std::vector<double> u(ys);
    for (std::size_t y = 0; y < ys; ++y) u[y] = prod[y];
    consider(u);
  }

  std::size_t steps = ys == 3 ? 41 : 161;
  std::vector<double> span_lo = lo, span_hi = hi;
  for (int round = 0; round < 5; ++round) {
    std::vector<std::size_t> idx(ys, 0);
    for (;;) {
      std::vector<double> u(ys);
      for (std::size_t y = 0; y < ys; ++y) {
        double f = steps == 1 ? 0.0 : static_cast<double>(idx[y]) / static_cast<double>(steps - 1);
        u[y] = span_lo[y] + f * (span_hi[y] - span_lo[y]);
      }
      consider(u);
      std::size_t d = 0;
      for (; d < ys; ++d) {
        if (++idx[d] < steps) break;
        idx[d] = 0;
      }
      if (d == ys) break;
    }
    if (best_u.empty()) break;
    for (std::size_t y = 0; y < ys; ++y) {
      double width = (span_hi[y] - span_lo[y]) / static_cast<double>(steps - 1) * 2.0;
      span_lo[y] = std::max(lo[y], best_u[y] - width);
      span_hi[y] = std::min(hi[y], best_u[y] + width);
    }
    steps = 17;
  }

  if (best_u.empty()) return std::nullopt;
  SolveOutcome out;
  out.q = assemble(best_u);
  out.entropy_q = best_h;
  out.feasible = true;
  return out;
}

// ---- general alphabets: projected gradient ascent on the (concave)
// entropy objective over an affine section of the simplex, nonnegativity
// handled by Dykstra alternation, delta > 0 via quadratic penalty

struct AffineProjector {
  Eigen::MatrixXd m;
  Eigen::VectorXd d;
  Eigen::MatrixXd pinv;

  AffineProjector(Eigen::MatrixXd mat, Eigen::VectorXd rhs) : m(std::move(mat)), d(std::move(rhs)) {
    pinv = m.completeOrthogonalDecomposition().pseudoInverse();
  }

  Eigen::VectorXd onto_affine(const Eigen::VectorXd& v) const { return v - pinv * (m * v - d); }

  // Projection onto {m x = d, x >= 0} by Dykstra's alternating scheme.
  Eigen::VectorXd onto_feasible(Eigen::VectorXd v, int iters = 300) const {
    Eigen::VectorXd correction = Eigen::VectorXd::Zero(v.size());
    Eigen::VectorXd affine = v;
    for (int it = 0; it < iters; ++it) {
      affine = onto_affine(v);
      Eigen::VectorXd shifted = affine + correction;
      Eigen::VectorXd clamped = shifted.cwiseMax(0.0);
      correction = shifted - clamped;
      if ((affine - clamped).lpNorm<Eigen::Infinity>() < 1e-13) return clamped;
      v = clamped;
    }
    return affine.cwiseMax(0.0);
  }

  double residual(const Eigen::VectorXd& v) const { return (m * v - d).lpNorm<Eigen::Infinity>(); }
};

template <typename Obj, typename Grad>
Eigen::VectorXd ascend(const AffineProjector& proj, Eigen::VectorXd v, Obj&& obj, Grad&& grad) {
  v = proj.onto_feasible(v);
  double f = obj(v);
  double step = 0.25;
  int small_gains = 0;
  for (int it = 0; it < 600; ++it) {
    Eigen::VectorXd g = grad(v);
    Eigen::VectorXd cand = proj.onto_feasible(v + step * g);
    double fc = obj(cand);
    if (fc > f) {
      small_gains = (fc - f < 1e-7) ? small_gains + 1 : 0;
      v = std::move(cand);
      f = fc;
      step = std::min(step * 1.3, 1.0);
      if (small_gains >= 3) break;
    } else {
      step *= 0.5;
      if (step < 1e-11) break;
    }
  }
  return v;
}

inline double entropy_grad_entry(double q) {
  // d/dq of -q log2 q, capped where q -> 0.
  constexpr double kInvLn2 = 1.4426950408889634;
  if (q < 1e-12) return 40.0;
  return -std::log2(q) - kInvLn2;
}

inline std::optional<SolveOutcome> solve_general_delta0(const Pmf& p, const Dmc& v, const Dmc& vp,
                                                        std::size_t starts, std::uint64_t seed) {
  std::size_t a = p.size(), ys = v.out_size();
  std::size_t nvar = a * a;
  // Equalities: both marginals of the coupling equal P, and the row-mixture
  // condition sum_x' c(x,x') V'(y|x') = P(x) V(y|x).
  std::size_t neq = 2 * a + a * ys;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<long>(neq), static_cast<long>(nvar));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<long>(neq));
  for (std::size_t x = 0; x < a; ++x) {
    for (std::size_t xp = 0; xp < a; ++xp) m(static_cast<long>(x), static_cast<long>(x * a + xp)) = 1.0;
    d(static_cast<long>(x)) = p[x];
  }
  for (std::size_t xp = 0; xp < a; ++xp) {
    for (std::size_t x = 0; x < a; ++x)
      m(static_cast<long>(a + xp), static_cast<long>(x * a + xp)) = 1.0;
    d(static_cast<long>(a + xp)) = p[xp];
  }
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t y = 0; y < ys; ++y) {
      long r = static_cast<long>(2 * a + x * ys + y);
      for (std::size_t xp = 0; xp < a; ++xp)
        m(r, static_cast<long>(x * a + xp)) = vp(y, xp);
      d(r) = p[x] * v(y, x);
    }
  AffineProjector proj(std::move(m), std::move(d));

  auto obj = [&](const Eigen::VectorXd& c) { return neg_sum_xlog2x(std::span<const double>(c.data(), nvar)); };
  auto grad = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd g(c.size());
    for (long i = 0; i < c.size(); ++i) g(i) = entropy_grad_entry(c(i));
    return g;
  };

  Rng rng(seed);
  Eigen::VectorXd best;
  double best_h = -1.0;
  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::VectorXd start(static_cast<long>(nvar));
    if (s == 0) {
      start.setZero();
      for (std::size_t x = 0; x < a; ++x) start(static_cast<long>(x * a + x)) = p[x];
    } else if (s == 1) {
      for (std::size_t x = 0; x < a; ++x)
        for (std::size_t xp = 0; xp < a; ++xp) start(static_cast<long>(x * a + xp)) = p[x] * p[xp];
    } else {
      for (long i = 0; i < start.size(); ++i) start(i) = -std::log(std::max(rng.uniform(), 1e-12));
      start /= start.sum();
    }
    Eigen::VectorXd sol = ascend(proj, std::move(start), obj, grad);
    double h = obj(sol);
    if (h > best_h) {
      best_h = h;
      best = sol;
    }
  }
  if (best.size() == 0) return std::nullopt;
  double gap = proj.residual(best);
  if (gap > 1e-5) return std::nullopt;

  std::vector<double> c(nvar);
  for (std::size_t i = 0; i < nvar; ++i) c[i] = std::max(best(static_cast<long>(i)), 0.0);
  SolveOutcome out;
  out.q = markov_assemble(c, vp);
  out.entropy_q = joint_entropy(out.q);
  out.feasible = true;
  out.converged = gap <= 1e-6;
  out.gap = gap;
  return out;
}

inline std::optional<SolveOutcome> solve_general_delta_pos(const Pmf& p, const Dmc& v, const Dmc& vp,
                                                           double delta, std::size_t starts,
                                                           std::uint64_t seed) {
  std::size_t a = p.size(), ys = v.out_size();
  std::size_t nvar = a * a * ys;
  SliceMargins margins = slice_margins(p, v, vp);
  // Per output letter: row sums P(x)V(y|x) and column sums P(x')V'(y|x').
  std::size_t neq = 2 * a * ys;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<long>(neq), static_cast<long>(nvar));
  Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<long>(neq));
  for (std::size_t y = 0; y < ys; ++y) {
    for (std::size_t x = 0; x < a; ++x) {
      long r = static_cast<long>(y * a + x);
      for (std::size_t xp = 0; xp < a; ++xp)
        m(r, static_cast<long>((x * a + xp) * ys + y)) = 1.0;
      d(r) = margins.row[x * ys + y];
    }
    for (std::size_t xp = 0; xp < a; ++xp) {
      long r = static_cast<long>(a * ys + y * a + xp);
      for (std::size_t x = 0; x < a; ++x)
        m(r, static_cast<long>((x * a + xp) * ys + y)) = 1.0;
      d(r) = margins.col[xp * ys + y];
    }
  }
  AffineProjector proj(std::move(m), std::move(d));

  double rho = 200.0;
  auto iv = [&](const Eigen::VectorXd& q) {
    return i_xy_given_xprime(std::span<const double>(q.data(), nvar), a, ys);
  };
  auto obj = [&](const Eigen::VectorXd& q) {
    double excess = std::max(iv(q) - delta, 0.0);
    return neg_sum_xlog2x(std::span<const double>(q.data(), nvar)) - rho * excess * excess;
  };
  auto grad = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd g(q.size());
    std::vector<double> mxx(a * a, 0.0), mxpy(a * ys, 0.0), mxp(a, 0.0);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t xp = 0; xp < a; ++xp)
        for (std::size_t y = 0; y < ys; ++y) {
          double val = std::max(q(static_cast<long>((x * a + xp) * ys + y)), 0.0);
          mxx[x * a + xp] += val;
          mxpy[xp * ys + y] += val;
          mxp[xp] += val;
        }
    double excess = std::max(iv(q) - delta, 0.0);
    for (std::size_t x = 0; x < a; ++x)
      for (std::size_t xp = 0; xp < a; ++xp)
        for (std::size_t y = 0; y < ys; ++y) {
          long i = static_cast<long>((x * a + xp) * ys + y);
          double qi = std::max(q(i), 1e-12);
          g(i) = entropy_grad_entry(q(i));
          if (excess > 0.0) {
            // d I(X;Y|X') / d q = log2( q * m(x') / (r(x,x') w(x',y)) )
            double di = std::log2(qi * std::max(mxp[xp], 1e-12) /
                                  (std::max(mxx[x * a + xp], 1e-12) * std::max(mxpy[xp * ys + y], 1e-12)));
            g(i) -= 2.0 * rho * excess * di;
          }
        }
    return g;
  };

  Rng rng(seed ^ 0xa5a5a5a5ull);
  Eigen::VectorXd best;
  double best_h = -1.0;
  bool best_converged = false;
  double best_gap = 1.0;
  std::optional<SolveOutcome> markov =
      (a == 2) ? solve_binary_delta0(p, v, vp)
               : solve_general_delta0(p, v, vp, std::max<std::size_t>(starts / 4, 4), seed);
  auto prod = product_slice_assemble(margins, a, ys);

  for (std::size_t s = 0; s < starts; ++s) {
    Eigen::VectorXd start(static_cast<long>(nvar));
    if (s == 0 && markov) {
      for (std::size_t i = 0; i < nvar; ++i) start(static_cast<long>(i)) = markov->q[i];
    } else if (s == 1) {
      for (std::size_t i = 0; i < nvar; ++i) start(static_cast<long>(i)) = prod[i];
    } else {
      for (long i = 0; i < start.size(); ++i) start(i) = -std::log(std::max(rng.uniform(), 1e-12));
      start /= start.sum();
    }
    rho = 200.0;
    Eigen::VectorXd sol = ascend(proj, std::move(start), obj, grad);
    for (int esc = 0; esc < 3 && iv(sol) > delta + 1e-6; ++esc) {
      rho *= 10.0;
      sol = ascend(proj, std::move(sol), obj, grad);
    }
    double slack = iv(sol) - delta;
    if (slack > 1e-5) continue;
    double h = neg_sum_xlog2x(std::span<const double>(sol.data(), nvar));
    if (h > best_h) {
      best_h = h;
      best = sol;
      best_gap = std::max(proj.residual(sol), std::max(slack, 0.0));
      best_converged = best_gap <= 1e-6;
    }
  }
  if (best.size() == 0) {
    if (!markov) return std::nullopt;  // Markov point always meets any delta >= 0
    SolveOutcome out = *markov;
    out.converged = true;
    return out;
  }
  SolveOutcome out;
  out.q.resize(nvar);
  for (std::size_t i = 0; i < nvar; ++i) out.q[i] = std::max(best(static_cast<long>(i)), 0.0);
  out.entropy_q = best_h;
  out.feasible = true;
  out.converged = best_converged;
  out.gap = best_gap;
  return out;
}

inline std::optional<SolveOutcome> solve_candidate(const Pmf& p, const Dmc& v, const Dmc& vp,
                                                   double delta, ConfusabilityMethod method,
                                                   std::size_t starts, std::uint64_t seed) {
  if (!output_laws_match(p, v, vp)) return std::nullopt;
  std::size_t a = p.size(), ys = v.out_size();

  if (method == ConfusabilityMethod::kExactBinary && (a != 2 || delta != 0.0))
    throw std::invalid_argument("min_confusability: exact method needs binary X and delta=0");
  if (method == ConfusabilityMethod::kGridSearch && a != 2)
    throw std::invalid_argument("min_confusability: grid method needs binary X");

  if (delta > 0.0) {
    // The per-slice product maximizes entropy when only the margins bind;
    // if it already satisfies the relaxation it is globally optimal.
    SliceMargins m = slice_margins(p, v, vp);
    auto prod = product_slice_assemble(m, a, ys);
    if (i_xy_given_xprime(prod, a, ys) <= delta + 1e-9) {
      SolveOutcome out;
      out.q = std::move(prod);
      out.entropy_q = joint_entropy(out.q);
      out.feasible = true;
      return out;
    }
  }

  switch (method) {
    case ConfusabilityMethod::kExactBinary:
      return solve_binary_delta0(p, v, vp);
    case ConfusabilityMethod::kGridSearch:
      if (delta == 0.0) return solve_binary_delta0(p, v, vp);
      return solve_binary_grid(p, v, vp, delta);
    case ConfusabilityMethod::kProjectedGradient:
      return delta == 0.0 ? solve_general_delta0(p, v, vp, starts, seed)
                          : solve_general_delta_pos(p, v, vp, delta, starts, seed);
    case ConfusabilityMethod::kAuto:
      break;
  }
  if (delta == 0.0)
    return a == 2 ? solve_binary_delta0(p, v, vp) : solve_general_delta0(p, v, vp, starts, seed);
  if (a == 2 && ys <= 3) return solve_binary_grid(p, v, vp, delta);
  return solve_general_delta_pos(p, v, vp, delta, starts, seed);
}

}  // namespace detail::conf

// Fast scalar path used by region sweeps: binary X, delta = 0, competitor
// state type equal to the transmit type.
inline double binary_min_confusability_value(const Pmf& p, const Dmc& v) {
  if (p.size() != 2 || v.in_size() != 2)
    throw std::invalid_argument("binary_min_confusability_value: binary input required");
  double hp = entropy(p);
  if (hp == 0.0) return 0.0;
  auto sol = detail::conf::solve_binary_delta0(p, v, v);
  if (!sol) throw std::runtime_error("binary_min_confusability_value: infeasible instance");
  return detail::conf::objective_value(sol->q, 2, v.out_size());
}

inline ConfusabilityResult min_confusability(const ConfusabilityProblem& prob,
                                             ConfusabilityMethod method = ConfusabilityMethod::kAuto,
                                             std::size_t starts = 64, std::uint64_t seed = 0x5eedf00d) {
  std::size_t a = prob.x_size(), s_n = prob.s_size(), ys = prob.y_size();
  Dmc v = prob.averaged(prob.p_s);

  std::vector<Pmf> candidates{prob.p_s};
  candidates.insert(candidates.end(), prob.state_candidates.begin(), prob.state_candidates.end());

  std::optional<detail::conf::SolveOutcome> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::size_t best_candidate = 0;
  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    Dmc vp = prob.averaged(candidates[ci]);
    auto sol = detail::conf::solve_candidate(prob.p_x, v, vp, prob.delta, method, starts,
                                             seed + 0x9e37 * ci);
    if (!sol || !sol->feasible) continue;
    double value = detail::conf::objective_value(sol->q, a, ys);
    if (value < best_value) {
      best_value = value;
      best = std::move(sol);
      best_candidate = ci;
    }
  }
  if (!best) throw std::runtime_error("min_confusability: no feasible competitor state type");

  // Attach S independently and order axes (X, X', S, Y).
  std::vector<double> joint(a * a * s_n * ys, 0.0);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t xp = 0; xp < a; ++xp)
      for (std::size_t s = 0; s < s_n; ++s)
        for (std::size_t y = 0; y < ys; ++y)
          joint[((x * a + xp) * s_n + s) * ys + y] = best->q[(x * a + xp) * ys + y] * prob.p_s[s];

  JointPmf argmin({a, a, s_n, ys}, std::move(joint));
  double value = mutual_information(group_axes(argmin, {{1}, {0, 2, 3}}));
  ConfusabilityResult res{value, std::move(argmin), best->converged, best->gap, best_candidate};
  return res;
}

}  // namespace dimac
