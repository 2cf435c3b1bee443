#pragma once

// Rate-region computations: per-sender entropy maximization under average
// cost, the identification lower/upper regions, the Shannon transmission
// region (two senders), the finite-blocklength converse correction, and
// polygon export.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dimac/channel.hpp"
#include "dimac/confusability.hpp"
#include "dimac/prob.hpp"

namespace dimac {

struct MaxEntropyResult {
  double h_star;
  Pmf p_star;
};

// max H(p) over p with sum_x p(x) phi(x) <= cap. Lagrangian tilting
// p(x) ~ 2^{-lambda phi(x)}, bisecting lambda until the cost meets the cap.
inline MaxEntropyResult max_entropy_under_cost(std::size_t a, std::span<const double> phi,
                                               double cap) {
  if (a == 0 || phi.size() != a) throw std::invalid_argument("max_entropy_under_cost: bad alphabet");
  double min_phi = *std::min_element(phi.begin(), phi.end());
  if (cap < min_phi - 1e-12)
    throw std::invalid_argument("max_entropy_under_cost: cap below cheapest letter");

  auto tilt = [&](double lambda) {
    std::vector<double> p(a);
    double z = 0.0;
    for (std::size_t x = 0; x < a; ++x) {
      p[x] = std::exp2(-lambda * (phi[x] - min_phi));
      z += p[x];
    }
    for (double& v : p) v /= z;
    return Pmf(std::move(p));
  };
  auto mean_cost = [&](const Pmf& p) {
    double c = 0.0;
    for (std::size_t x = 0; x < a; ++x) c += p[x] * phi[x];
    return c;
  };

  Pmf uniform = Pmf::uniform(a);
  if (mean_cost(uniform) <= cap + 1e-12) return {entropy(uniform), uniform};

  double lambda_hi = 1.0;
  while (mean_cost(tilt(lambda_hi)) > cap) {
    lambda_hi *= 2.0;
    if (lambda_hi > 1e18) {
      // cap equals the minimum cost: mass concentrates on the cheapest letters
      std::vector<double> p(a, 0.0);
      std::size_t support = 0;
      for (std::size_t x = 0; x < a; ++x)
        if (phi[x] <= min_phi + 1e-12) ++support;
      for (std::size_t x = 0; x < a; ++x)
        if (phi[x] <= min_phi + 1e-12) p[x] = 1.0 / static_cast<double>(support);
      Pmf lim(std::move(p));
      return {entropy(lim), lim};
    }
  }
  double lambda_lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lambda_lo + lambda_hi);
    if (mean_cost(tilt(mid)) > cap)
      lambda_lo = mid;
    else
      lambda_hi = mid;
  }
  Pmf p = tilt(lambda_hi);
  return {entropy(p), p};
}

// A rate region: per-axis caps, optional linear sum constraints, and a
// boundary polygon (counter-clockwise, closed implicitly) for export.
struct RateRegion {
  std::vector<double> axis_bounds;
  std::vector<std::pair<std::vector<double>, double>> sum_bounds;
  std::vector<std::array<double, 2>> boundary;

  static RateRegion box(std::vector<double> bounds) {
    RateRegion r;
    r.axis_bounds = std::move(bounds);
    if (r.axis_bounds.size() == 2) {
      double b1 = r.axis_bounds[0], b2 = r.axis_bounds[1];
      r.boundary = {{0.0, 0.0}, {b1, 0.0}, {b1, b2}, {0.0, b2}};
    }
    return r;
  }

  // Union of axis-aligned boxes [0,b1] x [0,b2]: the Pareto staircase.
  static RateRegion from_boxes(std::vector<std::array<double, 2>> corners) {
    RateRegion r;
    r.axis_bounds = {0.0, 0.0};
    std::erase_if(corners, [](const auto& c) { return c[0] < 0.0 || c[1] < 0.0; });
    if (corners.empty()) return r;
    std::sort(corners.begin(), corners.end(), [](const auto& a, const auto& b) {
      return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1];
    });
    std::vector<std::array<double, 2>> pareto;
    double best2 = -1.0;
    for (const auto& c : corners) {
      if (c[1] > best2 + 1e-12) {
        pareto.push_back(c);
        best2 = c[1];
      }
    }
    r.axis_bounds[0] = pareto.front()[0];
    r.axis_bounds[1] = pareto.back()[1];
    r.boundary.push_back({0.0, 0.0});
    r.boundary.push_back({pareto.front()[0], 0.0});
    for (std::size_t i = 0; i < pareto.size(); ++i) {
      r.boundary.push_back(pareto[i]);
      if (i + 1 < pareto.size()) r.boundary.push_back({pareto[i + 1][0], pareto[i][1]});
    }
    if (r.boundary.back()[0] > 0.0) r.boundary.push_back({0.0, pareto.back()[1]});
    return r;
  }

  // Convex hull (monotone chain) of a vertex cloud, reported counter-
  // clockwise from the origin.
  static RateRegion convex_hull(std::vector<std::array<double, 2>> pts) {
    RateRegion r;
    r.axis_bounds = {0.0, 0.0};
    pts.push_back({0.0, 0.0});
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) {
                            return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12;
                          }),
              pts.end());
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
      return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull;
    if (pts.size() < 3) {
      hull = pts;
    } else {
      std::vector<std::array<double, 2>> lower, upper;
      for (const auto& p : pts) {
        while (lower.size() >= 2 && cross(lower[lower.size() - 2], lower.back(), p) <= 1e-14)
          lower.pop_back();
        lower.push_back(p);
      }
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (upper.size() >= 2 && cross(upper[upper.size() - 2], upper.back(), *it) <= 1e-14)
          upper.pop_back();
        upper.push_back(*it);
      }
      lower.pop_back();
      upper.pop_back();
      hull = std::move(lower);
      hull.insert(hull.end(), upper.begin(), upper.end());
    }
    auto origin = std::min_element(hull.begin(), hull.end());
    std::rotate(hull.begin(), origin, hull.end());
    r.boundary = std::move(hull);
    for (const auto& p : r.boundary) {
      r.axis_bounds[0] = std::max(r.axis_bounds[0], p[0]);
      r.axis_bounds[1] = std::max(r.axis_bounds[1], p[1]);
    }
    return r;
  }
};

// Point membership with tolerance; falls back to the axis/sum description
// when no boundary polygon is present.
inline bool region_contains(const RateRegion& r, double r1, double r2, double tol = 1e-9) {
  if (r1 < -tol || r2 < -tol) return false;
  if (r.boundary.size() < 3) {
    if (r.axis_bounds.size() < 2) return false;
    if (r1 > r.axis_bounds[0] + tol || r2 > r.axis_bounds[1] + tol) return false;
    for (const auto& [coef, cap] : r.sum_bounds)
      if (coef.size() == 2 && coef[0] * r1 + coef[1] * r2 > cap + tol) return false;
    return true;
  }
  const auto& poly = r.boundary;
  std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    double x1 = poly[j][0], y1 = poly[j][1], x2 = poly[i][0], y2 = poly[i][1];
    // within tol of the segment counts as inside (closed region)
    double dx = x2 - x1, dy = y2 - y1;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? std::clamp(((r1 - x1) * dx + (r2 - y1) * dy) / len2, 0.0, 1.0) : 0.0;
    double px = x1 + t * dx - r1, py = y1 + t * dy - r2;
    if (px * px + py * py <= tol * tol) return true;
    if ((y1 > r2) != (y2 > r2)) {
      double xint = x1 + (r2 - y1) / (y2 - y1) * dx;
      if (r1 < xint) inside = !inside;
    }
  }
  return inside;
}

namespace detail {

// Probability grids {i/g} per sender, filtered by the average-cost cap.
inline std::vector<Pmf> cost_feasible_grid(std::size_t a, std::span<const double> phi, double cap,
                                           std::size_t grid) {
  if (a != 2) throw std::invalid_argument("cost_feasible_grid: only binary senders gridded");
  std::vector<Pmf> out;
  for (std::size_t i = 0; i <= grid; ++i) {
    double p1 = static_cast<double>(i) / static_cast<double>(grid);
    Pmf p({1.0 - p1, p1});
    double c = (1.0 - p1) * phi[0] + p1 * phi[1];
    if (c <= cap + 1e-12) out.push_back(std::move(p));
  }
  return out;
}

inline Dmc state_indexed_channel(const KMac& w, std::size_t sender) {
  // rows indexed x * |S| + s with s running over the other senders' product
  std::size_t a = w.in_size(sender);
  std::size_t s_n = others_product_size(w, sender);
  std::vector<double> rows(a * s_n * w.out_size());
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t s = 0; s < s_n; ++s) {
      auto others = unpack_others(w, sender, s);
      auto inputs = splice_inputs(w, sender, x, others);
      auto r = w.row(inputs);
      std::copy(r.begin(), r.end(), rows.begin() + static_cast<long>((x * s_n + s) * w.out_size()));
    }
  return Dmc(a * s_n, w.out_size(), std::move(rows));
}

}  // namespace detail

// Upper identification region: the box of per-sender maximum entropies
// under the cost caps (the per-axis maxima are decoupled, so the union of
// boxes over joint input laws collapses to one box).
inline RateRegion ru_region(const KMac& w, const CostSpec& costs) {
  costs.validate(w.in_sizes());
  std::vector<double> bounds;
  for (std::size_t k = 0; k < w.num_senders(); ++k) {
    double cap = costs.cap[k];
    if (std::isinf(cap)) cap = *std::max_element(costs.phi[k].begin(), costs.phi[k].end());
    bounds.push_back(max_entropy_under_cost(w.in_size(k), costs.phi[k], cap).h_star);
  }
  return RateRegion::box(std::move(bounds));
}

// Lower identification region for two binary senders: union over the
// cost-feasible product-input grid of the per-sender confusability boxes.
inline RateRegion rl_region(const KMac& w, const CostSpec& costs, std::size_t grid = 200,
                            double delta = 0.0) {
  costs.validate(w.in_sizes());
  if (w.num_senders() != 2)
    throw std::invalid_argument("rl_region: two-sender channels only");
  for (std::size_t k = 0; k < 2; ++k)
    if (w.in_size(k) != 2) throw std::invalid_argument("rl_region: binary senders only");

  auto grid1 = detail::cost_feasible_grid(2, costs.phi[0], costs.cap[0], grid);
  auto grid2 = detail::cost_feasible_grid(2, costs.phi[1], costs.cap[1], grid);
  Dmc w1 = detail::state_indexed_channel(w, 0);
  Dmc w2 = detail::state_indexed_channel(w, 1);

  std::vector<std::array<double, 2>> corners;
  corners.reserve(grid1.size() * grid2.size());
  for (const auto& p1 : grid1)
    for (const auto& p2 : grid2) {
      double b1, b2;
      if (delta == 0.0) {
        b1 = binary_min_confusability_value(p1, averaged_partial_channel(w, 0, p2));
        b2 = binary_min_confusability_value(p2, averaged_partial_channel(w, 1, p1));
      } else {
        b1 = min_confusability(ConfusabilityProblem(p1, p2, w1, delta)).value;
        b2 = min_confusability(ConfusabilityProblem(p2, p1, w2, delta)).value;
      }
      corners.push_back({b1, b2});
    }
  return RateRegion::from_boxes(std::move(corners));
}

// Shannon transmission region of a two-sender MAC: convex hull over the
// cost-feasible product-input grid of the pentagons
// { R1 <= I(X1;Y|X2), R2 <= I(X2;Y|X1), R1+R2 <= I(X1X2;Y) }.
inline RateRegion transmission_region(const KMac& w, const CostSpec& costs, std::size_t grid = 200) {
  costs.validate(w.in_sizes());
  if (w.num_senders() != 2)
    throw std::invalid_argument("transmission_region: two-sender channels only");
  for (std::size_t k = 0; k < 2; ++k)
    if (w.in_size(k) != 2) throw std::invalid_argument("transmission_region: binary senders only");

  auto grid1 = detail::cost_feasible_grid(2, costs.phi[0], costs.cap[0], grid);
  auto grid2 = detail::cost_feasible_grid(2, costs.phi[1], costs.cap[1], grid);

  std::vector<std::array<double, 2>> pts;
  double sum_cap = 0.0;
  std::size_t ys = w.out_size();
  for (const auto& p1 : grid1)
    for (const auto& p2 : grid2) {
      std::vector<double> joint(2 * 2 * ys);
      for (std::size_t x1 = 0; x1 < 2; ++x1)
        for (std::size_t x2 = 0; x2 < 2; ++x2) {
          std::array<std::size_t, 2> in{x1, x2};
          auto row = w.row(in);
          for (std::size_t y = 0; y < ys; ++y)
            joint[(x1 * 2 + x2) * ys + y] = p1[x1] * p2[x2] * row[y];
        }
      JointPmf pxy({2, 2, ys}, std::move(joint));
      double i1 = conditional_mi(marginalize(pxy, {0, 2, 1}));
      double i2 = conditional_mi(marginalize(pxy, {1, 2, 0}));
      double i12 = mutual_information(group_axes(pxy, {{0, 1}, {2}}));
      i12 = std::min(i12, i1 + i2);
      sum_cap = std::max(sum_cap, i12);
      pts.push_back({i1, 0.0});
      pts.push_back({0.0, i2});
      pts.push_back({i1, std::max(i12 - i1, 0.0)});
      pts.push_back({std::max(i12 - i2, 0.0), i2});
    }
  RateRegion r = RateRegion::convex_hull(std::move(pts));
  r.sum_bounds.push_back({{1.0, 1.0}, sum_cap});
  return r;
}

// Finite-blocklength converse: the entropy cap plus the type-counting
// correction (|X|/n) log2(n+1).
inline double finite_n_converse(std::size_t n, std::size_t a, std::span<const double> phi,
                                double cap) {
  if (n == 0) throw std::invalid_argument("finite_n_converse: n must be >= 1");
  double h = max_entropy_under_cost(a, phi, cap).h_star;
  return h + static_cast<double>(a) / static_cast<double>(n) * std::log2(static_cast<double>(n + 1));
}

// Boundary vertices; max_points = 0 emits all of them, otherwise uniform
// subsampling down to the cap (always keeping the first vertex).
inline std::vector<std::array<double, 2>> export_region(const RateRegion& r,
                                                        std::size_t max_points = 0) {
  if (max_points == 0 || r.boundary.size() <= max_points) return r.boundary;
  std::vector<std::array<double, 2>> out;
  double stride = static_cast<double>(r.boundary.size()) / static_cast<double>(max_points);
  for (std::size_t i = 0; i < max_points; ++i)
    out.push_back(r.boundary[static_cast<std::size_t>(i * stride)]);
  return out;
}

}  // namespace dimac
