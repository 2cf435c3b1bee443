#pragma once

// Finite probability distributions over index alphabets {0..A-1} and the
// information measures built on them. All entropies and rates are in bits.
// Values are immutable after construction and safe to share across threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimac {

inline constexpr double kMassTol = 1e-9;    // total-mass tolerance on construction
inline constexpr double kNegClamp = 1e-12;  // entries in [-kNegClamp, 0) round to 0

namespace detail {

// 0 * log2(0) = 0 convention.
inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline void validate_mass(std::vector<double>& probs, const char* what) {
  if (probs.empty()) throw std::invalid_argument(std::string(what) + ": empty alphabet");
  double sum = 0.0;
  for (double& p : probs) {
    if (p < 0.0) {
      if (p >= -kNegClamp) {
        p = 0.0;
      } else {
        throw std::invalid_argument(std::string(what) + ": negative entry " + std::to_string(p));
      }
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMassTol) {
    throw std::invalid_argument(std::string(what) + ": mass " + std::to_string(sum) + " != 1");
  }
}

}  // namespace detail

// Probability mass function over a single alphabet {0..A-1}.
class Pmf {
 public:
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    detail::validate_mass(probs_, "Pmf");
  }

  static Pmf uniform(std::size_t a) {
    return Pmf(std::vector<double>(a, 1.0 / static_cast<double>(a)));
  }

  static Pmf point_mass(std::size_t a, std::size_t x) {
    if (x >= a) throw std::invalid_argument("Pmf::point_mass: letter out of range");
    std::vector<double> p(a, 0.0);
    p[x] = 1.0;
    return Pmf(std::move(p));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

  bool operator==(const Pmf& other) const { return probs_ == other.probs_; }

 private:
  std::vector<double> probs_;
};

// Joint distribution over a product alphabet, stored flat in row-major order
// (last axis fastest).
class JointPmf {
 public:
  JointPmf(std::vector<std::size_t> shape, std::vector<double> probs)
      : shape_(std::move(shape)), probs_(std::move(probs)) {
    if (shape_.empty()) throw std::invalid_argument("JointPmf: no axes");
    std::size_t n = 1;
    for (std::size_t a : shape_) {
      if (a == 0) throw std::invalid_argument("JointPmf: zero-size axis");
      n *= a;
    }
    if (n != probs_.size()) throw std::invalid_argument("JointPmf: shape/size mismatch");
    detail::validate_mass(probs_, "JointPmf");
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double at_flat(std::size_t i) const { return probs_[i]; }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != shape_.size()) throw std::invalid_argument("JointPmf: index rank mismatch");
    std::size_t f = 0;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
      if (idx[d] >= shape_[d]) throw std::invalid_argument("JointPmf: index out of range");
      f = f * shape_[d] + idx[d];
    }
    return f;
  }

  double at(std::initializer_list<std::size_t> idx) const {
    std::vector<std::size_t> v(idx);
    return probs_[flat_index(v)];
  }

  // Single-axis joint as a plain Pmf.
  Pmf as_pmf() const {
    if (shape_.size() != 1) throw std::invalid_argument("JointPmf::as_pmf: rank != 1");
    return Pmf(probs_);
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> probs_;
};

// Discrete memoryless channel: a stochastic matrix with one output
// distribution per input letter.
class Dmc {
 public:
  Dmc(std::size_t in_size, std::size_t out_size, std::vector<double> rows)
      : in_(in_size), out_(out_size), rows_(std::move(rows)) {
    if (in_ == 0 || out_ == 0) throw std::invalid_argument("Dmc: empty alphabet");
    if (rows_.size() != in_ * out_) throw std::invalid_argument("Dmc: row data size mismatch");
    for (std::size_t x = 0; x < in_; ++x) {
      std::vector<double> row(rows_.begin() + static_cast<long>(x * out_),
                              rows_.begin() + static_cast<long>((x + 1) * out_));
      detail::validate_mass(row, "Dmc row");
      std::copy(row.begin(), row.end(), rows_.begin() + static_cast<long>(x * out_));
    }
  }

  std::size_t in_size() const { return in_; }
  std::size_t out_size() const { return out_; }
  double operator()(std::size_t y, std::size_t x) const { return rows_[x * out_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(rows_.data() + x * out_, out_);
  }
  const std::vector<double>& flat() const { return rows_; }

 private:
  std::size_t in_;
  std::size_t out_;
  std::vector<double> rows_;
};

// -Sum p log2 p over an arbitrary non-negative vector (not necessarily
// normalized); the entropy of a distribution when the input sums to 1.
inline double neg_sum_xlog2x(std::span<const double> v) {
  double h = 0.0;
  for (double p : v) h -= detail::xlog2x(p);
  return h;
}

inline double entropy(const Pmf& p) { return neg_sum_xlog2x(p.probs()); }
inline double entropy(const JointPmf& p) { return neg_sum_xlog2x(p.probs()); }

inline double binary_entropy(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("binary_entropy: q outside [0,1]");
  return -detail::xlog2x(q) - detail::xlog2x(1.0 - q);
}

// Sum out every axis not listed in keep_axes; the kept axes appear in the
// order given (so this also transposes).
inline JointPmf marginalize(const JointPmf& p, std::span<const std::size_t> keep_axes) {
  const auto& shape = p.shape();
  if (keep_axes.empty()) throw std::invalid_argument("marginalize: no axes kept");
  std::vector<bool> seen(shape.size(), false);
  std::vector<std::size_t> out_shape;
  for (std::size_t ax : keep_axes) {
    if (ax >= shape.size()) throw std::invalid_argument("marginalize: axis out of range");
    if (seen[ax]) throw std::invalid_argument("marginalize: duplicate axis");
    seen[ax] = true;
    out_shape.push_back(shape[ax]);
  }
  std::size_t out_size = 1;
  for (std::size_t a : out_shape) out_size *= a;
  std::vector<double> out(out_size, 0.0);

  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t f = 0; f < p.size(); ++f) {
    std::size_t of = 0;
    for (std::size_t k = 0; k < keep_axes.size(); ++k) of = of * out_shape[k] + idx[keep_axes[k]];
    out[of] += p.at_flat(f);
    for (std::size_t d = shape.size(); d-- > 0;) {
      if (++idx[d] < shape[d]) break;
      idx[d] = 0;
    }
  }
  return JointPmf(std::move(out_shape), std::move(out));
}

inline JointPmf marginalize(const JointPmf& p, std::initializer_list<std::size_t> keep_axes) {
  std::vector<std::size_t> v(keep_axes);
  return marginalize(p, std::span<const std::size_t>(v));
}

// Regroup the axes of a joint into coarser axes: each group is a list of
// original axes that get flattened into one axis (row-major within the
// group). Every original axis must appear in exactly one group.
inline JointPmf group_axes(const JointPmf& p,
                           const std::vector<std::vector<std::size_t>>& groups) {
  const auto& shape = p.shape();
  std::vector<bool> seen(shape.size(), false);
  std::vector<std::size_t> order;
  std::vector<std::size_t> out_shape;
  for (const auto& g : groups) {
    std::size_t s = 1;
    for (std::size_t ax : g) {
      if (ax >= shape.size() || seen[ax]) throw std::invalid_argument("group_axes: bad grouping");
      seen[ax] = true;
      order.push_back(ax);
      s *= shape[ax];
    }
    out_shape.push_back(s);
  }
  if (order.size() != shape.size()) throw std::invalid_argument("group_axes: axes not covered");

  std::vector<double> out(p.size(), 0.0);
  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t f = 0; f < p.size(); ++f) {
    std::size_t of = 0;
    for (std::size_t ax : order) of = of * shape[ax] + idx[ax];
    out[of] = p.at_flat(f);
    for (std::size_t d = shape.size(); d-- > 0;) {
      if (++idx[d] < shape[d]) break;
      idx[d] = 0;
    }
  }
  return JointPmf(std::move(out_shape), std::move(out));
}

// I(X;Y) of a two-axis joint, via H(X) + H(Y) - H(X,Y).
inline double mutual_information(const JointPmf& pxy) {
  if (pxy.rank() != 2) throw std::invalid_argument("mutual_information: rank != 2");
  double hx = entropy(marginalize(pxy, {0}));
  double hy = entropy(marginalize(pxy, {1}));
  return hx + hy - entropy(pxy);
}

// I(X;Y|Z) of a three-axis joint (axes X, Y, Z), via
// H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z).
inline double conditional_mi(const JointPmf& pxyz) {
  if (pxyz.rank() != 3) throw std::invalid_argument("conditional_mi: rank != 3");
  double hxz = entropy(marginalize(pxyz, {0, 2}));
  double hyz = entropy(marginalize(pxyz, {1, 2}));
  double hz = entropy(marginalize(pxyz, {2}));
  return hxz + hyz - hz - entropy(pxyz);
}

// Output distribution (pW)(y) = sum_x p(x) W(y|x).
inline Pmf push_through(const Pmf& p, const Dmc& w) {
  if (p.size() != w.in_size()) throw std::invalid_argument("push_through: dimension mismatch");
  std::vector<double> out(w.out_size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    auto row = w.row(x);
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += p[x] * row[y];
  }
  return Pmf(std::move(out));
}

// Input-output joint p(x,y) = p(x) W(y|x).
inline JointPmf input_output_joint(const Pmf& p, const Dmc& w) {
  if (p.size() != w.in_size()) throw std::invalid_argument("input_output_joint: dimension mismatch");
  std::vector<double> out(p.size() * w.out_size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    auto row = w.row(x);
    for (std::size_t y = 0; y < w.out_size(); ++y) out[x * w.out_size() + y] = p[x] * row[y];
  }
  return JointPmf({p.size(), w.out_size()}, std::move(out));
}

// Total-variation distance (half L1) between two distributions on the same
// alphabet, given as raw spans.
inline double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

}  // namespace dimac
