#pragma once

// K-sender multiple-access channels W(y | x_1..x_K), per-sender cost
// specifications, partial/averaged single-sender channels, and row
// injectivity analysis. The three worked example channels live here too.

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dimac/prob.hpp"

namespace dimac {

// Transition tensor of a K-input MAC, stored row-major over the product
// input alphabet (sender 1 slowest), with one output distribution per row.
class KMac {
 public:
  KMac(std::vector<std::size_t> in_sizes, std::size_t out_size, std::vector<double> tensor)
      : in_sizes_(std::move(in_sizes)), out_(out_size), tensor_(std::move(tensor)) {
    if (in_sizes_.empty()) throw std::invalid_argument("KMac: need at least one sender");
    if (out_ == 0) throw std::invalid_argument("KMac: empty output alphabet");
    std::size_t rows = 1;
    for (std::size_t a : in_sizes_) {
      if (a == 0) throw std::invalid_argument("KMac: empty input alphabet");
      rows *= a;
    }
    if (tensor_.size() != rows * out_) throw std::invalid_argument("KMac: tensor size mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(tensor_.begin() + static_cast<long>(r * out_),
                              tensor_.begin() + static_cast<long>((r + 1) * out_));
      detail::validate_mass(row, "KMac row");
      std::copy(row.begin(), row.end(), tensor_.begin() + static_cast<long>(r * out_));
    }
  }

  std::size_t num_senders() const { return in_sizes_.size(); }
  const std::vector<std::size_t>& in_sizes() const { return in_sizes_; }
  std::size_t in_size(std::size_t k) const { return in_sizes_.at(k); }
  std::size_t out_size() const { return out_; }
  const std::vector<double>& tensor() const { return tensor_; }

  std::size_t row_index(std::span<const std::size_t> inputs) const {
    if (inputs.size() != in_sizes_.size()) throw std::invalid_argument("KMac: input arity mismatch");
    std::size_t r = 0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      if (inputs[k] >= in_sizes_[k]) throw std::invalid_argument("KMac: input letter out of range");
      r = r * in_sizes_[k] + inputs[k];
    }
    return r;
  }

  std::span<const double> row(std::span<const std::size_t> inputs) const {
    return std::span<const double>(tensor_.data() + row_index(inputs) * out_, out_);
  }

  double prob(std::size_t y, std::span<const std::size_t> inputs) const {
    if (y >= out_) throw std::invalid_argument("KMac: output letter out of range");
    return tensor_[row_index(inputs) * out_ + y];
  }

 private:
  std::vector<std::size_t> in_sizes_;
  std::size_t out_;
  std::vector<double> tensor_;
};

// Per-sender letter costs phi_k and caps cap_k; an infinite cap means the
// sender is unconstrained.
struct CostSpec {
  std::vector<std::vector<double>> phi;
  std::vector<double> cap;

  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();

  // Hamming-weight costs phi(x) = x with no caps, the default when a
  // channel file does not specify costs.
  static CostSpec hamming_free(const std::vector<std::size_t>& in_sizes) {
    CostSpec c;
    for (std::size_t a : in_sizes) {
      std::vector<double> p(a);
      for (std::size_t x = 0; x < a; ++x) p[x] = static_cast<double>(x);
      c.phi.push_back(std::move(p));
      c.cap.push_back(kUnbounded);
    }
    return c;
  }

  void validate(const std::vector<std::size_t>& in_sizes) const {
    if (phi.size() != in_sizes.size() || cap.size() != in_sizes.size())
      throw std::invalid_argument("CostSpec: sender count mismatch");
    for (std::size_t k = 0; k < phi.size(); ++k) {
      if (phi[k].size() != in_sizes[k])
        throw std::invalid_argument("CostSpec: phi size mismatch for sender " + std::to_string(k));
      for (double v : phi[k])
        if (v < 0.0) throw std::invalid_argument("CostSpec: negative letter cost");
      if (cap[k] < 0.0) throw std::invalid_argument("CostSpec: negative cap");
    }
  }
};

struct InjectivityReport {
  bool injective = true;
  double min_row_distance = std::numeric_limits<double>::infinity();
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

namespace detail {

// Flat index over the alphabets of all senders except `sender`, in sender
// order (row-major).
inline std::size_t others_product_size(const KMac& w, std::size_t sender) {
  std::size_t s = 1;
  for (std::size_t k = 0; k < w.num_senders(); ++k)
    if (k != sender) s *= w.in_size(k);
  return s;
}

inline std::vector<std::size_t> unpack_others(const KMac& w, std::size_t sender, std::size_t flat) {
  std::vector<std::size_t> letters;
  std::vector<std::size_t> sizes;
  for (std::size_t k = 0; k < w.num_senders(); ++k)
    if (k != sender) sizes.push_back(w.in_size(k));
  letters.resize(sizes.size());
  for (std::size_t d = sizes.size(); d-- > 0;) {
    letters[d] = flat % sizes[d];
    flat /= sizes[d];
  }
  return letters;
}

inline std::vector<std::size_t> splice_inputs(const KMac& w, std::size_t sender, std::size_t x,
                                              std::span<const std::size_t> others) {
  std::vector<std::size_t> inputs(w.num_senders());
  std::size_t j = 0;
  for (std::size_t k = 0; k < w.num_senders(); ++k) inputs[k] = (k == sender) ? x : others[j++];
  return inputs;
}

}  // namespace detail

// Point-to-point channel seen by one sender when all other inputs are held
// at fixed letters.
inline Dmc partial_channel(const KMac& w, std::size_t sender,
                           std::span<const std::size_t> fixed_others) {
  if (sender >= w.num_senders()) throw std::invalid_argument("partial_channel: bad sender");
  if (fixed_others.size() + 1 != w.num_senders())
    throw std::invalid_argument("partial_channel: need K-1 fixed letters");
  std::vector<double> rows(w.in_size(sender) * w.out_size());
  for (std::size_t x = 0; x < w.in_size(sender); ++x) {
    auto inputs = detail::splice_inputs(w, sender, x, fixed_others);
    auto r = w.row(inputs);
    std::copy(r.begin(), r.end(), rows.begin() + static_cast<long>(x * w.out_size()));
  }
  return Dmc(w.in_size(sender), w.out_size(), std::move(rows));
}

inline Dmc partial_channel(const KMac& w, std::size_t sender,
                           std::initializer_list<std::size_t> fixed_others) {
  std::vector<std::size_t> v(fixed_others);
  return partial_channel(w, sender, std::span<const std::size_t>(v));
}

// Mixture channel (p_S W)(y|x) = sum_s p_others(s) W(y | x, s), with s
// running over the product of the other senders' alphabets.
inline Dmc averaged_partial_channel(const KMac& w, std::size_t sender, const Pmf& p_others) {
  if (sender >= w.num_senders()) throw std::invalid_argument("averaged_partial_channel: bad sender");
  if (p_others.size() != detail::others_product_size(w, sender))
    throw std::invalid_argument("averaged_partial_channel: mixing distribution size mismatch");
  std::vector<double> rows(w.in_size(sender) * w.out_size(), 0.0);
  for (std::size_t s = 0; s < p_others.size(); ++s) {
    if (p_others[s] == 0.0) continue;
    auto others = detail::unpack_others(w, sender, s);
    for (std::size_t x = 0; x < w.in_size(sender); ++x) {
      auto inputs = detail::splice_inputs(w, sender, x, others);
      auto r = w.row(inputs);
      for (std::size_t y = 0; y < w.out_size(); ++y) rows[x * w.out_size() + y] += p_others[s] * r[y];
    }
  }
  return Dmc(w.in_size(sender), w.out_size(), std::move(rows));
}

// A channel is injective when distinct inputs give distinct output
// distributions; distance between rows is total variation.
inline InjectivityReport injectivity(const Dmc& w, double tol = 1e-9) {
  if (tol <= 0.0) throw std::invalid_argument("injectivity: tol must be positive");
  InjectivityReport rep;
  for (std::size_t a = 0; a < w.in_size(); ++a) {
    for (std::size_t b = a + 1; b < w.in_size(); ++b) {
      double d = total_variation(w.row(a), w.row(b));
      if (d < rep.min_row_distance) {
        rep.min_row_distance = d;
        if (d <= tol) rep.witness = {a, b};
      }
    }
  }
  if (w.in_size() < 2) rep.min_row_distance = std::numeric_limits<double>::infinity();
  rep.injective = rep.min_row_distance > tol;
  if (rep.injective) rep.witness.reset();
  return rep;
}

// Y = (X1 + X2) mod 3 with binary senders; deterministic.
inline KMac make_mod3_adder() {
  std::vector<double> t(2 * 2 * 3, 0.0);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2) t[(x1 * 2 + x2) * 3 + (x1 + x2) % 3] = 1.0;
  return KMac({2, 2}, 3, std::move(t));
}

// Y = (X1 + X2 + Z) mod 2 with Z ~ Bern(q).
inline KMac make_mod2_adder(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("make_mod2_adder: q outside [0,1]");
  std::vector<double> t(2 * 2 * 2);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2) {
      std::size_t parity = (x1 + x2) % 2;
      t[(x1 * 2 + x2) * 2 + parity] = 1.0 - q;
      t[(x1 * 2 + x2) * 2 + (1 - parity)] = q;
    }
  return KMac({2, 2}, 2, std::move(t));
}

// Y = (X1 * X2 + Z) mod 2 with Z ~ Bern(q).
inline KMac make_multiplier(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("make_multiplier: q outside [0,1]");
  std::vector<double> t(2 * 2 * 2);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2) {
      std::size_t prod = x1 * x2;
      t[(x1 * 2 + x2) * 2 + prod] = 1.0 - q;
      t[(x1 * 2 + x2) * 2 + (1 - prod)] = q;
    }
  return KMac({2, 2}, 2, std::move(t));
}

// Arithmetic mean of per-letter costs of a word.
inline double average_cost(std::span<const std::size_t> word, std::span<const double> phi) {
  if (word.empty()) throw std::invalid_argument("average_cost: empty word");
  double total = 0.0;
  for (std::size_t x : word) {
    if (x >= phi.size()) throw std::invalid_argument("average_cost: letter out of range");
    total += phi[x];
  }
  return total / static_cast<double>(word.size());
}

}  // namespace dimac
