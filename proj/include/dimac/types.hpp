#pragma once

// Method-of-types machinery: empirical types, streaming type enumeration,
// exact class sizes (big integer), uniform sampling from a type class, and
// the multiplicative-band typicality tests used by the identification rule.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dimac/prob.hpp"
#include "dimac/rng.hpp"

namespace dimac {

using BigInt = boost::multiprecision::cpp_int;

// Letter counts of a length-n sequence over an alphabet {0..A-1}.
struct TypeVector {
  std::vector<std::size_t> counts;
  std::size_t n = 0;

  explicit TypeVector(std::vector<std::size_t> c) : counts(std::move(c)) {
    if (counts.empty()) throw std::invalid_argument("TypeVector: empty alphabet");
    for (std::size_t v : counts) n += v;
    if (n == 0) throw std::invalid_argument("TypeVector: zero blocklength");
  }

  Pmf as_pmf() const {
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return Pmf(std::move(p));
  }

  bool operator==(const TypeVector& other) const { return counts == other.counts; }
};

// Aligned tuple counts of several equal-length sequences, flat row-major
// over the product alphabet.
struct JointTypeVector {
  std::vector<std::size_t> shape;
  std::vector<std::size_t> counts;
  std::size_t n = 0;

  JointTypeVector(std::vector<std::size_t> sh, std::vector<std::size_t> c)
      : shape(std::move(sh)), counts(std::move(c)) {
    std::size_t cells = 1;
    for (std::size_t a : shape) cells *= a;
    if (shape.empty() || cells != counts.size())
      throw std::invalid_argument("JointTypeVector: shape/counts mismatch");
    for (std::size_t v : counts) n += v;
    if (n == 0) throw std::invalid_argument("JointTypeVector: zero blocklength");
  }

  Pmf as_pmf() const {
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      p[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
    return Pmf(std::move(p));
  }
};

inline TypeVector empirical_type(std::span<const std::size_t> x, std::size_t alphabet) {
  if (x.empty()) throw std::invalid_argument("empirical_type: empty sequence");
  std::vector<std::size_t> counts(alphabet, 0);
  for (std::size_t a : x) {
    if (a >= alphabet) throw std::invalid_argument("empirical_type: letter out of range");
    ++counts[a];
  }
  return TypeVector(std::move(counts));
}

// Visit every n-type over an alphabet of size a (every composition of n
// into a parts), in lexicographic order, without materializing the list.
template <typename F>
void for_each_type(std::size_t n, std::size_t a, F&& fn) {
  if (n == 0 || a == 0) throw std::invalid_argument("for_each_type: need n >= 1, a >= 1");
  std::vector<std::size_t> counts(a, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == a) {
      counts[pos] = remaining;
      fn(const_cast<const std::vector<std::size_t>&>(counts));
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  rec(rec, 0, n);
}

inline std::vector<TypeVector> enumerate_types(std::size_t n, std::size_t a) {
  std::vector<TypeVector> out;
  for_each_type(n, a, [&](const std::vector<std::size_t>& c) { out.emplace_back(c); });
  return out;
}

namespace detail {

inline BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::size_t i = 0; i < k; ++i) {
    r *= static_cast<unsigned long long>(n - i);
    r /= static_cast<unsigned long long>(i + 1);
  }
  return r;
}

}  // namespace detail

// |T_0^n(t)| = multinomial coefficient n! / prod counts!.
inline BigInt type_class_size(std::span<const std::size_t> counts) {
  std::size_t remaining = 0;
  for (std::size_t c : counts) remaining += c;
  if (remaining == 0) throw std::invalid_argument("type_class_size: zero blocklength");
  BigInt size = 1;
  for (std::size_t c : counts) {
    size *= detail::binomial(remaining, c);
    remaining -= c;
  }
  return size;
}

inline BigInt type_class_size(const TypeVector& t) { return type_class_size(std::span<const std::size_t>(t.counts)); }

// Uniform member of the type class: a uniformly random permutation of the
// multiset is uniform over distinct arrangements.
inline std::vector<std::size_t> sample_type_class(const TypeVector& t, Rng& rng) {
  std::vector<std::size_t> word;
  word.reserve(t.n);
  for (std::size_t a = 0; a < t.counts.size(); ++a)
    word.insert(word.end(), t.counts[a], a);
  rng.shuffle(word);
  return word;
}

inline std::vector<std::size_t> sample_type_class(const TypeVector& t, std::uint64_t seed) {
  Rng rng(seed);
  return sample_type_class(t, rng);
}

namespace detail {

// Multiplicative epsilon-band check on raw counts against n * p, with a
// small absolute slack so rational boundary cases do not flip on float
// round-off. eps = 0 degenerates to exact type equality.
inline bool counts_within_band(std::span<const std::size_t> counts, std::span<const double> p,
                               std::size_t n, double eps) {
  constexpr double kSlack = 1e-9;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    double expected = static_cast<double>(n) * p[a];
    double dev = std::abs(static_cast<double>(counts[a]) - expected);
    if (dev > eps * expected + kSlack) return false;
  }
  return true;
}

}  // namespace detail

// |P-hat(a) - p(a)| <= eps * p(a) for every letter; letters outside the
// support of p must not occur.
inline bool is_eps_typical(std::span<const std::size_t> x, const Pmf& p, double eps) {
  if (eps < 0.0) throw std::invalid_argument("is_eps_typical: eps must be >= 0");
  TypeVector t = empirical_type(x, p.size());
  return detail::counts_within_band(t.counts, p.probs(), t.n, eps);
}

inline JointTypeVector joint_type(const std::vector<std::span<const std::size_t>>& seqs,
                                  std::span<const std::size_t> shape) {
  if (seqs.empty() || seqs.size() != shape.size())
    throw std::invalid_argument("joint_type: sequence/shape arity mismatch");
  std::size_t n = seqs[0].size();
  for (const auto& s : seqs)
    if (s.size() != n) throw std::invalid_argument("joint_type: length mismatch");
  if (n == 0) throw std::invalid_argument("joint_type: empty sequences");
  std::size_t cells = 1;
  for (std::size_t a : shape) cells *= a;
  std::vector<std::size_t> counts(cells, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t f = 0;
    for (std::size_t d = 0; d < seqs.size(); ++d) {
      if (seqs[d][i] >= shape[d]) throw std::invalid_argument("joint_type: letter out of range");
      f = f * shape[d] + seqs[d][i];
    }
    ++counts[f];
  }
  return JointTypeVector(std::vector<std::size_t>(shape.begin(), shape.end()), std::move(counts));
}

inline JointTypeVector joint_type(std::span<const std::size_t> x, std::span<const std::size_t> y,
                                  std::size_t ax, std::size_t ay) {
  std::vector<std::span<const std::size_t>> seqs{x, y};
  std::vector<std::size_t> shape{ax, ay};
  return joint_type(seqs, shape);
}

// Joint version of the epsilon-band test: (x, y) against a two-axis joint.
inline bool is_conditionally_typical(std::span<const std::size_t> y, std::span<const std::size_t> x,
                                     const JointPmf& pxy, double eps) {
  if (pxy.rank() != 2) throw std::invalid_argument("is_conditionally_typical: joint rank != 2");
  if (x.size() != y.size()) throw std::invalid_argument("is_conditionally_typical: length mismatch");
  if (eps < 0.0) throw std::invalid_argument("is_conditionally_typical: eps must be >= 0");
  JointTypeVector t = joint_type(x, y, pxy.shape()[0], pxy.shape()[1]);
  return detail::counts_within_band(t.counts, pxy.probs(), t.n, eps);
}

}  // namespace dimac
