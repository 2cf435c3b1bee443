#pragma once

// Small deterministic PRNG used everywhere randomness is needed, so that a
// fixed seed reproduces byte-identical results across platforms and across
// standard-library versions (std::mt19937 distributions are not portable).
// splitmix64 applied to a counter; streams can be forked independently.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace dimac {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Independent child stream; children with distinct tags do not collide
  // with each other or with the parent.
  Rng fork(std::uint64_t tag) {
    Rng child(next_u64() ^ (tag * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
    return child;
  }

  // Uniform on {0..bound-1}, unbiased via rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Sample an index from an unnormalized non-negative weight vector.
  std::size_t discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("Rng::discrete: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("Rng::discrete: zero total weight");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace dimac
