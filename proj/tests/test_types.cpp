#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "dimac/oracles.hpp"
#include "dimac/rng.hpp"
#include "dimac/types.hpp"

using namespace dimac;

TEST_CASE("empirical_type counts letters") {
  std::vector<std::size_t> x{0, 0, 1, 1};
  TypeVector t = empirical_type(x, 2);
  CHECK(t.counts == std::vector<std::size_t>{2, 2});
  CHECK(t.n == 4);

  std::vector<std::size_t> y{0, 1, 2, 0, 1};
  TypeVector u = empirical_type(y, 3);
  CHECK(u.counts == std::vector<std::size_t>{2, 2, 1});

  Pmf p = u.as_pmf();
  CHECK(p[0] == Catch::Approx(0.4));
  CHECK(p[2] == Catch::Approx(0.2));

  std::vector<std::size_t> empty;
  CHECK_THROWS_AS(empirical_type(empty, 2), std::invalid_argument);
  std::vector<std::size_t> oob{0, 3};
  CHECK_THROWS_AS(empirical_type(oob, 2), std::invalid_argument);
}

TEST_CASE("enumerate_types") {
  auto t22 = enumerate_types(2, 2);
  REQUIRE(t22.size() == 3);
  CHECK(t22[0].counts == std::vector<std::size_t>{0, 2});
  CHECK(t22[2].counts == std::vector<std::size_t>{2, 0});

  CHECK(enumerate_types(4, 2).size() == 5);

  auto t33 = enumerate_types(3, 3);
  REQUIRE(t33.size() == 10);
  for (const auto& t : t33) {
    std::size_t sum = 0;
    for (std::size_t c : t.counts) sum += c;
    CHECK(sum == 3);
  }
}

TEST_CASE("type_class_size") {
  CHECK(type_class_size(TypeVector({2, 2})) == 6);
  CHECK(type_class_size(TypeVector({4, 0})) == 1);
  CHECK(type_class_size(TypeVector({2, 2, 1})) == 30);
  // n=64 balanced binary: the exact binomial C(64,32)
  BigInt big = type_class_size(TypeVector({32, 32}));
  CHECK(big == BigInt("1832624140942590534"));
}

TEST_CASE("type classes partition the sequence space") {
  for (std::size_t a : {2ul, 3ul}) {
    for (std::size_t n = 1; n <= 12; ++n) {
      CHECK(oracle_type_partition(n, a));
      double count = static_cast<double>(enumerate_types(n, a).size());
      CHECK(count <= std::pow(static_cast<double>(n + 1), static_cast<double>(a)));
    }
  }
}

TEST_CASE("entropy sandwich on class sizes") {
  for (std::size_t n : {4ul, 8ul, 12ul}) {
    for (const auto& t : enumerate_types(n, 3)) {
      double h = entropy(t.as_pmf());
      double lg = static_cast<double>(std::log2(type_class_size(t).convert_to<double>()));
      double nn = static_cast<double>(n);
      CHECK(lg <= nn * h + 1e-9);
      CHECK(lg >= nn * h - 3.0 * std::log2(nn + 1.0) - 1e-9);
    }
  }
}

TEST_CASE("sample_type_class preserves the type") {
  TypeVector fixed({4, 0});
  CHECK(sample_type_class(fixed, 1) == std::vector<std::size_t>{0, 0, 0, 0});

  Rng rng(77);
  for (int it = 0; it < 1000; ++it) {
    std::vector<std::size_t> counts{1 + rng.below(4), rng.below(4), rng.below(3)};
    TypeVector t(counts);
    auto w = sample_type_class(t, rng);
    CHECK(empirical_type(w, 3) == t);
  }
}

TEST_CASE("sample_type_class covers the class roughly uniformly") {
  TypeVector t({3, 3});
  REQUIRE(type_class_size(t) == 20);
  Rng rng(123);
  std::map<std::vector<std::size_t>, int> hits;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) ++hits[sample_type_class(t, rng)];
  REQUIRE(hits.size() == 20);
  double expect = trials / 20.0;
  double chi2 = 0.0;
  for (const auto& [w, c] : hits) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 50.0);  // df=19, far beyond any sane quantile means a bug
}

TEST_CASE("is_eps_typical") {
  std::vector<std::size_t> x{0, 0, 1, 1};
  CHECK(is_eps_typical(x, Pmf({0.5, 0.5}), 0.0));
  CHECK(is_eps_typical(x, Pmf({0.5, 0.5}), 0.3));

  std::vector<std::size_t> skew{0, 0, 0, 1};  // type (0.75, 0.25)
  CHECK_FALSE(is_eps_typical(skew, Pmf({0.5, 0.5}), 0.4));
  CHECK(is_eps_typical(skew, Pmf({0.5, 0.5}), 0.5));

  // zero-probability letters must not appear
  std::vector<std::size_t> z{0, 1, 2};
  CHECK_FALSE(is_eps_typical(z, Pmf({0.5, 0.5, 0.0}), 2.0));

  Rng rng(3);
  for (int it = 0; it < 200; ++it) {
    std::vector<std::size_t> w;
    for (int i = 0; i < 8; ++i) w.push_back(rng.below(3));
    CHECK(is_eps_typical(w, empirical_type(w, 3).as_pmf(), 0.0));
  }
}

TEST_CASE("joint_type") {
  std::vector<std::size_t> a{0, 0}, b{0, 0};
  JointTypeVector j = joint_type(a, b, 2, 2);
  CHECK(j.counts == std::vector<std::size_t>{2, 0, 0, 0});

  std::vector<std::size_t> c{0, 1}, d{1, 0};
  JointTypeVector j2 = joint_type(c, d, 2, 2);
  CHECK(j2.counts == std::vector<std::size_t>{0, 1, 1, 0});

  std::vector<std::size_t> s1{0, 0, 1, 1}, s2{0, 1, 0, 1}, s3{0, 1, 1, 0};
  std::vector<std::span<const std::size_t>> seqs{s1, s2, s3};
  std::vector<std::size_t> shape{2, 2, 2};
  JointTypeVector j3 = joint_type(seqs, shape);
  int nonzero = 0;
  for (std::size_t v : j3.counts)
    if (v > 0) {
      CHECK(v == 1);
      ++nonzero;
    }
  CHECK(nonzero == 4);

  std::vector<std::size_t> bad{0};
  CHECK_THROWS_AS(joint_type(a, bad, 2, 2), std::invalid_argument);
}

TEST_CASE("is_conditionally_typical") {
  // exact rational joint type, eps = 0
  std::vector<std::size_t> x{0, 0, 1, 1}, y{0, 1, 0, 1};
  JointPmf quarter({2, 2}, {0.25, 0.25, 0.25, 0.25});
  CHECK(is_conditionally_typical(y, x, quarter, 0.0));

  // identity joint: y must copy x
  JointPmf ident({2, 2}, {0.5, 0.0, 0.0, 0.5});
  std::vector<std::size_t> same{0, 0, 1, 1}, off{0, 1, 1, 1};
  CHECK(is_conditionally_typical(same, x, ident, 0.1));
  CHECK_FALSE(is_conditionally_typical(off, x, ident, 0.1));

  // brute force against the banded definition for n=3
  JointPmf pxy({2, 2}, {0.4, 0.1, 0.2, 0.3});
  for (double eps : {0.5, 1.0}) {
    for (std::size_t xm = 0; xm < 8; ++xm)
      for (std::size_t ym = 0; ym < 8; ++ym) {
        std::vector<std::size_t> xs(3), ys(3);
        for (int i = 0; i < 3; ++i) {
          xs[static_cast<std::size_t>(i)] = (xm >> i) & 1;
          ys[static_cast<std::size_t>(i)] = (ym >> i) & 1;
        }
        std::vector<std::size_t> counts(4, 0);
        for (int i = 0; i < 3; ++i) ++counts[xs[static_cast<std::size_t>(i)] * 2 + ys[static_cast<std::size_t>(i)]];
        bool direct = true;
        for (std::size_t cell = 0; cell < 4; ++cell) {
          double target = 3.0 * pxy.at_flat(cell);
          if (std::abs(static_cast<double>(counts[cell]) - target) > eps * target + 1e-9)
            direct = false;
        }
        CHECK(is_conditionally_typical(ys, xs, pxy, eps) == direct);
      }
  }
}
