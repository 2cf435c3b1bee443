#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <vector>

#include "dimac/rng.hpp"

using namespace dimac;

TEST_CASE("identical seeds give identical streams") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("forked streams differ from the parent and each other") {
  Rng root(99);
  Rng c1 = root.fork(0);
  Rng c2 = root.fork(1);
  std::vector<std::uint64_t> s1, s2;
  for (int i = 0; i < 16; ++i) {
    s1.push_back(c1.next_u64());
    s2.push_back(c2.next_u64());
  }
  CHECK(s1 != s2);

  // forking is deterministic given the parent state
  Rng root2(99);
  Rng d1 = root2.fork(0);
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(d1.next_u64() == s1[i]);
}

TEST_CASE("below produces roughly uniform draws and respects the bound") {
  Rng rng(5);
  std::vector<int> counts(6, 0);
  const int trials = 60000;
  for (int i = 0; i < trials; ++i) {
    auto v = rng.below(6);
    REQUIRE(v < 6);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) {
    CHECK(c > trials / 6 - 600);
    CHECK(c < trials / 6 + 600);
  }
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

TEST_CASE("uniform lies in [0,1)") {
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("discrete follows the weights") {
  Rng rng(8);
  std::vector<double> w{1.0, 2.0, 3.0};
  std::vector<int> counts(3, 0);
  const int trials = 60000;
  for (int i = 0; i < trials; ++i) ++counts[rng.discrete(w)];
  CHECK(std::abs(counts[0] / static_cast<double>(trials) - 1.0 / 6.0) < 0.02);
  CHECK(std::abs(counts[1] / static_cast<double>(trials) - 2.0 / 6.0) < 0.02);
  CHECK(std::abs(counts[2] / static_cast<double>(trials) - 3.0 / 6.0) < 0.02);

  std::vector<double> bad{0.0, 0.0};
  CHECK_THROWS_AS(rng.discrete(bad), std::invalid_argument);
}

TEST_CASE("shuffle permutes without loss and covers all orders") {
  Rng rng(9);
  std::vector<int> v{1, 2, 3, 4, 5};
  auto sorted = v;
  rng.shuffle(v);
  auto copy = v;
  std::sort(copy.begin(), copy.end());
  CHECK(copy == sorted);

  std::map<std::vector<int>, int> orders;
  for (int i = 0; i < 6000; ++i) {
    std::vector<int> t{1, 2, 3};
    rng.shuffle(t);
    ++orders[t];
  }
  REQUIRE(orders.size() == 6);
  for (const auto& [perm, count] : orders) CHECK(count > 700);
}
