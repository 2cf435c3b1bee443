#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dimac/channel.hpp"
#include "dimac/confusability.hpp"
#include "dimac/oracles.hpp"
#include "dimac/prob.hpp"
#include "dimac/rng.hpp"

using namespace dimac;

namespace {

// rows indexed x * |S| + s, with s the other sender's letter
Dmc state_rows(const KMac& w, std::size_t sender) {
  std::size_t a = w.in_size(sender), ys = w.out_size();
  std::size_t s_n = sender == 0 ? w.in_size(1) : w.in_size(0);
  std::vector<double> rows(a * s_n * ys);
  for (std::size_t x = 0; x < a; ++x)
    for (std::size_t s = 0; s < s_n; ++s) {
      std::vector<std::size_t> in = sender == 0 ? std::vector<std::size_t>{x, s}
                                                : std::vector<std::size_t>{s, x};
      auto r = w.row(in);
      std::copy(r.begin(), r.end(), rows.begin() + static_cast<long>((x * s_n + s) * ys));
    }
  return Dmc(a * s_n, ys, std::move(rows));
}

double argmin_law_gap(const ConfusabilityResult& res, const ConfusabilityProblem& prob) {
  // worst deviation of the argmin's implied laws from the problem data
  Dmc v = prob.averaged(prob.p_s);
  std::size_t a = prob.x_size(), ys = prob.y_size();
  JointPmf pxy = marginalize(res.argmin, {0, 3});
  JointPmf pxpy = marginalize(res.argmin, {1, 3});
  JointPmf px = marginalize(res.argmin, {0});
  JointPmf pxp = marginalize(res.argmin, {1});
  JointPmf ps = marginalize(res.argmin, {2});
  double worst = 0.0;
  for (std::size_t x = 0; x < a; ++x) {
    worst = std::max(worst, std::abs(px.at_flat(x) - prob.p_x[x]));
    worst = std::max(worst, std::abs(pxp.at_flat(x) - prob.p_x[x]));
    for (std::size_t y = 0; y < ys; ++y)
      worst = std::max(worst, std::abs(pxy.at({x, y}) - prob.p_x[x] * v(y, x)));
  }
  for (std::size_t s = 0; s < prob.s_size(); ++s)
    worst = std::max(worst, std::abs(ps.at_flat(s) - prob.p_s[s]));
  return worst;
}

}  // namespace

TEST_CASE("distinct averaged rows force the full-entropy value") {
  // adder channel, non-uniform state type keeps the averaged rows apart
  Dmc w = state_rows(make_mod2_adder(0.05), 0);
  ConfusabilityProblem prob(Pmf::uniform(2), Pmf({0.9, 0.1}), w, 0.0);
  ConfusabilityResult res = min_confusability(prob);
  CHECK(res.value == Catch::Approx(1.0).margin(1e-6));
  CHECK(res.feasibility_gap <= 1e-6);
  CHECK(argmin_law_gap(res, prob) <= 1e-6);

  // the X'Y channel-law constraint also holds on the reported argmin
  Dmc v = prob.averaged(prob.p_s);
  JointPmf pxpy = marginalize(res.argmin, {1, 3});
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      CHECK(pxpy.at({x, y}) == Catch::Approx(0.5 * v(y, x)).margin(1e-6));
}

TEST_CASE("uniform state collapses the adder and the value drops to zero") {
  Dmc w = state_rows(make_mod2_adder(0.05), 0);
  ConfusabilityProblem prob(Pmf::uniform(2), Pmf::uniform(2), w, 0.0);
  Dmc v = prob.averaged(prob.p_s);
  CHECK(total_variation(v.row(0), v.row(1)) == Catch::Approx(0.0).margin(1e-12));
  ConfusabilityResult res = min_confusability(prob);
  CHECK(res.value == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("multiplier with the competing sender pinned to zero") {
  Dmc w = state_rows(make_multiplier(0.1), 0);
  ConfusabilityProblem prob(Pmf({0.5, 0.5}), Pmf::point_mass(2, 0), w, 0.0);
  ConfusabilityResult res = min_confusability(prob);
  CHECK(res.value == Catch::Approx(0.0).margin(1e-6));

  // pinned to one instead: rows are distinct, so the value is H(P)
  ConfusabilityProblem prob1(Pmf({0.3, 0.7}), Pmf::point_mass(2, 1), w, 0.0);
  CHECK(min_confusability(prob1).value == Catch::Approx(binary_entropy(0.3)).margin(1e-6));
}

TEST_CASE("point-mass codeword type gives zero") {
  Dmc w = state_rows(make_mod2_adder(0.05), 0);
  ConfusabilityProblem prob(Pmf::point_mass(2, 0), Pmf({0.9, 0.1}), w, 0.0);
  CHECK(min_confusability(prob).value == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("value never exceeds the codeword-type entropy") {
  Rng rng(2024);
  for (int it = 0; it < 60; ++it) {
    auto inst = random_binary_instance(rng, 1 + rng.below(3), 2 + rng.below(2), 0.0);
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, 0.0);
    ConfusabilityResult res = min_confusability(prob);
    CHECK(res.value <= entropy(inst.p_x) + 1e-6);
    CHECK(res.value >= -1e-9);
  }
}

TEST_CASE("binary solver agrees with the scan-and-bisect oracle") {
  Rng rng(555);
  double worst = 0.0;
  for (int it = 0; it < 40; ++it) {
    auto inst = random_binary_instance(rng, 1 + rng.below(3), 2 + rng.below(2), 0.0);
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, 0.0);
    double got = min_confusability(prob).value;
    double expect = oracle_binary_confusability(inst.p_x, prob.averaged(inst.p_s));
    worst = std::max(worst, std::abs(got - expect));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("fast scalar path matches the full solver") {
  Rng rng(808);
  for (int it = 0; it < 25; ++it) {
    auto inst = random_binary_instance(rng, 2, 2, 0.0);
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, 0.0);
    Dmc v = prob.averaged(inst.p_s);
    CHECK(binary_min_confusability_value(inst.p_x, v) ==
          Catch::Approx(min_confusability(prob).value).margin(1e-7));
  }
}

TEST_CASE("value is non-increasing in delta") {
  Rng rng(99);
  for (int it = 0; it < 10; ++it) {
    auto inst = random_binary_instance(rng, 2, 2, 0.05);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.0, 0.01, 0.05, 0.2, 1.0, 3.0}) {
      ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, delta);
      double v = min_confusability(prob).value;
      CHECK(v <= prev + 1e-6);
      prev = v;
    }
  }
}

TEST_CASE("a loose relaxation reaches the channel mutual information") {
  // with the relaxation constraint inactive, the optimum couples X' to Y
  // alone and the value is I(X';Y) under the averaged channel
  Dmc w = state_rows(make_mod2_adder(0.1), 0);
  Pmf p({0.5, 0.5});
  Pmf ps({0.8, 0.2});
  ConfusabilityProblem prob(p, ps, w, 10.0);
  ConfusabilityResult res = min_confusability(prob);
  double expect = mutual_information(input_output_joint(p, prob.averaged(ps)));
  CHECK(res.value == Catch::Approx(expect).margin(1e-6));
}

TEST_CASE("independent-state reduction survives a full-joint search") {
  Rng rng(31337);
  for (int it = 0; it < 6; ++it) {
    auto inst = random_binary_instance(rng, 2 + rng.below(2), 2, 0.0);
    double delta = (it % 2 == 0) ? 0.0 : 0.05;
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, delta);
    double production = min_confusability(prob).value;
    FullJointSearchResult full = oracle_full_joint_search(prob, 1000 + static_cast<std::uint64_t>(it));
    CHECK(full.residual <= 1e-4);
    // coupling S into the joint must not beat the reduced optimum
    CHECK(full.value >= production - 1e-3);
    CHECK(full.value <= production + 1e-3);
  }
}

TEST_CASE("ternary alphabet via projected gradient") {
  std::vector<double> rows{0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8};
  Dmc w(3, 3, rows);
  Pmf p({0.4, 0.35, 0.25});
  ConfusabilityProblem prob(p, Pmf({1.0}), w, 0.0);
  ConfusabilityResult res = min_confusability(prob, ConfusabilityMethod::kProjectedGradient);
  CHECK(res.value <= entropy(p) + 1e-6);
  CHECK(res.value >= 0.0);
  CHECK(res.feasibility_gap <= 1e-5);

  FullJointSearchResult full = oracle_full_joint_search(prob, 4242);
  CHECK(std::abs(full.value - res.value) <= 2e-3);
}

TEST_CASE("competitor state candidates can lower the value") {
  // the transmit state separates the rows; a candidate competitor state that
  // collapses them lets X' decouple entirely
  Dmc w = state_rows(make_mod2_adder(0.05), 0);
  ConfusabilityProblem prob(Pmf::uniform(2), Pmf({0.9, 0.1}), w, 0.0);
  double base = min_confusability(prob).value;
  CHECK(base == Catch::Approx(1.0).margin(1e-6));

  prob.state_candidates.push_back(Pmf::uniform(2));
  ConfusabilityResult res = min_confusability(prob);
  // the equal-row competitor law forces Y free of X' under the Markov chain,
  // contradicting the distinct transmit rows, so the candidate is skipped
  CHECK(res.value == Catch::Approx(1.0).margin(1e-6));
  CHECK(res.chosen_candidate == 0);

  // flip side: transmit through the noisier state, offer the cleaner one as a
  // competitor; the transmit rows are mixtures of the competitor rows, so the
  // coupling c = [[0.3125, 0.1875], [0.1875, 0.3125]] becomes feasible and
  // beats the identity coupling forced by the transmit law
  std::vector<double> rows{0.9, 0.1, 0.6, 0.4, 0.1, 0.9, 0.4, 0.6};  // (x, s) -> y
  ConfusabilityProblem mixed(Pmf::uniform(2), Pmf::point_mass(2, 1), Dmc(4, 2, rows), 0.0);
  CHECK(min_confusability(mixed).value == Catch::Approx(1.0).margin(1e-6));
  mixed.state_candidates.push_back(Pmf::point_mass(2, 0));
  ConfusabilityResult better = min_confusability(mixed);
  CHECK(better.chosen_candidate == 1);
  double expect = 1.0 + binary_entropy(0.4) - binary_entropy(0.375) - binary_entropy(0.1);
  CHECK(better.value == Catch::Approx(expect).margin(1e-5));
}

TEST_CASE("method preconditions") {
  std::vector<double> rows{0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8};
  Dmc w(3, 3, rows);
  ConfusabilityProblem prob(Pmf::uniform(3), Pmf({1.0}), w, 0.0);
  CHECK_THROWS_AS(min_confusability(prob, ConfusabilityMethod::kExactBinary),
                  std::invalid_argument);
  CHECK_THROWS_AS(min_confusability(prob, ConfusabilityMethod::kGridSearch),
                  std::invalid_argument);
  CHECK_THROWS_AS(ConfusabilityProblem(Pmf::uniform(2), Pmf({1.0}), w, -0.1),
                  std::invalid_argument);
}

TEST_CASE("grid solver handles a binding relaxation on binary instances") {
  Rng rng(246);
  for (int it = 0; it < 8; ++it) {
    auto inst = random_binary_instance(rng, 2, 2, 0.1);
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, 0.02);
    ConfusabilityResult res = min_confusability(prob, ConfusabilityMethod::kGridSearch);
    double delta0 = min_confusability(ConfusabilityProblem(inst.p_x, inst.p_s, inst.w, 0.0)).value;
    double loose =
        mutual_information(input_output_joint(inst.p_x, prob.averaged(inst.p_s)));
    CHECK(res.value <= delta0 + 1e-6);
    CHECK(res.value >= loose - 1e-6);
    // the relaxation constraint itself holds on the argmin
    JointPmf q3 = marginalize(res.argmin, {0, 3, 1});  // axes X, Y, X' with S summed out
    CHECK(conditional_mi(q3) <= 0.02 + 1e-5);
  }
}
