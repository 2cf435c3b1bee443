#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dimac/channel.hpp"
#include "dimac/codec.hpp"
#include "dimac/prob.hpp"
#include "dimac/rng.hpp"
#include "dimac/types.hpp"

using namespace dimac;

namespace {

Dmc bsc(double q) { return Dmc(2, 2, {1.0 - q, q, q, 1.0 - q}); }

}  // namespace

TEST_CASE("codebook construction") {
  TypeVector t(std::vector<std::size_t>{3, 3});

  auto full = build_codebook(t, 20, 7u);
  REQUIRE(full.size() == 20);
  auto sorted = full;
  std::sort(sorted.begin(), sorted.end());
  auto expect = enumerate_type_class(t);
  CHECK(sorted == expect);

  CHECK_THROWS_AS(build_codebook(t, 21, 7u), std::invalid_argument);
  CHECK_THROWS_AS(build_codebook(t, 0, 7u), std::invalid_argument);

  auto again = build_codebook(t, 20, 7u);
  CHECK(full == again);
  auto other = build_codebook(t, 20, 8u);
  CHECK(full != other);

  // rejection path: class too large to enumerate
  TypeVector big(std::vector<std::size_t>{12, 12});
  auto picked = build_codebook(big, 50, 11u);
  REQUIRE(picked.size() == 50);
  auto dedup = picked;
  std::sort(dedup.begin(), dedup.end());
  CHECK(std::adjacent_find(dedup.begin(), dedup.end()) == dedup.end());
  for (const auto& w : picked) CHECK(empirical_type(w, 2) == big);
}

TEST_CASE("codeword validation in DiCode") {
  TypeVector t(std::vector<std::size_t>{2, 2});
  std::vector<std::vector<std::size_t>> words{{0, 0, 1, 1}, {0, 1, 0, 1}};
  DiCode code(words, t, Pmf({1.0}), 0.1, 0.05);
  CHECK(code.size() == 2);
  CHECK(code.n == 4);
  CHECK(code.rate() == Catch::Approx(0.25));

  std::vector<std::vector<std::size_t>> off_type{{0, 0, 0, 1}};
  CHECK_THROWS_AS(DiCode(off_type, t, Pmf({1.0}), 0.1, 0.05), std::invalid_argument);
  std::vector<std::vector<std::size_t>> dup{{0, 0, 1, 1}, {0, 0, 1, 1}};
  CHECK_THROWS_AS(DiCode(dup, t, Pmf({1.0}), 0.1, 0.05), std::invalid_argument);
  CHECK_NOTHROW(DiCode(dup, t, Pmf({1.0}), 0.1, 0.05, true));
}

TEST_CASE("canonical state word") {
  CHECK(canonical_state_word(Pmf({0.5, 0.5}), 6) ==
        std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  CHECK(canonical_state_word(Pmf({1.0}), 4) == std::vector<std::size_t>{0, 0, 0, 0});
  CHECK_THROWS_AS(canonical_state_word(Pmf({0.3, 0.7}), 6), std::invalid_argument);
}

TEST_CASE("spread check accepts honest codebooks") {
  TypeVector t(std::vector<std::size_t>{3, 3});
  DiCode solo(std::vector<std::vector<std::size_t>>{{0, 0, 0, 1, 1, 1}}, t, Pmf({1.0}), 0.1, 0.0);
  SpreadReport rep = check_spread(solo, solo.rate());
  CHECK(rep.within_bound);
  CHECK(rep.max_ratio < 0.1);

  TypeVector t8(std::vector<std::size_t>{4, 4});
  DiCode code(build_codebook(t8, 4, 3u), t8, Pmf({0.5, 0.5}), 0.1, 0.0);
  CHECK(check_spread(code, code.rate()).within_bound);
}

TEST_CASE("spread check flags a degenerate codebook") {
  // 400 copies of one word: every message shares the reference joint type,
  // and 400 > 3 * 11^2 once the rate term saturates
  std::vector<std::size_t> word{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  std::vector<std::vector<std::size_t>> words(400, word);
  TypeVector t(std::vector<std::size_t>{5, 5});
  DiCode code(words, t, Pmf({1.0}), 0.1, 0.0, true);
  SpreadReport rep = check_spread(code, code.rate());
  CHECK_FALSE(rep.within_bound);
  CHECK(rep.max_ratio == Catch::Approx(400.0 / 363.0).margin(1e-9));
}

TEST_CASE("spread-checked construction is deterministic") {
  TypeVector t(std::vector<std::size_t>{4, 4});
  DiCode a = make_di_code(t, 6, Pmf({1.0}), 1.0, 0.05, 99);
  DiCode b = make_di_code(t, 6, Pmf({1.0}), 1.0, 0.05, 99);
  CHECK(a.codebook == b.codebook);
  CHECK(check_spread(a, a.rate()).within_bound);
}

TEST_CASE("identification over a noiseless channel") {
  TypeVector t(std::vector<std::size_t>{2, 2});
  DiCode code(std::vector<std::vector<std::size_t>>{{0, 0, 1, 1}}, t, Pmf({1.0}), 0.0, 0.0);
  Dmc w = bsc(0.0);
  IdentificationEvaluator eval(code, w);

  std::vector<std::size_t> y{0, 0, 1, 1};
  CHECK(eval.identify(0, y));
  std::vector<std::size_t> flipped{1, 1, 0, 0};
  CHECK_FALSE(eval.identify(0, flipped));

  CHECK_THROWS_AS(eval.identify(1, y), std::invalid_argument);
  std::vector<std::size_t> short_y{0, 0, 1};
  CHECK_THROWS_AS(eval.identify(0, short_y), std::invalid_argument);

  // free-function wrapper
  CHECK(identify(code, w, 0, y));
}

TEST_CASE("competing codeword does not erase when its channel law is violated") {
  // state-independent noiseless channel; the competitor's pair law with y
  // cannot match P x V, so y = x_0 stays identified
  Dmc w(4, 2, {1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0});  // rows (x, s) -> x
  TypeVector t(std::vector<std::size_t>{2, 2});
  DiCode code(std::vector<std::vector<std::size_t>>{{0, 0, 1, 1}, {0, 1, 0, 1}}, t,
              Pmf({0.5, 0.5}), 0.0, 0.0);
  IdentificationEvaluator eval(code, w);
  std::vector<std::size_t> y{0, 0, 1, 1};
  CHECK(eval.identify(0, y));
  CHECK_FALSE(eval.identify(1, y));

  std::vector<std::size_t> s_word{0, 0, 1, 1};
  ErrorReport missed = eval.exact_errors(0, 0, s_word);
  CHECK(missed.missed_id == Catch::Approx(0.0).margin(1e-12));
  ErrorReport false_rep = eval.exact_errors(0, 1, s_word);
  CHECK(false_rep.false_id == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("state-driven aliasing erases both candidates") {
  // y = x xor s with a balanced state type: the averaged rows coincide, and
  // every candidate is explained by the competitor under some state word
  Dmc w(4, 2, {1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0});
  TypeVector t(std::vector<std::size_t>{2, 2});
  DiCode code(std::vector<std::vector<std::size_t>>{{0, 0, 1, 1}, {0, 1, 0, 1}}, t,
              Pmf({0.5, 0.5}), 0.0, 0.0);
  IdentificationEvaluator eval(code, w);

  std::vector<std::size_t> mixed{0, 1, 1, 0};
  CHECK_FALSE(eval.identify(0, mixed));  // erased via a state-word completion
  CHECK_FALSE(eval.identify(1, mixed));
  std::vector<std::size_t> clean{0, 0, 1, 1};
  CHECK_FALSE(eval.identify(0, clean));  // equal averaged rows: never typical
}

TEST_CASE("noiseless exact error table is identically zero") {
  TypeVector t(std::vector<std::size_t>{3, 3});
  DiCode code = make_di_code(t, 4, Pmf({1.0}), 0.0, 0.0, 21);
  IdentificationEvaluator eval(code, bsc(0.0));
  std::vector<std::size_t> s_word(6, 0);
  ExactErrorTable table = eval.exact_error_table(s_word);
  CHECK(table.worst_missed == Catch::Approx(0.0).margin(1e-12));
  CHECK(table.worst_false == Catch::Approx(0.0).margin(1e-12));
  for (double m : table.missed) CHECK(m == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("exact error table matches pairwise evaluations") {
  TypeVector t(std::vector<std::size_t>{4, 4});
  DiCode code = make_di_code(t, 4, Pmf({1.0}), 2.0, 0.05, 7);
  IdentificationEvaluator eval(code, bsc(0.1));
  std::vector<std::size_t> s_word(8, 0);
  ExactErrorTable table = eval.exact_error_table(s_word);
  for (std::size_t m = 0; m < 4; ++m) {
    CHECK(eval.exact_errors(m, m, s_word).missed_id ==
          Catch::Approx(table.missed[m]).margin(1e-12));
  }
  CHECK(eval.exact_errors(0, 1, s_word).false_id ==
        Catch::Approx(table.false_id[0][1]).margin(1e-12));
  CHECK(eval.exact_errors(2, 3, s_word).false_id ==
        Catch::Approx(table.false_id[2][3]).margin(1e-12));
}

TEST_CASE("Monte Carlo agrees with exact enumeration") {
  TypeVector t(std::vector<std::size_t>{4, 4});
  DiCode code = make_di_code(t, 4, Pmf({1.0}), 2.0, 0.05, 7);
  IdentificationEvaluator eval(code, bsc(0.1));
  std::vector<std::size_t> s_word(8, 0);
  ExactErrorTable table = eval.exact_error_table(s_word);

  ErrorReport mc_missed = eval.monte_carlo_errors(0, 0, s_word, 200000, 404);
  CHECK(mc_missed.method == ErrorMethod::kMonteCarlo);
  CHECK(mc_missed.trials == 200000);
  CHECK(std::abs(mc_missed.missed_id - table.missed[0]) <= 4.0 * mc_missed.half_width);

  ErrorReport mc_false = eval.monte_carlo_errors(0, 1, s_word, 200000, 405);
  CHECK(std::abs(mc_false.false_id - table.false_id[0][1]) <=
        4.0 * std::max(mc_false.half_width, 1e-4));

  ErrorReport repeat = eval.monte_carlo_errors(0, 0, s_word, 200000, 404);
  CHECK(repeat.missed_id == mc_missed.missed_id);
  CHECK(repeat.half_width == mc_missed.half_width);
}

TEST_CASE("exact enumeration refuses oversized output spaces") {
  TypeVector t(std::vector<std::size_t>{12, 12});
  DiCode code(build_codebook(t, 2, 3u), t, Pmf({1.0}), 0.1, 0.0);
  IdentificationEvaluator eval(code, bsc(0.1));
  std::vector<std::size_t> s_word(24, 0);
  CHECK_THROWS_AS(eval.exact_errors(0, 0, s_word), std::runtime_error);
}

TEST_CASE("wilson half-width sanity") {
  CHECK(wilson_half_width(0, 0) == 1.0);
  CHECK(wilson_half_width(5000, 10000) == Catch::Approx(0.0098).margin(2e-4));
  CHECK(wilson_half_width(0, 10000) < wilson_half_width(5000, 10000));
  CHECK(wilson_half_width(0, 10000) > 0.0);
}

TEST_CASE("duplicate codewords break identification") {
  Dmc w = partial_channel(make_mod3_adder(), 0, {0});
  TypeVector t(std::vector<std::size_t>{3, 3});
  std::vector<std::size_t> word{0, 0, 0, 1, 1, 1};
  std::vector<std::vector<std::size_t>> words{word, word, {0, 1, 0, 1, 0, 1}};
  DiCode code(words, t, Pmf({1.0}), 0.1, 0.0, true);
  std::vector<std::size_t> s_word(6, 0);
  DuplicateConverseReport rep = duplicate_converse_demo(code, w, s_word);
  CHECK(rep.m == 0);
  CHECK(rep.m_dup == 1);
  CHECK(rep.sum == Catch::Approx(1.0).margin(1e-12));
  CHECK(rep.max_error >= 0.5);

  DiCode clean(std::vector<std::vector<std::size_t>>{word, {0, 1, 0, 1, 0, 1}}, t,
               Pmf({1.0}), 0.1, 0.0);
  CHECK_THROWS_AS(duplicate_converse_demo(clean, w, s_word), std::invalid_argument);
}

TEST_CASE("time-division construction lays out slots and idle letters") {
  TypeVector t(std::vector<std::size_t>{2, 2});
  DiCode base0 = make_di_code(t, 4, Pmf({1.0}), 1.0, 0.05, 31);
  DiCode base1 = make_di_code(t, 4, Pmf({1.0}), 1.0, 0.05, 32);
  KMac w = make_mod2_adder(0.05);
  CostSpec costs = CostSpec::hamming_free(w.in_sizes());
  DiaCode dia = dia_build({base0, base1}, {16, 16}, 8, costs);

  CHECK(dia.idle == std::vector<std::size_t>{0, 0});
  CHECK(dia.slots[0] == std::make_pair(std::size_t{0}, std::size_t{4}));
  CHECK(dia.slots[1] == std::make_pair(std::size_t{4}, std::size_t{8}));

  auto word = dia.encode(0, 5);  // 5 mod 4 = 1
  REQUIRE(word.size() == 8);
  for (std::size_t i = 4; i < 8; ++i) CHECK(word[i] == 0);
  CHECK(std::vector<std::size_t>(word.begin(), word.begin() + 4) == base0.codebook[1]);
  CHECK_THROWS_AS(dia.encode(0, 16), std::invalid_argument);
  CHECK_THROWS_AS(dia.encode(2, 0), std::invalid_argument);

  CHECK_THROWS_AS(dia_build({base0}, {16, 16}, 8, costs), std::invalid_argument);
  CHECK_THROWS_AS(dia_build({base0, base1}, {16, 16}, 10, costs), std::invalid_argument);
  CHECK_THROWS_AS(dia_build({base0, base1}, {16, 0}, 8, costs), std::invalid_argument);
}

TEST_CASE("time-division error report") {
  TypeVector t(std::vector<std::size_t>{2, 2});
  DiCode base0 = make_di_code(t, 4, Pmf({1.0}), 1.0, 0.05, 31);
  DiCode base1 = make_di_code(t, 4, Pmf({1.0}), 1.0, 0.05, 32);
  KMac w = make_mod2_adder(0.05);
  CostSpec costs = CostSpec::hamming_free(w.in_sizes());
  DiaCode dia = dia_build({base0, base1}, {16, 16}, 8, costs);

  DiaErrorReport rep = dia_errors(dia, w, 2000, 2025);
  REQUIRE(rep.missed_per_sender.size() == 2);

  // within a slot the others idle at 0, so each sender sees a plain BSC; with
  // the multiplicative band at this blocklength only the clean word is
  // typical, and the miss probability is exactly 1 - 0.95^4
  double expect = 1.0 - std::pow(0.95, 4.0);
  CHECK(rep.missed_per_sender[0] == Catch::Approx(expect).margin(1e-12));
  CHECK(rep.missed_per_sender[1] == Catch::Approx(expect).margin(1e-12));
  CHECK(rep.joint_missed ==
        Catch::Approx(1.0 - (1.0 - expect) * (1.0 - expect)).margin(1e-12));

  // sixteen messages wrap onto four base words, so a fifth of the competing
  // pairs collide modulo the base and are identified when the word survives
  CHECK(rep.max_false < 0.3);
  CHECK(rep.false_per_sender[0] > 0.05);

  // agreement with a direct evaluation of the base code over the slot channel
  IdentificationEvaluator eval(base0, dia_slot_channel(dia, w, 0));
  std::vector<std::size_t> s_word(4, 0);
  CHECK(rep.missed_per_sender[0] ==
        Catch::Approx(eval.exact_error_table(s_word).worst_missed).margin(1e-15));

  DiaErrorReport again = dia_errors(dia, w, 2000, 2025);
  CHECK(again.false_per_sender == rep.false_per_sender);
  CHECK(again.joint_missed == rep.joint_missed);
}
