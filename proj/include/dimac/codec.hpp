#pragma once

// Deterministic-identification codes at desk scale: constant-type codebook
// construction, the typicality identification rule (accept inside the
// epsilon-typical shell unless a competing codeword explains the output
// within the relaxed confusability set), exact and Monte Carlo error
// evaluation, the duplicate-codeword converse demonstration, and the
// modulo/time-division average-error construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dimac/channel.hpp"
#include "dimac/prob.hpp"
#include "dimac/rng.hpp"
#include "dimac/types.hpp"

namespace dimac {

// Fixed-type identification code. Codewords share the exact type P; eps
// controls the acceptance shell, delta the erasure set.
struct DiCode {
  std::vector<std::vector<std::size_t>> codebook;
  TypeVector type;
  Pmf p;
  Pmf p_s;
  double eps = 0.1;
  double delta = 0.05;
  std::size_t n = 0;

  DiCode(std::vector<std::vector<std::size_t>> words, TypeVector t, Pmf state_type, double eps_in,
         double delta_in, bool allow_duplicates = false)
      : codebook(std::move(words)),
        type(std::move(t)),
        p(type.as_pmf()),
        p_s(std::move(state_type)),
        eps(eps_in),
        delta(delta_in),
        n(type.n) {
    if (codebook.empty()) throw std::invalid_argument("DiCode: empty codebook");
    if (eps < 0.0 || delta < 0.0) throw std::invalid_argument("DiCode: eps and delta must be >= 0");
    for (const auto& w : codebook) {
      if (w.size() != n) throw std::invalid_argument("DiCode: codeword length mismatch");
      if (!(empirical_type(w, type.counts.size()) == type))
        throw std::invalid_argument("DiCode: codeword off the declared type");
    }
    if (!allow_duplicates) {
      auto sorted = codebook;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("DiCode: duplicate codewords");
    }
  }

  std::size_t size() const { return codebook.size(); }
  std::size_t x_size() const { return type.counts.size(); }
  std::size_t s_size() const { return p_s.size(); }
  double rate() const { return std::log2(static_cast<double>(codebook.size())) / static_cast<double>(n); }
};

// All members of a type class, lexicographically.
inline std::vector<std::vector<std::size_t>> enumerate_type_class(const TypeVector& t) {
  std::vector<std::size_t> word;
  word.reserve(t.n);
  for (std::size_t a = 0; a < t.counts.size(); ++a) word.insert(word.end(), t.counts[a], a);
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(word);
  } while (std::next_permutation(word.begin(), word.end()));
  return out;
}

// m distinct words drawn uniformly without replacement from the type class.
// Small classes are enumerated and shuffled; large ones use rejection.
inline std::vector<std::vector<std::size_t>> build_codebook(const TypeVector& t, std::size_t m,
                                                            Rng& rng, std::size_t max_attempts = 32) {
  if (m == 0) throw std::invalid_argument("build_codebook: need at least one message");
  BigInt class_size = type_class_size(t);
  if (BigInt(static_cast<unsigned long long>(m)) > class_size)
    throw std::invalid_argument("build_codebook: more messages than the type class holds");

  if (class_size <= 4096) {
    auto all = enumerate_type_class(t);
    rng.shuffle(all);
    all.resize(m);
    return all;
  }
  std::vector<std::vector<std::size_t>> out;
  std::map<std::vector<std::size_t>, bool> seen;
  std::size_t rejects = 0;
  while (out.size() < m) {
    auto w = sample_type_class(t, rng);
    if (seen.emplace(w, true).second) {
      out.push_back(std::move(w));
    } else if (++rejects > max_attempts * m) {
      throw std::runtime_error("build_codebook: rejection budget exhausted");
    }
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> build_codebook(const TypeVector& t, std::size_t m,
                                                            std::uint64_t seed,
                                                            std::size_t max_attempts = 32) {
  Rng rng(seed);
  return build_codebook(t, m, rng, max_attempts);
}

// Sorted word of exact type p_s (the canonical state word); p_s must be an
// n-type.
inline std::vector<std::size_t> canonical_state_word(const Pmf& p_s, std::size_t n) {
  std::vector<std::size_t> word;
  word.reserve(n);
  std::size_t placed = 0;
  for (std::size_t s = 0; s < p_s.size(); ++s) {
    double target = p_s[s] * static_cast<double>(n);
    auto count = static_cast<std::size_t>(std::llround(target));
    if (std::abs(target - static_cast<double>(count)) > 1e-6)
      throw std::invalid_argument("canonical_state_word: state type is not an n-type");
    word.insert(word.end(), count, s);
    placed += count;
  }
  if (placed != n) throw std::invalid_argument("canonical_state_word: counts do not sum to n");
  return word;
}

struct SpreadReport {
  double max_ratio = 0.0;
  bool within_bound = true;
  std::size_t worst_message = 0;
};

// Post-hoc check of the codebook-spread property: for every reference
// codeword and state word, the number of codewords sharing any joint type
// with it must stay below 3 (n+1)^{|X|} 2^{n max(0, R - I(XS;X'))}.
inline SpreadReport check_spread(const DiCode& code, double rate, std::size_t extra_state_words = 2,
                                 std::uint64_t seed = 17) {
  SpreadReport rep;
  std::size_t n = code.n, ax = code.x_size(), as = code.s_size();
  std::vector<std::vector<std::size_t>> state_words{canonical_state_word(code.p_s, n)};
  Rng rng(seed);
  TypeVector s_type(empirical_type(state_words[0], as));
  for (std::size_t i = 0; i < extra_state_words; ++i)
    state_words.push_back(sample_type_class(s_type, rng));

  double poly = 3.0 * std::pow(static_cast<double>(n + 1), static_cast<double>(ax));
  for (std::size_t mp = 0; mp < code.size(); ++mp) {
    const auto& x = code.codebook[mp];
    for (const auto& s : state_words) {
      std::map<std::vector<std::size_t>, std::size_t> counts_by_type;
      for (std::size_t m = 0; m < code.size(); ++m) {
        std::vector<std::span<const std::size_t>> seqs{x, code.codebook[m], s};
        std::vector<std::size_t> shape{ax, ax, as};
        auto jt = joint_type(seqs, shape);
        ++counts_by_type[jt.counts];
      }
      for (const auto& [counts, count] : counts_by_type) {
        // I(XS; X') of the empirical joint type, axes (x, x', s)
        std::vector<double> probs(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i)
          probs[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
        JointPmf jt({ax, ax, as}, std::move(probs));
        double i_xs_xp = mutual_information(group_axes(jt, {{0, 2}, {1}}));
        double ceiling = poly * std::exp2(static_cast<double>(n) * std::max(0.0, rate - i_xs_xp));
        double ratio = static_cast<double>(count) / ceiling;
        if (ratio > rep.max_ratio) {
          rep.max_ratio = ratio;
          rep.worst_message = mp;
        }
      }
    }
  }
  rep.within_bound = rep.max_ratio <= 1.0;
  return rep;
}

// Spread-checked construction: rebuild with a fresh substream when the
// spread bound is violated, up to max_attempts.
inline DiCode make_di_code(const TypeVector& t, std::size_t m, Pmf p_s, double eps, double delta,
                           std::uint64_t seed, std::size_t max_attempts = 32) {
  Rng root(seed);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Rng sub = root.fork(attempt);
    DiCode code(build_codebook(t, m, sub), t, p_s, eps, delta);
    if (check_spread(code, code.rate()).within_bound) return code;
  }
  throw std::runtime_error("make_di_code: spread bound violated after all attempts");
}

enum class ErrorMethod { kExact, kMonteCarlo };

struct ErrorReport {
  double missed_id = 0.0;
  double false_id = 0.0;
  ErrorMethod method = ErrorMethod::kExact;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double half_width = 0.0;  // Wilson 95%, zero for exact enumeration
};

// 95% Wilson score half-width for k successes in t trials.
inline double wilson_half_width(std::uint64_t k, std::uint64_t t) {
  if (t == 0) return 1.0;
  double z = 1.959963984540054;
  double nt = static_cast<double>(t), ph = static_cast<double>(k) / nt;
  double denom = 1.0 + z * z / nt;
  double spread = z * std::sqrt(ph * (1.0 - ph) / nt + z * z / (4.0 * nt * nt)) / denom;
  return spread;
}

struct ExactErrorTable {
  std::vector<double> missed;                 // e(m|m)
  std::vector<std::vector<double>> false_id;  // e(m'|m), indexed [m][m']
  double worst_missed = 0.0;
  double worst_false = 0.0;
};

// Evaluates the identification rule against a state-indexed channel
// W(y | x, s) (rows x * |S| + s). Joint-type verdicts for the erasure set
// are memoized, so one evaluator should be reused across messages and
// outputs.
class IdentificationEvaluator {
 public:
  IdentificationEvaluator(DiCode code, Dmc w_xs)
      : code_(std::move(code)), w_(std::move(w_xs)), d_joint_({1}, {1.0}) {
    if (w_.in_size() != code_.x_size() * code_.s_size())
      throw std::invalid_argument("IdentificationEvaluator: channel rows != |X| * |S|");
    std::size_t ax = code_.x_size(), as = code_.s_size(), ys = w_.out_size();
    std::vector<double> v(ax * ys, 0.0);
    for (std::size_t x = 0; x < ax; ++x)
      for (std::size_t s = 0; s < as; ++s)
        for (std::size_t y = 0; y < ys; ++y) v[x * ys + y] += code_.p_s[s] * w_(y, x * as + s);
    v_rows_ = v;
    std::vector<double> joint(ax * ys);
    for (std::size_t x = 0; x < ax; ++x)
      for (std::size_t y = 0; y < ys; ++y) joint[x * ys + y] = code_.p[x] * v[x * ys + y];
    d_joint_ = JointPmf({ax, ys}, std::move(joint));
    s_target_.resize(as);
    for (std::size_t s = 0; s < as; ++s) {
      double t = code_.p_s[s] * static_cast<double>(code_.n);
      s_target_[s] = static_cast<std::size_t>(std::llround(t));
      if (std::abs(t - static_cast<double>(s_target_[s])) > 1e-6)
        throw std::invalid_argument("IdentificationEvaluator: p_s is not an n-type");
    }
  }

  const DiCode& code() const { return code_; }
  const Dmc& channel() const { return w_; }
  std::size_t out_size() const { return w_.out_size(); }

  // g(m', y): inside the typical shell of m' and not explained by any
  // competing codeword.
  bool identify(std::size_t m_prime, std::span<const std::size_t> y) const {
    if (m_prime >= code_.size()) throw std::invalid_argument("identify: message out of range");
    if (y.size() != code_.n) throw std::invalid_argument("identify: output length mismatch");
    if (!is_conditionally_typical(y, code_.codebook[m_prime], d_joint_, code_.eps)) return false;
    for (std::size_t mt = 0; mt < code_.size(); ++mt) {
      if (mt == m_prime) continue;
      if (erased_by(m_prime, mt, y)) return false;
    }
    return true;
  }

  ErrorReport exact_errors(std::size_t m, std::size_t m_prime, std::span<const std::size_t> s_word,
                           std::size_t budget = 2'000'000) const {
    check_words(m, m_prime, s_word);
    ensure_budget(budget);
    ErrorReport rep;
    rep.method = ErrorMethod::kExact;
    std::vector<std::size_t> y(code_.n, 0);
    double err = 0.0;
    for (;;) {
      double p = word_prob(code_.codebook[m], s_word, y);
      if (p > 0.0) {
        bool bit = identify(m_prime, y);
        if (m == m_prime ? !bit : bit) err += p;
      }
      if (!advance(y)) break;
    }
    (m == m_prime ? rep.missed_id : rep.false_id) = err;
    return rep;
  }

  // Full missed/false tables in one sweep of the output space; the verdict
  // bits per output word are shared across all sender messages.
  ExactErrorTable exact_error_table(std::span<const std::size_t> s_word,
                                    std::size_t budget = 2'000'000) const {
    check_words(0, 0, s_word);
    ensure_budget(budget);
    std::size_t m_count = code_.size();
    ExactErrorTable table;
    table.missed.assign(m_count, 0.0);
    table.false_id.assign(m_count, std::vector<double>(m_count, 0.0));
    std::vector<std::size_t> y(code_.n, 0);
    std::vector<char> bits(m_count);
    std::vector<double> weight(m_count);
    for (;;) {
      for (std::size_t mp = 0; mp < m_count; ++mp) bits[mp] = identify(mp, y) ? 1 : 0;
      for (std::size_t m = 0; m < m_count; ++m) weight[m] = word_prob(code_.codebook[m], s_word, y);
      for (std::size_t m = 0; m < m_count; ++m) {
        if (weight[m] == 0.0) continue;
        if (!bits[m]) table.missed[m] += weight[m];
        for (std::size_t mp = 0; mp < m_count; ++mp)
          if (mp != m && bits[mp]) table.false_id[m][mp] += weight[m];
      }
      if (!advance(y)) break;
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      table.worst_missed = std::max(table.worst_missed, table.missed[m]);
      for (std::size_t mp = 0; mp < m_count; ++mp)
        if (mp != m) table.worst_false = std::max(table.worst_false, table.false_id[m][mp]);
    }
    return table;
  }

  ErrorReport monte_carlo_errors(std::size_t m, std::size_t m_prime,
                                 std::span<const std::size_t> s_word, std::uint64_t trials,
                                 std::uint64_t seed) const {
    check_words(m, m_prime, s_word);
    if (trials == 0) throw std::invalid_argument("monte_carlo_errors: need at least one trial");
    Rng rng(seed);
    const auto& x = code_.codebook[m];
    std::vector<std::size_t> y(code_.n);
    std::uint64_t errors = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      for (std::size_t i = 0; i < code_.n; ++i)
        y[i] = rng.discrete(w_.row(x[i] * code_.s_size() + s_word[i]));
      bool bit = identify(m_prime, y);
      if (m == m_prime ? !bit : bit) ++errors;
    }
    ErrorReport rep;
    rep.method = ErrorMethod::kMonteCarlo;
    rep.trials = trials;
    rep.seed = seed;
    rep.half_width = wilson_half_width(errors, trials);
    double est = static_cast<double>(errors) / static_cast<double>(trials);
    (m == m_prime ? rep.missed_id : rep.false_id) = est;
    return rep;
  }

 private:
  void check_words(std::size_t m, std::size_t m_prime, std::span<const std::size_t> s_word) const {
    if (m >= code_.size() || m_prime >= code_.size())
      throw std::invalid_argument("error evaluation: message out of range");
    if (s_word.size() != code_.n)
      throw std::invalid_argument("error evaluation: state word length mismatch");
    for (std::size_t s : s_word)
      if (s >= code_.s_size()) throw std::invalid_argument("error evaluation: state letter out of range");
  }

  void ensure_budget(std::size_t budget) const {
    double cells = std::pow(static_cast<double>(w_.out_size()), static_cast<double>(code_.n));
    if (cells > static_cast<double>(budget))
      throw std::runtime_error(
          "exact enumeration budget exceeded (|Y|^n too large); use monte_carlo_errors");
  }

  double word_prob(std::span<const std::size_t> x, std::span<const std::size_t> s_word,
                   std::span<const std::size_t> y) const {
    double p = 1.0;
    std::size_t as = code_.s_size();
    for (std::size_t i = 0; i < y.size(); ++i) {
      p *= w_(y[i], x[i] * as + s_word[i]);
      if (p == 0.0) return 0.0;
    }
    return p;
  }

  bool advance(std::vector<std::size_t>& y) const {
    std::size_t ys = w_.out_size();
    for (std::size_t d = y.size(); d-- > 0;) {
      if (++y[d] < ys) return true;
      y[d] = 0;
    }
    return false;
  }

  // Is y erased for m' by competitor mt: does some completion of the joint
  // type of (x_{m'}, x_{mt}, y) with an exact-type state word fall inside
  // the relaxed confusability set?
  bool erased_by(std::size_t m_prime, std::size_t mt, std::span<const std::size_t> y) const {
    std::size_t ax = code_.x_size(), ys = w_.out_size();
    std::vector<std::size_t> counts(ax * ax * ys, 0);
    const auto& xp = code_.codebook[m_prime];
    const auto& xt = code_.codebook[mt];
    for (std::size_t i = 0; i < code_.n; ++i)
      ++counts[(xp[i] * ax + xt[i]) * ys + y[i]];
    auto [it, inserted] = e_cache_.try_emplace(counts, false);
    if (inserted) it->second = completion_in_q(counts);
    return it->second;
  }

  bool completion_in_q(const std::vector<std::size_t>& counts3) const {
    std::size_t ax = code_.x_size(), as = code_.s_size(), ys = w_.out_size();
    double n = static_cast<double>(code_.n);
    // both pair laws must match P x V exactly (T_0 membership)
    for (std::size_t x = 0; x < ax; ++x)
      for (std::size_t y = 0; y < ys; ++y) {
        double cxy = 0.0, cxpy = 0.0;
        for (std::size_t b = 0; b < ax; ++b) {
          cxy += static_cast<double>(counts3[(x * ax + b) * ys + y]);
          cxpy += static_cast<double>(counts3[(b * ax + x) * ys + y]);
        }
        double target = n * code_.p[x] * v_rows_[x * ys + y];
        if (std::abs(cxy - target) > 1e-6 || std::abs(cxpy - target) > 1e-6) return false;
      }

    // split each cell across state letters, respecting the exact state type
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < counts3.size(); ++c)
      if (counts3[c] > 0) cells.push_back(c);

    if (as == 1 || *std::max_element(s_target_.begin(), s_target_.end()) == code_.n) {
      // single admissible split: all mass on the one supported state letter
      std::size_t s0 = 0;
      for (std::size_t s = 0; s < as; ++s)
        if (s_target_[s] == code_.n) s0 = s;
      std::vector<double> counts4(ax * ax * as * ys, 0.0);
      for (std::size_t c : cells) {
        std::size_t y = c % ys, rest = c / ys;
        std::size_t xt = rest % ax, x = rest / ax;
        counts4[((x * ax + xt) * as + s0) * ys + y] = static_cast<double>(counts3[c]) / n;
      }
      return relaxation_ok(counts4, ax, as, ys);
    }

    std::vector<std::size_t> remaining = s_target_;
    std::vector<double> counts4(ax * ax * as * ys, 0.0);
    return split_cells(counts3, cells, 0, remaining, counts4, ax, as, ys);
  }

  bool split_cells(const std::vector<std::size_t>& counts3, const std::vector<std::size_t>& cells,
                   std::size_t pos, std::vector<std::size_t>& remaining,
                   std::vector<double>& counts4, std::size_t ax, std::size_t as,
                   std::size_t ys) const {
    if (pos == cells.size()) {
      for (std::size_t r : remaining)
        if (r != 0) return false;
      return relaxation_ok(counts4, ax, as, ys);
    }
    std::size_t c = cells[pos];
    std::size_t total = counts3[c];
    std::size_t y = c % ys, rest = c / ys;
    std::size_t xt = rest % ax, x = rest / ax;
    double n = static_cast<double>(code_.n);

    // compositions of `total` over the state letters, pruned by the
    // remaining per-letter budgets
    std::vector<std::size_t> split(as, 0);
    auto rec = [&](auto&& self, std::size_t s, std::size_t left) -> bool {
      if (s + 1 == as) {
        if (left > remaining[s]) return false;
        split[s] = left;
        for (std::size_t t = 0; t < as; ++t) {
          remaining[t] -= split[t];
          counts4[((x * ax + xt) * as + t) * ys + y] = static_cast<double>(split[t]) / n;
        }
        bool ok = split_cells(counts3, cells, pos + 1, remaining, counts4, ax, as, ys);
        for (std::size_t t = 0; t < as; ++t) {
          remaining[t] += split[t];
          counts4[((x * ax + xt) * as + t) * ys + y] = 0.0;
        }
        return ok;
      }
      std::size_t cap = std::min(left, remaining[s]);
      for (std::size_t take = 0; take <= cap; ++take) {
        split[s] = take;
        if (self(self, s + 1, left - take)) return true;
      }
      return false;
    };
    return rec(rec, 0, total);
  }

  bool relaxation_ok(const std::vector<double>& counts4, std::size_t ax, std::size_t as,
                     std::size_t ys) const {
    // I(X; Y | X' S) = H(X X' S) + H(X' S Y) - H(X' S) - H(X X' S Y)
    std::vector<double> mxxs(ax * ax * as, 0.0), mxsy(ax * as * ys, 0.0), mxs(ax * as, 0.0);
    for (std::size_t x = 0; x < ax; ++x)
      for (std::size_t xt = 0; xt < ax; ++xt)
        for (std::size_t s = 0; s < as; ++s)
          for (std::size_t y = 0; y < ys; ++y) {
            double v = counts4[((x * ax + xt) * as + s) * ys + y];
            mxxs[(x * ax + xt) * as + s] += v;
            mxsy[(xt * as + s) * ys + y] += v;
            mxs[xt * as + s] += v;
          }
    double i_rel = neg_sum_xlog2x(mxxs) + neg_sum_xlog2x(mxsy) - neg_sum_xlog2x(mxs) -
                   neg_sum_xlog2x(counts4);
    return i_rel <= code_.delta + 1e-9;
  }

  DiCode code_;
  Dmc w_;
  std::vector<double> v_rows_;  // averaged channel V(y|x), flat x * |Y| + y
  JointPmf d_joint_;
  std::vector<std::size_t> s_target_;
  mutable std::map<std::vector<std::size_t>, bool> e_cache_;
};

inline bool identify(const DiCode& code, const Dmc& w_xs, std::size_t m_prime,
                     std::span<const std::size_t> y) {
  return IdentificationEvaluator(code, w_xs).identify(m_prime, y);
}

inline ErrorReport exact_errors(const DiCode& code, const Dmc& w_xs,
                                std::span<const std::size_t> s_word, std::size_t m,
                                std::size_t m_prime, std::size_t budget = 2'000'000) {
  return IdentificationEvaluator(code, w_xs).exact_errors(m, m_prime, s_word, budget);
}

inline ErrorReport monte_carlo_errors(const DiCode& code, const Dmc& w_xs,
                                      std::span<const std::size_t> s_word, std::size_t m,
                                      std::size_t m_prime, std::uint64_t trials,
                                      std::uint64_t seed) {
  return IdentificationEvaluator(code, w_xs).monte_carlo_errors(m, m_prime, s_word, trials, seed);
}

struct DuplicateConverseReport {
  std::size_t m = 0;        // sender's message
  std::size_t m_dup = 0;    // duplicate it collides with
  double false_id = 0.0;    // e(m_dup | m)
  double missed_id = 0.0;   // e(m_dup | m_dup)
  double sum = 0.0;         // always exactly 1: the two events partition Y^n
  double max_error = 0.0;
};

// With a duplicated codeword, the false-identification and missed-
// identification probabilities are complementary, so one of them is at
// least one half and no rate is achievable.
inline DuplicateConverseReport duplicate_converse_demo(const DiCode& code, const Dmc& w_xs,
                                                       std::span<const std::size_t> s_word,
                                                       std::size_t budget = 2'000'000) {
  std::optional<std::pair<std::size_t, std::size_t>> dup;
  for (std::size_t i = 0; i < code.size() && !dup; ++i)
    for (std::size_t j = i + 1; j < code.size(); ++j)
      if (code.codebook[i] == code.codebook[j]) {
        dup = {i, j};
        break;
      }
  if (!dup) throw std::invalid_argument("duplicate_converse_demo: no duplicate codeword present");

  IdentificationEvaluator eval(code, w_xs);
  auto [m, m_dup] = *dup;
  ErrorReport false_rep = eval.exact_errors(m, m_dup, s_word, budget);
  ErrorReport missed_rep = eval.exact_errors(m_dup, m_dup, s_word, budget);
  DuplicateConverseReport rep;
  rep.m = m;
  rep.m_dup = m_dup;
  rep.false_id = false_rep.false_id;
  rep.missed_id = missed_rep.missed_id;
  rep.sum = rep.false_id + rep.missed_id;
  rep.max_error = std::max(rep.false_id, rep.missed_id);
  return rep;
}

// Time-division average-error construction: sender k transmits a base
// codeword inside its slice and an idle (minimum-cost) letter elsewhere;
// messages beyond the base size wrap around modulo M_k.
struct DiaCode {
  std::vector<DiCode> base;
  std::vector<std::size_t> m_big;
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<std::size_t> idle;
  std::size_t n = 0;

  std::size_t num_senders() const { return base.size(); }

  std::vector<std::size_t> encode(std::size_t k, std::size_t message) const {
    if (k >= base.size()) throw std::invalid_argument("DiaCode::encode: bad sender");
    if (message >= m_big[k]) throw std::invalid_argument("DiaCode::encode: message out of range");
    std::vector<std::size_t> word(n, idle[k]);
    const auto& cw = base[k].codebook[message % base[k].size()];
    std::copy(cw.begin(), cw.end(), word.begin() + static_cast<long>(slots[k].first));
    return word;
  }
};

inline DiaCode dia_build(std::vector<DiCode> base, std::vector<std::size_t> m_big, std::size_t n,
                         const CostSpec& costs) {
  std::size_t k_count = base.size();
  if (k_count == 0 || m_big.size() != k_count)
    throw std::invalid_argument("dia_build: need one base code and target size per sender");
  std::size_t slot_len = n / k_count;
  DiaCode dia;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (base[k].size() < 2) throw std::invalid_argument("dia_build: zero-rate base code");
    if (base[k].n != slot_len)
      throw std::invalid_argument("dia_build: base blocklength must be floor(n/K)");
    if (m_big[k] == 0) throw std::invalid_argument("dia_build: empty message set");
    const auto& phi = costs.phi.at(k);
    std::size_t idle = static_cast<std::size_t>(
        std::min_element(phi.begin(), phi.end()) - phi.begin());
    dia.idle.push_back(idle);
    dia.slots.push_back({k * slot_len, (k + 1) * slot_len});
  }
  dia.base = std::move(base);
  dia.m_big = std::move(m_big);
  dia.n = n;
  return dia;
}

struct DiaErrorReport {
  std::vector<double> missed_per_sender;  // exact, worst over base messages
  double joint_missed = 0.0;              // 1 - prod(1 - missed_k)
  std::vector<double> false_per_sender;   // Monte Carlo averages over competing messages
  std::vector<double> false_half_width;
  double max_false = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// Per-sender slot channels: the other senders sit at their idle letters
// during sender k's slice.
inline Dmc dia_slot_channel(const DiaCode& dia, const KMac& w, std::size_t k) {
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < dia.num_senders(); ++j)
    if (j != k) others.push_back(dia.idle[j]);
  return partial_channel(w, k, others);
}

// Missed identification is evaluated exactly (it coincides with the base
// code's, message by message); the average false identification under
// uniform competing messages is estimated by Monte Carlo.
inline DiaErrorReport dia_errors(const DiaCode& dia, const KMac& w, std::uint64_t trials,
                                 std::uint64_t seed, std::size_t budget = 2'000'000) {
  DiaErrorReport rep;
  rep.trials = trials;
  rep.seed = seed;
  Rng root(seed);
  for (std::size_t k = 0; k < dia.num_senders(); ++k) {
    Dmc slot = dia_slot_channel(dia, w, k);
    // view the slot channel with a singleton state alphabet
    DiCode base = dia.base[k];
    if (base.s_size() != 1) {
      DiCode folded(base.codebook, base.type, Pmf({1.0}), base.eps, base.delta, true);
      base = std::move(folded);
    }
    IdentificationEvaluator eval(base, slot);
    std::vector<std::size_t> s_word(base.n, 0);
    ExactErrorTable table = eval.exact_error_table(s_word, budget);
    rep.missed_per_sender.push_back(table.worst_missed);

    Rng sub = root.fork(k);
    std::uint64_t hits = 0;
    std::size_t m_a = dia.m_big[k], m_base = base.size();
    std::vector<std::size_t> y(base.n);
    for (std::uint64_t t = 0; t < trials; ++t) {
      std::size_t m_prime = static_cast<std::size_t>(sub.below(m_a));
      std::size_t m = static_cast<std::size_t>(sub.below(m_a - 1));
      if (m >= m_prime) ++m;  // uniform over competitors != m_prime
      const auto& x = base.codebook[m % m_base];
      for (std::size_t i = 0; i < base.n; ++i) y[i] = sub.discrete(slot.row(x[i]));
      if (eval.identify(m_prime % m_base, y)) ++hits;
    }
    double est = static_cast<double>(hits) / static_cast<double>(trials);
    rep.false_per_sender.push_back(est);
    rep.false_half_width.push_back(wilson_half_width(hits, trials));
    rep.max_false = std::max(rep.max_false, est);
  }
  double keep = 1.0;
  for (double m : rep.missed_per_sender) keep *= 1.0 - m;
  rep.joint_missed = 1.0 - keep;
  return rep;
}

}  // namespace dimac
