// Command-line driver: channel-spec analysis, rate-region CSV export,
// small-blocklength identification simulations, and brute-force oracle
// cross-checks. Output is line-oriented key=value; exit codes are 0 on
// success, 1 when an oracle or acceptance check fails, 2 on input errors.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimac/dimac.hpp"
#include "dimac/oracles.hpp"

namespace {

using namespace dimac;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.empty()) throw std::invalid_argument("empty list: '" + csv + "'");
  return vals;
}

std::vector<std::size_t> parse_letters(const std::string& csv) {
  std::vector<std::size_t> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stoul(tok));
  return vals;
}

ChannelSpecFile load_spec(const std::string& path) {
  ChannelSpecFile spec = load_channel_spec(path);
  if (!spec.costs) spec.costs = CostSpec::hamming_free(spec.channel.in_sizes());
  return spec;
}

std::size_t checked_sender(const ChannelSpecFile& spec, std::size_t sender) {
  if (sender < 1 || sender > spec.channel.num_senders())
    throw std::invalid_argument("--sender must be in 1.." +
                                std::to_string(spec.channel.num_senders()));
  return sender - 1;
}

TypeVector type_from_pmf(const Pmf& p, std::size_t n) {
  std::vector<std::size_t> counts(p.size());
  std::size_t placed = 0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double target = p[x] * static_cast<double>(n);
    counts[x] = static_cast<std::size_t>(std::llround(target));
    if (std::abs(target - static_cast<double>(counts[x])) > 1e-6)
      throw std::invalid_argument("input type is not an n-type at n=" + std::to_string(n));
    placed += counts[x];
  }
  if (placed != n) throw std::invalid_argument("input type counts do not sum to n");
  return TypeVector(std::move(counts));
}

TypeVector balanced_type(std::size_t a, std::size_t n) {
  if (n % a != 0)
    throw std::invalid_argument("blocklength " + std::to_string(n) +
                                " is not divisible by the alphabet size; pass --type");
  return TypeVector(std::vector<std::size_t>(a, n / a));
}

void print_injectivity(const std::string& prefix, const InjectivityReport& rep) {
  std::cout << prefix << ".injective=" << fmt_bool(rep.injective) << '\n';
  std::cout << prefix << ".min_row_distance=" << fmt(rep.min_row_distance) << '\n';
  if (rep.witness)
    std::cout << prefix << ".witness=" << rep.witness->first << ',' << rep.witness->second << '\n';
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
  std::string spec_path;
  std::size_t sender = 1;
  std::string fixed;
  std::string mixture;
};

int run_analyze(const AnalyzeArgs& a) {
  ChannelSpecFile spec = load_spec(a.spec_path);
  const KMac& w = spec.channel;
  std::size_t k = checked_sender(spec, a.sender);
  std::cout << "sender=" << a.sender << '\n';

  if (!a.fixed.empty()) {
    auto others = parse_letters(a.fixed);
    Dmc part = partial_channel(w, k, others);
    print_injectivity("partial", injectivity(part));
    return 0;
  }
  if (!a.mixture.empty()) {
    Pmf mix(parse_doubles(a.mixture));
    Dmc avg = averaged_partial_channel(w, k, mix);
    print_injectivity("averaged", injectivity(avg));
    return 0;
  }

  // default: every fixed assignment of the other senders, then the uniform
  // mixture
  std::size_t s_n = detail::others_product_size(w, k);
  for (std::size_t s = 0; s < s_n; ++s) {
    auto others = detail::unpack_others(w, k, s);
    Dmc part = partial_channel(w, k, others);
    print_injectivity("partial." + std::to_string(s), injectivity(part));
  }
  Dmc avg = averaged_partial_channel(w, k, Pmf::uniform(s_n));
  print_injectivity("averaged", injectivity(avg));
  return 0;
}

// ---- region --------------------------------------------------------------

struct RegionArgs {
  std::string spec_path;
  std::string kind = "di-upper";
  std::size_t grid = 200;
  double delta = 0.0;
  std::string out;
};

int run_region(const RegionArgs& a) {
  ChannelSpecFile spec = load_spec(a.spec_path);
  const KMac& w = spec.channel;
  const CostSpec& costs = *spec.costs;

  RateRegion region;
  if (a.kind == "di-upper")
    region = ru_region(w, costs);
  else if (a.kind == "di-lower")
    region = rl_region(w, costs, a.grid, a.delta);
  else if (a.kind == "transmission")
    region = transmission_region(w, costs, a.grid);
  else
    throw std::invalid_argument("--kind must be di-upper, di-lower, or transmission");

  std::cout << "kind=" << a.kind << '\n';
  for (std::size_t i = 0; i < region.axis_bounds.size(); ++i)
    std::cout << "axis_cap." << (i + 1) << '=' << fmt(region.axis_bounds[i]) << '\n';
  for (const auto& [coef, cap] : region.sum_bounds) {
    (void)coef;
    std::cout << "sum_cap=" << fmt(cap) << '\n';
  }
  std::cout << "boundary_points=" << region.boundary.size() << '\n';

  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw std::runtime_error("cannot write " + a.out);
    f << "r1,r2\n";
    for (const auto& v : export_region(region)) f << fmt(v[0]) << ',' << fmt(v[1]) << '\n';
    std::cout << "out=" << a.out << '\n';
  }
  return 0;
}

// ---- simulate ------------------------------------------------------------

struct SimulateArgs {
  std::string spec_path;
  std::size_t sender = 1;
  std::vector<std::size_t> ns;
  std::optional<double> rate;
  std::optional<std::size_t> messages;
  double eps = 0.1;
  double delta = 0.05;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  bool exact = false;
  bool dia = false;
  bool duplicate_demo = false;
  bool randomize_state = false;
  std::string state;
  std::string type;
  std::string out;
};

std::size_t message_count(const SimulateArgs& a, std::size_t n) {
  std::size_t m = 0;
  if (a.messages)
    m = *a.messages;
  else if (a.rate)
    m = static_cast<std::size_t>(std::llround(std::exp2(a.rate.value() * static_cast<double>(n))));
  else
    throw std::invalid_argument("pass --rate or --messages");
  if (m < 2) throw std::invalid_argument("need at least 2 messages; raise --rate or --messages");
  return m;
}

int run_simulate(const SimulateArgs& a, std::ostream& os) {
  ChannelSpecFile spec = load_spec(a.spec_path);
  const KMac& w = spec.channel;
  std::vector<std::size_t> ns = a.ns.empty() ? std::vector<std::size_t>{8} : a.ns;

  if (a.dia) {
    std::size_t k_count = w.num_senders();
    for (std::size_t n : ns) {
      if (n % k_count != 0)
        throw std::invalid_argument("dia: blocklength must be divisible by the sender count");
      std::size_t slot = n / k_count;
      std::size_t m_base = message_count(a, slot);
      std::vector<DiCode> base;
      std::vector<std::size_t> m_big;
      for (std::size_t k = 0; k < k_count; ++k) {
        TypeVector t = balanced_type(w.in_size(k), slot);
        base.push_back(make_di_code(t, m_base, Pmf({1.0}), a.eps, a.delta, a.seed + k));
        m_big.push_back(4 * m_base);
      }
      DiaCode code = dia_build(std::move(base), std::move(m_big), n, *spec.costs);
      DiaErrorReport rep = dia_errors(code, w, a.trials, a.seed);
      os << "n=" << n << " mode=dia slot=" << slot << " base_m=" << m_base
         << " m_big=" << 4 * m_base << " trials=" << rep.trials;
      for (std::size_t k = 0; k < k_count; ++k)
        os << " missed." << (k + 1) << '=' << fmt(rep.missed_per_sender[k]);
      os << " joint_missed=" << fmt(rep.joint_missed);
      for (std::size_t k = 0; k < k_count; ++k)
        os << " false." << (k + 1) << '=' << fmt(rep.false_per_sender[k]) << " false_hw."
           << (k + 1) << '=' << fmt(rep.false_half_width[k]);
      os << " max_false=" << fmt(rep.max_false) << '\n';
    }
    return 0;
  }

  std::size_t k = checked_sender(spec, a.sender);
  Dmc w_xs = detail::state_indexed_channel(w, k);
  std::size_t s_n = detail::others_product_size(w, k);
  Pmf p_s = a.state.empty() ? Pmf::point_mass(s_n, 0) : Pmf(parse_doubles(a.state));

  for (std::size_t n : ns) {
    std::size_t m = message_count(a, n);
    TypeVector t = a.type.empty() ? balanced_type(w.in_size(k), n)
                                  : type_from_pmf(Pmf(parse_doubles(a.type)), n);

    std::vector<std::size_t> s_word = canonical_state_word(p_s, n);
    if (a.randomize_state) {
      Rng srng(a.seed ^ 0x57a7eull);
      s_word = sample_type_class(empirical_type(s_word, s_n), srng);
    }

    if (a.duplicate_demo) {
      auto words = build_codebook(t, m, a.seed);
      words[1 % words.size()] = words[0];
      DiCode code(std::move(words), t, p_s, a.eps, a.delta, true);
      DuplicateConverseReport rep = duplicate_converse_demo(code, w_xs, s_word);
      os << "n=" << n << " mode=duplicate m=" << rep.m << " m_dup=" << rep.m_dup
         << " false_id=" << fmt(rep.false_id) << " missed_id=" << fmt(rep.missed_id)
         << " sum=" << fmt(rep.sum) << " max_error=" << fmt(rep.max_error) << '\n';
      continue;
    }

    DiCode code = make_di_code(t, m, p_s, a.eps, a.delta, a.seed);
    IdentificationEvaluator eval(code, w_xs);
    if (a.exact) {
      ExactErrorTable table = eval.exact_error_table(s_word);
      os << "n=" << n << " M=" << m << " method=exact missed_worst=" << fmt(table.worst_missed)
         << " false_worst=" << fmt(table.worst_false)
         << " total=" << fmt(table.worst_missed + table.worst_false) << '\n';
    } else {
      ErrorReport missed = eval.monte_carlo_errors(0, 0, s_word, a.trials, a.seed);
      ErrorReport false_rep = eval.monte_carlo_errors(0, 1 % m, s_word, a.trials, a.seed + 1);
      os << "n=" << n << " M=" << m << " method=mc trials=" << a.trials
         << " missed_est=" << fmt(missed.missed_id) << " missed_hw=" << fmt(missed.half_width)
         << " false_est=" << fmt(false_rep.false_id) << " false_hw=" << fmt(false_rep.half_width)
         << '\n';
    }
  }
  return 0;
}

// ---- oracle --------------------------------------------------------------

struct OracleArgs {
  std::string suite = "all";
  std::uint64_t seed = 0x0dac5eed;
};

bool suite_confusability_binary(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int it = 0; it < 60; ++it) {
    auto inst = random_binary_instance(rng, 1 + rng.below(3), 2 + rng.below(2), 0.0);
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, 0.0);
    double got = min_confusability(prob).value;
    double expect = oracle_binary_confusability(inst.p_x, prob.averaged(inst.p_s));
    worst = std::max(worst, std::abs(got - expect));
  }
  std::cout << "suite=confusability-binary worst_gap=" << fmt(worst)
            << " pass=" << fmt_bool(worst <= 1e-4) << '\n';
  return worst <= 1e-4;
}

bool suite_entropy_cost() {
  double worst = 0.0;
  std::vector<double> phi2{0.0, 1.0}, phi3{0.0, 1.0, 2.0}, skew{0.0, 0.5, 3.0};
  for (double cap : {0.1, 0.3, 0.5})
    worst = std::max(worst, std::abs(max_entropy_under_cost(2, phi2, cap).h_star -
                                     oracle_max_entropy_grid(2, phi2, cap)));
  for (double cap : {0.3, 0.6, 1.1})
    worst = std::max(worst, std::abs(max_entropy_under_cost(3, phi3, cap).h_star -
                                     oracle_max_entropy_grid(3, phi3, cap)));
  for (double cap : {0.2, 1.0})
    worst = std::max(worst, std::abs(max_entropy_under_cost(3, skew, cap).h_star -
                                     oracle_max_entropy_grid(3, skew, cap)));
  std::cout << "suite=entropy-cost worst_gap=" << fmt(worst)
            << " pass=" << fmt_bool(worst <= 1e-4) << '\n';
  return worst <= 1e-4;
}

bool suite_type_partition() {
  bool ok = true;
  for (std::size_t a = 2; a <= 3; ++a)
    for (std::size_t n = 1; n <= 12; ++n) ok = ok && oracle_type_partition(n, a);
  std::cout << "suite=type-partition pass=" << fmt_bool(ok) << '\n';
  return ok;
}

bool suite_s_reduction(std::uint64_t seed) {
  Rng rng(seed);
  double worst_gap = 0.0, worst_res = 0.0;
  for (int it = 0; it < 4; ++it) {
    auto inst = random_binary_instance(rng, 2 + rng.below(2), 2, 0.0);
    double delta = (it % 2 == 0) ? 0.0 : 0.05;
    ConfusabilityProblem prob(inst.p_x, inst.p_s, inst.w, delta);
    double prod = min_confusability(prob).value;
    FullJointSearchResult full = oracle_full_joint_search(prob, seed + 7 * it);
    worst_gap = std::max(worst_gap, std::abs(full.value - prod));
    worst_res = std::max(worst_res, full.residual);
  }
  bool ok = worst_gap <= 1e-3 && worst_res <= 1e-4;
  std::cout << "suite=s-reduction worst_gap=" << fmt(worst_gap)
            << " worst_residual=" << fmt(worst_res) << " pass=" << fmt_bool(ok) << '\n';
  return ok;
}

bool suite_exact_vs_mc(std::uint64_t seed) {
  bool ok = true;
  for (std::size_t cfg = 0; cfg < 2; ++cfg) {
    TypeVector t(std::vector<std::size_t>{4, 4});
    DiCode code = make_di_code(t, 4, Pmf({1.0}), 2.0 + static_cast<double>(cfg), 0.05, seed + cfg);
    Dmc w(2, 2, {0.9, 0.1, 0.1, 0.9});
    IdentificationEvaluator eval(code, w);
    std::vector<std::size_t> s_word(8, 0);
    ExactErrorTable table = eval.exact_error_table(s_word);
    ErrorReport mc = eval.monte_carlo_errors(0, 0, s_word, 100000, seed + 11 * cfg);
    ok = ok && std::abs(mc.missed_id - table.missed[0]) <= 4.0 * mc.half_width;
  }
  std::cout << "suite=exact-vs-mc pass=" << fmt_bool(ok) << '\n';
  return ok;
}

int run_oracle(const OracleArgs& a) {
  bool ok = true;
  bool any = false;
  auto want = [&](const char* name) { return a.suite == "all" || a.suite == name; };
  if (want("confusability-binary")) any = true, ok = suite_confusability_binary(a.seed) && ok;
  if (want("entropy-cost")) any = true, ok = suite_entropy_cost() && ok;
  if (want("type-partition")) any = true, ok = suite_type_partition() && ok;
  if (want("s-reduction")) any = true, ok = suite_s_reduction(a.seed) && ok;
  if (want("exact-vs-mc")) any = true, ok = suite_exact_vs_mc(a.seed) && ok;
  if (!any)
    throw std::invalid_argument(
        "--suite must be one of confusability-binary, entropy-cost, type-partition, "
        "s-reduction, exact-vs-mc, all");
  std::cout << "oracle_pass=" << fmt_bool(ok) << '\n';
  return ok ? 0 : 1;
}

// ---- emit ----------------------------------------------------------------

struct EmitArgs {
  std::string builtin;
  std::optional<double> q;
  std::string out;
};

int run_emit(const EmitArgs& a) {
  KMac w = detail::builtin_channel(a.builtin, a.q);
  ChannelSpecFile spec{std::move(w), std::nullopt, a.builtin, a.q};
  if (a.out.empty()) {
    std::cout << channel_spec_to_json(spec).dump(2) << '\n';
  } else {
    save_channel_spec(spec, a.out);
    std::cout << "out=" << a.out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic-identification bounds and simulations for discrete MACs"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  CLI::App* analyze = app.add_subcommand("analyze", "injectivity of partial/averaged channels");
  analyze->add_option("--spec", an.spec_path, "channel spec file")->required();
  analyze->add_option("--sender", an.sender, "sender index, 1-based");
  analyze->add_option("--fixed", an.fixed, "fixed letters of the other senders, comma list");
  analyze->add_option("--mixture", an.mixture, "mixture over the other senders, comma list");

  RegionArgs rg;
  CLI::App* region = app.add_subcommand("region", "rate-region bounds and CSV export");
  region->add_option("--spec", rg.spec_path, "channel spec file")->required();
  region->add_option("--kind", rg.kind, "di-upper | di-lower | transmission");
  region->add_option("--grid", rg.grid, "input-law grid resolution");
  region->add_option("--delta", rg.delta, "confusability relaxation");
  region->add_option("--out", rg.out, "boundary CSV path");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "identification-code error simulation");
  simulate->add_option("--spec", sim.spec_path, "channel spec file")->required();
  simulate->add_option("--sender", sim.sender, "sender index, 1-based");
  simulate->add_option("--n", sim.ns, "blocklengths (repeatable)");
  auto* rate_opt = simulate->add_option("--rate", sim.rate, "messages = 2^(n rate)");
  auto* msg_opt = simulate->add_option("--messages", sim.messages, "message count");
  rate_opt->excludes(msg_opt);
  msg_opt->excludes(rate_opt);
  simulate->add_option("--eps", sim.eps, "typicality band");
  simulate->add_option("--delta", sim.delta, "confusability relaxation");
  simulate->add_option("--trials", sim.trials, "Monte Carlo trials");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_flag("--exact", sim.exact, "exhaustive output enumeration");
  simulate->add_flag("--dia", sim.dia, "time-division average-error construction");
  simulate->add_flag("--duplicate-demo", sim.duplicate_demo, "force a duplicate codeword");
  simulate->add_flag("--randomize-state", sim.randomize_state, "sample the state word");
  simulate->add_option("--state", sim.state, "state type over the other senders, comma list");
  simulate->add_option("--type", sim.type, "input type, comma list");
  simulate->add_option("--out", sim.out, "also write the report to this path");

  OracleArgs orc;
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force cross-checks");
  oracle->add_option("--suite", orc.suite,
                     "confusability-binary | entropy-cost | type-partition | s-reduction | "
                     "exact-vs-mc | all");
  oracle->add_option("--seed", orc.seed, "random seed");

  EmitArgs em;
  CLI::App* emit = app.add_subcommand("emit", "write a builtin channel spec");
  emit->add_option("--builtin", em.builtin, "mod3_adder | mod2_adder | multiplier")->required();
  emit->add_option("--q", em.q, "noise parameter");
  emit->add_option("--out", em.out, "spec path (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(an);
    if (region->parsed()) return run_region(rg);
    if (simulate->parsed()) {
      if (sim.out.empty()) return run_simulate(sim, std::cout);
      std::ostringstream buf;
      int rc = run_simulate(sim, buf);
      std::ofstream f(sim.out);
      if (!f) throw std::runtime_error("cannot write " + sim.out);
      f << buf.str();
      std::cout << buf.str();
      return rc;
    }
    if (oracle->parsed()) return run_oracle(orc);
    if (emit->parsed()) return run_emit(em);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
