// leafprob: command-line front end for rooted trees with probabilities.
//
// Exit codes: 0 success, 1 invalid input, 2 a checked identity or bound failed.

#include "leafprob/bounds.hpp"
#include "leafprob/chain_rules.hpp"
#include "leafprob/converses.hpp"
#include "leafprob/experiments.hpp"
#include "leafprob/tree.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace leafprob;

constexpr int kExitInvalid = 1;
constexpr int kExitViolation = 2;
constexpr int kNodeWarningThreshold = 1'000'000;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void warn_if_large(const RootedTree& tree, std::string_view what) {
  if (tree.node_count() > kNodeWarningThreshold) {
    std::cerr << "warning: " << what << " has " << tree.node_count() << " nodes\n";
  }
}

Dms target_or_uniform(const std::string& pz_text, int m) {
  if (pz_text.empty()) return Dms::uniform(m);
  Dms pz = parse_dms(pz_text);
  if (pz.alphabet_size() != m) {
    throw Error(ErrorKind::TreeMismatch, "--pz has " + std::to_string(pz.alphabet_size()) +
                                             " entries, alphabet has " + std::to_string(m));
  }
  return pz;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  return out;
}

int run_analyze(const std::string& path, const std::string& pz_text) {
  const auto spec = load_tree_spec(path);
  const auto& tree = spec.tree;
  warn_if_large(tree, "tree");
  const int m = tree.alphabet_size();
  const Dms pz = target_or_uniform(pz_text, m);
  const auto tp = derive_probabilities(tree, spec.py);

  std::cout << "alphabet_size: " << m << "\nleaves: " << tree.leaf_count()
            << "\nbranching_nodes: " << tree.branching_count() << "\n\nnode probabilities Q(t):\n";
  for (NodeId node = 0; node < tree.node_count(); ++node) {
    const std::string label = node == RootedTree::root() ? "(root)" : format_label(tree.label(node), m);
    std::cout << "  " << label << (tree.is_leaf(node) ? " leaf " : " branch ") << num(tp.q[node]) << '\n';
  }
  std::cout << "\nbranching distributions and P_B(t):\n";
  for (int b = 0; b < tree.branching_count(); ++b) {
    const NodeId node = tree.branching_nodes()[b];
    std::cout << "  " << (node == RootedTree::root() ? "(root)" : format_label(tree.label(node), m)) << " P_B "
              << num(tp.p_b[b]) << " P_Yt (";
    if (!tp.defined[b]) {
      std::cout << "undefined";
    } else {
      for (int z = 0; z < m; ++z) std::cout << (z ? "," : "") << num(tp.branching(b, z));
    }
    std::cout << ")\n";
  }

  const auto pinsker = normalized_pinsker(tree, spec.py, pz);
  const double rate = entropy(spec.py.probs()) / tp.expected_length;
  std::cout << "\nexpected_length: " << num(tp.expected_length) << "\nentropy: " << num(entropy(spec.py.probs()))
            << "\nentropy_rate: " << num(rate) << "\ntarget_entropy: " << num(entropy(pz.probs()))
            << "\ndivergence_rate: " << num(pinsker.divergence_rate.value())
            << "\nexpected_tv: " << num(pinsker.expected_tv) << "\npinsker_step_a: " << num(pinsker.step_a.value())
            << "\npinsker_step_b: " << num(pinsker.step_b) << "\npinsker_step_c: " << num(pinsker.step_c) << '\n';

  const Beta beta_fn(m);
  if (pinsker.divergence_rate.is_finite() && beta_fn.in_domain(pinsker.divergence_rate.value())) {
    const double b = beta_fn(pinsker.divergence_rate.value());
    const bool within = std::abs(rate - entropy(pz.probs())) <= b + kBoundSlack;
    std::cout << "beta: " << num(b) << "\nwithin_beta_band: " << (within ? "yes" : "NO") << '\n';
    if (!within) return kExitViolation;
  } else {
    std::cout << "beta: not applicable (divergence rate above " << num(beta_fn.cap()) << ")\n";
  }
  if (!pinsker.ordered()) {
    std::cout << "pinsker chain ordering violated\n";
    return kExitViolation;
  }
  return 0;
}

int run_chain_check(const std::string& path, const std::string& pz_text) {
  const auto spec = load_tree_spec(path);
  warn_if_large(spec.tree, "tree");
  const Dms pz = target_or_uniform(pz_text, spec.tree.alphabet_size());
  const auto other = induced_leaf_distribution(spec.tree, pz);
  bool ok = true;
  for (const auto& report : all_chain_rules(spec.tree, spec.py, other)) {
    std::cout << report.rule_name << ": lhs " << num(report.lhs.value()) << " rhs " << num(report.rhs.value())
              << " gap " << num(report.abs_gap) << (report.holds() ? " ok" : " FAILED") << '\n';
    ok = ok && report.holds();
  }
  if (spec.tree.is_fixed_length()) {
    const auto report = fixed_length_specialization_check(spec.tree, spec.py);
    std::cout << report.rule_name << ": lhs " << num(report.lhs.value()) << " rhs " << num(report.rhs.value())
              << " gap " << num(report.abs_gap) << (report.holds() ? " ok" : " FAILED") << '\n';
    ok = ok && report.holds();
  }
  return ok ? 0 : kExitViolation;
}

int run_bounds(int m, const std::string& pz_text, int grid, const std::string& out_path) {
  const Dms pz = target_or_uniform(pz_text, m);
  const auto rows = bound_curve(m, entropy(pz.probs()), grid);
  if (out_path.empty()) {
    write_bounds_csv(std::cout, rows);
  } else {
    auto out = open_output(out_path);
    write_bounds_csv(out, rows);
  }
  return 0;
}

std::string default_bounds_path(const std::string& out) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + "_bounds";
  return out.substr(0, dot) + "_bounds" + out.substr(dot);
}

int run_fig2(const std::string& path, const std::string& pz_text, const Fig2Config& cfg, const std::string& out_path,
             std::string bounds_path) {
  const auto spec = load_tree_spec(path);
  warn_if_large(spec.tree, "tree");
  const Dms pz = target_or_uniform(pz_text, spec.tree.alphabet_size());
  const auto result = fig2_experiment(spec.tree, spec.py, pz, cfg);
  if (bounds_path.empty()) bounds_path = default_bounds_path(out_path);
  {
    auto out = open_output(out_path);
    write_scatter_csv(out, result.rows);
  }
  {
    auto out = open_output(bounds_path);
    write_bounds_csv(out, result.bounds);
  }
  std::cout << "points: " << result.rows.size() << "\nin_beta_domain: " << result.in_domain
            << "\nviolations: " << result.violations << "\nscatter_csv: " << out_path
            << "\nbounds_csv: " << bounds_path << '\n';
  return 0;
}

void print_converse(const ConverseReport& r, bool deterministic) {
  std::cout << "encoder: " << (deterministic ? "deterministic" : "random") << "\nrate: " << num(r.rate)
            << "\nexpected_dictionary_length: " << num(r.expected_dictionary_length)
            << "\nexpected_codeword_length: " << num(r.expected_codeword_length)
            << "\ndivergence_rate: " << num(r.divergence_rate.value()) << "\nalpha: " << num(r.alpha.value())
            << "\npremise_holds: " << (r.premise_holds ? "yes" : "no")
            << "\nsource_word_entropy: " << num(r.source_word_entropy)
            << "\ncodeword_entropy: " << num(r.codeword_entropy);
  if (!deterministic) std::cout << "\nerror_probability: " << num(r.error_probability);
  std::cout << "\nentropy_step_holds: " << (r.entropy_step_holds ? "yes" : "NO");
  if (r.bound_applicable) {
    std::cout << "\nbound_rhs: " << num(*r.bound_rhs) << "\nslack: " << num(r.slack)
              << "\nsatisfied: " << (r.satisfied ? "yes" : "NO") << '\n';
  } else {
    std::cout << "\nbound: not applicable (alpha outside beta's domain or premise false)\n";
  }
}

int run_converse(const std::string& path, std::optional<double> pe_cap, std::optional<double> alpha,
                 bool unnormalized) {
  const auto enc = load_encoder_spec(path);
  warn_if_large(enc.dictionary(), "dictionary");
  warn_if_large(enc.codebook(), "codebook");
  ConverseOptions options{alpha, unnormalized ? DivergenceMode::Unnormalized : DivergenceMode::Normalized};

  const auto identity = source_entropy_identity_check(enc);
  std::cout << "source_entropy_identity_gap: " << num(identity.abs_gap) << '\n';
  ConverseReport report;
  if (enc.is_deterministic()) {
    report = deterministic_converse(enc, options);
  } else {
    report = random_converse(enc, pe_cap.value_or(std::min(0.5, error_probability(enc))), options);
  }
  print_converse(report, enc.is_deterministic());
  return identity.holds() && report.satisfied && report.entropy_step_holds ? 0 : kExitViolation;
}

int run_simulate(const std::string& path, long long n, std::uint64_t seed) {
  const auto enc = load_encoder_spec(path);
  const auto r = simulate_stream(enc, n, seed);
  std::cout << "symbols: " << r.symbols << "\nwords: " << r.words << "\ntrailing_symbols: " << r.trailing_symbols
            << "\nmean_dictionary_length: " << num(r.mean_dictionary_length)
            << "\ndictionary_length_stderr: " << num(r.dictionary_length_stderr)
            << "\nanalytic_dictionary_length: " << num(r.analytic_dictionary_length)
            << "\nmean_codeword_length: " << num(r.mean_codeword_length)
            << "\nanalytic_codeword_length: " << num(r.analytic_codeword_length)
            << "\nempirical_rate: " << num(r.empirical_rate) << "\nanalytic_rate: " << num(r.analytic_rate)
            << "\ncodeword_total_variation: " << num(r.codeword_total_variation) << "\ncodeword_frequencies:";
  for (int c = 0; c < enc.codebook().leaf_count(); ++c) {
    std::cout << ' ' << format_label(enc.codebook().label(enc.codebook().leaves()[c]), enc.codebook().alphabet_size())
              << '=' << num(r.codeword_frequencies[c]);
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rooted trees with probabilities: chain rules, bounds and converses"};
  app.require_subcommand(1);

  std::string tree_path;
  std::string pz_text;

  auto* analyze = app.add_subcommand("analyze", "Report Q, P_B, rates and the Pinsker chain");
  analyze->add_option("tree", tree_path, "tree spec JSON")->required();
  analyze->add_option("--pz", pz_text, "target DMS, e.g. 1/3,2/3 (default uniform)");

  auto* chain = app.add_subcommand("chain-check", "Evaluate both sides of every chain rule");
  chain->add_option("tree", tree_path, "tree spec JSON")->required();
  chain->add_option("--pz", pz_text, "reference DMS for the divergence lemma (default uniform)");

  int m = 2;
  int grid = 200;
  std::string out_path;
  auto* bounds = app.add_subcommand("bounds", "Emit the beta band as CSV");
  bounds->add_option("--m", m, "alphabet size")->required();
  bounds->add_option("--pz", pz_text, "target DMS (default uniform)");
  bounds->add_option("--grid,--alpha-grid", grid, "number of alpha points");
  bounds->add_option("--out", out_path, "output CSV (default stdout)");

  Fig2Config cfg;
  std::string bounds_out;
  auto* fig2 = app.add_subcommand("fig2", "Random leaf distributions against the beta band");
  fig2->add_option("tree", tree_path, "tree spec JSON")->required();
  fig2->add_option("--pz", pz_text, "target DMS (default uniform)");
  fig2->add_option("--trials", cfg.trials, "number of random P_Y");
  fig2->add_option("--seed", cfg.seed, "master seed");
  fig2->add_option("--grid", cfg.bound_grid, "number of alpha points on the bound curve");
  fig2->add_option("--out", out_path, "scatter CSV")->required();
  fig2->add_option("--bounds-out", bounds_out, "bound curve CSV (default <out>_bounds.csv)");

  std::string encoder_path;
  std::optional<double> pe_cap;
  std::optional<double> alpha;
  bool unnormalized = false;
  auto* converse = app.add_subcommand("converse", "Check the rate converse for an encoder");
  converse->add_option("encoder", encoder_path, "encoder spec JSON")->required();
  converse->add_option("--pe-cap", pe_cap, "error probability cap for random encoders (default: exact P_e)");
  converse->add_option("--alpha", alpha, "divergence level (default: the measured divergence rate)");
  converse->add_flag("--unnormalized", unnormalized, "--alpha bounds the un-normalized divergence");

  long long n = 1'000'000;
  std::uint64_t seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Parse a random source stream with the dictionary");
  simulate->add_option("encoder", encoder_path, "encoder spec JSON")->required();
  simulate->add_option("--n", n, "number of source symbols");
  simulate->add_option("--seed", seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*analyze) return run_analyze(tree_path, pz_text);
    if (*chain) return run_chain_check(tree_path, pz_text);
    if (*bounds) return run_bounds(m, pz_text, grid, out_path);
    if (*fig2) return run_fig2(tree_path, pz_text, cfg, out_path, bounds_out);
    if (*converse) return run_converse(encoder_path, pe_cap, alpha, unnormalized);
    if (*simulate) return run_simulate(encoder_path, n, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_violation(e.kind()) ? kExitViolation : kExitInvalid;
  }
  return kExitInvalid;
}
