#include "leafprob/experiments.hpp"

#include "leafprob/bounds.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

namespace leafprob {

namespace {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

int Rng::categorical(const Eigen::Ref<const Eigen::VectorXd>& probs) {
  const double u = uniform();
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  // u landed in the rounding gap above the last partial sum.
  for (Eigen::Index i = probs.size() - 1; i >= 0; --i) {
    if (probs[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

LeafDistribution sample_leaf_distribution(const RootedTree& tree, Rng& rng) {
  Eigen::VectorXd w(tree.leaf_count());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.uniform();
  w /= w.sum();
  return LeafDistribution::create(tree, std::move(w));
}

Dms sample_dms(int alphabet_size, Rng& rng) {
  Eigen::VectorXd w(alphabet_size);
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.uniform();
  w /= w.sum();
  return Dms::create(std::move(w));
}

RootedTree sample_tree(int alphabet_size, int max_depth, Rng& rng, double branch_probability) {
  std::vector<Label> leaves;
  std::vector<Label> pending{{}};
  while (!pending.empty()) {
    Label node = std::move(pending.back());
    pending.pop_back();
    const int depth = static_cast<int>(node.size());
    const bool branch = depth == 0 || (depth < max_depth && rng.uniform() < branch_probability);
    if (!branch) {
      leaves.push_back(std::move(node));
      continue;
    }
    for (Letter z = alphabet_size - 1; z >= 0; --z) {
      Label child = node;
      child.push_back(z);
      pending.push_back(std::move(child));
    }
  }
  return RootedTree::from_leaves(alphabet_size, leaves);
}

std::vector<RootedTree> all_complete_trees(int alphabet_size, int max_leaves) {
  // A complete tree with k branching nodes has 1 + k(m−1) leaves. Grow leaf
  // sets by expanding one leaf at a time, deduplicating by canonical form.
  std::vector<std::vector<Label>> frontier{{}};
  frontier[0].reserve(alphabet_size);
  for (Letter z = 0; z < alphabet_size; ++z) frontier[0].push_back({z});
  std::vector<std::vector<Label>> all;
  while (!frontier.empty()) {
    std::vector<std::vector<Label>> next;
    for (auto& set : frontier) {
      std::sort(set.begin(), set.end());
      if (std::find(all.begin(), all.end(), set) != all.end()) continue;
      all.push_back(set);
      if (static_cast<int>(set.size()) + alphabet_size - 1 > max_leaves) continue;
      for (std::size_t i = 0; i < set.size(); ++i) {
        std::vector<Label> grown;
        for (std::size_t j = 0; j < set.size(); ++j) {
          if (j != i) grown.push_back(set[j]);
        }
        for (Letter z = 0; z < alphabet_size; ++z) {
          Label child = set[i];
          child.push_back(z);
          grown.push_back(std::move(child));
        }
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  std::vector<RootedTree> trees;
  trees.reserve(all.size());
  for (const auto& set : all) trees.push_back(RootedTree::from_leaves(alphabet_size, set));
  return trees;
}

std::vector<BoundRow> bound_curve(int alphabet_size, double target_entropy, int grid) {
  if (grid < 2) throw Error(ErrorKind::DomainError, "bound grid needs at least 2 points");
  const Beta beta_fn(alphabet_size);
  const double cap = beta_fn.cap();
  const double lo = std::min(1e-8, cap);
  std::vector<BoundRow> rows;
  rows.reserve(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    double alpha = 0.0;
    if (i == grid - 1) {
      alpha = cap;
    } else if (i > 0) {
      alpha = lo * std::pow(cap / lo, static_cast<double>(i - 1) / (grid - 2));
    }
    const double b = beta_fn(alpha);
    rows.push_back({alpha, b, target_entropy - b, target_entropy + b});
  }
  return rows;
}

ScatterRow scatter_point(const RootedTree& tree, const LeafDistribution& py, const Dms& pz) {
  const auto tp = derive_probabilities(tree, py);
  const auto pz_leaves = induced_leaf_distribution(tree, pz);
  ScatterRow row;
  row.entropy_rate = entropy(py.probs()) / tp.expected_length;
  row.divergence_rate = kl_divergence(py.probs(), pz_leaves.probs()) / tp.expected_length;
  return row;
}

Fig2Result fig2_experiment(const RootedTree& tree, const LeafDistribution& stated, const Dms& pz,
                           const Fig2Config& cfg) {
  if (cfg.trials < 0) throw Error(ErrorKind::DomainError, "trial count must be nonnegative");
  const int m = tree.alphabet_size();
  const double hz = entropy(pz.probs());
  const Beta beta_fn(m);

  Fig2Result result;
  auto add = [&](ScatterRow row, long long trial, std::string kind) {
    row.trial = trial;
    row.kind = std::move(kind);
    result.rows.push_back(std::move(row));
  };
  add(scatter_point(tree, stated, pz), -2, "stated");
  add(scatter_point(tree, induced_leaf_distribution(tree, pz), pz), -1, "matched");
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    add(scatter_point(tree, sample_leaf_distribution(tree, rng), pz), t, "sample");
  }

  std::ostringstream diagnostics;
  diagnostics.precision(17);
  for (const auto& row : result.rows) {
    if (!row.divergence_rate.is_finite() || !beta_fn.in_domain(row.divergence_rate.value())) continue;
    ++result.in_domain;
    const double b = beta_fn(row.divergence_rate.value());
    if (std::abs(row.entropy_rate - hz) > b + kBoundSlack) {
      ++result.violations;
      diagnostics << "\n  trial " << row.trial << ": entropy rate " << row.entropy_rate << ", alpha "
                  << row.divergence_rate.value() << ", beta " << b;
    }
  }
  if (result.violations > 0) {
    throw Error(ErrorKind::BoundViolation,
                std::to_string(result.violations) + " scatter points outside the beta band:" + diagnostics.str());
  }
  result.bounds = bound_curve(m, hz, cfg.bound_grid);
  return result;
}

void write_scatter_csv(std::ostream& out, const std::vector<ScatterRow>& rows) {
  out << "trial,kind,entropy_rate,divergence_rate\n";
  for (const auto& row : rows) {
    out << row.trial << ',' << row.kind << ',' << format_number(row.entropy_rate) << ','
        << format_number(row.divergence_rate.value()) << '\n';
  }
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "alpha,beta,hz_minus_beta,hz_plus_beta\n";
  for (const auto& row : rows) {
    out << format_number(row.alpha) << ',' << format_number(row.beta) << ',' << format_number(row.hz_minus_beta)
        << ',' << format_number(row.hz_plus_beta) << '\n';
  }
}

StreamReport simulate_stream(const EncoderSystem& enc, long long n_symbols, std::uint64_t seed, bool record) {
  if (n_symbols < 1) throw Error(ErrorKind::DomainError, "stream needs at least one symbol");
  const RootedTree& dict = enc.dictionary();
  const RootedTree& code = enc.codebook();
  const auto* det = std::get_if<DeterministicMapping>(&enc.mapping());
  const auto* kernel = std::get_if<StochasticMapping>(&enc.mapping());

  Rng source_rng(derive_seed(seed, 0));
  Rng mapping_rng(derive_seed(seed, 1));

  StreamReport report;
  report.symbols = n_symbols;
  report.codeword_frequencies = Eigen::VectorXd::Zero(code.leaf_count());
  if (record) {
    report.input.reserve(static_cast<std::size_t>(n_symbols));
    report.parsed.reserve(static_cast<std::size_t>(n_symbols));
  }

  long double sum_d = 0.0L;
  long double sum_d2 = 0.0L;
  long double sum_y = 0.0L;
  NodeId node = RootedTree::root();
  for (long long i = 0; i < n_symbols; ++i) {
    const Letter x = source_rng.categorical(enc.source().probs());
    if (record) report.input.push_back(x);
    node = dict.child(node, x);
    if (!dict.is_leaf(node)) continue;

    const int d = dict.leaf_index(node);
    const int c = det ? det->codeword[static_cast<std::size_t>(d)]
                      : mapping_rng.categorical(kernel->kernel.row(d).transpose());
    const long double len = dict.depth(node);
    sum_d += len;
    sum_d2 += len * len;
    sum_y += code.depth(code.leaves()[c]);
    report.codeword_frequencies[c] += 1.0;
    ++report.words;
    if (record) {
      const Label& word = dict.label(node);
      report.parsed.insert(report.parsed.end(), word.begin(), word.end());
    }
    node = RootedTree::root();
  }
  report.trailing_symbols = dict.depth(node);

  const auto py = pushforward(enc);
  report.analytic_dictionary_length = derive_probabilities(dict, enc.dictionary_distribution()).expected_length;
  report.analytic_codeword_length = derive_probabilities(code, py).expected_length;
  report.analytic_rate = report.analytic_dictionary_length / report.analytic_codeword_length;
  report.analytic_codeword_distribution = py.probs();

  if (report.words > 0) {
    const long double n = static_cast<long double>(report.words);
    const long double mean = sum_d / n;
    report.mean_dictionary_length = static_cast<double>(mean);
    report.mean_codeword_length = static_cast<double>(sum_y / n);
    report.empirical_rate = static_cast<double>(sum_d / sum_y);
    if (report.words > 1) {
      const long double var = (sum_d2 - n * mean * mean) / (n - 1);
      report.dictionary_length_stderr = static_cast<double>(std::sqrt(std::max(var, 0.0L) / n));
    }
    report.codeword_frequencies /= static_cast<double>(report.words);
    report.codeword_total_variation =
        variational_distance(report.codeword_frequencies, report.analytic_codeword_distribution);
  }
  return report;
}

}  // namespace leafprob
