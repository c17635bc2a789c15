#pragma once

// Shared fixtures and test-only oracles. The oracles work from leaf labels
// alone and never go through the tree traversal they are used to check.

#include "leafprob/converses.hpp"
#include "leafprob/experiments.hpp"
#include "leafprob/tree.hpp"

#include <algorithm>
#include <vector>

namespace leafprob::testing {

inline RootedTree fig1_tree() { return RootedTree::from_leaves(2, std::vector<Label>{{0}, {1, 0}, {1, 1}}); }

inline LeafDistribution fig1_py(const RootedTree& tree) {
  const std::vector<std::pair<Label, double>> entries{{{0}, 0.5}, {{1, 0}, 0.125}, {{1, 1}, 0.375}};
  return LeafDistribution::from_labels(tree, entries);
}

inline Dms fig2_pz() { return Dms::create(Eigen::Vector2d(1.0 / 3.0, 2.0 / 3.0)); }

/// Q(t) as the sum of P_Y over leaves having t as a prefix, by label comparison.
inline double oracle_q(const RootedTree& tree, const LeafDistribution& py, const Label& node) {
  double sum = 0.0;
  for (int i = 0; i < tree.leaf_count(); ++i) {
    const Label& leaf = tree.label(tree.leaves()[i]);
    if (leaf.size() >= node.size() && std::equal(node.begin(), node.end(), leaf.begin())) sum += py[i];
  }
  return sum;
}

/// Σ_leaves P_Y(t) ℓ(t).
inline double oracle_expected_length(const RootedTree& tree, const LeafDistribution& py) {
  double sum = 0.0;
  for (int i = 0; i < tree.leaf_count(); ++i) sum += py[i] * static_cast<double>(tree.label(tree.leaves()[i]).size());
  return sum;
}

/// A random tree with random leaf distribution, m ∈ {2,3,4}, depth ≤ 6.
struct Instance {
  RootedTree tree;
  LeafDistribution py;
  Dms pz;
};

inline Instance random_instance(std::uint64_t seed, int max_depth = 6) {
  Rng rng(seed);
  const int m = 2 + static_cast<int>(rng.next() % 3);
  // Lower branching probability for larger alphabets keeps trees moderate.
  const double branch = m == 2 ? 0.6 : (m == 3 ? 0.45 : 0.35);
  RootedTree tree = sample_tree(m, max_depth, rng, branch);
  LeafDistribution py = sample_leaf_distribution(tree, rng);
  Dms pz = sample_dms(m, rng);
  return Instance{std::move(tree), std::move(py), std::move(pz)};
}

/// Row-stochastic kernel with uniform (0,1) weights per row.
inline Eigen::MatrixXd random_kernel(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd k(rows, cols);
  for (int r = 0; r < rows; ++r) k.row(r) = sample_dms(cols, rng).probs().transpose();
  return k;
}

/// Random binary encoder with a kernel and its maximum-posterior decoder, drawn
/// from three families: unstructured kernels, noisy deterministic maps, and
/// noisy identities on a shared tree with P_X = P_Z (small α and small P_e).
inline EncoderSystem random_kernel_system(Rng& rng, const std::vector<RootedTree>& trees) {
  const auto pick = [&] { return trees[static_cast<std::size_t>(rng.next() % trees.size())]; };
  const int family = static_cast<int>(rng.next() % 3);
  RootedTree dict = pick();
  RootedTree code = family == 2 ? dict : pick();
  Dms px = sample_dms(2, rng);
  Dms pz = family == 2 ? px : sample_dms(2, rng);
  const int nd = dict.leaf_count();
  const int nc = code.leaf_count();
  Eigen::MatrixXd kernel = random_kernel(nd, nc, rng);
  if (family > 0) {
    const double noise = 0.2 * rng.uniform();
    Eigen::MatrixXd hard = Eigen::MatrixXd::Zero(nd, nc);
    for (int d = 0; d < nd; ++d) hard(d, family == 2 ? d : static_cast<int>(rng.next() % nc)) = 1.0;
    kernel = (1.0 - noise) * hard + noise * kernel;
  }
  const auto pd = induced_leaf_distribution(dict, px);
  auto decoder = maximum_posterior_decoder(pd, kernel);
  return EncoderSystem::create(std::move(dict), std::move(px), std::move(code), std::move(pz),
                               StochasticMapping{std::move(kernel), std::move(decoder)});
}

}  // namespace leafprob::testing
