#include "fixtures.hpp"

#include "leafprob/bounds.hpp"
#include "leafprob/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace leafprob {
namespace {

using testing::fig1_py;
using testing::fig1_tree;
using testing::fig2_pz;

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    differs = differs || u != c.uniform();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, CategoricalFrequencies) {
  Rng rng(3);
  const Eigen::Vector3d p(0.2, 0.0, 0.8);
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  const int n = 200'000;
  for (int i = 0; i < n; ++i) counts[rng.categorical(p)] += 1.0;
  EXPECT_EQ(counts[1], 0.0);
  EXPECT_NEAR(counts[0] / n, 0.2, 0.005);
}

TEST(Sampling, ValidTreesAndDistributions) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 3;
    const auto tree = sample_tree(m, 5, rng);
    EXPECT_GE(tree.branching_count(), 1);
    EXPECT_LE(tree.max_depth(), 5);
    EXPECT_NEAR(static_cast<double>(tree.kraft_sum()), 1.0, 1e-15);
    EXPECT_EQ(tree.leaf_count(), 1 + tree.branching_count() * (m - 1));
    const auto py = sample_leaf_distribution(tree, rng);
    EXPECT_NEAR(py.probs().sum(), 1.0, 1e-12);
    EXPECT_GT(py.probs().minCoeff(), 0.0);
  }
}

TEST(Sampling, AllCompleteTreesCounts) {
  // Full binary trees with k leaves are counted by Catalan(k−1): 1 + 1 + 2 + 5.
  EXPECT_EQ(all_complete_trees(2, 2).size(), 1u);
  EXPECT_EQ(all_complete_trees(2, 3).size(), 3u);
  EXPECT_EQ(all_complete_trees(2, 4).size(), 8u);
  EXPECT_EQ(all_complete_trees(2, 5).size(), 22u);
  EXPECT_EQ(all_complete_trees(3, 5).size(), 4u);
}

TEST(Fig2, StatedAndMatchedRows) {
  const auto tree = fig1_tree();
  const auto result = fig2_experiment(tree, fig1_py(tree), fig2_pz(), {.seed = 1, .trials = 50, .bound_grid = 20});
  ASSERT_EQ(result.rows.size(), 52u);
  EXPECT_EQ(result.rows[0].kind, "stated");
  EXPECT_NEAR(result.rows[0].entropy_rate, 0.9371, 5e-5);
  EXPECT_NEAR(result.rows[0].divergence_rate.value(), 0.0645, 5e-5);
  EXPECT_EQ(result.rows[1].kind, "matched");
  EXPECT_NEAR(result.rows[1].entropy_rate, 0.9183, 5e-5);
  EXPECT_NEAR(result.rows[1].divergence_rate.value(), 0.0, 1e-15);
  EXPECT_EQ(result.violations, 0);
  EXPECT_GE(result.in_domain, 1);

  ASSERT_EQ(result.bounds.size(), 20u);
  const double hz = entropy(fig2_pz().probs());
  EXPECT_EQ(result.bounds.front().alpha, 0.0);
  EXPECT_EQ(result.bounds.front().beta, 0.0);
  EXPECT_EQ(result.bounds.front().hz_minus_beta, hz);
  EXPECT_EQ(result.bounds.front().hz_plus_beta, hz);
  EXPECT_EQ(result.bounds.back().alpha, beta_domain_cap(2));
  for (std::size_t i = 1; i < result.bounds.size(); ++i) {
    EXPECT_GT(result.bounds[i].alpha, result.bounds[i - 1].alpha);
    EXPECT_GT(result.bounds[i].beta, result.bounds[i - 1].beta);
  }
}

TEST(Fig2, CsvIsDeterministic) {
  const auto tree = fig1_tree();
  auto render = [&](std::uint64_t seed) {
    const auto r = fig2_experiment(tree, fig1_py(tree), fig2_pz(), {.seed = seed, .trials = 100, .bound_grid = 10});
    std::ostringstream scatter, bounds;
    write_scatter_csv(scatter, r.rows);
    write_bounds_csv(bounds, r.bounds);
    return scatter.str() + bounds.str();
  };
  const std::string a = render(7);
  EXPECT_EQ(a, render(7));
  EXPECT_NE(a, render(8));
  EXPECT_EQ(a.rfind("trial,kind,entropy_rate,divergence_rate\n", 0), 0u);
  EXPECT_NE(a.find("alpha,beta,hz_minus_beta,hz_plus_beta\n"), std::string::npos);
}

TEST(Fig2, TrialRowsDependOnlyOnTheirIndex) {
  const auto tree = fig1_tree();
  const auto small = fig2_experiment(tree, fig1_py(tree), fig2_pz(), {.seed = 3, .trials = 10, .bound_grid = 2});
  const auto large = fig2_experiment(tree, fig1_py(tree), fig2_pz(), {.seed = 3, .trials = 40, .bound_grid = 2});
  for (std::size_t i = 0; i < small.rows.size(); ++i) {
    EXPECT_EQ(small.rows[i].entropy_rate, large.rows[i].entropy_rate);
  }
}

TEST(Simulate, DepthOneIdentityHasUnitRate) {
  const auto depth1 = RootedTree::full(2, 1);
  const auto enc = EncoderSystem::create(depth1, fig2_pz(), depth1, fig2_pz(), DeterministicMapping{{0, 1}});
  const auto r = simulate_stream(enc, 10'000, 1);
  EXPECT_EQ(r.words, 10'000);
  EXPECT_EQ(r.trailing_symbols, 0);
  EXPECT_EQ(r.empirical_rate, 1.0);
  EXPECT_EQ(r.mean_dictionary_length, 1.0);
  EXPECT_EQ(r.dictionary_length_stderr, 0.0);
  EXPECT_EQ(r.analytic_rate, 1.0);
}

TEST(Simulate, Fig1DictionaryMatchesPathLengthLemma) {
  const auto tree = fig1_tree();
  const auto enc = EncoderSystem::create(tree, fig2_pz(), tree, fig2_pz(), DeterministicMapping{{0, 1, 2}});
  const auto r = simulate_stream(enc, 1'000'000, 2024);
  EXPECT_NEAR(r.analytic_dictionary_length, 5.0 / 3.0, 1e-15);
  EXPECT_LE(std::abs(r.mean_dictionary_length - 5.0 / 3.0), 3.0 * r.dictionary_length_stderr);
  EXPECT_GT(r.dictionary_length_stderr, 0.0);
  EXPECT_LT(r.codeword_total_variation, 0.01);
  EXPECT_EQ(r.symbols, 1'000'000);
}

TEST(Simulate, ParsingIsLossless) {
  const auto tree = fig1_tree();
  const auto code = RootedTree::full(2, 1);
  const auto enc = EncoderSystem::create(tree, Dms::uniform(2), code, fig2_pz(), DeterministicMapping{{0, 1, 1}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = simulate_stream(enc, 10'001, seed, true);
    ASSERT_EQ(static_cast<long long>(r.input.size()), r.symbols);
    ASSERT_EQ(static_cast<long long>(r.parsed.size()) + r.trailing_symbols, r.symbols);
    EXPECT_TRUE(std::equal(r.parsed.begin(), r.parsed.end(), r.input.begin()));
  }
}

TEST(Simulate, KernelEncoderFrequencies) {
  const auto depth1 = RootedTree::full(2, 1);
  const auto code = fig1_tree();
  Eigen::MatrixXd k(2, 3);
  k << 0.9, 0.1, 0.0, 0.0, 0.3, 0.7;
  const auto enc = EncoderSystem::create(depth1, Dms::uniform(2), code, fig2_pz(), StochasticMapping{k, {0, 1, 1}});
  const auto r = simulate_stream(enc, 400'000, 9);
  EXPECT_NEAR(r.analytic_codeword_distribution[0], 0.45, 1e-15);
  EXPECT_LT(r.codeword_total_variation, 0.01);
}

TEST(Simulate, RejectsEmptyStream) {
  const auto depth1 = RootedTree::full(2, 1);
  const auto enc = EncoderSystem::create(depth1, fig2_pz(), depth1, fig2_pz(), DeterministicMapping{{0, 1}});
  EXPECT_THROW(simulate_stream(enc, 0, 1), Error);
}

}  // namespace
}  // namespace leafprob
