#include "fixtures.hpp"

#include "leafprob/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace leafprob {
namespace {

using testing::fig1_py;
using testing::fig1_tree;
using testing::fig2_pz;

constexpr double kTwoLn2 = 2.0 * std::numbers::ln2;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

TEST(Pinsker, MatchedDistributionIsAllZero) {
  const auto tree = fig1_tree();
  const auto report = normalized_pinsker(tree, induced_leaf_distribution(tree, fig2_pz()), fig2_pz());
  EXPECT_NEAR(report.step_a.value(), 0.0, 1e-15);
  EXPECT_NEAR(report.step_b, 0.0, 1e-15);
  EXPECT_NEAR(report.step_c, 0.0, 1e-15);
  EXPECT_TRUE(report.ordered());
}

TEST(Pinsker, Fig1Chain) {
  const auto tree = fig1_tree();
  const auto report = normalized_pinsker(tree, fig1_py(tree), fig2_pz());
  EXPECT_NEAR(report.step_a.value(), 0.0645, 5e-5);
  EXPECT_NEAR(report.divergence_rate.value(), report.step_a.value(), 1e-12);
  EXPECT_NEAR(report.expected_tv, 5.0 / 18.0, 1e-15);
  EXPECT_NEAR(report.step_c, (5.0 / 18.0) * (5.0 / 18.0) / kTwoLn2, 1e-15);
  // (2/3)(1/3)² + (1/3)(1/6)².
  EXPECT_NEAR(report.step_b, (2.0 / 27.0 + 1.0 / 108.0) / kTwoLn2, 1e-15);
  EXPECT_TRUE(report.ordered());
}

TEST(Pinsker, DepthOneIsClassicalPinsker) {
  const auto tree = RootedTree::full(3, 1);
  const Eigen::Vector3d p(0.6, 0.3, 0.1);
  const auto pz = Dms::create(Eigen::Vector3d(0.2, 0.2, 0.6));
  const auto report = normalized_pinsker(tree, LeafDistribution::create(tree, p), pz);
  const double tv = variational_distance(p, pz.probs());
  EXPECT_NEAR(report.step_a.value(), kl_divergence(p, pz.probs()).value(), 1e-15);
  EXPECT_NEAR(report.step_b, tv * tv / kTwoLn2, 1e-15);
  EXPECT_NEAR(report.step_c, tv * tv / kTwoLn2, 1e-15);
}

TEST(Pinsker, InfiniteDivergenceStillOrdered) {
  const auto tree = fig1_tree();
  const auto report = normalized_pinsker(tree, fig1_py(tree), Dms::create(Eigen::Vector2d(0.0, 1.0)));
  EXPECT_TRUE(report.step_a.is_infinite());
  EXPECT_TRUE(report.divergence_rate.is_infinite());
  EXPECT_TRUE(report.ordered());
}

TEST(Pinsker, RandomInstancesOrdered) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto inst = testing::random_instance(seed + 500);
    const auto report = normalized_pinsker(inst.tree, inst.py, inst.pz);
    EXPECT_TRUE(report.ordered()) << seed;
    EXPECT_NEAR(report.divergence_rate.value(), report.step_a.value(), 1e-12);
  }
}

TEST(NaiveBound, CrossesTwoAtNine) {
  EXPECT_GT(naive_fixed_length_bound(9), 2.0);
  EXPECT_NEAR(naive_fixed_length_bound(9), std::sqrt(3.0 * kTwoLn2), 1e-15);
  EXPECT_LT(naive_fixed_length_bound(8), 2.0);
  EXPECT_NEAR(naive_fixed_length_bound(1), std::sqrt(kTwoLn2), 1e-15);
  for (int n = 1; n < 100; ++n) EXPECT_LT(naive_fixed_length_bound(n), naive_fixed_length_bound(n + 1));
}

TEST(ThetaSigma, ClosedFormValues) {
  for (int m = 2; m <= 6; ++m) {
    EXPECT_EQ(theta(0.0, m), 0.0);
    EXPECT_EQ(sigma(0.0, m), 0.0);
  }
  EXPECT_NEAR(theta(0.5, 2), 0.25 * std::log2(4.0 / std::numbers::e), 1e-15);
  EXPECT_NEAR(theta(0.5, 2), 0.1393262, 1e-7);
  EXPECT_NEAR(sigma(0.5, 2), 0.5 * std::log2(16.0 / std::numbers::e), 1e-15);
  EXPECT_NEAR(sigma(0.5, 2), 1.2786525, 1e-7);
  EXPECT_NEAR(theta(0.3, 2), 0.11648435, 1e-8);
  EXPECT_EQ(kind_of([] { theta(0.6, 2); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { sigma(-0.1, 2); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { theta(0.1, 1); }), ErrorKind::DomainError);
}

TEST(ThetaSigma, StationarityOfContinuityBound) {
  for (int m = 2; m <= 4; ++m) {
    for (int i = 1; i <= 50; ++i) {
      const double eps = 0.49 * i / 50.0;
      const double th = theta(eps, m);
      auto f = [&](double x) { return entropy_modulus(x, m) + th / x * std::log2(m); };
      const double h = 1e-5 * eps;
      const double derivative = (f(eps + h) - f(eps - h)) / (2.0 * h);
      const double scale = std::abs((entropy_modulus(eps + h, m) - entropy_modulus(eps - h, m)) / (2.0 * h));
      EXPECT_LE(std::abs(derivative), 1e-6 * scale) << "m=" << m << " eps=" << eps;
    }
  }
}

TEST(ThetaInverse, RoundTrip) {
  EXPECT_NEAR(theta_inverse(theta(0.3, 2), 2), 0.3, 1e-9);
  EXPECT_EQ(theta_inverse(0.0, 2), 0.0);
  for (int m = 2; m <= 5; ++m) {
    const ThetaInverse inv(m);
    const double top = inv(inv.max_value());
    for (int i = 0; i <= 40; ++i) {
      const double eps = top * i / 40.0;
      EXPECT_NEAR(theta(inv(theta(eps, m)), m), theta(eps, m), 1e-12);
      EXPECT_NEAR(inv(theta(eps, m)), eps, 1e-8);
    }
  }
  EXPECT_EQ(kind_of([] { theta_inverse(-1e-3, 2); }), ErrorKind::DomainError);
  EXPECT_EQ(kind_of([] { theta_inverse(theta(0.5, 2) + 1e-6, 2); }), ErrorKind::DomainError);
}

TEST(ThetaInverse, UpperEndpointForLargerAlphabets) {
  for (int m = 3; m <= 8; ++m) {
    EXPECT_EQ(theta_increasing_end(m), 0.5);
    EXPECT_TRUE(theta_strictly_increasing(m, 0.0, 0.5));
    EXPECT_NEAR(theta_inverse(theta(0.5, m), m), 0.5, 1e-9);
    EXPECT_NEAR(beta(beta_domain_cap(m), m), sigma(0.5, m), 1e-9);
  }
}

TEST(ThetaInverse, BinaryAlphabetUsesIncreasingBranch) {
  // θ(·, 2) peaks at 2e^{-3/2} ≈ 0.446 and falls back to θ(1/2) below the peak.
  EXPECT_NEAR(theta_increasing_end(2), 2.0 * std::exp(-1.5), 1e-15);
  EXPECT_FALSE(theta_strictly_increasing(2, 0.0, 0.5));
  EXPECT_TRUE(theta_strictly_increasing(2, 0.0, theta_increasing_end(2)));
  EXPECT_GT(theta(theta_increasing_end(2), 2), theta(0.5, 2));

  const double e0 = theta_inverse(theta(0.5, 2), 2);
  EXPECT_NEAR(e0, 0.39025976, 1e-8);
  EXPECT_NEAR(theta(e0, 2), theta(0.5, 2), 1e-12);
  // The smaller preimage gives the smaller σ, hence the tighter bound.
  EXPECT_LT(sigma(e0, 2), sigma(0.5, 2));
  EXPECT_NEAR(beta(beta_domain_cap(2), 2), 1.27704378, 1e-8);
}

TEST(Beta, DomainAndMonotonicity) {
  for (int m = 2; m <= 4; ++m) {
    const Beta b(m);
    EXPECT_EQ(b(0.0), 0.0);
    EXPECT_NEAR(b.cap(), theta(0.5, m) * theta(0.5, m) / kTwoLn2, 1e-15);
    double previous = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double value = b(b.cap() * i / 200.0);
      EXPECT_GT(value, previous);
      previous = value;
    }
    EXPECT_FALSE(b.in_domain(b.cap() * 1.001));
    EXPECT_EQ(kind_of([&] { b(b.cap() * 1.001); }), ErrorKind::DomainError);
    EXPECT_EQ(kind_of([&] { b(-1e-9); }), ErrorKind::DomainError);
  }
  EXPECT_NEAR(beta_domain_cap(2), 0.0140027, 1e-7);
}

TEST(Beta, DecayToZero) {
  for (int m = 2; m <= 4; ++m) {
    double last_theta = 1.0, last_sigma = 10.0, last_beta = 10.0;
    for (int k = 1; k <= 30; ++k) {
      const double eps = 0.5 * std::pow(0.5, k);
      const double alpha = beta_domain_cap(m) * std::pow(0.5, k);
      EXPECT_LT(theta(eps, m), last_theta);
      EXPECT_LT(sigma(eps, m), last_sigma);
      EXPECT_LT(beta(alpha, m), last_beta);
      last_theta = theta(eps, m);
      last_sigma = sigma(eps, m);
      last_beta = beta(alpha, m);
    }
    EXPECT_LT(last_theta, 1e-15);
    EXPECT_LT(last_sigma, 1e-6);
    EXPECT_LT(last_beta, 0.03);
  }
}

TEST(ContinuityTransfer, ZeroThetaLeavesModulus) {
  auto delta = [](double e) { return entropy_modulus(e, 2); };
  EXPECT_EQ(continuity_transfer(delta, 1.0, 0.0, 0.25), entropy_modulus(0.25, 2));
  EXPECT_EQ(kind_of([&] { continuity_transfer(delta, 1.0, 0.1, 0.0); }), ErrorKind::DomainError);
}

TEST(ContinuityTransfer, GridMinimumReproducesThetaSigmaPairing) {
  for (int m = 2; m <= 4; ++m) {
    auto delta = [m](double e) { return entropy_modulus(e, m); };
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3, 0.38}) {
      const auto best = minimize_continuity_transfer(delta, std::log2(m), theta(eps, m));
      EXPECT_NEAR(continuity_transfer(delta, std::log2(m), theta(eps, m), eps), sigma(eps, m), 1e-14);
      EXPECT_GE(best.bound, sigma(eps, m) - 1e-12);
      EXPECT_NEAR(best.bound, sigma(eps, m), 1e-3 * sigma(eps, m));
      EXPECT_NEAR(best.eps, eps, 0.02 * eps);
    }
  }
}

TEST(ContinuityTransfer, BoundDecaysQuadraticallyInTheta) {
  auto delta = [](double e) { return entropy_modulus(e, 2); };
  EXPECT_NEAR(continuity_transfer(delta, 1.0, 1e-4, 1e-2), entropy_modulus(1e-2, 2) + 1e-2, 1e-15);
  const double a = continuity_transfer(delta, 1.0, 0.01 * 0.01, 0.01);
  const double b = continuity_transfer(delta, 1.0, 0.001 * 0.001, 0.001);
  EXPECT_LT(b, a / 5.0);
}

TEST(EntropyRateGap, MatchedCaseHolds) {
  const auto tree = fig1_tree();
  const auto matched = induced_leaf_distribution(tree, fig2_pz());
  for (double eps : {1e-6, 0.01, 0.25, 0.5}) {
    const auto check = entropy_rate_gap_check(tree, matched, fig2_pz(), eps);
    EXPECT_TRUE(check.premise_holds);
    EXPECT_TRUE(check.conclusion_holds);
  }
}

TEST(EntropyRateGap, Fig1Grid) {
  const auto tree = fig1_tree();
  // Expected TV is 5/18; θ(·, 2) stays below that on [0, 1/2].
  for (int i = 1; i <= 100; ++i) {
    const auto check = entropy_rate_gap_check(tree, fig1_py(tree), fig2_pz(), 0.005 * i);
    EXPECT_FALSE(check.premise_holds);
  }
  const auto depth1 = RootedTree::full(2, 1);
  const auto close = LeafDistribution::create(depth1, Eigen::Vector2d(0.34, 0.66));
  const auto check = entropy_rate_gap_check(depth1, close, fig2_pz(), 0.2);
  EXPECT_TRUE(check.premise_holds);
  EXPECT_TRUE(check.conclusion_holds);
}

TEST(EntropyRateGap, RandomInstancesNeverViolate) {
  int premises = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto inst = testing::random_instance(seed + 7000);
    Rng rng(seed);
    // Pull P_Y toward the matched distribution so that the premise fires.
    const auto matched = induced_leaf_distribution(inst.tree, inst.pz);
    const double w = rng.uniform();
    const auto py = LeafDistribution::create(inst.tree, w * inst.py.probs() + (1.0 - w) * matched.probs());
    for (int i = 1; i <= 20; ++i) {
      const auto check = entropy_rate_gap_check(inst.tree, py, inst.pz, 0.025 * i);
      EXPECT_TRUE(!check.premise_holds || check.conclusion_holds);
      premises += check.premise_holds;
    }
  }
  EXPECT_GT(premises, 0);
}

}  // namespace
}  // namespace leafprob
