#pragma once

#include "leafprob/info_measures.hpp"
#include "leafprob/tree.hpp"

#include <functional>

namespace leafprob {

/// The normalized Pinsker chain
///   𝔻(P_Y‖P_Z^L)/E[ℓ(Y)] = 𝔻(P_{Y_B}‖P_Z|P_B)              (a)
///                         ≥ E[‖P_{Y_B}−P_Z‖₁² | P_B]/(2 ln 2) (b)
///                         ≥ E[‖P_{Y_B}−P_Z‖₁ | P_B]²/(2 ln 2) (c)
struct PinskerChainReport {
  /// Leaf-side value 𝔻(P_Y‖P_Z^L)/E[ℓ(Y)].
  ExtendedReal divergence_rate;
  double expected_tv = 0.0;
  /// Branching-side value 𝔻(P_{Y_B}‖P_Z|P_B).
  ExtendedReal step_a;
  double step_b = 0.0;
  double step_c = 0.0;

  /// step_a ≥ step_b ≥ step_c ≥ 0, up to `tolerance` of rounding per step.
  bool ordered(double tolerance = 1e-12) const {
    return step_b <= step_a.value() + tolerance && step_c <= step_b + tolerance && step_c >= 0.0;
  }
};

/// Throws InvariantViolation if the two evaluations of step (a) differ by more
/// than 1e-12 or only one of them is infinite.
PinskerChainReport normalized_pinsker(const RootedTree& tree, const LeafDistribution& py, const Dms& pz);

/// √(√n · 2 ln 2): the variational-distance bound Pinsker gives when the
/// fixed-length divergence rate is √n/n.
double naive_fixed_length_bound(int n);

/// θ(ε) = ε² log₂(m/(eε)) / log₂ m, for 0 ≤ ε ≤ 1/2.
double theta(double eps, int m);
/// σ(ε) = ε log₂(m²/(eε²)), for 0 ≤ ε ≤ 1/2.
double sigma(double eps, int m);

/// End of the interval [0, ε_max] on which θ(·, m) increases:
/// min(1/2, m·e^{-3/2}). Only m = 2 stops short of 1/2.
double theta_increasing_end(int m);

/// Scans θ(·, m) on `points` equally spaced points of [lo, hi] and reports
/// whether it is strictly increasing there.
bool theta_strictly_increasing(int m, double lo, double hi, int points = 4096);

/// Inverse of θ(·, m) on its increasing branch.
///
/// Construction scans θ on [0, theta_increasing_end(m)] (4096 points) and
/// throws MonotonicityViolation if it is not strictly increasing. For m ≥ 3 the
/// branch is all of [0, 1/2]; for m = 2 the result is the smaller of the two
/// preimages, which is the minimizer of the continuity bound.
class ThetaInverse {
 public:
  explicit ThetaInverse(int m);

  /// ε with |θ(ε) − y| ≤ 1e-12; DomainError unless 0 ≤ y ≤ θ(1/2, m).
  double operator()(double y) const;

  int alphabet_size() const noexcept { return m_; }
  double max_value() const noexcept { return theta_half_; }

 private:
  int m_;
  double branch_end_;
  double theta_half_;
};

double theta_inverse(double y, int m);

/// θ(1/2, m)² / (2 ln 2), the largest α for which β is defined.
double beta_domain_cap(int m);

/// β(α) = σ(θ^{-1}(√(2 ln 2 · α))) for 0 ≤ α ≤ beta_domain_cap(m).
class Beta {
 public:
  explicit Beta(int m) : inverse_(m), cap_(beta_domain_cap(m)) {}

  double operator()(double alpha) const;
  double cap() const noexcept { return cap_; }
  bool in_domain(double alpha) const noexcept { return alpha >= 0.0 && alpha <= cap_; }

 private:
  ThetaInverse inverse_;
  double cap_;
};

double beta(double alpha, int m);

/// −ε log₂(ε/m): the entropy continuity modulus for ‖P − P_Z‖₁ ≤ ε ≤ 1/2.
double entropy_modulus(double eps, int m);

/// δ(ε) + (θ/ε)·g_max: bound on |E[g(P_{Y_B})|P_B] − g(P_Z)| given
/// E[‖P_{Y_B}−P_Z‖₁|P_B] ≤ θ. DomainError for ε ≤ 0.
double continuity_transfer(const std::function<double(double)>& delta, double g_max, double theta_val,
                           double eps);

struct ContinuityMinimum {
  double eps;
  double bound;
};

/// Minimizes continuity_transfer over 1024 log-spaced ε in [1e-6, 1/2].
ContinuityMinimum minimize_continuity_transfer(const std::function<double(double)>& delta, double g_max,
                                               double theta_val);

struct EntropyRateGapCheck {
  bool premise_holds;
  bool conclusion_holds;
};

/// premise: E[‖P_{Y_B}−P_Z‖₁|P_B] ≤ θ(ε); conclusion:
/// |ℍ(P_Y)/E[ℓ(Y)] − ℍ(P_Z)| ≤ σ(ε). Throws BoundViolation when the premise
/// holds and the conclusion does not.
EntropyRateGapCheck entropy_rate_gap_check(const RootedTree& tree, const LeafDistribution& py, const Dms& pz,
                                           double eps);

/// Floating slack allowed on the conclusion side of every bound check.
inline constexpr double kBoundSlack = 1e-12;

}  // namespace leafprob
