#include "leafprob/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace leafprob {

namespace {

constexpr double kTwoLn2 = 2.0 * std::numbers::ln2;

void check_eps(double eps, int m) {
  if (m < 2) throw Error(ErrorKind::DomainError, "alphabet size must be at least 2");
  if (!(eps >= 0.0 && eps <= 0.5)) {
    throw Error(ErrorKind::DomainError, "epsilon must lie in [0, 1/2], got " + std::to_string(eps));
  }
}

}  // namespace

PinskerChainReport normalized_pinsker(const RootedTree& tree, const LeafDistribution& py, const Dms& pz) {
  const auto tp = derive_probabilities(tree, py);
  const auto pz_leaves = induced_leaf_distribution(tree, pz);

  PinskerChainReport report;
  report.divergence_rate = kl_divergence(py.probs(), pz_leaves.probs()) / tp.expected_length;
  report.step_a = conditional_divergence(tp, pz);
  report.expected_tv = expected_variational_distance(tp, pz);
  report.step_b = expected_squared_variational_distance(tp, pz) / kTwoLn2;
  report.step_c = report.expected_tv * report.expected_tv / kTwoLn2;

  const bool both_infinite = report.divergence_rate.is_infinite() && report.step_a.is_infinite();
  const bool both_finite = report.divergence_rate.is_finite() && report.step_a.is_finite();
  if (!both_infinite &&
      !(both_finite && std::abs(report.divergence_rate.value() - report.step_a.value()) <= 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "normalized leaf divergence lemma failed: " << report.divergence_rate.value() << " vs "
        << report.step_a.value();
    throw Error(ErrorKind::InvariantViolation, msg.str());
  }
  return report;
}

double naive_fixed_length_bound(int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "n must be at least 1");
  return std::sqrt(std::sqrt(static_cast<double>(n)) * kTwoLn2);
}

double theta(double eps, int m) {
  check_eps(eps, m);
  if (eps == 0.0) return 0.0;
  const double log_m = std::log2(static_cast<double>(m));
  return eps * eps * (log_m - std::numbers::log2e - std::log2(eps)) / log_m;
}

double sigma(double eps, int m) {
  check_eps(eps, m);
  if (eps == 0.0) return 0.0;
  return eps * (2.0 * std::log2(static_cast<double>(m)) - std::numbers::log2e - 2.0 * std::log2(eps));
}

double theta_increasing_end(int m) {
  if (m < 2) throw Error(ErrorKind::DomainError, "alphabet size must be at least 2");
  // θ'(ε) ∝ 2 log₂(m/(eε)) − log₂ e vanishes at ε = m e^{-3/2}.
  return std::min(0.5, m * std::exp(-1.5));
}

bool theta_strictly_increasing(int m, double lo, double hi, int points) {
  double previous = theta(lo, m);
  for (int i = 1; i < points; ++i) {
    const double eps = lo + (hi - lo) * i / (points - 1);
    const double current = theta(eps, m);
    if (!(current > previous)) return false;
    previous = current;
  }
  return true;
}

ThetaInverse::ThetaInverse(int m) : m_(m), branch_end_(theta_increasing_end(m)), theta_half_(theta(0.5, m)) {
  if (!theta_strictly_increasing(m, 0.0, branch_end_)) {
    throw Error(ErrorKind::MonotonicityViolation,
                "theta is not strictly increasing on [0, " + std::to_string(branch_end_) + "]");
  }
}

double ThetaInverse::operator()(double y) const {
  if (!(y >= 0.0 && y <= theta_half_)) {
    throw Error(ErrorKind::DomainError, "theta inverse argument outside [0, theta(1/2)]: " + std::to_string(y));
  }
  if (y == 0.0) return 0.0;
  double lo = 0.0;
  double hi = branch_end_;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (theta(mid, m_) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double eps = std::abs(theta(lo, m_) - y) < std::abs(theta(hi, m_) - y) ? lo : hi;
  if (std::abs(theta(eps, m_) - y) > 1e-12) {
    throw Error(ErrorKind::InvariantViolation, "theta inverse bisection did not converge");
  }
  return eps;
}

double theta_inverse(double y, int m) { return ThetaInverse(m)(y); }

double beta_domain_cap(int m) {
  const double t = theta(0.5, m);
  return t * t / kTwoLn2;
}

double Beta::operator()(double alpha) const {
  if (!in_domain(alpha)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "alpha " << alpha << " outside beta's domain [0, " << cap_ << "]";
    throw Error(ErrorKind::DomainError, msg.str());
  }
  const double y = std::min(std::sqrt(kTwoLn2 * alpha), inverse_.max_value());
  return sigma(inverse_(y), inverse_.alphabet_size());
}

double beta(double alpha, int m) { return Beta(m)(alpha); }

double entropy_modulus(double eps, int m) {
  check_eps(eps, m);
  if (eps == 0.0) return 0.0;
  return -eps * std::log2(eps / m);
}

double continuity_transfer(const std::function<double(double)>& delta, double g_max, double theta_val,
                           double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::DomainError, "epsilon must be positive");
  return delta(eps) + theta_val / eps * g_max;
}

ContinuityMinimum minimize_continuity_transfer(const std::function<double(double)>& delta, double g_max,
                                               double theta_val) {
  constexpr int kPoints = 1024;
  constexpr double kLo = 1e-6;
  constexpr double kHi = 0.5;
  ContinuityMinimum best{kLo, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < kPoints; ++i) {
    const double eps = i == kPoints - 1 ? kHi : kLo * std::pow(kHi / kLo, static_cast<double>(i) / (kPoints - 1));
    const double bound = continuity_transfer(delta, g_max, theta_val, eps);
    if (bound < best.bound) best = {eps, bound};
  }
  return best;
}

EntropyRateGapCheck entropy_rate_gap_check(const RootedTree& tree, const LeafDistribution& py, const Dms& pz,
                                           double eps) {
  const int m = tree.alphabet_size();
  const auto tp = derive_probabilities(tree, py);
  const double rate = entropy(py.probs()) / tp.expected_length;
  const double expected_tv = expected_variational_distance(tp, pz);

  EntropyRateGapCheck check;
  check.premise_holds = expected_tv <= theta(eps, m);
  check.conclusion_holds = std::abs(rate - entropy(pz.probs())) <= sigma(eps, m) + kBoundSlack;
  if (check.premise_holds && !check.conclusion_holds) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "entropy rate " << rate << " is farther than sigma(" << eps << ") = " << sigma(eps, m)
        << " from H(P_Z) = " << entropy(pz.probs()) << " although E[TV] = " << expected_tv
        << " <= theta = " << theta(eps, m);
    throw Error(ErrorKind::BoundViolation, msg.str());
  }
  return check;
}

}  // namespace leafprob
