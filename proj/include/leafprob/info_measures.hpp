#pragma once

// Entropy, informational divergence and variational distance in bits, plus the
// P_B-weighted averages over branching distributions used by the normalized
// chain rules. All sums run over supports, so 0 log 0 = 0.

#include "leafprob/error.hpp"
#include "leafprob/tree.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <type_traits>

namespace leafprob {

/// A real number or +∞. Divergence is +∞ exactly when the support condition fails.
template <typename Scalar>
class Extended {
 public:
  constexpr Extended(Scalar value = Scalar(0)) : value_(value) {}  // NOLINT: implicit by design of the carrier
  static constexpr Extended infinity() { return Extended(std::numeric_limits<Scalar>::infinity()); }

  constexpr bool is_infinite() const { return value_ == std::numeric_limits<Scalar>::infinity(); }
  constexpr bool is_finite() const { return !is_infinite(); }
  /// The value; +inf when infinite.
  constexpr Scalar value() const { return value_; }

  friend constexpr Extended operator+(Extended a, Extended b) { return Extended(a.value_ + b.value_); }
  friend constexpr Extended operator-(Extended a, Scalar b) { return Extended(a.value_ - b); }
  friend constexpr Extended operator*(Scalar w, Extended a) { return Extended(w * a.value_); }
  friend constexpr Extended operator/(Extended a, Scalar d) { return Extended(a.value_ / d); }
  friend constexpr bool operator<=(Extended a, Extended b) { return a.value_ <= b.value_; }
  friend constexpr bool operator<(Extended a, Extended b) { return a.value_ < b.value_; }

 private:
  Scalar value_;
};

using ExtendedReal = Extended<double>;

namespace detail {
template <typename A, typename B>
void require_same_size(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::DomainError, "distributions over different supports");
  }
}
}  // namespace detail

/// ℍ(p) = Σ_{z∈supp p} p(z)·(−log₂ p(z)).
template <typename Derived>
typename Derived::Scalar entropy(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar pi = p.derived().coeff(i);
    if (pi > Scalar(0)) h -= pi * std::log2(pi);
  }
  return h;
}

/// 𝔻(p‖q) = Σ_{z∈supp p} p(z) log₂(p(z)/q(z)); +∞ if p(z) > 0 = q(z) for some z.
template <typename DerivedP, typename DerivedQ>
Extended<typename DerivedP::Scalar> kl_divergence(const Eigen::MatrixBase<DerivedP>& p,
                                                  const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  detail::require_same_size(p, q);
  Scalar d(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar pi = p.derived().coeff(i);
    if (pi <= Scalar(0)) continue;
    const Scalar qi = q.derived().coeff(i);
    if (qi <= Scalar(0)) return Extended<Scalar>::infinity();
    d += pi * std::log2(pi / qi);
  }
  // Rounding can leave a tiny negative value for p ≈ q.
  return Extended<Scalar>(d < Scalar(0) ? Scalar(0) : d);
}

/// ‖p − q‖₁.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar variational_distance(const Eigen::MatrixBase<DerivedP>& p,
                                               const Eigen::MatrixBase<DerivedQ>& q) {
  detail::require_same_size(p, q);
  return (p.derived().reshaped() - q.derived().reshaped()).cwiseAbs().sum();
}

/// ℍ₂(e); throws DomainError outside [0, 1].
double binary_entropy(double e);

/// E[g(P_{Y_B}) | P_B] = Σ_{t∈B} P_B(t)·g(P_{Y_t}).
///
/// Nodes with Q(t) = 0 carry no weight and g is never called on them. `g` gets
/// the branching distribution as an Eigen row expression and may return a
/// plain scalar or an ExtendedReal.
template <typename G>
auto conditional_functional(const TreeProbabilities& tp, G&& g) {
  using Row = decltype(tp.branching.row(0));
  using Result = std::decay_t<std::invoke_result_t<G&, Row>>;
  Result acc(0.0);
  for (Eigen::Index b = 0; b < tp.branching.rows(); ++b) {
    if (!tp.defined[b] || tp.p_b[b] <= 0.0) continue;
    acc = acc + tp.p_b[b] * g(tp.branching.row(b));
  }
  return acc;
}

/// ℍ(P_{Y_B} | P_B).
double conditional_entropy(const TreeProbabilities& tp);

/// 𝔻(P_{Y_B} ‖ P_Z | P_B).
ExtendedReal conditional_divergence(const TreeProbabilities& tp, const Dms& pz);

/// 𝔻(P_{Y_B} ‖ P_{Y'_B} | P_B) for two leaf distributions on the same tree.
/// A node with Q(t) > 0 but Q'(t) = 0 makes the result +∞.
ExtendedReal conditional_divergence(const TreeProbabilities& tp, const TreeProbabilities& other);

/// E[‖P_{Y_B} − P_Z‖₁ | P_B].
double expected_variational_distance(const TreeProbabilities& tp, const Dms& pz);

/// E[‖P_{Y_B} − P_Z‖₁² | P_B].
double expected_squared_variational_distance(const TreeProbabilities& tp, const Dms& pz);

}  // namespace leafprob
