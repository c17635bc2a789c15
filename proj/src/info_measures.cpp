#include "leafprob/info_measures.hpp"

namespace leafprob {

double binary_entropy(double e) {
  if (!(e >= 0.0 && e <= 1.0)) {
    throw Error(ErrorKind::DomainError, "binary entropy argument outside [0, 1]: " + std::to_string(e));
  }
  if (e == 0.0 || e == 1.0) return 0.0;
  return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double conditional_entropy(const TreeProbabilities& tp) {
  return conditional_functional(tp, [](const auto& row) { return entropy(row); });
}

ExtendedReal conditional_divergence(const TreeProbabilities& tp, const Dms& pz) {
  if (pz.alphabet_size() != tp.branching.cols()) {
    throw Error(ErrorKind::TreeMismatch, "source alphabet does not match tree alphabet");
  }
  return conditional_functional(tp, [&](const auto& row) { return kl_divergence(row.transpose(), pz.probs()); });
}

ExtendedReal conditional_divergence(const TreeProbabilities& tp, const TreeProbabilities& other) {
  if (tp.branching.rows() != other.branching.rows() || tp.branching.cols() != other.branching.cols()) {
    throw Error(ErrorKind::TreeMismatch, "distributions live on different trees");
  }
  ExtendedReal acc(0.0);
  for (Eigen::Index b = 0; b < tp.branching.rows(); ++b) {
    if (!tp.defined[b] || tp.p_b[b] <= 0.0) continue;
    if (!other.defined[b]) return ExtendedReal::infinity();
    acc = acc + tp.p_b[b] * kl_divergence(tp.branching.row(b), other.branching.row(b));
  }
  return acc;
}

double expected_variational_distance(const TreeProbabilities& tp, const Dms& pz) {
  return conditional_functional(
      tp, [&](const auto& row) { return variational_distance(row.transpose(), pz.probs()); });
}

double expected_squared_variational_distance(const TreeProbabilities& tp, const Dms& pz) {
  return conditional_functional(tp, [&](const auto& row) {
    const double tv = variational_distance(row.transpose(), pz.probs());
    return tv * tv;
  });
}

}  // namespace leafprob
