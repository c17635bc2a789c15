#pragma once

#include "leafprob/info_measures.hpp"
#include "leafprob/tree.hpp"

#include <functional>
#include <string>
#include <vector>

namespace leafprob {

/// A real value per tree node (indexed by node id). Values at nodes with
/// Q(t) = 0 may be infinite; they never enter either side of a chain rule.
struct NodeFunctional {
  std::string name;
  Eigen::VectorXd values;
};

NodeFunctional make_functional(const RootedTree& tree, std::string name,
                               const std::function<double(const Label&)>& f);

/// ℓ(t).
NodeFunctional path_length_functional(const RootedTree& tree);
/// −log₂ Q(t).
NodeFunctional neg_log_q_functional(const RootedTree& tree, const LeafDistribution& py);
/// log₂ Q(t)/Q'(t), where Q' belongs to `other`.
NodeFunctional log_q_ratio_functional(const RootedTree& tree, const LeafDistribution& py,
                                      const LeafDistribution& other);

/// Both sides of a chain rule, each computed along its own route: the lhs from
/// the leaves, the rhs from the branching decomposition.
struct ChainRuleReport {
  std::string rule_name;
  ExtendedReal lhs;
  ExtendedReal rhs;
  /// |lhs − rhs|; 0 when both sides are +∞, +∞ when only one is.
  double abs_gap = 0.0;

  bool holds(double tolerance = 1e-12) const { return abs_gap <= tolerance; }
};

ChainRuleReport make_report(std::string rule_name, ExtendedReal lhs, ExtendedReal rhs);

/// E[f(Y)] − f(ε) against Σ_{t∈B} Q(t)·E[Δf(tY_t)].
/// Throws NonFiniteFunctional if f is infinite on a node with positive probability.
ChainRuleReport lansit(const RootedTree& tree, const LeafDistribution& py, const NodeFunctional& f);

/// (E[f(Y)] − f(ε))/E[ℓ(Y)] against Σ_{t∈B} P_B(t)·E[Δf(tY_t)].
ChainRuleReport normalized_lansit(const RootedTree& tree, const LeafDistribution& py,
                                  const NodeFunctional& f);

ChainRuleReport path_length_lemma(const RootedTree& tree, const LeafDistribution& py);
ChainRuleReport normalized_path_length_lemma(const RootedTree& tree, const LeafDistribution& py);

ChainRuleReport leaf_entropy_lemma(const RootedTree& tree, const LeafDistribution& py);
ChainRuleReport normalized_leaf_entropy_lemma(const RootedTree& tree, const LeafDistribution& py);

/// 𝔻(P_Y‖P_{Y'}) against Σ Q(t) 𝔻(P_{Y_t}‖P_{Y'_t}). Both sides are +∞ when
/// the support condition fails.
ChainRuleReport leaf_divergence_lemma(const RootedTree& tree, const LeafDistribution& py,
                                      const LeafDistribution& other);
ChainRuleReport normalized_leaf_divergence_lemma(const RootedTree& tree, const LeafDistribution& py,
                                                 const LeafDistribution& other);

/// For a full depth-n tree: the textbook chain rule Σ_i ℍ(Y_{i+1}|Y^i), computed
/// from the joint distribution, against the Leaf Entropy Lemma's node sum.
/// Throws NotFixedLength otherwise.
ChainRuleReport fixed_length_specialization_check(const RootedTree& tree, const LeafDistribution& pyn);

/// Every rule above (LANSIT in both forms for the three named functionals, and
/// the three lemmas in both forms), comparing `py` against `other`.
std::vector<ChainRuleReport> all_chain_rules(const RootedTree& tree, const LeafDistribution& py,
                                             const LeafDistribution& other);

}  // namespace leafprob
