#include "leafprob/chain_rules.hpp"

#include <cmath>

namespace leafprob {

namespace {

void require_same_tree(const RootedTree& tree, const LeafDistribution& py) {
  if (py.size() != tree.leaf_count()) {
    throw Error(ErrorKind::TreeMismatch, "leaf distribution does not belong to this tree");
  }
}

double finite_value(const NodeFunctional& f, const RootedTree& tree, NodeId node) {
  const double v = f.values[node];
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::NonFiniteFunctional,
                f.name + " is not finite at node \"" + format_label(tree.label(node), tree.alphabet_size()) +
                    "\" which has positive probability");
  }
  return v;
}

// Σ_leaves P_Y(t) f(t) − f(ε), only touching leaves of positive probability.
double leaf_side(const RootedTree& tree, const LeafDistribution& py, const NodeFunctional& f) {
  double sum = 0.0;
  for (int i = 0; i < tree.leaf_count(); ++i) {
    if (py[i] > 0.0) sum += py[i] * finite_value(f, tree, tree.leaves()[i]);
  }
  return sum - finite_value(f, tree, RootedTree::root());
}

// Σ_{t∈B} weight(t) Σ_z P_{Y_t}(z) Δf(tz), only over positive-probability branches.
template <typename Weight>
double branching_side(const RootedTree& tree, const TreeProbabilities& tp, const NodeFunctional& f,
                      Weight&& weight) {
  double sum = 0.0;
  for (int b = 0; b < tree.branching_count(); ++b) {
    if (!tp.defined[b]) continue;
    const NodeId t = tree.branching_nodes()[b];
    const double ft = finite_value(f, tree, t);
    double increment = 0.0;
    for (Letter z = 0; z < tree.alphabet_size(); ++z) {
      const double p = tp.branching(b, z);
      if (p > 0.0) increment += p * (finite_value(f, tree, tree.child(t, z)) - ft);
    }
    sum += weight(b, t) * increment;
  }
  return sum;
}

double leaf_expected_length(const RootedTree& tree, const LeafDistribution& py) {
  double sum = 0.0;
  for (int i = 0; i < tree.leaf_count(); ++i) sum += py[i] * tree.depth(tree.leaves()[i]);
  return sum;
}

}  // namespace

NodeFunctional make_functional(const RootedTree& tree, std::string name,
                               const std::function<double(const Label&)>& f) {
  NodeFunctional out{std::move(name), Eigen::VectorXd(tree.node_count())};
  for (NodeId node = 0; node < tree.node_count(); ++node) out.values[node] = f(tree.label(node));
  return out;
}

NodeFunctional path_length_functional(const RootedTree& tree) {
  NodeFunctional out{"path length", Eigen::VectorXd(tree.node_count())};
  for (NodeId node = 0; node < tree.node_count(); ++node) out.values[node] = tree.depth(node);
  return out;
}

NodeFunctional neg_log_q_functional(const RootedTree& tree, const LeafDistribution& py) {
  const auto tp = derive_probabilities(tree, py);
  return {"-log2 Q", (-tp.q.array().log2()).matrix()};
}

NodeFunctional log_q_ratio_functional(const RootedTree& tree, const LeafDistribution& py,
                                      const LeafDistribution& other) {
  require_same_tree(tree, other);
  const auto tp = derive_probabilities(tree, py);
  const auto tp_other = derive_probabilities(tree, other);
  NodeFunctional out{"log2 Q/Q'", Eigen::VectorXd(tree.node_count())};
  for (NodeId node = 0; node < tree.node_count(); ++node) {
    const double q = tp.q[node];
    const double q_other = tp_other.q[node];
    if (q <= 0.0) {
      out.values[node] = -std::numeric_limits<double>::infinity();
    } else if (q_other <= 0.0) {
      out.values[node] = std::numeric_limits<double>::infinity();
    } else {
      out.values[node] = std::log2(q / q_other);
    }
  }
  return out;
}

ChainRuleReport make_report(std::string rule_name, ExtendedReal lhs, ExtendedReal rhs) {
  double gap;
  if (lhs.is_infinite() && rhs.is_infinite()) {
    gap = 0.0;
  } else if (lhs.is_infinite() || rhs.is_infinite()) {
    gap = std::numeric_limits<double>::infinity();
  } else {
    gap = std::abs(lhs.value() - rhs.value());
  }
  return ChainRuleReport{std::move(rule_name), lhs, rhs, gap};
}

ChainRuleReport lansit(const RootedTree& tree, const LeafDistribution& py, const NodeFunctional& f) {
  require_same_tree(tree, py);
  const auto tp = derive_probabilities(tree, py);
  const double lhs = leaf_side(tree, py, f);
  const double rhs = branching_side(tree, tp, f, [&](int, NodeId t) { return tp.q[t]; });
  return make_report("LANSIT [" + f.name + "]", lhs, rhs);
}

ChainRuleReport normalized_lansit(const RootedTree& tree, const LeafDistribution& py,
                                  const NodeFunctional& f) {
  require_same_tree(tree, py);
  const auto tp = derive_probabilities(tree, py);
  const double lhs = leaf_side(tree, py, f) / leaf_expected_length(tree, py);
  const double rhs = branching_side(tree, tp, f, [&](int b, NodeId) { return tp.p_b[b]; });
  return make_report("normalized LANSIT [" + f.name + "]", lhs, rhs);
}

ChainRuleReport path_length_lemma(const RootedTree& tree, const LeafDistribution& py) {
  require_same_tree(tree, py);
  const auto tp = derive_probabilities(tree, py);
  double rhs = 0.0;
  for (NodeId t : tree.branching_nodes()) rhs += tp.q[t];
  return make_report("path length lemma", leaf_expected_length(tree, py), rhs);
}

ChainRuleReport normalized_path_length_lemma(const RootedTree& tree, const LeafDistribution& py) {
  require_same_tree(tree, py);
  const auto tp = derive_probabilities(tree, py);
  // Every increment Δℓ(tz) is 1, so the rhs is Σ P_B(t).
  return make_report("normalized path length lemma", 1.0, tp.p_b.sum());
}

ChainRuleReport leaf_entropy_lemma(const RootedTree& tree, const LeafDistribution& py) {
  require_same_tree(tree, py);
  const auto tp = derive_probabilities(tree, py);
  double rhs = 0.0;
  for (int b = 0; b < tree.branching_count(); ++b) {
    if (tp.defined[b]) rhs += tp.q[tree.branching_nodes()[b]] * entropy(tp.branching.row(b));
  }
  return make_report("leaf entropy lemma", entropy(py.probs()), rhs);
}

ChainRuleReport normalized_leaf_entropy_lemma(const RootedTree& tree, const LeafDistribution& py) {
  require_same_tree(tree, py);
  const auto tp = derive_probabilities(tree, py);
  return make_report("normalized leaf entropy lemma", entropy(py.probs()) / leaf_expected_length(tree, py),
                     conditional_entropy(tp));
}

ChainRuleReport leaf_divergence_lemma(const RootedTree& tree, const LeafDistribution& py,
                                      const LeafDistribution& other) {
  require_same_tree(tree, py);
  require_same_tree(tree, other);
  const auto tp = derive_probabilities(tree, py);
  const auto tp_other = derive_probabilities(tree, other);
  ExtendedReal rhs(0.0);
  for (int b = 0; b < tree.branching_count(); ++b) {
    if (!tp.defined[b]) continue;
    if (!tp_other.defined[b]) {
      rhs = ExtendedReal::infinity();
      break;
    }
    rhs = rhs + tp.q[tree.branching_nodes()[b]] * kl_divergence(tp.branching.row(b), tp_other.branching.row(b));
  }
  return make_report("leaf divergence lemma", kl_divergence(py.probs(), other.probs()), rhs);
}

ChainRuleReport normalized_leaf_divergence_lemma(const RootedTree& tree, const LeafDistribution& py,
                                                 const LeafDistribution& other) {
  require_same_tree(tree, py);
  require_same_tree(tree, other);
  const auto tp = derive_probabilities(tree, py);
  const auto tp_other = derive_probabilities(tree, other);
  return make_report("normalized leaf divergence lemma",
                     kl_divergence(py.probs(), other.probs()) / leaf_expected_length(tree, py),
                     conditional_divergence(tp, tp_other));
}

ChainRuleReport fixed_length_specialization_check(const RootedTree& tree, const LeafDistribution& pyn) {
  require_same_tree(tree, pyn);
  if (!tree.is_fixed_length()) {
    throw Error(ErrorKind::NotFixedLength, "leaves have different depths");
  }
  const int m = tree.alphabet_size();
  const int n = tree.max_depth();

  // Joint distribution of Y^n indexed by the base-m value of the word.
  Eigen::Index words = 1;
  for (int i = 0; i < n; ++i) words *= m;
  Eigen::VectorXd joint = Eigen::VectorXd::Zero(words);
  for (int i = 0; i < tree.leaf_count(); ++i) {
    Eigen::Index code = 0;
    for (Letter z : tree.label(tree.leaves()[i])) code = code * m + z;
    joint[code] = pyn[i];
  }

  // marginals[k] is the distribution of Y^k; marginals[n] is the joint.
  std::vector<Eigen::VectorXd> marginals(n + 1);
  marginals[n] = joint;
  for (int k = n - 1; k >= 0; --k) {
    marginals[k] = marginals[k + 1].reshaped(m, marginals[k + 1].size() / m).colwise().sum().transpose();
  }

  // Σ_i ℍ(Y_{i+1} | Y^i) = Σ_i Σ_{y^i} P(y^i) ℍ(P(· | y^i)).
  double chain = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd next = marginals[i + 1].reshaped(m, marginals[i].size());
    for (Eigen::Index prefix = 0; prefix < marginals[i].size(); ++prefix) {
      const double p = marginals[i][prefix];
      if (p > 0.0) chain += p * entropy((next.col(prefix) / p).eval());
    }
  }

  return make_report("fixed-length chain rule", chain, leaf_entropy_lemma(tree, pyn).rhs);
}

std::vector<ChainRuleReport> all_chain_rules(const RootedTree& tree, const LeafDistribution& py,
                                             const LeafDistribution& other) {
  std::vector<ChainRuleReport> out;
  const auto ell = path_length_functional(tree);
  const auto neg_log_q = neg_log_q_functional(tree, py);
  out.push_back(lansit(tree, py, ell));
  out.push_back(normalized_lansit(tree, py, ell));
  out.push_back(lansit(tree, py, neg_log_q));
  out.push_back(normalized_lansit(tree, py, neg_log_q));
  out.push_back(path_length_lemma(tree, py));
  out.push_back(normalized_path_length_lemma(tree, py));
  out.push_back(leaf_entropy_lemma(tree, py));
  out.push_back(normalized_leaf_entropy_lemma(tree, py));
  out.push_back(leaf_divergence_lemma(tree, py, other));
  out.push_back(normalized_leaf_divergence_lemma(tree, py, other));
  const auto ratio = log_q_ratio_functional(tree, py, other);
  // The ratio functional is infinite wherever the divergence is; LANSIT then
  // has no finite form, so it is only reported when both lemmas are finite.
  if (out[8].lhs.is_finite()) {
    out.push_back(lansit(tree, py, ratio));
    out.push_back(normalized_lansit(tree, py, ratio));
  }
  return out;
}

}  // namespace leafprob
