#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leafprob {

using Letter = int;
/// Path from the root; the root is the empty label.
using Label = std::vector<Letter>;
using NodeId = int;

/// Digits for alphabets up to 10 letters, "[a,b,...]" otherwise.
std::string format_label(const Label& label, int alphabet_size);

/// Parses the digit-string form of a label. Only valid for alphabet_size <= 10.
Label parse_label(std::string_view text, int alphabet_size);

/// A finite complete m-ary rooted tree.
///
/// Nodes are stored in depth-first preorder with the root at index 0, so every
/// child has a larger index than its parent. Leaves and branching nodes each get
/// a dense index (in the same preorder) used to address Eigen vectors over them.
/// Instances are immutable once built.
class RootedTree {
 public:
  /// Builds the tree whose leaf set is `leaves`.
  ///
  /// Throws DuplicateLeaf for repeated labels, KraftViolation if the set is not
  /// prefix-free or not complete, and InvalidLabel for out-of-range letters or
  /// an empty label.
  static RootedTree from_leaves(int alphabet_size, std::span<const Label> leaves);

  /// The full m-ary tree of the given depth (all leaves at depth `depth`).
  static RootedTree full(int alphabet_size, int depth);

  int alphabet_size() const noexcept { return alphabet_size_; }
  int node_count() const noexcept { return static_cast<int>(parent_.size()); }
  int leaf_count() const noexcept { return static_cast<int>(leaves_.size()); }
  int branching_count() const noexcept { return static_cast<int>(branching_.size()); }

  static constexpr NodeId root() noexcept { return 0; }
  const Label& label(NodeId node) const { return labels_[node]; }
  int depth(NodeId node) const { return static_cast<int>(labels_[node].size()); }
  NodeId parent(NodeId node) const { return parent_[node]; }
  bool is_leaf(NodeId node) const { return leaf_index_[node] >= 0; }
  /// Child reached by `letter`; only valid for branching nodes.
  NodeId child(NodeId node, Letter letter) const {
    return children_[static_cast<std::size_t>(branch_index_[node]) * alphabet_size_ + letter];
  }

  /// Node ids of the leaves, indexed by leaf index.
  std::span<const NodeId> leaves() const noexcept { return leaves_; }
  /// Node ids of the branching nodes, indexed by branch index.
  std::span<const NodeId> branching_nodes() const noexcept { return branching_; }
  int leaf_index(NodeId node) const { return leaf_index_[node]; }
  int branch_index(NodeId node) const { return branch_index_[node]; }

  std::optional<NodeId> find_node(const Label& label) const;
  std::optional<int> find_leaf(const Label& label) const;

  int max_depth() const noexcept { return max_depth_; }
  /// True if every leaf has the same depth.
  bool is_fixed_length() const;
  /// Σ_leaves m^{-ℓ(t)}; exactly 1 for every constructed tree up to rounding.
  long double kraft_sum() const;

 private:
  RootedTree() = default;

  int alphabet_size_ = 0;
  int max_depth_ = 0;
  std::vector<Label> labels_;
  std::vector<NodeId> parent_;
  std::vector<int> leaf_index_;
  std::vector<int> branch_index_;
  std::vector<NodeId> children_;
  std::vector<NodeId> leaves_;
  std::vector<NodeId> branching_;
};

/// Distribution over the leaves of a tree, indexed by leaf index.
class LeafDistribution {
 public:
  /// Validates nonnegativity and normalization (tolerance 1e-9), then rescales to
  /// sum exactly to one. Throws BadProbability or TreeMismatch.
  static LeafDistribution create(const RootedTree& tree, Eigen::VectorXd probs);

  /// Same as `create`, keyed by leaf label; every leaf must appear exactly once.
  static LeafDistribution from_labels(const RootedTree& tree,
                                      std::span<const std::pair<Label, double>> entries);

  const Eigen::VectorXd& probs() const noexcept { return probs_; }
  double operator[](int leaf) const { return probs_[leaf]; }
  int size() const noexcept { return static_cast<int>(probs_.size()); }

 private:
  explicit LeafDistribution(Eigen::VectorXd probs) : probs_(std::move(probs)) {}
  Eigen::VectorXd probs_;
};

/// Memoryless source distribution over the alphabet {0,...,m-1}.
class Dms {
 public:
  static Dms create(Eigen::VectorXd probs);
  static Dms uniform(int alphabet_size);

  const Eigen::VectorXd& probs() const noexcept { return probs_; }
  double operator[](Letter z) const { return probs_[z]; }
  int alphabet_size() const noexcept { return static_cast<int>(probs_.size()); }

 private:
  explicit Dms(Eigen::VectorXd probs) : probs_(std::move(probs)) {}
  Eigen::VectorXd probs_;
};

/// Everything a leaf distribution induces on its tree.
struct TreeProbabilities {
  /// Q(t) per node id.
  Eigen::VectorXd q;
  /// Row b is the branching distribution at branching node b. Rows where
  /// Q(t) = 0 are undefined and left at zero.
  Eigen::MatrixXd branching;
  Eigen::Array<bool, Eigen::Dynamic, 1> defined;
  /// P_B(t) = Q(t)/E[ℓ(Y)] per branching index.
  Eigen::VectorXd p_b;
  /// E[ℓ(Y)] = Σ_{t∈B} Q(t).
  double expected_length = 0.0;
};

/// Computes Q, the branching distributions, P_B and E[ℓ(Y)].
///
/// Throws InvariantViolation if Q(ε)=1, ΣP_B=1 or the two evaluations of the
/// path length disagree by more than 1e-12.
TreeProbabilities derive_probabilities(const RootedTree& tree, const LeafDistribution& py);

/// P_Z^L(t) = Π_i P_Z(t_i).
LeafDistribution induced_leaf_distribution(const RootedTree& tree, const Dms& pz);

/// A parsed tree spec file.
struct TreeSpec {
  RootedTree tree;
  LeafDistribution py;
  /// Leaf labels in the order the file listed them.
  std::vector<Label> listed_order;
};

/// Parses `{"alphabet_size": m, "leaves": [{"label": ..., "prob": ...}, ...]}`.
/// Labels are digit strings (m <= 10) or integer arrays; probabilities are
/// numbers or `{"num": p, "den": q}`.
TreeSpec parse_tree_spec(std::string_view json_text);

TreeSpec load_tree_spec(const std::string& path);

/// Parses a comma-separated list of probabilities, e.g. "0.333,0.667" or "1/3,2/3".
Dms parse_dms(std::string_view text);

}  // namespace leafprob
