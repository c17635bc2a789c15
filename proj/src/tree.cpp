#include "leafprob/tree.hpp"

#include "leafprob/error.hpp"
#include "spec_json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace leafprob {

namespace {

constexpr double kInputTolerance = 1e-9;
constexpr double kInternalTolerance = 1e-12;

void check_alphabet(int alphabet_size) {
  if (alphabet_size < 2) {
    throw Error(ErrorKind::InvalidLabel, "alphabet size must be at least 2, got " +
                                             std::to_string(alphabet_size));
  }
}

Eigen::VectorXd validated_probabilities(Eigen::VectorXd probs, std::string_view what) {
  if (probs.size() == 0) {
    throw Error(ErrorKind::BadProbability, std::string(what) + " is empty");
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw Error(ErrorKind::BadProbability,
                  std::string(what) + " entry " + std::to_string(i) + " is negative or not finite");
    }
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > kInputTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " sums to " << total << ", not 1";
    throw Error(ErrorKind::BadProbability, msg.str());
  }
  probs /= total;
  return probs;
}

// Trie used while building; converted to the preorder layout afterwards.
struct TrieNode {
  std::vector<int> children;
  bool leaf = false;
};

}  // namespace

std::string format_label(const Label& label, int alphabet_size) {
  std::string out;
  if (alphabet_size <= 10) {
    for (Letter z : label) out.push_back(static_cast<char>('0' + z));
    return out;
  }
  out.push_back('[');
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += std::to_string(label[i]);
  }
  out.push_back(']');
  return out;
}

Label parse_label(std::string_view text, int alphabet_size) {
  if (alphabet_size > 10) {
    throw Error(ErrorKind::InvalidLabel,
                "digit-string labels need alphabet size <= 10; use an integer array");
  }
  Label label;
  label.reserve(text.size());
  for (char c : text) {
    if (c < '0' || c > '9' || c - '0' >= alphabet_size) {
      throw Error(ErrorKind::InvalidLabel, "bad letter '" + std::string(1, c) + "' in label \"" +
                                               std::string(text) + "\"");
    }
    label.push_back(c - '0');
  }
  return label;
}

RootedTree RootedTree::from_leaves(int alphabet_size, std::span<const Label> leaves) {
  check_alphabet(alphabet_size);
  const int m = alphabet_size;
  std::vector<TrieNode> trie(1);
  trie[0].children.assign(m, -1);

  for (const Label& label : leaves) {
    if (label.empty()) {
      throw Error(ErrorKind::InvalidLabel, "the root cannot be a leaf");
    }
    int node = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
      const Letter z = label[i];
      if (z < 0 || z >= m) {
        throw Error(ErrorKind::InvalidLabel, "letter " + std::to_string(z) + " outside alphabet");
      }
      if (trie[node].leaf) {
        throw Error(ErrorKind::KraftViolation,
                    "leaf " + format_label(Label(label.begin(), label.begin() + i), m) +
                        " is a prefix of " + format_label(label, m));
      }
      int next = trie[node].children[z];
      if (next < 0) {
        next = static_cast<int>(trie.size());
        trie[node].children[z] = next;
        trie.push_back(TrieNode{std::vector<int>(m, -1), false});
      }
      node = next;
    }
    if (trie[node].leaf) {
      throw Error(ErrorKind::DuplicateLeaf, "leaf " + format_label(label, m) + " listed twice");
    }
    const bool has_children =
        std::any_of(trie[node].children.begin(), trie[node].children.end(), [](int c) { return c >= 0; });
    if (has_children) {
      throw Error(ErrorKind::KraftViolation,
                  "leaf " + format_label(label, m) + " is a prefix of another leaf");
    }
    trie[node].leaf = true;
  }

  RootedTree tree;
  tree.alphabet_size_ = m;

  // Preorder walk; a non-leaf trie node missing a child means the set is incomplete.
  struct Frame {
    int trie_node;
    NodeId parent;
    Label label;
  };
  std::vector<Frame> stack{{0, -1, {}}};
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const NodeId id = tree.node_count();
    tree.labels_.push_back(frame.label);
    tree.parent_.push_back(frame.parent);
    tree.max_depth_ = std::max(tree.max_depth_, static_cast<int>(frame.label.size()));
    const TrieNode& tn = trie[frame.trie_node];
    if (tn.leaf) {
      tree.leaf_index_.push_back(tree.leaf_count());
      tree.branch_index_.push_back(-1);
      tree.leaves_.push_back(id);
      continue;
    }
    for (int z = 0; z < m; ++z) {
      if (tn.children[z] < 0) {
        long double kraft = 0.0L;
        for (const Label& l : leaves) kraft += std::pow(static_cast<long double>(m), -static_cast<long double>(l.size()));
        std::ostringstream msg;
        msg << "leaf set is not complete: node " << format_label(frame.label, m)
            << " has no child " << z << " (Kraft sum " << static_cast<double>(kraft) << ")";
        throw Error(ErrorKind::KraftViolation, msg.str());
      }
    }
    tree.leaf_index_.push_back(-1);
    tree.branch_index_.push_back(tree.branching_count());
    tree.branching_.push_back(id);
    // Child slots are filled once the children get their preorder ids.
    tree.children_.resize(tree.children_.size() + m, -1);
    for (int z = m - 1; z >= 0; --z) {
      Label child_label = frame.label;
      child_label.push_back(z);
      stack.push_back({tn.children[z], id, std::move(child_label)});
    }
  }
  for (NodeId id = 1; id < tree.node_count(); ++id) {
    const NodeId p = tree.parent_[id];
    const Letter z = tree.labels_[id].back();
    tree.children_[static_cast<std::size_t>(tree.branch_index_[p]) * m + z] = id;
  }
  return tree;
}

RootedTree RootedTree::full(int alphabet_size, int depth) {
  check_alphabet(alphabet_size);
  if (depth < 1) throw Error(ErrorKind::InvalidLabel, "full tree depth must be at least 1");
  std::vector<Label> leaves;
  Label current(depth, 0);
  while (true) {
    leaves.push_back(current);
    int pos = depth - 1;
    while (pos >= 0 && current[pos] == alphabet_size - 1) current[pos--] = 0;
    if (pos < 0) break;
    ++current[pos];
  }
  return from_leaves(alphabet_size, leaves);
}

std::optional<NodeId> RootedTree::find_node(const Label& label) const {
  NodeId node = root();
  for (Letter z : label) {
    if (z < 0 || z >= alphabet_size_ || is_leaf(node)) return std::nullopt;
    node = child(node, z);
  }
  return node;
}

std::optional<int> RootedTree::find_leaf(const Label& label) const {
  const auto node = find_node(label);
  if (!node || !is_leaf(*node)) return std::nullopt;
  return leaf_index(*node);
}

bool RootedTree::is_fixed_length() const {
  return std::all_of(leaves_.begin(), leaves_.end(),
                     [&](NodeId leaf) { return depth(leaf) == max_depth_; });
}

long double RootedTree::kraft_sum() const {
  long double sum = 0.0L;
  for (NodeId leaf : leaves_) {
    sum += std::pow(static_cast<long double>(alphabet_size_), -static_cast<long double>(depth(leaf)));
  }
  return sum;
}

LeafDistribution LeafDistribution::create(const RootedTree& tree, Eigen::VectorXd probs) {
  if (probs.size() != tree.leaf_count()) {
    throw Error(ErrorKind::TreeMismatch, "leaf distribution has " + std::to_string(probs.size()) +
                                             " entries, tree has " +
                                             std::to_string(tree.leaf_count()) + " leaves");
  }
  return LeafDistribution(validated_probabilities(std::move(probs), "leaf distribution"));
}

LeafDistribution LeafDistribution::from_labels(const RootedTree& tree,
                                               std::span<const std::pair<Label, double>> entries) {
  Eigen::VectorXd probs = Eigen::VectorXd::Constant(tree.leaf_count(), -1.0);
  for (const auto& [label, p] : entries) {
    const auto leaf = tree.find_leaf(label);
    if (!leaf) {
      throw Error(ErrorKind::TreeMismatch,
                  "label " + format_label(label, tree.alphabet_size()) + " is not a leaf");
    }
    if (probs[*leaf] != -1.0) {
      throw Error(ErrorKind::DuplicateLeaf,
                  "leaf " + format_label(label, tree.alphabet_size()) + " listed twice");
    }
    probs[*leaf] = p;
  }
  for (int i = 0; i < tree.leaf_count(); ++i) {
    if (probs[i] == -1.0) {
      throw Error(ErrorKind::BadProbability,
                  "no probability for leaf " + format_label(tree.label(tree.leaves()[i]), tree.alphabet_size()));
    }
  }
  return create(tree, std::move(probs));
}

Dms Dms::create(Eigen::VectorXd probs) {
  if (probs.size() < 2) throw Error(ErrorKind::BadProbability, "source needs at least two letters");
  return Dms(validated_probabilities(std::move(probs), "source distribution"));
}

Dms Dms::uniform(int alphabet_size) {
  check_alphabet(alphabet_size);
  return Dms(Eigen::VectorXd::Constant(alphabet_size, 1.0 / alphabet_size));
}

TreeProbabilities derive_probabilities(const RootedTree& tree, const LeafDistribution& py) {
  if (py.size() != tree.leaf_count()) {
    throw Error(ErrorKind::TreeMismatch, "leaf distribution does not match tree");
  }
  const int m = tree.alphabet_size();
  TreeProbabilities tp;
  tp.q = Eigen::VectorXd::Zero(tree.node_count());

  // Preorder puts every child after its parent, so a reverse sweep sees all
  // children of a node before the node itself.
  for (NodeId node = tree.node_count() - 1; node >= 0; --node) {
    if (tree.is_leaf(node)) {
      tp.q[node] = py[tree.leaf_index(node)];
    } else {
      double sum = 0.0;
      for (Letter z = 0; z < m; ++z) sum += tp.q[tree.child(node, z)];
      tp.q[node] = sum;
    }
  }

  const int nb = tree.branching_count();
  tp.branching = Eigen::MatrixXd::Zero(nb, m);
  tp.defined.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const NodeId node = tree.branching_nodes()[b];
    const double q = tp.q[node];
    tp.defined[b] = q > 0.0;
    if (!tp.defined[b]) continue;
    for (Letter z = 0; z < m; ++z) tp.branching(b, z) = tp.q[tree.child(node, z)] / q;
  }

  double branch_sum = 0.0;
  for (NodeId node : tree.branching_nodes()) branch_sum += tp.q[node];
  tp.expected_length = branch_sum;

  double leaf_side = 0.0;
  for (int i = 0; i < tree.leaf_count(); ++i) leaf_side += py[i] * tree.depth(tree.leaves()[i]);

  tp.p_b = Eigen::VectorXd::Zero(nb);
  for (int b = 0; b < nb; ++b) tp.p_b[b] = tp.q[tree.branching_nodes()[b]] / tp.expected_length;

  if (std::abs(tp.q[RootedTree::root()] - 1.0) > kInternalTolerance ||
      std::abs(tp.p_b.sum() - 1.0) > kInternalTolerance ||
      std::abs(leaf_side - branch_sum) > kInternalTolerance * std::max(1.0, branch_sum)) {
    throw Error(ErrorKind::InvariantViolation, "tree probabilities failed the path length check");
  }
  return tp;
}

LeafDistribution induced_leaf_distribution(const RootedTree& tree, const Dms& pz) {
  if (pz.alphabet_size() != tree.alphabet_size()) {
    throw Error(ErrorKind::TreeMismatch, "source alphabet does not match tree alphabet");
  }
  std::vector<double> node_prob(tree.node_count());
  node_prob[RootedTree::root()] = 1.0;
  Eigen::VectorXd probs(tree.leaf_count());
  for (NodeId node = 1; node < tree.node_count(); ++node) {
    node_prob[node] = node_prob[tree.parent(node)] * pz[tree.label(node).back()];
    if (tree.is_leaf(node)) probs[tree.leaf_index(node)] = node_prob[node];
  }
  return LeafDistribution::create(tree, std::move(probs));
}

// --- spec parsing ---------------------------------------------------------

namespace detail {

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double parse_probability(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_object() && value.contains("num") && value.contains("den")) {
    const long double num = value.at("num").get<long double>();
    const long double den = value.at("den").get<long double>();
    if (den <= 0.0L) throw Error(ErrorKind::BadProbability, "rational probability with nonpositive denominator");
    return static_cast<double>(num / den);
  }
  throw Error(ErrorKind::ParseError, "probability must be a number or {\"num\", \"den\"}: " + value.dump());
}

Label parse_label(const json& value, int alphabet_size) {
  if (value.is_string()) return leafprob::parse_label(value.get<std::string>(), alphabet_size);
  if (value.is_array()) {
    Label label;
    for (const auto& z : value) {
      if (!z.is_number_integer()) throw Error(ErrorKind::InvalidLabel, "label arrays hold integers: " + value.dump());
      label.push_back(z.get<int>());
    }
    return label;
  }
  throw Error(ErrorKind::ParseError, "label must be a digit string or integer array: " + value.dump());
}

Eigen::VectorXd parse_probability_vector(const json& value) {
  if (!value.is_array()) throw Error(ErrorKind::ParseError, "expected an array of probabilities");
  Eigen::VectorXd out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) out[static_cast<Eigen::Index>(i)] = parse_probability(value[i]);
  return out;
}

TreeStructure parse_tree_structure(const json& spec) {
  try {
    if (!spec.is_object() || !spec.contains("alphabet_size") || !spec.contains("leaves")) {
      throw Error(ErrorKind::ParseError, "tree spec needs \"alphabet_size\" and \"leaves\"");
    }
    const int m = spec.at("alphabet_size").get<int>();
    check_alphabet(m);
    std::vector<Label> labels;
    std::vector<std::optional<double>> probs;
    for (const auto& entry : spec.at("leaves")) {
      labels.push_back(parse_label(entry.at("label"), m));
      if (entry.contains("prob")) {
        probs.emplace_back(parse_probability(entry.at("prob")));
      } else {
        probs.emplace_back(std::nullopt);
      }
    }
    RootedTree tree = RootedTree::from_leaves(m, labels);
    return TreeStructure{std::move(tree), std::move(labels), std::move(probs)};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace detail

TreeSpec parse_tree_spec(std::string_view json_text) {
  auto structure = detail::parse_tree_structure(detail::parse_json_text(json_text));
  std::vector<std::pair<Label, double>> entries;
  for (std::size_t i = 0; i < structure.listed_order.size(); ++i) {
    if (!structure.listed_probs[i]) {
      throw Error(ErrorKind::BadProbability, "leaf " +
                                                 format_label(structure.listed_order[i], structure.tree.alphabet_size()) +
                                                 " has no \"prob\"");
    }
    entries.emplace_back(structure.listed_order[i], *structure.listed_probs[i]);
  }
  auto py = LeafDistribution::from_labels(structure.tree, entries);
  return TreeSpec{std::move(structure.tree), std::move(py), std::move(structure.listed_order)};
}

TreeSpec load_tree_spec(const std::string& path) { return parse_tree_spec(detail::read_file(path)); }

Dms parse_dms(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    std::string token(text.substr(start, end - start));
    token.erase(std::remove_if(token.begin(), token.end(), ::isspace), token.end());
    if (token.empty()) throw Error(ErrorKind::ParseError, "empty entry in probability list");
    const auto slash = token.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } else {
        std::size_t used_den = 0;
        const std::string num_text = token.substr(0, slash);
        const std::string den_text = token.substr(slash + 1);
        const long double num = std::stold(num_text, &used);
        const long double den = std::stold(den_text, &used_den);
        if (used != num_text.size() || used_den != den_text.size()) throw std::invalid_argument(token);
        values.push_back(static_cast<double>(num / den));
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "bad probability \"" + token + "\"");
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return Dms::create(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace leafprob
