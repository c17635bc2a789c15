#pragma once

// JSON helpers shared by the tree and encoder spec parsers.

#include "leafprob/tree.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace leafprob::detail {

using json = nlohmann::json;

double parse_probability(const json& value);
Label parse_label(const json& value, int alphabet_size);
Eigen::VectorXd parse_probability_vector(const json& value);

struct TreeStructure {
  RootedTree tree;
  std::vector<Label> listed_order;
  std::vector<std::optional<double>> listed_probs;
};

/// Parses a tree spec object; "prob" entries may be missing.
TreeStructure parse_tree_structure(const json& spec);

json parse_json_text(std::string_view text);
std::string read_file(const std::string& path);

}  // namespace leafprob::detail
