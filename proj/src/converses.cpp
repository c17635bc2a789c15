#include "leafprob/converses.hpp"

#include "leafprob/bounds.hpp"
#include "spec_json.hpp"

#include <cmath>

namespace leafprob {

namespace {

constexpr double kRowTolerance = 1e-9;

void validate_index_map(const std::vector<int>& map, int domain, int range, std::string_view what) {
  if (static_cast<int>(map.size()) != domain) {
    throw Error(ErrorKind::MappingNotTotal, std::string(what) + " has " + std::to_string(map.size()) +
                                                " entries, expected " + std::to_string(domain));
  }
  for (int v : map) {
    if (v < 0 || v >= range) {
      throw Error(ErrorKind::MappingNotTotal, std::string(what) + " maps to a nonexistent leaf");
    }
  }
}

struct Measured {
  LeafDistribution py;
  TreeProbabilities tp_dictionary;
  TreeProbabilities tp_codebook;
  ExtendedReal divergence_rate;
  double source_entropy;  // ℍ(P_X)
};

Measured measure(const EncoderSystem& enc) {
  auto py = pushforward(enc);
  auto tp_d = derive_probabilities(enc.dictionary(), enc.dictionary_distribution());
  auto tp_c = derive_probabilities(enc.codebook(), py);
  const auto pz_c = induced_leaf_distribution(enc.codebook(), enc.target());
  const ExtendedReal rate = kl_divergence(py.probs(), pz_c.probs()) / tp_c.expected_length;
  const double hx = entropy(enc.source().probs());
  if (!(hx > 0.0)) throw Error(ErrorKind::DomainError, "source entropy H(P_X) must be positive");
  return Measured{std::move(py), std::move(tp_d), std::move(tp_c), rate, hx};
}

// Fills everything but the bound itself; returns the β argument if the bound applies.
std::optional<double> fill_common(ConverseReport& report, const EncoderSystem& enc, const Measured& m,
                                  const ConverseOptions& options, const Beta& beta_fn) {
  report.expected_dictionary_length = m.tp_dictionary.expected_length;
  report.expected_codeword_length = m.tp_codebook.expected_length;
  report.rate = report.expected_dictionary_length / report.expected_codeword_length;
  report.divergence_rate = m.divergence_rate;
  report.source_word_entropy = entropy(enc.dictionary_distribution().probs());
  report.codeword_entropy = entropy(m.py.probs());

  if (options.alpha) {
    const double alpha = *options.alpha;
    if (!(alpha >= 0.0)) throw Error(ErrorKind::DomainError, "alpha must be nonnegative");
    if (options.mode == DivergenceMode::Unnormalized) {
      const ExtendedReal unnormalized = m.divergence_rate.value() * report.expected_codeword_length;
      report.premise_holds = unnormalized <= ExtendedReal(alpha);
      report.alpha = alpha / report.expected_codeword_length;
    } else {
      report.premise_holds = m.divergence_rate <= ExtendedReal(alpha);
      report.alpha = alpha;
    }
  } else {
    report.alpha = m.divergence_rate;
  }
  report.bound_applicable =
      report.premise_holds && report.alpha.is_finite() && beta_fn.in_domain(report.alpha.value());
  if (!report.bound_applicable) return std::nullopt;
  return beta_fn(report.alpha.value());
}

}  // namespace

EncoderSystem EncoderSystem::create(RootedTree dictionary, Dms source, RootedTree codebook, Dms target,
                                    Mapping mapping) {
  if (source.alphabet_size() != dictionary.alphabet_size()) {
    throw Error(ErrorKind::TreeMismatch, "source alphabet does not match the dictionary");
  }
  if (target.alphabet_size() != codebook.alphabet_size()) {
    throw Error(ErrorKind::TreeMismatch, "target alphabet does not match the codebook");
  }
  const int nd = dictionary.leaf_count();
  const int nc = codebook.leaf_count();
  if (const auto* det = std::get_if<DeterministicMapping>(&mapping)) {
    validate_index_map(det->codeword, nd, nc, "mapping");
  } else {
    const auto& st = std::get<StochasticMapping>(mapping);
    if (st.kernel.rows() != nd || st.kernel.cols() != nc) {
      throw Error(ErrorKind::MappingNotTotal, "kernel must be |D| x |C|");
    }
    for (Eigen::Index d = 0; d < nd; ++d) {
      if ((st.kernel.row(d).array() < 0.0).any() || !st.kernel.row(d).allFinite() ||
          std::abs(st.kernel.row(d).sum() - 1.0) > kRowTolerance) {
        throw Error(ErrorKind::BadProbability, "kernel row " + std::to_string(d) + " is not a distribution");
      }
    }
    validate_index_map(st.decoder, nc, nd, "decoder");
  }
  auto pd = induced_leaf_distribution(dictionary, source);
  return EncoderSystem(std::move(dictionary), std::move(source), std::move(codebook), std::move(target),
                       std::move(mapping), std::move(pd));
}

LeafDistribution pushforward(const EncoderSystem& enc) {
  const auto& pd = enc.dictionary_distribution().probs();
  Eigen::VectorXd py = Eigen::VectorXd::Zero(enc.codebook().leaf_count());
  if (const auto* det = std::get_if<DeterministicMapping>(&enc.mapping())) {
    for (int d = 0; d < pd.size(); ++d) py[det->codeword[d]] += pd[d];
  } else {
    py = std::get<StochasticMapping>(enc.mapping()).kernel.transpose() * pd;
  }
  return LeafDistribution::create(enc.codebook(), std::move(py));
}

StochasticMapping as_kernel(const DeterministicMapping& mapping, int codebook_size, std::vector<int> decoder) {
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mapping.codeword.size()), codebook_size);
  for (std::size_t d = 0; d < mapping.codeword.size(); ++d) kernel(static_cast<Eigen::Index>(d), mapping.codeword[d]) = 1.0;
  return StochasticMapping{std::move(kernel), std::move(decoder)};
}

std::vector<int> maximum_posterior_decoder(const LeafDistribution& pd, const Eigen::MatrixXd& kernel) {
  std::vector<int> decoder(static_cast<std::size_t>(kernel.cols()), 0);
  for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
    Eigen::Index best = 0;
    (kernel.col(c).array() * pd.probs().array()).maxCoeff(&best);
    decoder[static_cast<std::size_t>(c)] = static_cast<int>(best);
  }
  return decoder;
}

double error_probability(const EncoderSystem& enc) {
  const auto* st = std::get_if<StochasticMapping>(&enc.mapping());
  if (!st) return 0.0;
  const auto& pd = enc.dictionary_distribution().probs();
  double pe = 0.0;
  for (Eigen::Index d = 0; d < st->kernel.rows(); ++d) {
    double wrong = 0.0;
    for (Eigen::Index c = 0; c < st->kernel.cols(); ++c) {
      if (st->decoder[static_cast<std::size_t>(c)] != d) wrong += st->kernel(d, c);
    }
    pe += pd[d] * wrong;
  }
  return pe;
}

ChainRuleReport source_entropy_identity_check(const EncoderSystem& enc) {
  const auto tp = derive_probabilities(enc.dictionary(), enc.dictionary_distribution());
  return make_report("source entropy identity", entropy(enc.dictionary_distribution().probs()),
                     tp.expected_length * entropy(enc.source().probs()));
}

ConverseReport deterministic_converse(const EncoderSystem& enc, const ConverseOptions& options) {
  if (!enc.is_deterministic()) {
    throw Error(ErrorKind::StochasticMappingSupplied, "deterministic converse needs a deterministic mapping");
  }
  const Measured m = measure(enc);
  const Beta beta_fn(enc.codebook().alphabet_size());
  ConverseReport report;
  const auto beta_value = fill_common(report, enc, m, options, beta_fn);
  report.entropy_step_holds = report.source_word_entropy >= report.codeword_entropy - kBoundSlack;
  if (beta_value) {
    report.bound_rhs = (entropy(enc.target().probs()) - *beta_value) / m.source_entropy;
    report.slack = report.rate - *report.bound_rhs;
    report.satisfied = report.slack >= -kBoundSlack;
  }
  return report;
}

ConverseReport random_converse(const EncoderSystem& enc, double pe_cap, const ConverseOptions& options) {
  if (enc.is_deterministic()) {
    throw Error(ErrorKind::DeterministicMappingSupplied,
                "random converse needs a kernel and decoder; use the deterministic converse");
  }
  if (!(pe_cap >= 0.0 && pe_cap <= 0.5)) {
    throw Error(ErrorKind::DomainError, "error probability cap must lie in [0, 1/2]");
  }
  const double pe = error_probability(enc);
  if (pe > pe_cap) {
    throw Error(ErrorKind::PeExceedsCap,
                "error probability " + std::to_string(pe) + " exceeds cap " + std::to_string(pe_cap));
  }
  const Measured m = measure(enc);
  const Beta beta_fn(enc.codebook().alphabet_size());
  ConverseReport report;
  report.error_probability = pe;
  const auto beta_value = fill_common(report, enc, m, options, beta_fn);

  const double log_d = std::log2(static_cast<double>(enc.dictionary().leaf_count()));
  report.entropy_step_holds =
      report.source_word_entropy - report.codeword_entropy <= binary_entropy(pe) + pe * log_d + kBoundSlack;
  if (beta_value) {
    const double hx = m.source_entropy;
    const double fano = binary_entropy(pe_cap) + pe_cap * log_d;
    report.bound_rhs = entropy(enc.target().probs()) / hx + *beta_value / hx +
                       fano / (report.expected_codeword_length * hx);
    report.slack = *report.bound_rhs - report.rate;
    report.satisfied = report.slack >= -kBoundSlack;
  }
  return report;
}

MatcherResult brute_force_matcher(const RootedTree& dictionary, const RootedTree& codebook, const Dms& source,
                                  const Dms& target) {
  constexpr long long kLimit = 1'000'000;
  const int nd = dictionary.leaf_count();
  const int nc = codebook.leaf_count();
  long long total = 1;
  for (int i = 0; i < nd; ++i) {
    total *= nc;
    if (total > kLimit) {
      throw Error(ErrorKind::SearchSpaceTooLarge, "|C|^|D| exceeds 10^6 candidate mappings");
    }
  }

  const auto pd = induced_leaf_distribution(dictionary, source);
  const auto pz_c = induced_leaf_distribution(codebook, target);
  const Eigen::VectorXd codeword_depth = [&] {
    Eigen::VectorXd out(nc);
    for (int c = 0; c < nc; ++c) out[c] = codebook.depth(codebook.leaves()[c]);
    return out;
  }();

  // Odometer over mappings with dictionary leaf 0 most significant, so the
  // enumeration order is lexicographic and strict improvement keeps the
  // smallest mapping among ties.
  std::vector<int> current(static_cast<std::size_t>(nd), 0);
  std::vector<int> best;
  ExtendedReal best_alpha = ExtendedReal::infinity();
  bool have_best = false;
  Eigen::VectorXd py(nc);
  for (long long k = 0; k < total; ++k) {
    py.setZero();
    for (int d = 0; d < nd; ++d) py[current[static_cast<std::size_t>(d)]] += pd[d];
    const double expected_length = [&] {
      // Σ Q over branching nodes equals Σ P_Y ℓ; the leaf form is cheaper here.
      return py.dot(codeword_depth);
    }();
    const ExtendedReal alpha = kl_divergence(py, pz_c.probs()) / expected_length;
    if (!have_best || alpha < best_alpha) {
      best = current;
      best_alpha = alpha;
      have_best = true;
    }
    for (int pos = nd - 1; pos >= 0; --pos) {
      if (++current[static_cast<std::size_t>(pos)] < nc) break;
      current[static_cast<std::size_t>(pos)] = 0;
    }
  }

  DeterministicMapping mapping{best};
  auto enc = EncoderSystem::create(dictionary, source, codebook, target, mapping);
  return MatcherResult{std::move(mapping), deterministic_converse(enc), total};
}

EncoderSystem parse_encoder_spec(std::string_view json_text) {
  using detail::json;
  const json doc = detail::parse_json_text(json_text);
  try {
    auto dictionary = detail::parse_tree_structure(doc.at("dictionary"));
    auto codebook = detail::parse_tree_structure(doc.at("codebook"));
    Dms source = Dms::create(detail::parse_probability_vector(doc.at("source")));
    Dms target = Dms::create(detail::parse_probability_vector(doc.at("target")));

    const int nd = dictionary.tree.leaf_count();
    const int nc = codebook.tree.leaf_count();
    auto leaf_of = [](const detail::TreeStructure& s, const json& label) {
      const auto leaf = s.tree.find_leaf(detail::parse_label(label, s.tree.alphabet_size()));
      if (!leaf) throw Error(ErrorKind::MappingNotTotal, "label " + label.dump() + " is not a leaf");
      return *leaf;
    };
    auto parse_pairs = [&](const json& pairs, const detail::TreeStructure& from, const detail::TreeStructure& to,
                           std::string_view what) {
      std::vector<int> out(static_cast<std::size_t>(from.tree.leaf_count()), -1);
      for (const auto& pair : pairs) {
        if (!pair.is_array() || pair.size() != 2) {
          throw Error(ErrorKind::ParseError, std::string(what) + " entries are [from, to] pairs");
        }
        int& slot = out[static_cast<std::size_t>(leaf_of(from, pair[0]))];
        if (slot >= 0) throw Error(ErrorKind::DuplicateLeaf, std::string(what) + " lists " + pair[0].dump() + " twice");
        slot = leaf_of(to, pair[1]);
      }
      for (int v : out) {
        if (v < 0) throw Error(ErrorKind::MappingNotTotal, std::string(what) + " does not cover every leaf");
      }
      return out;
    };

    const json& mapping_spec = doc.at("mapping");
    const std::string type = mapping_spec.at("type").get<std::string>();
    Mapping mapping;
    if (type == "det") {
      mapping = DeterministicMapping{parse_pairs(mapping_spec.at("pairs"), dictionary, codebook, "mapping")};
    } else if (type == "kernel") {
      const json& rows = mapping_spec.at("matrix");
      if (!rows.is_array() || static_cast<int>(rows.size()) != nd) {
        throw Error(ErrorKind::MappingNotTotal, "kernel needs one row per dictionary leaf");
      }
      Eigen::MatrixXd kernel(nd, nc);
      for (int r = 0; r < nd; ++r) {
        const Eigen::VectorXd row = detail::parse_probability_vector(rows[static_cast<std::size_t>(r)]);
        if (row.size() != nc) throw Error(ErrorKind::MappingNotTotal, "kernel rows need one entry per codeword");
        const int d = *dictionary.tree.find_leaf(dictionary.listed_order[static_cast<std::size_t>(r)]);
        for (int col = 0; col < nc; ++col) {
          kernel(d, *codebook.tree.find_leaf(codebook.listed_order[static_cast<std::size_t>(col)])) = row[col];
        }
      }
      if (!doc.contains("decoder")) throw Error(ErrorKind::MappingNotTotal, "kernel mappings need a decoder");
      auto decoder = parse_pairs(doc.at("decoder").at("pairs"), codebook, dictionary, "decoder");
      mapping = StochasticMapping{std::move(kernel), std::move(decoder)};
    } else {
      throw Error(ErrorKind::ParseError, "mapping type must be \"det\" or \"kernel\"");
    }
    return EncoderSystem::create(std::move(dictionary.tree), std::move(source), std::move(codebook.tree),
                                 std::move(target), std::move(mapping));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

EncoderSystem load_encoder_spec(const std::string& path) { return parse_encoder_spec(detail::read_file(path)); }

}  // namespace leafprob
