#pragma once

#include "leafprob/chain_rules.hpp"
#include "leafprob/info_measures.hpp"
#include "leafprob/tree.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace leafprob {

/// f: dictionary leaf index -> codebook leaf index.
struct DeterministicMapping {
  std::vector<int> codeword;
};

/// Row-stochastic kernel (dictionary leaves x codebook leaves) together with a
/// deterministic decoder codebook leaf index -> dictionary leaf index.
struct StochasticMapping {
  Eigen::MatrixXd kernel;
  std::vector<int> decoder;
};

using Mapping = std::variant<DeterministicMapping, StochasticMapping>;

/// Dictionary parsing a DMS P_X, a codebook over the target alphabet with target
/// DMS P_Z, and the mapping between their leaves.
class EncoderSystem {
 public:
  /// Throws MappingNotTotal, BadProbability or TreeMismatch on inconsistent input.
  static EncoderSystem create(RootedTree dictionary, Dms source, RootedTree codebook, Dms target,
                              Mapping mapping);

  const RootedTree& dictionary() const noexcept { return dictionary_; }
  const RootedTree& codebook() const noexcept { return codebook_; }
  const Dms& source() const noexcept { return source_; }
  const Dms& target() const noexcept { return target_; }
  const Mapping& mapping() const noexcept { return mapping_; }
  bool is_deterministic() const noexcept { return std::holds_alternative<DeterministicMapping>(mapping_); }

  /// P_X^D, the distribution of the parsed dictionary word.
  const LeafDistribution& dictionary_distribution() const noexcept { return dictionary_distribution_; }

 private:
  EncoderSystem(RootedTree dictionary, Dms source, RootedTree codebook, Dms target, Mapping mapping,
                LeafDistribution pd)
      : dictionary_(std::move(dictionary)),
        source_(std::move(source)),
        codebook_(std::move(codebook)),
        target_(std::move(target)),
        mapping_(std::move(mapping)),
        dictionary_distribution_(std::move(pd)) {}

  RootedTree dictionary_;
  Dms source_;
  RootedTree codebook_;
  Dms target_;
  Mapping mapping_;
  LeafDistribution dictionary_distribution_;
};

/// Distribution of Y = f(D) on the codebook leaves.
LeafDistribution pushforward(const EncoderSystem& enc);

/// Views a deterministic mapping as a 0/1 kernel with the given decoder.
StochasticMapping as_kernel(const DeterministicMapping& mapping, int codebook_size, std::vector<int> decoder);

/// argmax_d P_X^D(d)·kernel(d, c) per codeword; ties go to the smaller index.
std::vector<int> maximum_posterior_decoder(const LeafDistribution& pd, const Eigen::MatrixXd& kernel);

/// Exact Pr{g(Y) ≠ D} = Σ_d P_X^D(d) Σ_{c: g(c)≠d} kernel(d, c).
double error_probability(const EncoderSystem& enc);

/// ℍ(P_X^D) from the leaves against E[ℓ(D)]·ℍ(P_X).
ChainRuleReport source_entropy_identity_check(const EncoderSystem& enc);

enum class DivergenceMode {
  /// α bounds 𝔻(P_Y‖P_Z^C)/E[ℓ(Y)].
  Normalized,
  /// α bounds 𝔻(P_Y‖P_Z^C); it is divided by E[ℓ(Y)] before β is evaluated.
  Unnormalized,
};

struct ConverseOptions {
  /// Premise level. When empty, the measured divergence rate itself is used.
  std::optional<double> alpha;
  DivergenceMode mode = DivergenceMode::Normalized;
};

struct ConverseReport {
  /// E[ℓ(D)]/E[ℓ(Y)].
  double rate = 0.0;
  double expected_dictionary_length = 0.0;
  double expected_codeword_length = 0.0;
  /// Measured 𝔻(P_Y‖P_Z^C)/E[ℓ(Y)].
  ExtendedReal divergence_rate;
  /// The normalized α handed to β.
  ExtendedReal alpha;
  /// False when the measured divergence exceeds a caller-supplied α.
  bool premise_holds = true;
  /// False when α lies outside β's domain; the bound is then not evaluated.
  bool bound_applicable = false;
  std::optional<double> bound_rhs;
  /// rate − rhs (deterministic) or rhs − rate (random); +∞ when not applicable.
  double slack = std::numeric_limits<double>::infinity();
  bool satisfied = true;
  double source_word_entropy = 0.0;  // ℍ(P_D)
  double codeword_entropy = 0.0;     // ℍ(P_Y)
  /// ℍ(P_D) ≥ ℍ(P_Y) (deterministic) or the Fano bound on ℍ(P_D) − ℍ(P_Y) (random).
  bool entropy_step_holds = true;
  /// Exact decoding error probability; zero for deterministic encoders.
  double error_probability = 0.0;
};

/// Rate lower bound ℍ(P_Z)/ℍ(P_X) − β(α)/ℍ(P_X) for deterministic encoders.
/// Throws StochasticMappingSupplied for kernels and DomainError if ℍ(P_X) = 0.
ConverseReport deterministic_converse(const EncoderSystem& enc, const ConverseOptions& options = {});

/// Rate upper bound for random encoders with a decoder, with the Fano term
/// evaluated at `pe_cap`. Throws DeterministicMappingSupplied, PeExceedsCap, or
/// DomainError for pe_cap outside [0, 1/2].
ConverseReport random_converse(const EncoderSystem& enc, double pe_cap, const ConverseOptions& options = {});

struct MatcherResult {
  DeterministicMapping mapping;
  ConverseReport report;
  /// Number of mappings enumerated.
  long long candidates = 0;
};

/// Exhaustive search for the deterministic mapping with the smallest
/// normalized divergence; ties go to the lexicographically smallest mapping.
/// Throws SearchSpaceTooLarge when |C|^|D| > 10^6.
MatcherResult brute_force_matcher(const RootedTree& dictionary, const RootedTree& codebook, const Dms& source,
                                  const Dms& target);

/// Parses an encoder spec file (see README for the format).
EncoderSystem parse_encoder_spec(std::string_view json_text);
EncoderSystem load_encoder_spec(const std::string& path);

}  // namespace leafprob
