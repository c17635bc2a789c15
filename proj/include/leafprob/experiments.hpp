#pragma once

#include "leafprob/converses.hpp"
#include "leafprob/tree.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace leafprob {

/// Seedable generator: std::mt19937_64, with uniforms formed from the top 53
/// bits so draws are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  /// Index drawn from a probability vector.
  int categorical(const Eigen::Ref<const Eigen::VectorXd>& probs);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 of (master, index): independent per-trial seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Leaf weights drawn independently uniform on (0,1), then normalized.
LeafDistribution sample_leaf_distribution(const RootedTree& tree, Rng& rng);

/// Uniform (0,1) weights over the alphabet, normalized.
Dms sample_dms(int alphabet_size, Rng& rng);

/// Random complete tree: the root always branches, deeper nodes branch with
/// probability `branch_probability` until `max_depth`.
RootedTree sample_tree(int alphabet_size, int max_depth, Rng& rng, double branch_probability = 0.5);

/// Every complete m-ary tree with at most `max_leaves` leaves (and at least one
/// branching node), in a fixed order.
std::vector<RootedTree> all_complete_trees(int alphabet_size, int max_leaves);

struct ScatterRow {
  long long trial = 0;
  /// "sample", "stated" (the spec file's P_Y) or "matched" (P_Y = P_Z^L).
  std::string kind;
  double entropy_rate = 0.0;
  ExtendedReal divergence_rate;
};

struct BoundRow {
  double alpha;
  double beta;
  double hz_minus_beta;
  double hz_plus_beta;
};

/// α = 0 followed by `grid − 1` log-spaced points up to β's domain cap.
std::vector<BoundRow> bound_curve(int alphabet_size, double target_entropy, int grid);

struct Fig2Config {
  std::uint64_t seed = 1;
  int trials = 1000;
  int bound_grid = 200;
};

struct Fig2Result {
  std::vector<ScatterRow> rows;
  std::vector<BoundRow> bounds;
  int in_domain = 0;
  int violations = 0;
};

/// Entropy rate and normalized divergence of `py` against P_Z^L.
ScatterRow scatter_point(const RootedTree& tree, const LeafDistribution& py, const Dms& pz);

/// Random P_Y scatter on `tree` (trial t uses derive_seed(seed, t)), plus the
/// stated and matched rows and the β band. Throws BoundViolation if any
/// in-domain point leaves the band.
Fig2Result fig2_experiment(const RootedTree& tree, const LeafDistribution& stated, const Dms& pz,
                           const Fig2Config& cfg);

/// Header `trial,kind,entropy_rate,divergence_rate`; 12 significant digits.
void write_scatter_csv(std::ostream& out, const std::vector<ScatterRow>& rows);
/// Header `alpha,beta,hz_minus_beta,hz_plus_beta`; 12 significant digits.
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

struct StreamReport {
  long long symbols = 0;
  long long words = 0;
  /// Symbols of the incomplete word left at the end of the stream.
  long long trailing_symbols = 0;
  double mean_dictionary_length = 0.0;
  double dictionary_length_stderr = 0.0;
  double mean_codeword_length = 0.0;
  double empirical_rate = 0.0;
  double analytic_dictionary_length = 0.0;
  double analytic_codeword_length = 0.0;
  double analytic_rate = 0.0;
  Eigen::VectorXd codeword_frequencies;
  Eigen::VectorXd analytic_codeword_distribution;
  double codeword_total_variation = 0.0;
  /// Filled only when recording: the input stream and the concatenated words.
  std::vector<Letter> input;
  std::vector<Letter> parsed;
};

/// Draws `n_symbols` i.i.d. P_X letters, parses them greedily with the
/// dictionary and maps each word to a codeword.
StreamReport simulate_stream(const EncoderSystem& enc, long long n_symbols, std::uint64_t seed,
                             bool record = false);

}  // namespace leafprob
