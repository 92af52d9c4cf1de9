#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "nxbench/domain.hpp"

namespace nxbench {

inline constexpr int kFeatureCount = 21;
inline constexpr int kNgramBuckets = 512;
inline constexpr int kNeuralInputDim = kNgramBuckets + kFeatureCount;
inline constexpr int kAlphabetSize = 38;

using FeatureVector = Eigen::Matrix<double, kFeatureCount, 1>;
using NgramBuckets = Eigen::Matrix<double, kNgramBuckets, 1>;
using CharDistribution = Eigen::Matrix<double, kAlphabetSize, 1>;

/// Registry order: 7 structural, 7 linguistic, 7 statistical.
const std::array<std::string_view, kFeatureCount>& feature_names();

/// Identifies the registry (names, order, alphabet, bucket count, hash).
/// Stored in model files so a model is never applied to other features.
std::uint64_t feature_registry_checksum();

/// Domain minus its public suffix, using a bundled suffix list. Unknown
/// suffixes drop the last label; single-label names are returned whole.
std::string_view registrable_part(std::string_view domain);

/// Alphabet bin of a character: a-z, 0-9, '-', '.'; '_' shares the '-' bin.
int alphabet_index(char c) noexcept;

/// Character and bigram statistics of benign training names. Immutable
/// once fitted.
class BenignReference {
 public:
  BenignReference();

  const CharDistribution& char_freq() const noexcept { return char_freq_; }
  /// 1-based frequency rank; unseen bigrams rank table_size() + 1.
  int bigram_rank(char a, char b) const noexcept;
  int table_size() const noexcept { return table_size_; }
  const std::vector<int>& rank_table() const noexcept { return ranks_; }

  friend bool operator==(const BenignReference&, const BenignReference&) = default;

 private:
  friend BenignReference fit_reference(std::span<const Sample> benign_train);
  friend BenignReference reference_from_parts(const CharDistribution&, std::vector<int>);

  CharDistribution char_freq_;
  std::vector<int> ranks_;  // kAlphabetSize^2, 0 = unseen
  int table_size_ = 0;
};

inline constexpr std::size_t kMinReferenceSamples = 100;

/// Fits on benign samples only (non-benign samples are ignored). Throws
/// FitError with fewer than 100 benign samples.
BenignReference fit_reference(std::span<const Sample> benign_train);

/// Rebuilds a reference from serialized parts (model files).
BenignReference reference_from_parts(const CharDistribution& char_freq, std::vector<int> ranks);

FeatureVector extract_features(const DomainName& domain, const BenignReference& ref);

/// Hashed character bigrams of the registrable part.
NgramBuckets encode_ngrams(const DomainName& domain);

/// n x 21 matrix of extract_features rows.
Eigen::MatrixXd feature_matrix(std::span<const Sample> samples, const BenignReference& ref);
Eigen::MatrixXd feature_matrix(std::span<const DomainName> domains, const BenignReference& ref);

/// n x 533 matrix: 512 bigram buckets followed by the 21 features.
Eigen::MatrixXd neural_matrix(std::span<const Sample> samples, const BenignReference& ref);
Eigen::MatrixXd neural_matrix(std::span<const DomainName> domains, const BenignReference& ref);

/// CSV with header `domain,label,f01..f21`.
void write_feature_csv(const std::filesystem::path& path, std::span<const Sample> samples,
                       const BenignReference& ref);

}  // namespace nxbench
