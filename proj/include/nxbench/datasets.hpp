#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nxbench/catalog.hpp"
#include "nxbench/domain.hpp"

namespace nxbench {

enum class Scenario { b_balanced, b_imbalanced, m_balanced, m_imbalanced };

std::string to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);

struct ScenarioPlan {
  Scenario scenario = Scenario::b_imbalanced;
  std::int64_t per_family_quota = 10000;
  int repetitions = 20;
  double benign_ratio = 0.5;
  std::uint64_t master_seed = 0;

  void validate() const;
};

/// Materialized samples per family id.
using FamilyPools = std::map<std::string, std::vector<Sample>>;

struct SplitPair {
  std::vector<Sample> train;
  std::vector<Sample> test;
  int repetition = 0;
  std::vector<std::string> flags;
};

/// Per-family test count for the imbalanced binary split: floor(frac * n).
std::int64_t weak_test_count(std::int64_t n, double test_frac);

struct BinaryImbalancedParams {
  std::int64_t quota = 10000;
  double test_frac = 0.2;
  int reps = 20;
  std::uint64_t master_seed = 0;
};

struct BinaryBalancedParams {
  std::int64_t quota = 11366;
  std::int64_t test_per_family = 1000;
  int reps = 20;
  std::uint64_t master_seed = 0;
};

/// Set sizes implied by catalog supports alone; totals include the benign
/// half.
struct BinarySizes {
  std::int64_t train_malicious = 0;
  std::int64_t test_malicious = 0;
  std::int64_t train_total() const { return 2 * train_malicious; }
  std::int64_t test_total() const { return 2 * test_malicious; }
};

BinarySizes plan_binary_imbalanced(const FamilyCatalog& catalog, std::int64_t quota = 10000,
                                   double test_frac = 0.2);
BinarySizes plan_binary_balanced(const FamilyCatalog& catalog, std::int64_t quota = 11366,
                                 std::int64_t test_per_family = 1000);

/// Weak families: floor(test_frac * n) to test, the rest to train; well
/// families: `quota` random samples to train only; benign padding to an
/// exact 50/50 split in both sets. Throws BuildError when the benign pool
/// or a well family is too small.
std::vector<SplitPair> build_binary_imbalanced(const FamilyCatalog& catalog, const FamilyPools& pools,
                                               std::span<const Sample> benign_pool,
                                               const BinaryImbalancedParams& params);

/// Well families only: `quota` to train and `test_per_family` to test per
/// family, disjoint within a repetition, each padded with benign samples.
std::vector<SplitPair> build_binary_balanced(const FamilyCatalog& catalog, const FamilyPools& pools,
                                             std::span<const Sample> benign_pool,
                                             const BinaryBalancedParams& params);

struct EligiblePass {
  std::size_t model = 0;
  std::size_t test = 0;
  friend bool operator==(const EligiblePass&, const EligiblePass&) = default;
};

/// (model, test) combinations whose malicious samples are disjoint from the
/// model's training set.
std::vector<EligiblePass> eligible_imbalanced_passes(std::span<const SplitPair> trained_on,
                                                     std::span<const std::vector<Sample>> test_sets);

/// Samples with class indices; classes[0] is always "benign".
struct LabeledDataset {
  std::vector<Sample> samples;
  std::vector<std::string> classes;
  std::vector<int> labels;
  std::vector<std::string> flags;

  std::size_t size() const { return samples.size(); }
  int num_classes() const { return static_cast<int>(classes.size()); }
  std::vector<std::int64_t> class_counts() const;
};

struct MulticlassSizes {
  std::int64_t samples = 0;
  int classes = 0;
};

MulticlassSizes plan_multiclass(const FamilyCatalog& catalog, Scenario scenario,
                                std::int64_t quota = 10000);

/// Balanced: quota samples per well family and quota benign samples.
/// Imbalanced: additionally every sample of every weak family.
LabeledDataset build_multiclass(const FamilyCatalog& catalog, const FamilyPools& pools,
                                std::span<const Sample> benign_pool, Scenario scenario,
                                std::int64_t quota = 10000, std::uint64_t master_seed = 0);

/// Binary view of samples: benign -> 0, any family -> 1.
LabeledDataset binary_dataset(std::span<const Sample> samples);

/// Label dataset for arbitrary samples against a class list (benign first).
LabeledDataset label_samples(std::vector<Sample> samples, std::vector<std::string> classes);

}  // namespace nxbench
