#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nxbench/catalog.hpp"
#include "nxbench/cross_validation.hpp"
#include "nxbench/datasets.hpp"
#include "nxbench/pipeline.hpp"

namespace nxbench {

// ---- binary ----------------------------------------------------------------

struct BinaryExperimentConfig {
  BinaryImbalancedParams imbalanced;
  BinaryBalancedParams balanced;
  std::vector<ClassifierSpec> models;
  int jobs = 1;
};

/// One model kind trained under one regime, scored on both test types.
struct RegimeSummary {
  std::string model;
  std::string training;  // "balanced" or "imbalanced"
  double benign_recall_balanced_test = 0.0;
  double malicious_recall_balanced_test = 0.0;
  double benign_recall_imbalanced_test = 0.0;
  /// Mean of the per-family recalls over weak families with test samples.
  double malicious_recall_imbalanced_test = 0.0;
  int passes_balanced_test = 0;
  int passes_imbalanced_test = 0;
};

struct FamilyRecall {
  std::string family;
  std::int64_t support = 0;
  std::int64_t test_samples = 0;  // per repetition
  std::map<std::string, double> balanced;    // model id -> recall
  std::map<std::string, double> imbalanced;  // model id -> recall

  /// Recall gain of imbalanced over balanced training above one point.
  bool improved(const std::string& model) const;
};

struct BinaryExperimentResult {
  std::vector<RegimeSummary> summary;
  std::vector<FamilyRecall> families;
  std::vector<std::string> flags;
  std::vector<std::pair<std::string, std::uint64_t>> job_seeds;
};

BinaryExperimentResult run_binary_experiment(const FamilyCatalog& catalog, const FamilyPools& pools,
                                             std::span<const Sample> benign_pool,
                                             const BinaryExperimentConfig& config);

// ---- gamma sweep -------------------------------------------------------------

std::vector<double> default_gamma_grid();

struct GammaRow {
  double gamma = 0.0;
  double macro_f1 = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  bool best = false;
};

struct GammaSweepResult {
  std::vector<GammaRow> rows;
  std::size_t best_index = 0;
  std::vector<AggregateReport> aggregates;  // one per gamma
  FoldPlan folds;
};

/// One cross-validated run per gamma over the same folds and model seeds.
/// The best row is the highest macro f1, ties to the smaller gamma.
GammaSweepResult run_gamma_sweep(const LabeledDataset& data, std::span<const double> gammas,
                                 const ClassifierSpec& base, int reps, int folds,
                                 std::uint64_t master_seed, int jobs = 1);

// ---- out of distribution -----------------------------------------------------

struct OodResult {
  std::vector<std::string> train_classes;
  /// weak family -> predicted class -> fraction, averaged over models.
  std::map<std::string, std::map<std::string, double>> distribution;
  double benign_fraction_excluded = 0.0;
  /// Same fraction for held-out weak samples once weak classes are trained.
  double benign_fraction_included = 0.0;
  int models = 0;
  std::vector<std::pair<std::string, std::uint64_t>> job_seeds;
};

/// Models for repetition r train on the CV training part of fold r % 5 of
/// repetition r / 5, restricted to benign and well classes, and classify
/// every weak-family sample. The comparison model trains on the full
/// training part and classifies the weak samples of the held-out fold.
OodResult run_ood_experiment(const LabeledDataset& m_imbalanced, const FamilyCatalog& catalog, int reps,
                             const ClassifierSpec& spec, std::uint64_t master_seed, int jobs = 1,
                             bool compare_included = true);

}  // namespace nxbench
