#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nxbench/datasets.hpp"
#include "nxbench/metrics.hpp"
#include "nxbench/pipeline.hpp"

namespace nxbench {

/// fold_of[rep][i] is the test fold of sample i in repetition rep.
struct FoldPlan {
  int repetitions = 0;
  int folds = 0;
  std::vector<std::vector<int>> fold_of;
  std::vector<std::string> flags;

  std::vector<std::size_t> test_indices(int rep, int fold) const;
  std::vector<std::size_t> train_indices(int rep, int fold) const;
};

/// Stratified folds: each class is shuffled per repetition and fold f takes
/// positions [floor(f*m/F), floor((f+1)*m/F)). Classes with fewer than F
/// samples are flagged; they miss some test folds.
FoldPlan make_folds(std::span<const int> labels, int num_classes, int repetitions, int folds,
                    std::uint64_t seed);

struct RunMetadata {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::string model_id;
  int repetition = -1;
  int fold = -1;
};

struct ExperimentReport {
  ConfusionMatrix confusion;
  PrfScores scores;
  RunMetadata meta;
  std::vector<std::string> flags;
};

ExperimentReport make_report(const std::vector<std::string>& classes, std::span<const int> truth,
                             std::span<const int> predicted, RunMetadata meta);

/// Seed of the model trained in (rep, fold); independent of anything the
/// caller varies between runs, so paired configurations share it.
std::uint64_t fold_seed(std::uint64_t master_seed, int rep, int fold);

/// One report per (rep, fold), repetition-major.
std::vector<ExperimentReport> cross_validate(const LabeledDataset& data, const FoldPlan& plan,
                                             const Trainer& trainer, std::uint64_t master_seed,
                                             RunMetadata meta = {}, int jobs = 1);

/// Means over runs. Macro scores average the per-run macros; per-class
/// scores average over runs in which the class was scored.
struct AggregateReport {
  std::vector<std::string> classes;
  std::vector<ClassScores> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
  int runs = 0;
};

AggregateReport aggregate(std::span<const ExperimentReport> reports);

}  // namespace nxbench
