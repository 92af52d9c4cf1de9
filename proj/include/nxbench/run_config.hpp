#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nxbench/catalog.hpp"
#include "nxbench/datasets.hpp"
#include "nxbench/pipeline.hpp"

namespace nxbench {

/// Parsed experiment config. Relative paths resolve against the config
/// file's directory.
struct RunConfig {
  std::filesystem::path config_path;
  std::uint64_t config_hash = 0;

  std::filesystem::path catalog_path;
  std::int64_t threshold = kDefaultSupportThreshold;
  std::uint64_t master_seed = 0;
  std::int64_t benign_count = 20000;
  std::optional<std::filesystem::path> benign_feed;

  BinaryImbalancedParams imbalanced;
  BinaryBalancedParams balanced;
  std::vector<ModelKind> binary_models{ModelKind::forest};

  Scenario multiclass_scenario = Scenario::m_imbalanced;
  std::int64_t multiclass_quota = 10000;
  int cv_reps = 5;
  int cv_folds = 5;
  ModelKind multiclass_model = ModelKind::neural;
  double gamma = 0.0;
  std::vector<double> gammas;

  int ood_reps = 20;
  ModelKind ood_model = ModelKind::forest;

  ForestParams forest;
  MarginParams margin;
  NeuralParams neural;

  ClassifierSpec spec_for(ModelKind kind, double gamma = 0.0) const;
  /// Replaces the master seed everywhere it was copied.
  void set_seed(std::uint64_t seed);
};

/// Throws UsageError for unreadable files, unknown keys, bad values or a
/// missing catalog.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

struct Corpus {
  FamilyCatalog catalog;
  FamilyPools pools;
  std::vector<Sample> benign;
};

/// Generates or ingests every family and the benign pool. Feed families
/// take their support from the feed; benign names colliding with any
/// malicious name are dropped.
Corpus materialize_corpus(const RunConfig& config, int jobs = 1);

}  // namespace nxbench
