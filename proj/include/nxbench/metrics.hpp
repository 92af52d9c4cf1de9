#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nxbench {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  CountMatrix counts;

  std::int64_t total() const { return counts.sum(); }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

/// Label indices in [0, K). Throws ArgumentError for anything outside.
ConfusionMatrix confusion(std::span<const int> true_labels, std::span<const int> predicted,
                          const std::vector<std::string>& classes);

/// Same, by class name.
ConfusionMatrix confusion(std::span<const std::string> true_labels,
                          std::span<const std::string> predicted,
                          const std::vector<std::string>& classes);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;  // true samples
  bool precision_undefined = false;
  bool recall_undefined = false;
  /// Neither true nor predicted anywhere; excluded from macro averages.
  bool absent = false;
};

struct PrfScores {
  std::vector<ClassScores> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  int classes_in_macro = 0;
};

/// Per-class precision, recall and f1 plus unweighted means over classes
/// that occur as truth or prediction. Zero denominators yield 0 and set the
/// matching undefined flag.
PrfScores prf_scores(const ConfusionMatrix& matrix);

}  // namespace nxbench
