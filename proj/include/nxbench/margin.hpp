#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>

#include "nxbench/linalg.hpp"

namespace nxbench {

struct MarginParams {
  double C = 1.0;
  int epochs = 20;
  std::uint64_t seed = 0;
  /// Full-batch sub-gradient steps per epoch.
  int steps_per_epoch = 25;
  bool use_class_weights = false;
};

/// Linear max-margin classifier, one-vs-rest over K >= 2 classes. Inputs
/// are standardized with the stored training statistics and augmented with
/// a constant 1 that plays the role of the bias.
struct MarginModel {
  Standardizer<double> standardizer;
  Eigen::MatrixXd weights;  // K x d
  Eigen::VectorXd bias;     // K
  MarginParams params;

  /// n x K one-vs-rest scores.
  Eigen::MatrixXd decision_function(const Eigen::MatrixXd& X) const;
  /// Normalized exponential of the scores.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
};

/// Regularization strength of the objective (lambda/2)|w|^2 + mean hinge.
double margin_lambda(double C);

MarginModel train_margin(const Eigen::MatrixXd& X, std::span<const int> y, int num_classes,
                         const MarginParams& params,
                         const Eigen::VectorXd* class_weights = nullptr);

}  // namespace nxbench
