#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nxbench/domain.hpp"
#include "nxbench/model.hpp"

namespace nxbench {

/// Which classifier to train and how. `gamma` sets the class weights; the
/// classical models only read them when their use_class_weights is on.
struct ClassifierSpec {
  ModelKind kind = ModelKind::forest;
  ForestParams forest;
  MarginParams margin;
  NeuralParams neural;
  double gamma = 0.0;
  std::string name;

  /// `name` if set, otherwise the kind.
  std::string id() const;
};

/// Fits the benign reference on the benign training samples, weights the
/// classes present in training and trains the chosen model. Labels index
/// `classes`; `seed` replaces the seeds inside the spec.
Model train_model(const ClassifierSpec& spec, Task task, std::span<const Sample> train,
                  std::span<const int> labels, const std::vector<std::string>& classes,
                  std::uint64_t seed);

/// Predicted class indices for raw samples.
std::vector<int> classify_samples(const Model& model, std::span<const Sample> samples);

/// Train on one split, return predicted labels for the other.
using Trainer = std::function<std::vector<int>(std::span<const Sample> train, std::span<const int> train_labels,
                                               std::span<const Sample> test, std::uint64_t seed)>;

Trainer make_trainer(const ClassifierSpec& spec, Task task, std::vector<std::string> classes);

}  // namespace nxbench
