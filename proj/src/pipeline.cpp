#include "nxbench/pipeline.hpp"

#include <map>

#include "nxbench/class_weights.hpp"
#include "nxbench/error.hpp"
#include "nxbench/features.hpp"

namespace nxbench {

std::string ClassifierSpec::id() const { return name.empty() ? to_string(kind) : name; }

Model train_model(const ClassifierSpec& spec, Task task, std::span<const Sample> train,
                  std::span<const int> labels, const std::vector<std::string>& classes,
                  std::uint64_t seed) {
  if (train.size() != labels.size()) throw ArgumentError("sample and label counts differ");
  std::vector<Sample> benign;
  std::map<std::string, std::int64_t> counts;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].label.is_benign()) benign.push_back(train[i]);
    const auto l = labels[i];
    if (l < 0 || l >= static_cast<int>(classes.size())) throw ArgumentError("label index out of range");
    ++counts[classes[static_cast<std::size_t>(l)]];
  }
  Model model;
  model.task = task;
  model.classes = classes;
  model.reference = fit_reference(benign);
  const Eigen::VectorXd weights = class_weights(counts, spec.gamma).vector_for(classes);
  const int k = static_cast<int>(classes.size());
  if (spec.kind == ModelKind::neural) {
    const Eigen::MatrixXd X = neural_matrix(train, model.reference);
    auto params = spec.neural;
    params.seed = seed;
    model.impl = train_neural(X, labels, k, weights, params, spec.gamma);
  } else if (spec.kind == ModelKind::margin) {
    const Eigen::MatrixXd X = feature_matrix(train, model.reference);
    auto params = spec.margin;
    params.seed = seed;
    model.impl = train_margin(X, labels, k, params, &weights);
  } else {
    const Eigen::MatrixXd X = feature_matrix(train, model.reference);
    auto params = spec.forest;
    params.seed = seed;
    model.impl = train_forest(X, labels, k, params, &weights);
  }
  return model;
}

std::vector<int> classify_samples(const Model& model, std::span<const Sample> samples) {
  if (samples.empty()) return {};
  return predict_labels(model, model.inputs_for(samples));
}

Trainer make_trainer(const ClassifierSpec& spec, Task task, std::vector<std::string> classes) {
  return [spec, task, classes = std::move(classes)](std::span<const Sample> train,
                                                    std::span<const int> train_labels,
                                                    std::span<const Sample> test, std::uint64_t seed) {
    const auto model = train_model(spec, task, train, train_labels, classes, seed);
    return classify_samples(model, test);
  };
}

}  // namespace nxbench
