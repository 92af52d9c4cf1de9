#include "nxbench/margin.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "nxbench/error.hpp"

namespace nxbench {

double margin_lambda(double C) { return 1.0 / (100.0 * C); }

Eigen::MatrixXd MarginModel::decision_function(const Eigen::MatrixXd& X) const {
  const Eigen::MatrixXd Z = standardizer.apply(X);
  return (Z * weights.transpose()).rowwise() + bias.transpose();
}

Eigen::MatrixXd MarginModel::predict_proba(const Eigen::MatrixXd& X) const {
  return softmax_rows(decision_function(X));
}

MarginModel train_margin(const Eigen::MatrixXd& X, std::span<const int> y, int num_classes,
                         const MarginParams& params, const Eigen::VectorXd* class_weights) {
  if (static_cast<std::size_t>(X.rows()) != y.size() || X.rows() == 0) {
    throw ArgumentError("feature matrix and label vector disagree in length");
  }
  if (!(params.C > 0) || params.epochs < 1 || params.steps_per_epoch < 1) {
    throw ArgumentError("margin parameters must be positive");
  }
  std::vector<int> present(num_classes, 0);
  for (int label : y) {
    if (label < 0 || label >= num_classes) throw ArgumentError("label outside [0, K)");
    present[label] = 1;
  }
  if (std::accumulate(present.begin(), present.end(), 0) < 2) {
    throw TrainingError("margin training needs at least two classes");
  }
  if (params.use_class_weights && (!class_weights || class_weights->size() != num_classes)) {
    throw ArgumentError("class weights required for weighted margin training");
  }

  MarginModel model;
  model.params = params;
  model.standardizer = Standardizer<double>::fit(X);
  const Eigen::Index n = X.rows(), d = X.cols();
  // Augmented design [Z | 1]: the last coordinate of w acts as the bias.
  Eigen::MatrixXd Z(n, d + 1);
  Z.leftCols(d) = model.standardizer.apply(X);
  Z.col(d).setOnes();

  Eigen::VectorXd sample_weight = Eigen::VectorXd::Ones(n);
  if (params.use_class_weights) {
    for (Eigen::Index i = 0; i < n; ++i) sample_weight(i) = (*class_weights)(y[i]);
  }

  const double lambda = margin_lambda(params.C);
  const double radius = 1.0 / std::sqrt(lambda);
  const int total_steps = params.epochs * params.steps_per_epoch;
  const int average_from = total_steps / 2;

  model.weights.resize(num_classes, d);
  model.bias.resize(num_classes);
  for (int k = 0; k < num_classes; ++k) {
    Eigen::VectorXd target(n);
    for (Eigen::Index i = 0; i < n; ++i) target(i) = y[i] == k ? 1.0 : -1.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd averaged = Eigen::VectorXd::Zero(d + 1);
    int averaged_count = 0;
    // Full-batch Pegasos: the step uses the mean hinge sub-gradient over
    // all rows, so replicating every row leaves the iterates unchanged.
    for (int t = 1; t <= total_steps; ++t) {
      const Eigen::VectorXd margins = (Z * w).cwiseProduct(target);
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i)
        if (margins(i) < 1.0) coeff(i) = target(i) * sample_weight(i);
      const Eigen::VectorXd hinge_grad = -(Z.transpose() * coeff) / static_cast<double>(n);
      const double eta = 1.0 / (lambda * t);
      w = w - eta * (lambda * w + hinge_grad);
      const double norm = w.norm();
      if (norm > radius) w *= radius / norm;
      if (t > average_from) {
        averaged += w;
        ++averaged_count;
      }
    }
    averaged /= static_cast<double>(averaged_count);
    if (!averaged.allFinite()) throw TrainingError("margin training produced non-finite weights");
    model.weights.row(k) = averaged.head(d).transpose();
    model.bias(k) = averaged(d);
  }
  return model;
}

}  // namespace nxbench
