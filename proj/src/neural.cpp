#include "nxbench/neural.hpp"

#include <cmath>
#include <numeric>

#include "nxbench/error.hpp"

namespace nxbench {

Eigen::MatrixXd NeuralModel::predict_proba(const Eigen::MatrixXd& X) const {
  return net.probabilities(standardizer.apply(X));
}

NeuralModel train_neural(const Eigen::MatrixXd& X, std::span<const int> y, int num_classes,
                         const Eigen::VectorXd& class_weights, const NeuralParams& params,
                         double gamma) {
  if (static_cast<std::size_t>(X.rows()) != y.size() || X.rows() == 0) {
    throw ArgumentError("input matrix and label vector disagree in length");
  }
  if (num_classes < 2) throw ArgumentError("neural training needs K >= 2 classes");
  if (class_weights.size() != num_classes) throw ArgumentError("one class weight per class required");
  if (params.batch_size < 1 || params.epochs < 1 || !(params.learning_rate > 0)) {
    throw ArgumentError("neural parameters must be positive");
  }
  for (int label : y)
    if (label < 0 || label >= num_classes) throw ArgumentError("label outside [0, K)");

  NeuralModel model;
  model.params = params;
  model.gamma = gamma;
  model.class_weights = class_weights;
  model.standardizer = Standardizer<double>::fit(X);
  const Eigen::MatrixXd Z = model.standardizer.apply(X);

  std::vector<int> sizes{static_cast<int>(X.cols())};
  sizes.insert(sizes.end(), params.hidden.begin(), params.hidden.end());
  sizes.push_back(num_classes);
  model.net = Mlp<double>(sizes, params.seed);

  // Adam state.
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  auto& W = model.net.weights();
  auto& b = model.net.biases();
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  for (std::size_t l = 0; l < W.size(); ++l) {
    mW.push_back(Eigen::MatrixXd::Zero(W[l].rows(), W[l].cols()));
    vW.push_back(Eigen::MatrixXd::Zero(W[l].rows(), W[l].cols()));
    mb.push_back(Eigen::VectorXd::Zero(b[l].size()));
    vb.push_back(Eigen::VectorXd::Zero(b[l].size()));
  }

  const auto n = static_cast<std::size_t>(X.rows());
  const std::uint64_t order_key = derive_key(params.seed, "mlp-order");
  Mlp<double>::Gradient grad;
  std::vector<int> batch_y;
  long step = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    CounterRng rng(mix64(order_key, static_cast<std::uint64_t>(epoch)));
    const auto order = permutation(n, rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(params.batch_size));
      const auto B = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(B, Z.cols());
      Eigen::VectorXd wb(B);
      batch_y.resize(static_cast<std::size_t>(B));
      for (Eigen::Index i = 0; i < B; ++i) {
        const auto r = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(i)]);
        xb.row(i) = Z.row(r);
        batch_y[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(r)];
        wb(i) = class_weights(y[static_cast<std::size_t>(r)]);
      }
      const double loss = model.net.loss_and_gradient(xb, batch_y, wb, &grad);
      if (!std::isfinite(loss)) {
        throw DivergedError(epoch, "neural training diverged in epoch " + std::to_string(epoch));
      }
      epoch_loss += loss * static_cast<double>(B);

      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      const double lr = params.learning_rate * std::sqrt(c2) / c1;
      for (std::size_t l = 0; l < W.size(); ++l) {
        mW[l] = beta1 * mW[l] + (1 - beta1) * grad.weights[l];
        vW[l] = beta2 * vW[l] + (1 - beta2) * grad.weights[l].cwiseAbs2();
        W[l].array() -= lr * mW[l].array() / (vW[l].array().sqrt() + eps);
        mb[l] = beta1 * mb[l] + (1 - beta1) * grad.biases[l];
        vb[l] = beta2 * vb[l] + (1 - beta2) * grad.biases[l].cwiseAbs2();
        b[l].array() -= lr * mb[l].array() / (vb[l].array().sqrt() + eps);
      }
    }
    epoch_loss /= static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) {
      throw DivergedError(epoch, "neural training diverged in epoch " + std::to_string(epoch));
    }
    model.epoch_losses.push_back(epoch_loss);
  }
  for (const auto& w : W)
    if (!w.allFinite()) throw DivergedError(params.epochs - 1, "neural parameters became non-finite");
  return model;
}

}  // namespace nxbench
