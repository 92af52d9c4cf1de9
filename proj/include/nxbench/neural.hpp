#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "nxbench/linalg.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

/// Fully connected network: rectified hidden layers and a normalized
/// exponential output. Activations are stored one sample per row.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Gradient {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
  };

  Mlp() = default;

  /// He-uniform hidden layers; the output layer starts at zero so the
  /// initial network treats every class identically.
  Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
    CounterRng rng(derive_key(seed, "mlp-init"));
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      const int in = sizes_[l], out = sizes_[l + 1];
      Matrix W(out, in);
      const bool output_layer = l + 2 == sizes_.size();
      const double limit = std::sqrt(6.0 / in);
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        for (Eigen::Index i = 0; i < W.rows(); ++i)
          W(i, j) = output_layer ? Scalar(0) : Scalar((2.0 * rng.uniform() - 1.0) * limit);
      weights_.push_back(std::move(W));
      biases_.push_back(Vector::Zero(out));
    }
  }

  const std::vector<int>& layer_sizes() const { return sizes_; }
  std::vector<Matrix>& weights() { return weights_; }
  std::vector<Vector>& biases() { return biases_; }
  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }

  Matrix logits(const Matrix& X) const {
    Matrix a = X;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (a * weights_[l].transpose()).rowwise() + biases_[l].transpose();
      a = (l + 1 < weights_.size()) ? Matrix(z.cwiseMax(Scalar(0))) : z;
    }
    return a;
  }

  Matrix probabilities(const Matrix& X) const { return softmax_rows(logits(X)); }

  /// Weighted cross-entropy (1/B) sum_i w_i * -log p(y_i | x_i) and its
  /// gradient with respect to every parameter.
  Scalar loss_and_gradient(const Matrix& X, std::span<const int> y, const Vector& sample_weight,
                           Gradient* grad) const {
    const auto B = X.rows();
    const std::size_t L = weights_.size();
    std::vector<Matrix> acts;
    acts.reserve(L + 1);
    acts.push_back(X);
    for (std::size_t l = 0; l < L; ++l) {
      Matrix z = (acts.back() * weights_[l].transpose()).rowwise() + biases_[l].transpose();
      acts.push_back(l + 1 < L ? Matrix(z.cwiseMax(Scalar(0))) : z);
    }
    Matrix p = softmax_rows(acts.back());
    Scalar loss = 0;
    for (Eigen::Index i = 0; i < B; ++i) {
      loss -= sample_weight(i) * std::log(std::max(p(i, y[i]), Scalar(1e-300)));
    }
    loss /= static_cast<Scalar>(B);
    if (!grad) return loss;

    Matrix delta = p;
    for (Eigen::Index i = 0; i < B; ++i) delta(i, y[i]) -= Scalar(1);
    delta.array().colwise() *= sample_weight.array() / static_cast<Scalar>(B);

    grad->weights.resize(L);
    grad->biases.resize(L);
    for (std::size_t l = L; l-- > 0;) {
      grad->weights[l] = delta.transpose() * acts[l];
      grad->biases[l] = delta.colwise().sum().transpose();
      if (l == 0) break;
      Matrix back = delta * weights_[l];
      delta = (acts[l].array() > Scalar(0)).select(back, Scalar(0));
    }
    return loss;
  }

 private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

struct NeuralParams {
  std::vector<int> hidden{128, 64};
  double learning_rate = 0.01;
  int batch_size = 128;
  int epochs = 30;
  std::uint64_t seed = 0;
};

/// Standardized input followed by an Mlp<double>.
struct NeuralModel {
  Standardizer<double> standardizer;
  Mlp<double> net;
  NeuralParams params;
  double gamma = 0.0;
  Eigen::VectorXd class_weights;  // per class, as used in training
  std::vector<double> epoch_losses;

  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
};

/// Mini-batch Adam on the class-weighted cross-entropy; each sample's loss
/// is multiplied by class_weights[y]. Throws DivergedError naming the epoch
/// when the loss stops being finite.
NeuralModel train_neural(const Eigen::MatrixXd& X, std::span<const int> y, int num_classes,
                         const Eigen::VectorXd& class_weights, const NeuralParams& params,
                         double gamma = 0.0);

}  // namespace nxbench
