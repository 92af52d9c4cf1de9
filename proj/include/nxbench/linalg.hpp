#pragma once

#include <Eigen/Core>
#include <cmath>

namespace nxbench {

/// Row-wise normalized exponential. Each row is shifted by its maximum
/// before exponentiation, so adding a constant to a row never changes the
/// result.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> softmax_rows(
    const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      logits.colwise() - logits.rowwise().maxCoeff();
  out = out.array().exp();
  out.array().colwise() /= out.rowwise().sum().array();
  return out;
}

/// Index of the largest coefficient; ties resolve to the lowest index.
template <typename Derived>
Eigen::Index argmax(const Eigen::DenseBase<Derived>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

/// Per-column affine standardization fitted on training rows. Columns with
/// zero variance map to 0.
template <typename Scalar = double>
struct Standardizer {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Vector mean;
  Vector inv_scale;  // 0 for constant columns

  static Standardizer fit(const Matrix& X) {
    Standardizer s;
    const auto n = static_cast<Scalar>(X.rows());
    s.mean = X.colwise().sum().transpose() / n;
    s.inv_scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const Scalar var = (X.col(j).array() - s.mean(j)).square().sum() / n;
      s.inv_scale(j) = var > Scalar(0) ? Scalar(1) / std::sqrt(var) : Scalar(0);
    }
    return s;
  }

  Matrix apply(const Matrix& X) const {
    return ((X.rowwise() - mean.transpose()).array().rowwise() * inv_scale.transpose().array())
        .matrix();
  }

  Eigen::Index dim() const { return mean.size(); }
};

}  // namespace nxbench
