#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nxbench {

/// Per-class loss multipliers C_i = (N / n_i)^gamma, N the total count.
struct ClassWeightTable {
  double gamma = 0.0;
  std::map<std::string, double> weights;

  /// Weight of a class; classes absent from the table weigh 1.
  double weight(const std::string& cls) const;
  /// Weights in the order of `classes`.
  Eigen::VectorXd vector_for(const std::vector<std::string>& classes) const;
};

/// Throws ArgumentError for a count < 1 or gamma outside [0, 1]. No
/// renormalization is applied.
ClassWeightTable class_weights(const std::map<std::string, std::int64_t>& counts, double gamma);

/// Every listed class weighs exactly 1.
ClassWeightTable unit_weights(const std::vector<std::string>& classes);

}  // namespace nxbench
