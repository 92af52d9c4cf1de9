#include "nxbench/class_weights.hpp"

#include <cmath>

#include "nxbench/error.hpp"

namespace nxbench {

double ClassWeightTable::weight(const std::string& cls) const {
  auto it = weights.find(cls);
  return it == weights.end() ? 1.0 : it->second;
}

Eigen::VectorXd ClassWeightTable::vector_for(const std::vector<std::string>& classes) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < classes.size(); ++i) v(static_cast<Eigen::Index>(i)) = weight(classes[i]);
  return v;
}

ClassWeightTable class_weights(const std::map<std::string, std::int64_t>& counts, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ArgumentError("gamma must lie in [0, 1]");
  std::int64_t total = 0;
  for (const auto& [cls, n] : counts) {
    if (n < 1) throw ArgumentError("class '" + cls + "' has count < 1");
    total += n;
  }
  ClassWeightTable table;
  table.gamma = gamma;
  for (const auto& [cls, n] : counts) {
    table.weights[cls] =
        gamma == 0.0 ? 1.0 : std::pow(static_cast<double>(total) / static_cast<double>(n), gamma);
  }
  return table;
}

ClassWeightTable unit_weights(const std::vector<std::string>& classes) {
  ClassWeightTable table;
  for (const auto& c : classes) table.weights[c] = 1.0;
  return table;
}

}  // namespace nxbench
