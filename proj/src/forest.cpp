#include "nxbench/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nxbench/error.hpp"
#include "nxbench/parallel.hpp"
#include "nxbench/rng.hpp"

namespace nxbench {

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

/// Weighted Gini impurity of a node times its weight: W - sum(c^2)/W.
/// With integer counts every term is exact, so the result does not depend
/// on class order.
double weighted_gini(const std::vector<double>& counts, double total) {
  if (total <= 0) return 0.0;
  double sq = 0.0;
  for (double c : counts) sq += c * c;
  return total - sq / total;
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& X, std::span<const int> y, int K,
              const std::vector<double>& sample_weight, const ForestParams& params,
              std::uint64_t rng_key)
      : X_(X), y_(y), K_(K), w_(sample_weight), params_(params), rng_(rng_key) {
    const int d = static_cast<int>(X.cols());
    mtry_ = params.features_per_split.value_or(
        static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))));
    mtry_ = std::clamp(mtry_, 1, d);
    features_.resize(d);
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    grow(rows, 0);
    tree_.leaf_probabilities.resize(K_, static_cast<Eigen::Index>(leaves_.size()));
    for (std::size_t j = 0; j < leaves_.size(); ++j) {
      tree_.leaf_probabilities.col(static_cast<Eigen::Index>(j)) = leaves_[j];
    }
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<double> counts(K_, 0.0);
    double total = 0.0;
    for (auto r : rows) {
      counts[y_[r]] += w_[r];
      total += w_[r];
    }
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || depth >= params_.max_depth ||
        rows.size() < static_cast<std::size_t>(std::max(params_.min_samples_split, 2))) {
      make_leaf(id, counts, total);
      return id;
    }

    const SplitChoice best = find_split(rows, counts, total);
    if (best.feature < 0) {
      make_leaf(id, counts, total);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (auto r : rows) (X_(static_cast<Eigen::Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree_.nodes[id].feature = best.feature;
    tree_.nodes[id].threshold = best.threshold;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  void make_leaf(int id, const std::vector<double>& counts, double total) {
    Eigen::VectorXd p(K_);
    for (int k = 0; k < K_; ++k) p(k) = total > 0 ? counts[k] / total : 1.0 / K_;
    tree_.nodes[id].leaf = static_cast<int>(leaves_.size());
    leaves_.push_back(std::move(p));
  }

  SplitChoice find_split(const std::vector<std::size_t>& rows, const std::vector<double>& counts,
                         double total) {
    // Partial Fisher-Yates picks mtry distinct candidate features.
    const int d = static_cast<int>(features_.size());
    for (int i = 0; i < mtry_; ++i) {
      const int j = i + static_cast<int>(rng_.below(static_cast<std::uint64_t>(d - i)));
      std::swap(features_[i], features_[j]);
    }
    SplitChoice best;
    best.impurity = weighted_gini(counts, total);
    const double parent = best.impurity;
    std::vector<std::pair<double, std::size_t>> order(rows.size());
    std::vector<double> left_counts(K_);
    for (int f = 0; f < mtry_; ++f) {
      const int feature = features_[f];
      for (std::size_t i = 0; i < rows.size(); ++i) {
        order[i] = {X_(static_cast<Eigen::Index>(rows[i]), feature), rows[i]};
      }
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;
      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      double left_total = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const auto r = order[i].second;
        left_counts[y_[r]] += w_[r];
        left_total += w_[r];
        if (order[i].first == order[i + 1].first) continue;
        double sq_left = 0.0, sq_right = 0.0;
        for (int k = 0; k < K_; ++k) {
          const double rc = counts[k] - left_counts[k];
          sq_left += left_counts[k] * left_counts[k];
          sq_right += rc * rc;
        }
        const double right_total = total - left_total;
        const double impurity = (left_total - sq_left / left_total) + (right_total - sq_right / right_total);
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = feature;
          double mid = 0.5 * (order[i].first + order[i + 1].first);
          if (!(mid < order[i + 1].first)) mid = order[i].first;
          best.threshold = mid;
        }
      }
    }
    if (best.feature >= 0 && !(best.impurity < parent)) best.feature = -1;
    return best;
  }

  const Eigen::MatrixXd& X_;
  std::span<const int> y_;
  int K_;
  const std::vector<double>& w_;
  const ForestParams& params_;
  CounterRng rng_;
  int mtry_ = 1;
  std::vector<int> features_;
  DecisionTree tree_;
  std::vector<Eigen::VectorXd> leaves_;
};

}  // namespace

std::vector<std::size_t> bootstrap_draws(std::uint64_t seed, int tree, std::size_t n) {
  CounterRng rng(mix64(derive_key(seed, "forest-bootstrap"), static_cast<std::uint64_t>(tree)));
  std::vector<std::size_t> draws(n);
  for (auto& d : draws) d = rng.below(n);
  return draws;
}

Eigen::MatrixXd ForestModel::predict_proba(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(X.rows(), n_classes);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    for (const auto& tree : trees) P.row(i) += tree.leaf_probabilities.col(tree.leaf_for(row)).transpose();
  }
  if (!trees.empty()) P /= static_cast<double>(trees.size());
  return P;
}

ForestModel train_forest(const Eigen::MatrixXd& X, std::span<const int> y, int num_classes,
                         const ForestParams& params, const Eigen::VectorXd* class_weights) {
  if (static_cast<std::size_t>(X.rows()) != y.size() || X.rows() == 0) {
    throw ArgumentError("feature matrix and label vector disagree in length");
  }
  if (params.n_trees < 1 || params.max_depth < 1) throw ArgumentError("n_trees and max_depth must be >= 1");
  std::vector<int> present(num_classes, 0);
  for (int label : y) {
    if (label < 0 || label >= num_classes) throw ArgumentError("label outside [0, K)");
    present[label] = 1;
  }
  if (std::accumulate(present.begin(), present.end(), 0) < 2) {
    throw TrainingError("forest training needs at least two classes");
  }
  if (params.use_class_weights && (!class_weights || class_weights->size() != num_classes)) {
    throw ArgumentError("class weights required for weighted forest training");
  }

  const std::size_t n = y.size();
  ForestModel model;
  model.n_features = static_cast<int>(X.cols());
  model.n_classes = num_classes;
  model.params = params;
  model.trees.resize(static_cast<std::size_t>(params.n_trees));

  parallel_for(model.trees.size(), params.jobs, [&](std::size_t t) {
    const auto draws = bootstrap_draws(params.seed, static_cast<int>(t), n);
    // Duplicate draws become integer sample weights on unique rows.
    std::vector<double> weight(n, 0.0);
    for (auto d : draws) weight[d] += 1.0;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (weight[i] == 0.0) continue;
      if (params.use_class_weights) weight[i] *= (*class_weights)(y[i]);
      rows.push_back(i);
    }
    TreeBuilder builder(X, y, num_classes, weight, params,
                        mix64(derive_key(params.seed, "forest-split"), t));
    model.trees[t] = builder.build(std::move(rows));
  });
  return model;
}

}  // namespace nxbench
