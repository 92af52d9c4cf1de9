#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nxbench {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 24;
  std::uint64_t seed = 0;
  int min_samples_split = 2;
  /// Features tried per split; default ceil(sqrt(d)).
  std::optional<int> features_per_split;
  /// Scale bootstrap counts by class weight in the impurity computation.
  bool use_class_weights = false;
  int jobs = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf = -1;  // column of DecisionTree::leaf_probabilities
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  Eigen::MatrixXd leaf_probabilities;  // K x leaves

  /// Leaf column reached by a row (x <= threshold goes left).
  template <typename Row>
  Eigen::Index leaf_for(const Row& x) const {
    int n = 0;
    while (nodes[n].feature >= 0) {
      n = x(nodes[n].feature) <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
    }
    return nodes[n].leaf;
  }
};

/// Random forest of Gini trees grown on bootstrap samples.
struct ForestModel {
  std::vector<DecisionTree> trees;
  int n_features = 0;
  int n_classes = 0;
  ForestParams params;

  /// n x K mean of the trees' leaf distributions.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
};

/// Bootstrap indices of one tree; reproducible from (seed, tree).
std::vector<std::size_t> bootstrap_draws(std::uint64_t seed, int tree, std::size_t n);

/// Labels in [0, num_classes). Throws TrainingError when fewer than two
/// classes are present. class_weights (size K) is only read when
/// params.use_class_weights is set.
ForestModel train_forest(const Eigen::MatrixXd& X, std::span<const int> y, int num_classes,
                         const ForestParams& params,
                         const Eigen::VectorXd* class_weights = nullptr);

}  // namespace nxbench
