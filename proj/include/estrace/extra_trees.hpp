#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "estrace/linalg.hpp"

namespace estrace::learn {

enum class Task { classify, regress };

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> k_candidates;  ///< default sqrt(p) for classification, p for regression
  std::size_t min_split = 2;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct TreeNode {
  int feature = -1;  ///< -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  ///< leaf class index or mean response
  std::size_t samples = 0;
};

/// One fully grown extremely randomized tree. Rows with x[feature] <= threshold go left.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<double> importance;  ///< weighted impurity decrease per feature, unnormalized

  double predict(const Matrix& X, Eigen::Index row) const;
  std::size_t depth() const;
  std::size_t leaves() const;
};

/// Extremely randomized trees: no bootstrap, random thresholds uniform in
/// (node min, node max), best of k candidate features by impurity decrease.
class ExtraTrees {
 public:
  ExtraTrees() = default;
  ExtraTrees(Task task, ForestParams params) : task_(task), params_(params) {}

  /// Labels must be class indices 0..n_classes-1.
  void fit_classifier(const Matrix& X, const std::vector<int>& labels, int n_classes);
  void fit_regressor(const Matrix& X, const Vector& y);

  /// Majority vote (ties to the lowest class index) or mean over trees.
  std::vector<double> predict(const Matrix& X) const;
  std::vector<int> predict_labels(const Matrix& X) const;

  /// Mean decrease in impurity, normalized per tree and then to sum 1
  /// (all zeros if no tree split).
  std::vector<double> feature_importances() const;

  Task task() const { return task_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t k_candidates() const;

 private:
  Task task_ = Task::classify;
  ForestParams params_;
  std::vector<Tree> trees_;
  std::size_t n_features_ = 0;
  int n_classes_ = 0;

  void fit(const Matrix& X, const std::vector<int>* labels, const Vector* y);
};

}  // namespace estrace::learn
