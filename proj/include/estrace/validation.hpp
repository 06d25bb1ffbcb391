#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "estrace/extra_trees.hpp"
#include "json.hpp"

namespace estrace::learn {

/// Response of a learning problem: class indices or real values.
struct Target {
  Task task = Task::classify;
  std::vector<int> labels;
  int n_classes = 0;
  Vector values;

  static Target classes(std::vector<int> labels, int n_classes);
  static Target real(Vector values);
  std::size_t size() const;
};

struct CVOptions {
  ForestParams forest;
  std::uint64_t seed = 0;  ///< fold shuffling
  bool stratified = true;  ///< classification only
};

struct FoldMetrics {
  std::string name;  ///< fold index or held-out group
  std::size_t n_test = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  double r2 = 0.0;
};

struct CVResult {
  Task task = Task::classify;
  std::vector<std::size_t> fold_of;  ///< fold index per row
  std::vector<FoldMetrics> folds;
  double mean_accuracy = 0.0, std_accuracy = 0.0;
  double mean_f1 = 0.0, std_f1 = 0.0;
  double mean_r2 = 0.0, std_r2 = 0.0;

  /// FNV digest of fold_of.
  std::uint64_t assignment_digest() const;
};

/// Shuffled partition into K folds; with stratification, rows are dealt
/// round-robin label by label so every fold sees each label evenly.
std::vector<std::size_t> kfold_assignment(std::size_t n, std::size_t k, const std::vector<int>* labels,
                                          std::uint64_t seed);

CVResult kfold_cv(const Matrix& X, const Target& target, std::size_t k, const CVOptions& options);

/// One fold per distinct group value (ascending); fold names are the group values.
CVResult logo_cv(const Matrix& X, const Target& target, const std::vector<int>& groups, const CVOptions& options);

/// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& v);

nlohmann::json to_json(const CVResult& result);

}  // namespace estrace::learn
