#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "estrace/linalg.hpp"

namespace estrace::select {

enum class Decision { tentative, accepted, rejected };

struct BorutaOptions {
  std::size_t max_iter = 150;
  double alpha = 0.05;  ///< family-wise level, Bonferroni-split over the features
  std::size_t n_trees = 100;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct BorutaResult {
  std::vector<Decision> decisions;
  std::vector<std::size_t> hits;
  std::vector<double> importance;  ///< mean normalized MDI over the iterations the feature took part in
  std::size_t iterations = 0;

  std::vector<std::size_t> with(Decision d) const;
};

/// Column with the values of `column` permuted by `perm`.
Vector permuted(const Vector& column, const std::vector<std::size_t>& perm);

/// All-relevant selection with shadow features. Labels are class indices.
/// Throws InputError when there are fewer than 2 classes or a class has fewer than 2 rows.
BorutaResult boruta_select(const Matrix& X, const std::vector<int>& labels, int n_classes,
                           const BorutaOptions& options);

/// P(X >= hits) and P(X <= hits) for X ~ Binomial(trials, 0.5).
double binomial_upper_tail(std::size_t hits, std::size_t trials);
double binomial_lower_tail(std::size_t hits, std::size_t trials);

}  // namespace estrace::select
