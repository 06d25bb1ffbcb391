#include "estrace/boruta.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <numeric>

#include "estrace/errors.hpp"
#include "estrace/extra_trees.hpp"
#include "estrace/rng.hpp"

namespace estrace::select {

std::vector<std::size_t> BorutaResult::with(Decision d) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < decisions.size(); ++i)
    if (decisions[i] == d) out.push_back(i);
  return out;
}

Vector permuted(const Vector& column, const std::vector<std::size_t>& perm) {
  Vector out(column.size());
  for (Eigen::Index i = 0; i < column.size(); ++i) out[i] = column[static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)])];
  return out;
}

double binomial_upper_tail(std::size_t hits, std::size_t trials) {
  if (hits == 0) return 1.0;
  boost::math::binomial_distribution<double> dist(static_cast<double>(trials), 0.5);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(hits - 1)));
}

double binomial_lower_tail(std::size_t hits, std::size_t trials) {
  boost::math::binomial_distribution<double> dist(static_cast<double>(trials), 0.5);
  return boost::math::cdf(dist, static_cast<double>(std::min(hits, trials)));
}

BorutaResult boruta_select(const Matrix& X, const std::vector<int>& labels, int n_classes,
                           const BorutaOptions& options) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) throw InputError("label count does not match rows");
  std::vector<std::size_t> per_class(static_cast<std::size_t>(std::max(n_classes, 0)), 0);
  for (int l : labels) {
    if (l < 0 || l >= n_classes) throw InputError("class index out of range");
    ++per_class[static_cast<std::size_t>(l)];
  }
  const auto present = std::count_if(per_class.begin(), per_class.end(), [](std::size_t c) { return c > 0; });
  if (present < 2) throw InputError("feature selection needs at least 2 classes");
  for (auto c : per_class)
    if (c == 1) throw InputError("feature selection needs at least 2 rows per class");

  const auto p = static_cast<std::size_t>(X.cols());
  const auto n = static_cast<std::size_t>(X.rows());
  BorutaResult res;
  res.decisions.assign(p, Decision::tentative);
  res.hits.assign(p, 0);
  res.importance.assign(p, 0.0);
  std::vector<std::size_t> rounds(p, 0);
  const double threshold = options.alpha / static_cast<double>(std::max<std::size_t>(p, 1));
  Rng rng(options.seed);

  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    if (std::none_of(res.decisions.begin(), res.decisions.end(), [](Decision d) { return d == Decision::tentative; }))
      break;
    const auto a = static_cast<Eigen::Index>(p);
    Matrix augmented(X.rows(), 2 * a);
    std::vector<std::size_t> perm(n);
    for (Eigen::Index j = 0; j < a; ++j) {
      const Vector column = X.col(j);
      augmented.col(j) = column;
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
      augmented.col(a + j) = permuted(column, perm);
    }
    learn::ForestParams forest;
    forest.n_trees = options.n_trees;
    forest.seed = derive_seed(options.seed, {iter});
    forest.jobs = options.jobs;
    learn::ExtraTrees model(learn::Task::classify, forest);
    model.fit_classifier(augmented, labels, n_classes);
    const auto imp = model.feature_importances();
    const double shadow_max = *std::max_element(imp.begin() + a, imp.end());
    for (std::size_t j = 0; j < p; ++j) {
      if (res.decisions[j] == Decision::rejected) continue;
      res.importance[j] += imp[j];
      ++rounds[j];
      if (imp[j] > shadow_max) ++res.hits[j];
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (res.decisions[j] != Decision::tentative) continue;
      if (binomial_upper_tail(res.hits[j], iter) < threshold)
        res.decisions[j] = Decision::accepted;
      else if (binomial_lower_tail(res.hits[j], iter) < threshold)
        res.decisions[j] = Decision::rejected;
    }
    res.iterations = iter;
  }
  for (std::size_t j = 0; j < p; ++j)
    if (rounds[j] > 0) res.importance[j] /= static_cast<double>(rounds[j]);
  return res;
}

}  // namespace estrace::select
