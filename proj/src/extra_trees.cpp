#include "estrace/extra_trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "estrace/errors.hpp"
#include "estrace/parallel.hpp"
#include "estrace/rng.hpp"

namespace estrace::learn {

namespace {

// Cheap per-node stream; seeding a Mersenne Twister at every node dominates fit time.
struct NodeStream {
  std::uint64_t state;
  std::uint64_t next() { return mix64(state += 0x9e3779b97f4a7c15ULL); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53; }
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, const std::vector<int>* labels, const Vector* y, int n_classes, std::size_t k,
              std::size_t min_split)
      : X_(X), labels_(labels), y_(y), n_classes_(n_classes), k_(k), min_split_(std::max<std::size_t>(min_split, 2)) {
    features_.resize(static_cast<std::size_t>(X.cols()));
    std::iota(features_.begin(), features_.end(), 0);
    rows_.resize(static_cast<std::size_t>(X.rows()));
    std::iota(rows_.begin(), rows_.end(), 0);
    tree_.importance.assign(features_.size(), 0.0);
    if (labels_) {
      counts_.resize(static_cast<std::size_t>(n_classes_));
      left_.resize(static_cast<std::size_t>(n_classes_));
    }
  }

  Tree build(std::uint64_t seed) {
    grow(0, rows_.size(), seed);
    return std::move(tree_);
  }

 private:
  const Matrix& X_;
  const std::vector<int>* labels_;
  const Vector* y_;
  int n_classes_;
  std::size_t k_;
  std::size_t min_split_;
  std::vector<int> features_;
  std::vector<Eigen::Index> rows_;
  std::vector<double> counts_, left_;
  Tree tree_;

  double x(Eigen::Index row, int f) const { return X_(row, f); }

  // Impurity times sample count (Gini for classes, sum of squared deviations for regression).
  double weighted_impurity_classes(const std::vector<double>& counts, double n) const {
    if (n <= 0.0) return 0.0;
    double s = 0.0;
    for (double c : counts) s += c * c;
    return n - s / n;
  }

  double split_gain(std::size_t begin, std::size_t end, int f, double threshold, double parent) {
    const double n = static_cast<double>(end - begin);
    if (labels_) {
      std::fill(left_.begin(), left_.end(), 0.0);
      double nl = 0.0;
      for (std::size_t i = begin; i < end; ++i)
        if (x(rows_[i], f) <= threshold) {
          left_[static_cast<std::size_t>((*labels_)[static_cast<std::size_t>(rows_[i])])] += 1.0;
          nl += 1.0;
        }
      std::vector<double>& right = scratch_;
      right.resize(counts_.size());
      for (std::size_t c = 0; c < counts_.size(); ++c) right[c] = counts_[c] - left_[c];
      return parent - weighted_impurity_classes(left_, nl) - weighted_impurity_classes(right, n - nl);
    }
    double nl = 0.0, sl = 0.0, ql = 0.0, sr = 0.0, qr = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = (*y_)[rows_[i]];
      if (x(rows_[i], f) <= threshold) {
        nl += 1.0;
        sl += v;
        ql += v * v;
      } else {
        sr += v;
        qr += v * v;
      }
    }
    const double nr = n - nl;
    const double left_sse = std::max(0.0, ql - sl * sl / nl);
    const double right_sse = std::max(0.0, qr - sr * sr / nr);
    return parent - left_sse - right_sse;
  }
  std::vector<double> scratch_;

  int grow(std::size_t begin, std::size_t end, std::uint64_t seed) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t n = end - begin;
    const double nd = static_cast<double>(n);
    tree_.nodes[static_cast<std::size_t>(id)].samples = n;

    double parent = 0.0, leaf_value = 0.0;
    bool pure = true;
    if (labels_) {
      std::fill(counts_.begin(), counts_.end(), 0.0);
      for (std::size_t i = begin; i < end; ++i)
        counts_[static_cast<std::size_t>((*labels_)[static_cast<std::size_t>(rows_[i])])] += 1.0;
      std::size_t best = 0;
      std::size_t nonzero = 0;
      for (std::size_t c = 0; c < counts_.size(); ++c) {
        if (counts_[c] > counts_[best]) best = c;
        if (counts_[c] > 0.0) ++nonzero;
      }
      leaf_value = static_cast<double>(best);
      pure = nonzero <= 1;
      parent = weighted_impurity_classes(counts_, nd);
    } else {
      double s = 0.0, lo = (*y_)[rows_[begin]], hi = lo;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = (*y_)[rows_[i]];
        s += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      leaf_value = s / nd;
      pure = lo == hi;
      double sse = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const double d = (*y_)[rows_[i]] - leaf_value;
        sse += d * d;
      }
      parent = sse;
    }
    tree_.nodes[static_cast<std::size_t>(id)].value = leaf_value;
    if (pure || n < min_split_) return id;

    NodeStream rng{seed};
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t found = 0;
    const std::size_t p = features_.size();
    for (std::size_t i = 0; i < p && found < k_; ++i) {
      std::swap(features_[i], features_[i + rng.index(p - i)]);
      const int f = features_[i];
      double lo = x(rows_[begin], f), hi = lo;
      for (std::size_t r = begin + 1; r < end; ++r) {
        const double v = x(rows_[r], f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) continue;
      ++found;
      double t = lo + rng.uniform_open() * (hi - lo);
      if (!(t > lo && t < hi)) t = lo + 0.5 * (hi - lo);
      if (!(t < hi)) t = lo;
      const double gain = split_gain(begin, end, f, t, parent);
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = f;
        best_threshold = t;
      }
    }
    if (best_feature < 0) return id;

    auto mid_it = std::stable_partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        rows_.begin() + static_cast<std::ptrdiff_t>(end),
                                        [&](Eigen::Index r) { return x(r, best_feature) <= best_threshold; });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
    tree_.importance[static_cast<std::size_t>(best_feature)] += std::max(0.0, best_gain);

    const int left = grow(begin, mid, derive_seed(seed, {1}));
    const int right = grow(mid, end, derive_seed(seed, {2}));
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return id;
  }
};

void check_finite(const Matrix& X) {
  if (!X.allFinite()) throw InputError("feature matrix contains non-finite values");
}

}  // namespace

double Tree::predict(const Matrix& X, Eigen::Index row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0)
    i = static_cast<std::size_t>(X(row, nodes[i].feature) <= nodes[i].threshold ? nodes[i].left : nodes[i].right);
  return nodes[i].value;
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

std::size_t Tree::leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

std::size_t ExtraTrees::k_candidates() const {
  if (params_.k_candidates) return std::clamp<std::size_t>(*params_.k_candidates, 1, std::max<std::size_t>(1, n_features_));
  if (task_ == Task::regress) return std::max<std::size_t>(1, n_features_);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features_))));
}

void ExtraTrees::fit_classifier(const Matrix& X, const std::vector<int>& labels, int n_classes) {
  if (static_cast<Eigen::Index>(labels.size()) != X.rows()) throw InputError("label count does not match rows");
  for (int l : labels)
    if (l < 0 || l >= n_classes) throw InputError("class index out of range");
  task_ = Task::classify;
  n_classes_ = n_classes;
  fit(X, &labels, nullptr);
}

void ExtraTrees::fit_regressor(const Matrix& X, const Vector& y) {
  if (y.size() != X.rows()) throw InputError("response length does not match rows");
  if (!y.allFinite()) throw InputError("response contains non-finite values");
  task_ = Task::regress;
  fit(X, nullptr, &y);
}

void ExtraTrees::fit(const Matrix& X, const std::vector<int>* labels, const Vector* y) {
  if (X.rows() < 1) throw InputError("cannot fit on an empty matrix");
  check_finite(X);
  n_features_ = static_cast<std::size_t>(X.cols());
  const std::size_t k = k_candidates();
  trees_.assign(params_.n_trees, Tree{});
  parallel_for(params_.n_trees, params_.jobs, [&](std::size_t t) {
    TreeBuilder builder(X, labels, y, n_classes_, k, params_.min_split);
    trees_[t] = builder.build(derive_seed(params_.seed, {t}));
  });
}

std::vector<double> ExtraTrees::predict(const Matrix& X) const {
  if (trees_.empty()) throw InputError("model is not fitted");
  if (static_cast<std::size_t>(X.cols()) != n_features_) throw InputError("feature count does not match the model");
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  if (task_ == Task::regress) {
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      double s = 0.0;
      for (const auto& t : trees_) s += t.predict(X, r);
      out[static_cast<std::size_t>(r)] = s / static_cast<double>(trees_.size());
    }
    return out;
  }
  std::vector<int> votes(static_cast<std::size_t>(n_classes_));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& t : trees_) ++votes[static_cast<std::size_t>(t.predict(X, r))];
    out[static_cast<std::size_t>(r)] =
        static_cast<double>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return out;
}

std::vector<int> ExtraTrees::predict_labels(const Matrix& X) const {
  const auto raw = predict(X);
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<int>(raw[i]);
  return out;
}

std::vector<double> ExtraTrees::feature_importances() const {
  std::vector<double> total(n_features_, 0.0);
  for (const auto& t : trees_) {
    const double s = std::accumulate(t.importance.begin(), t.importance.end(), 0.0);
    if (s <= 0.0) continue;
    for (std::size_t j = 0; j < n_features_; ++j) total[j] += t.importance[j] / s;
  }
  const double s = std::accumulate(total.begin(), total.end(), 0.0);
  if (s > 0.0)
    for (double& v : total) v /= s;
  return total;
}

}  // namespace estrace::learn
