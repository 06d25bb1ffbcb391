#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "estrace/errors.hpp"
#include "estrace/metrics.hpp"
#include "estrace/rng.hpp"
#include "estrace/validation.hpp"
#include "oracles/metric_oracle.hpp"

using namespace estrace;
using namespace estrace::learn;

namespace {

ForestParams small_forest(std::uint64_t seed, std::size_t trees = 30) {
  ForestParams p;
  p.n_trees = trees;
  p.seed = seed;
  return p;
}

// Two Gaussian blobs in two features, well apart.
struct Blobs {
  Matrix X;
  std::vector<int> labels;
};

Blobs blobs(std::uint64_t seed, std::size_t per_class, double gap) {
  Rng rng(seed);
  Blobs b;
  b.X.resize(static_cast<Eigen::Index>(2 * per_class), 2);
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int label = static_cast<int>(i % 2);
    b.labels.push_back(label);
    b.X(static_cast<Eigen::Index>(i), 0) = label * gap + rng.normal();
    b.X(static_cast<Eigen::Index>(i), 1) = rng.normal();
  }
  return b;
}

}  // namespace

TEST_CASE("f1 and r2 worked examples") {
  CHECK(std::abs(f1_macro({0, 0, 1, 1}, {0, 1, 1, 1}) - 11.0 / 15.0) <= 1e-12);
  CHECK(f1_macro({0, 1, 2, 1}, {0, 1, 2, 1}) == 1.0);
  CHECK(f1_macro({0, 0, 1, 1}, {1, 1, 0, 0}) == 0.0);
  CHECK(std::abs(r2_score({0, 1, 2}, {0, 0, 2}) - 0.5) <= 1e-12);
  CHECK(r2_score({3, 1, 2}, {3, 1, 2}) == 1.0);
  CHECK(r2_score({0, 1, 2}, {1, 1, 1}) == 0.0);
  CHECK(r2_score({2, 2, 2}, {2, 2, 2}) == 1.0);
  CHECK(r2_score({2, 2, 2}, {2, 2, 2.5}) == 0.0);
  CHECK(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == 0.75);
  CHECK_THROWS_AS(f1_macro({}, {}), InputError);
}

TEST_CASE("metrics agree with the confusion-matrix oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(20);
    const std::size_t k = 2 + rng.index(4);
    std::vector<int> t, p;
    std::vector<double> y, yhat;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(static_cast<int>(rng.index(k)));
      p.push_back(static_cast<int>(rng.index(k)));
      y.push_back(rng.normal());
      yhat.push_back(rng.normal());
    }
    CHECK(std::abs(f1_macro(t, p) - oracle::f1_macro(t, p)) <= 1e-12);
    CHECK(std::abs(r2_score(y, yhat) - oracle::r2(y, yhat)) <= 1e-12);
    CHECK(r2_score(y, yhat) <= 1.0);
  }
}

TEST_CASE("a forest fits separable training data exactly") {
  const auto b = blobs(1, 40, 8.0);
  ExtraTrees forest(Task::classify, small_forest(2));
  forest.fit_classifier(b.X, b.labels, 2);
  CHECK(forest.predict_labels(b.X) == b.labels);
  const auto imp = forest.feature_importances();
  CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0));
  CHECK(imp[0] > imp[1]);
}

TEST_CASE("one tree reproduces its training rows") {
  Rng rng(4);
  Matrix X(30, 3);
  Vector y(30);
  for (Eigen::Index i = 0; i < 30; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y[i] = rng.normal();
  }
  ExtraTrees single(Task::regress, small_forest(5, 1));
  single.fit_regressor(X, y);
  const auto pred = single.predict(X);
  for (Eigen::Index i = 0; i < 30; ++i) CHECK(pred[static_cast<std::size_t>(i)] == y[i]);
  CHECK(single.trees()[0].leaves() == 30);
}

TEST_CASE("tree structure invariants") {
  const auto b = blobs(7, 50, 1.0);
  ExtraTrees forest(Task::classify, small_forest(8, 10));
  forest.fit_classifier(b.X, b.labels, 2);
  for (const auto& tree : forest.trees()) {
    for (double v : tree.importance) CHECK(v >= 0.0);
    for (const auto& node : tree.nodes) {
      if (node.feature < 0) continue;
      const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
      const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
      CHECK(l.samples + r.samples == node.samples);
      CHECK(l.samples > 0);
      CHECK(r.samples > 0);
    }
  }
}

TEST_CASE("constant response and single row") {
  Matrix X = Matrix::Random(10, 2);
  ExtraTrees forest(Task::regress, small_forest(1, 5));
  forest.fit_regressor(X, Vector::Constant(10, 4.0));
  for (double v : forest.predict(X)) CHECK(v == 4.0);

  Matrix one(1, 2);
  one << 1.0, 2.0;
  ExtraTrees tiny(Task::classify, small_forest(1, 3));
  tiny.fit_classifier(one, {1}, 2);
  CHECK(tiny.predict_labels(one) == std::vector<int>{1});
}

TEST_CASE("tie votes go to the smallest class") {
  Matrix X(2, 1);
  X << 0.0, 0.0;
  ExtraTrees forest(Task::classify, small_forest(3, 4));
  forest.fit_classifier(X, {1, 0}, 2);
  CHECK(forest.predict_labels(X) == std::vector<int>{0, 0});
}

TEST_CASE("arity mismatch") {
  const auto b = blobs(2, 10, 3.0);
  ExtraTrees forest(Task::classify, small_forest(1, 3));
  forest.fit_classifier(b.X, b.labels, 2);
  CHECK_THROWS_AS(forest.predict(Matrix::Zero(3, 5)), InputError);
}

TEST_CASE("kfold assignment partitions and stratifies") {
  std::vector<int> labels;
  for (int i = 0; i < 96; ++i) labels.push_back(i % 4);
  const auto a = kfold_assignment(96, 24, &labels, 5);
  CHECK(a == kfold_assignment(96, 24, &labels, 5));
  CHECK(a != kfold_assignment(96, 24, &labels, 6));
  std::vector<std::set<int>> fold_labels(24);
  std::vector<int> fold_size(24, 0);
  for (std::size_t i = 0; i < 96; ++i) {
    REQUIRE(a[i] < 24);
    fold_labels[a[i]].insert(labels[i]);
    ++fold_size[a[i]];
  }
  for (int s : fold_size) CHECK(s == 4);
  for (const auto& s : fold_labels) CHECK(s.size() == 4);
  CHECK_THROWS_AS(kfold_assignment(10, 24, nullptr, 1), InputError);
}

TEST_CASE("kfold cv on separable and on noise labels") {
  const auto b = blobs(3, 48, 10.0);
  CVOptions o;
  o.forest = small_forest(1);
  o.seed = 2;
  const auto sep = kfold_cv(b.X, Target::classes(b.labels, 2), 24, o);
  CHECK(sep.mean_accuracy == 1.0);
  CHECK(sep.folds.size() == 24);

  Rng rng(9);
  Matrix noise(240, 3);
  std::vector<int> labels;
  for (Eigen::Index i = 0; i < 240; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) noise(i, j) = rng.normal();
    labels.push_back(static_cast<int>(i % 2));
  }
  const auto r = kfold_cv(noise, Target::classes(labels, 2), 24, o);
  CHECK(r.mean_accuracy >= 0.35);
  CHECK(r.mean_accuracy <= 0.65);
  for (const auto& f : r.folds) {
    CHECK(f.accuracy >= 0.0);
    CHECK(f.accuracy <= 1.0);
    CHECK(f.f1 <= 1.0);
  }
  const auto again = kfold_cv(noise, Target::classes(labels, 2), 24, o);
  CHECK(again.assignment_digest() == r.assignment_digest());
  CHECK(again.mean_accuracy == r.mean_accuracy);
}

TEST_CASE("leave one group out") {
  Rng rng(12);
  const int n_groups = 6;
  Matrix X(n_groups * 40, 2);
  std::vector<int> labels, groups;
  for (int g = 0; g < n_groups; ++g)
    for (int i = 0; i < 40; ++i) {
      const auto row = static_cast<Eigen::Index>(g * 40 + i);
      const int label = i % 2;
      const double shift = g == 5 ? 25.0 : 0.0;
      X(row, 0) = label * 3.0 + rng.normal() + shift;
      X(row, 1) = rng.normal();
      labels.push_back(label);
      groups.push_back(g + 1);
    }
  CVOptions o;
  o.forest = small_forest(4);
  const auto target = Target::classes(labels, 2);
  const auto logo = logo_cv(X, target, groups, o);
  REQUIRE(logo.folds.size() == 6);
  CHECK(logo.folds[0].name == "1");
  CHECK(logo.folds[5].name == "6");
  for (const auto& f : logo.folds) CHECK(f.n_test == 40);
  const auto kfold = kfold_cv(X, target, 24, o);
  CHECK(logo.folds[5].accuracy < kfold.mean_accuracy);
  CHECK(std::abs(logo.folds[0].accuracy - kfold.mean_accuracy) < 0.15);
  CHECK_THROWS_AS(logo_cv(X, target, std::vector<int>(labels.size(), 1), o), InputError);
}

TEST_CASE("regression cv reports r2 per fold") {
  Rng rng(21);
  Matrix X(120, 2);
  Vector y(120);
  for (Eigen::Index i = 0; i < 120; ++i) {
    X(i, 0) = rng.uniform();
    X(i, 1) = rng.normal();
    y[i] = 10.0 * X(i, 0);
  }
  CVOptions o;
  o.forest = small_forest(2);
  const auto r = kfold_cv(X, Target::real(y), 12, o);
  CHECK(r.task == Task::regress);
  CHECK(r.mean_r2 > 0.8);
  for (const auto& f : r.folds) CHECK(f.r2 <= 1.0);
}

TEST_CASE("label encoder") {
  const auto enc = LabelEncoder::fit({"TPA", "Active", "TPA", "MSR"});
  CHECK(enc.classes == std::vector<std::string>{"Active", "MSR", "TPA"});
  CHECK(enc.transform({"MSR", "TPA"}) == std::vector<int>{1, 2});
  CHECK_THROWS_AS(enc.index("Sobol"), InputError);
  const auto [m, s] = mean_std({1.0, 3.0});
  CHECK(m == 2.0);
  CHECK(s == 1.0);
}
