#include "estrace/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "estrace/errors.hpp"
#include "estrace/metrics.hpp"
#include "estrace/rng.hpp"

namespace estrace::learn {

namespace {

Matrix take_rows(const Matrix& X, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

FoldMetrics evaluate_fold(const Matrix& X, const Target& target, const std::vector<std::size_t>& train,
                          const std::vector<std::size_t>& test, const ForestParams& forest, std::string name) {
  FoldMetrics m;
  m.name = std::move(name);
  m.n_test = test.size();
  const Matrix Xtr = take_rows(X, train), Xte = take_rows(X, test);
  ExtraTrees model(target.task, forest);
  if (target.task == Task::classify) {
    std::vector<int> ytr, yte;
    for (auto i : train) ytr.push_back(target.labels[i]);
    for (auto i : test) yte.push_back(target.labels[i]);
    model.fit_classifier(Xtr, ytr, target.n_classes);
    const auto pred = model.predict_labels(Xte);
    m.accuracy = accuracy(yte, pred);
    m.f1 = f1_macro(yte, pred);
  } else {
    Vector ytr(static_cast<Eigen::Index>(train.size()));
    std::vector<double> yte;
    for (std::size_t i = 0; i < train.size(); ++i) ytr[static_cast<Eigen::Index>(i)] = target.values[static_cast<Eigen::Index>(train[i])];
    for (auto i : test) yte.push_back(target.values[static_cast<Eigen::Index>(i)]);
    model.fit_regressor(Xtr, ytr);
    m.r2 = r2_score(yte, model.predict(Xte));
  }
  return m;
}

void summarize(CVResult& r) {
  std::vector<double> acc, f1, r2;
  for (const auto& f : r.folds) {
    acc.push_back(f.accuracy);
    f1.push_back(f.f1);
    r2.push_back(f.r2);
  }
  std::tie(r.mean_accuracy, r.std_accuracy) = mean_std(acc);
  std::tie(r.mean_f1, r.std_f1) = mean_std(f1);
  std::tie(r.mean_r2, r.std_r2) = mean_std(r2);
}

void check_inputs(const Matrix& X, const Target& target) {
  if (static_cast<std::size_t>(X.rows()) != target.size()) throw InputError("target length does not match rows");
  if (!X.allFinite()) throw InputError("feature matrix contains non-finite values");
}

}  // namespace

Target Target::classes(std::vector<int> labels, int n_classes) {
  Target t;
  t.task = Task::classify;
  t.labels = std::move(labels);
  t.n_classes = n_classes;
  return t;
}

Target Target::real(Vector values) {
  Target t;
  t.task = Task::regress;
  t.values = std::move(values);
  return t;
}

std::size_t Target::size() const {
  return task == Task::classify ? labels.size() : static_cast<std::size_t>(values.size());
}

std::uint64_t CVResult::assignment_digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto f : fold_of) {
    h ^= f;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return {mean, std::sqrt(s / static_cast<double>(v.size()))};
}

std::vector<std::size_t> kfold_assignment(std::size_t n, std::size_t k, const std::vector<int>* labels,
                                          std::uint64_t seed) {
  if (k < 2) throw InputError("K-fold needs K >= 2");
  if (k > n) throw InputError("K-fold needs at least K rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  if (labels)
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return (*labels)[a] < (*labels)[b]; });
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = i % k;
  return fold;
}

CVResult kfold_cv(const Matrix& X, const Target& target, std::size_t k, const CVOptions& options) {
  check_inputs(X, target);
  CVResult r;
  r.task = target.task;
  const bool stratify = options.stratified && target.task == Task::classify;
  r.fold_of = kfold_assignment(target.size(), k, stratify ? &target.labels : nullptr, options.seed);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < r.fold_of.size(); ++i) (r.fold_of[i] == f ? test : train).push_back(i);
    ForestParams forest = options.forest;
    forest.seed = derive_seed(options.forest.seed, {f});
    r.folds.push_back(evaluate_fold(X, target, train, test, forest, std::to_string(f)));
  }
  summarize(r);
  return r;
}

CVResult logo_cv(const Matrix& X, const Target& target, const std::vector<int>& groups, const CVOptions& options) {
  check_inputs(X, target);
  if (groups.size() != target.size()) throw InputError("group labels do not match rows");
  std::map<int, std::size_t> index;
  for (int g : groups) index.emplace(g, 0);
  if (index.size() < 2) throw InputError("leave-one-group-out needs at least 2 groups");
  std::size_t next = 0;
  for (auto& [g, i] : index) i = next++;
  CVResult r;
  r.task = target.task;
  for (int g : groups) r.fold_of.push_back(index[g]);
  for (const auto& [g, f] : index) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < groups.size(); ++i) (groups[i] == g ? test : train).push_back(i);
    ForestParams forest = options.forest;
    forest.seed = derive_seed(options.forest.seed, {f});
    r.folds.push_back(evaluate_fold(X, target, train, test, forest, std::to_string(g)));
  }
  summarize(r);
  return r;
}

nlohmann::json to_json(const CVResult& r) {
  nlohmann::json j;
  j["task"] = r.task == Task::classify ? "classify" : "regress";
  j["assignment_digest"] = r.assignment_digest();
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json fj{{"fold", f.name}, {"n_test", f.n_test}};
    if (r.task == Task::classify) {
      fj["accuracy"] = f.accuracy;
      fj["f1"] = f.f1;
    } else {
      fj["r2"] = f.r2;
    }
    folds.push_back(fj);
  }
  j["folds"] = folds;
  if (r.task == Task::classify) {
    j["accuracy"] = {{"mean", r.mean_accuracy}, {"std", r.std_accuracy}};
    j["f1"] = {{"mean", r.mean_f1}, {"std", r.std_f1}};
  } else {
    j["r2"] = {{"mean", r.mean_r2}, {"std", r.std_r2}};
  }
  return j;
}

}  // namespace estrace::learn
