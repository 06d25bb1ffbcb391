#include "estrace/metrics.hpp"

#include <algorithm>
#include <set>

#include "estrace/errors.hpp"

namespace estrace::learn {

namespace {

template <class T>
void check_pair(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty()) throw InputError("metric on empty input");
  if (a.size() != b.size()) throw InputError("metric inputs differ in length");
}

}  // namespace

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_pair(y_true, y_pred);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hit += y_true[i] == y_pred[i];
  return static_cast<double>(hit) / static_cast<double>(y_true.size());
}

double f1_macro(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  check_pair(y_true, y_pred);
  std::set<int> labels(y_true.begin(), y_true.end());
  labels.insert(y_pred.begin(), y_pred.end());
  double total = 0.0;
  for (int label : labels) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == label, p = y_pred[i] == label;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    if (precision + recall > 0.0) total += 2.0 * precision * recall / (precision + recall);
  }
  return total / static_cast<double>(labels.size());
}

double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
  check_pair(y_true, y_pred);
  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= static_cast<double>(y_true.size());
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    sse += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    sst += (y_true[i] - mean) * (y_true[i] - mean);
  }
  const bool constant = std::all_of(y_true.begin(), y_true.end(), [&](double v) { return v == y_true.front(); });
  if (constant) return sse == 0.0 ? 1.0 : 0.0;
  return 1.0 - sse / sst;
}

LabelEncoder LabelEncoder::fit(const std::vector<std::string>& labels) {
  std::set<std::string> unique(labels.begin(), labels.end());
  return LabelEncoder{{unique.begin(), unique.end()}};
}

int LabelEncoder::index(const std::string& label) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) throw InputError("unknown label '" + label + "'");
  return static_cast<int>(it - classes.begin());
}

std::vector<int> LabelEncoder::transform(const std::vector<std::string>& labels) const {
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(index(l));
  return out;
}

}  // namespace estrace::learn
