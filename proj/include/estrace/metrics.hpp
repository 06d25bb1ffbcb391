#pragma once

#include <string>
#include <vector>

namespace estrace::learn {

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Macro-averaged F1 over the union of labels in y_true and y_pred; a label
/// with precision + recall = 0 contributes 0.
double f1_macro(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// 1 - SSE / SST. Constant y_true: 1 if the prediction is exact, else 0.
double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred);

/// Maps string labels to indices 0..k-1 in sorted (canonical) order.
struct LabelEncoder {
  std::vector<std::string> classes;

  static LabelEncoder fit(const std::vector<std::string>& labels);
  std::vector<int> transform(const std::vector<std::string>& labels) const;
  int index(const std::string& label) const;  // throws InputError
};

}  // namespace estrace::learn
