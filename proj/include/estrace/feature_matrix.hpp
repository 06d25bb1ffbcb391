#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "estrace/linalg.hpp"
#include "estrace/trace.hpp"
#include "estrace/tsfeat.hpp"

namespace estrace {

struct RowMeta {
  std::string variant;
  int fid = 0;
  std::size_t run = 0;
  std::size_t length = 0;  ///< L, number of generations the features saw
  int targets_hit = 0;

  bool operator==(const RowMeta&) const = default;
};

/// Rows are runs, columns are named features.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<RowMeta> rows;
  Matrix values;  ///< rows x columns
  bool scaled = false;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return columns.size(); }
  std::optional<std::size_t> column_index(const std::string& name) const;

  FeatureMatrix subset_rows(const std::vector<std::size_t>& index) const;
  /// Keeps the named columns in the given order. Throws InputError if one is missing.
  FeatureMatrix subset_columns(const std::vector<std::string>& names) const;
};

/// Unscaled matrix: one row per trace (input order), one column per spec.
FeatureMatrix build_feature_matrix(const std::vector<Trace>& traces, const std::vector<tsfeat::FeatureSpec>& catalog,
                                   std::size_t length, std::size_t jobs = 1);

/// Min-max scaling of every column within each fid group; constant groups map to 0.
FeatureMatrix scale_unit_interval(const FeatureMatrix& matrix);

/// CSV with metadata columns `variant,fid,run,L,targets_hit` followed by the features.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& matrix);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace estrace
