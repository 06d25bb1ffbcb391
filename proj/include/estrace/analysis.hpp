#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "estrace/consensus.hpp"
#include "estrace/feature_matrix.hpp"
#include "estrace/validation.hpp"

namespace estrace::analysis {

struct LearnOptions {
  std::size_t trees = 100;
  std::size_t folds = 24;
  bool stratified = true;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Fold count actually used: min(requested, rows).
std::size_t effective_folds(std::size_t requested, std::size_t rows);

struct FidResult {
  int fid = 0;
  learn::CVResult cv;
};

/// Variant labels, one K-fold CV per fid.
std::vector<FidResult> classify_variants_per_fid(const FeatureMatrix& m, const LearnOptions& options);

struct JointResult {
  learn::CVResult kfold;
  learn::CVResult logo;  ///< folds named by held-out fid
};

/// Variant labels over all fids: K-fold and leave-one-fid-out.
JointResult classify_variants_all(const FeatureMatrix& m, const LearnOptions& options);

/// Problem labels from the rows of `reference` only.
learn::CVResult classify_fids(const FeatureMatrix& m, const LearnOptions& options,
                              const std::string& reference = "Standard");

/// Problem-group labels (fid -> group) from the rows of `reference` only.
learn::CVResult classify_groups(const FeatureMatrix& m, const std::map<int, std::string>& grouping,
                                const LearnOptions& options, const std::string& reference = "Standard");

/// targets_hit regression over all rows.
learn::CVResult regress_targets(const FeatureMatrix& m, const LearnOptions& options);

/// targets_hit regression per variant, in first-appearance order.
std::vector<std::pair<std::string, learn::CVResult>> regress_per_variant(const FeatureMatrix& m,
                                                                         const LearnOptions& options);

/// The five default BBOB groups, named `bbob1`..`bbob5`.
std::map<int, std::string> bbob_grouping();

/// Reads a `fid,group` CSV ('#' comments allowed). Throws MissingInputError
/// if absent and ConfigError on fids outside 1..24.
std::map<int, std::string> read_grouping_csv(const std::filesystem::path& path);

/// Splits unscaled-or-scaled raw matrices into (fid, L) groups with variant labels.
std::vector<select::GroupData> selection_groups(const std::vector<FeatureMatrix>& matrices);

}  // namespace estrace::analysis
