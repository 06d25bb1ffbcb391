#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace estrace {

/// Everything a pipeline run depends on. Loaded from an INI-style file:
///
///   [experiment]  variants, fids, dim, runs, lengths, generations,
///                 master_seed, transform_seed, output_dir, jobs
///   [learn]       trees, folds, stratified, catalog (selected | consensus)
///   [select]      max_iter, trees, alpha
///   [groups]      mersmann (path to a `fid,group` CSV)
///
/// Lists are comma separated; fids also accept ranges such as `1-24`.
struct ExperimentConfig {
  std::vector<std::string> variants;
  std::vector<int> fids;
  int dim = 5;
  std::size_t runs = 100;
  std::vector<std::size_t> lengths{100, 500};
  std::size_t generations = 500;
  std::uint64_t master_seed = 2021;
  std::uint64_t transform_seed = 1;
  std::filesystem::path output_dir = "estrace_out";
  std::size_t jobs = 1;

  std::size_t trees = 100;
  std::size_t folds = 24;
  bool stratified = true;
  std::string catalog = "selected";

  std::size_t boruta_max_iter = 150;
  std::size_t boruta_trees = 100;
  double boruta_alpha = 0.05;

  std::optional<std::filesystem::path> mersmann_groups;

  /// Throws ConfigError on invalid combinations or unknown variant names.
  void validate() const;
};

/// Full-scale defaults: all twelve variants, fids 1-24, N = 100.
ExperimentConfig default_config();

/// `paper` (defaults) or `desk` (N = 20, fids {1, 2, 5, 8, 13, 21}).
void apply_preset(ExperimentConfig& config, std::string_view preset);

/// Overlays the keys present in `path` on `base`. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = default_config());

/// Applies ESTRACE_OUT if set.
void apply_environment(ExperimentConfig& config);

/// Canonical rendering of the fields that determine the traces.
std::string describe_generation(const ExperimentConfig& config);
/// FNV-1a digest of describe_generation, as 16 hex digits.
std::string config_digest(const ExperimentConfig& config);

std::vector<int> parse_int_list(std::string_view text);
std::vector<std::string> parse_string_list(std::string_view text);

}  // namespace estrace
