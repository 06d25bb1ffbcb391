#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "estrace/config.hpp"
#include "estrace/feature_matrix.hpp"
#include "estrace/trace.hpp"
#include "json.hpp"

namespace estrace::pipeline {

/// Directory layout under the output root.
struct Layout {
  std::filesystem::path root;

  std::filesystem::path traces() const { return root / "traces"; }
  std::filesystem::path features() const { return root / "features"; }
  std::filesystem::path reports() const { return root / "reports"; }
  std::filesystem::path trace_csv(const std::string& variant, int fid, std::size_t run) const;
  std::filesystem::path trace_meta(const std::string& variant, int fid, std::size_t run) const;
  std::filesystem::path feature_csv(const std::string& catalog, std::size_t length) const;
  std::filesystem::path feature_meta(const std::string& catalog, std::size_t length) const;
};

struct RunSpec {
  std::string variant;
  int fid = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
};

/// Per-run seed: derived from the master seed, the variant name, fid and run index.
std::uint64_t run_seed(std::uint64_t master_seed, const std::string& variant, int fid, std::size_t run);

/// All (variant, fid, run) triples in variant-major order.
std::vector<RunSpec> plan_runs(const ExperimentConfig& config);

/// Digest of everything that determines one trace.
std::string run_digest(const ExperimentConfig& config, const RunSpec& spec);

struct GenerateSummary {
  std::size_t planned = 0;
  std::size_t computed = 0;
  std::size_t skipped = 0;
};

/// Writes every missing or stale trace with its JSON sidecar.
GenerateSummary generate(const ExperimentConfig& config);

/// Runs the plan in memory without touching the disk.
std::vector<Trace> simulate(const ExperimentConfig& config);

/// Loads all planned traces. Throws MissingInputError listing the gaps.
std::vector<Trace> load_traces(const ExperimentConfig& config);

/// Writes scaled feature matrices for every configured L. `catalog` is
/// `selected`, `raw`, or `all`.
void extract(const ExperimentConfig& config, const std::string& catalog);

/// Loads a matrix written by extract, checking its digest.
FeatureMatrix load_features(const ExperimentConfig& config, const std::string& catalog, std::size_t length);

/// Matrix used by classify/cluster/regress: the selected catalog, or the raw
/// matrix restricted to the consensus features.
FeatureMatrix analysis_features(const ExperimentConfig& config, std::size_t length);

nlohmann::json run_select(const ExperimentConfig& config);
/// Targets: variant-per-fid, variant-all, fid, group-bbob, group-mersmann, all.
nlohmann::json run_classify(const ExperimentConfig& config, const std::string& target);
nlohmann::json run_cluster(const ExperimentConfig& config);
nlohmann::json run_regress(const ExperimentConfig& config);
/// Merges the existing reports into report.json; rejects reports with another digest.
nlohmann::json run_report(const ExperimentConfig& config);

/// Config echo included in every report.
nlohmann::json config_json(const ExperimentConfig& config);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace estrace::pipeline
