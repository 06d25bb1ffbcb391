#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "estrace/boruta.hpp"
#include "json.hpp"

namespace estrace::select {

/// One (fid, L) slice of the feature data with variant labels.
struct GroupData {
  int fid = 0;
  std::size_t length = 0;
  Matrix X;
  std::vector<int> labels;
  int n_classes = 0;
};

struct GroupOutcome {
  int fid = 0;
  std::size_t length = 0;
  std::vector<std::string> accepted;
  std::vector<std::string> rejected;
  std::vector<std::string> tentative;
  std::vector<double> importance;  ///< per column, same order as the report columns
  std::size_t iterations = 0;
};

struct ConsensusEntry {
  std::string feature;
  double importance = 0.0;  ///< mean over groups
};

struct SelectionReport {
  std::vector<std::string> columns;
  std::vector<GroupOutcome> groups;
  std::vector<ConsensusEntry> consensus;  ///< sorted by feature name
  std::string status = "ok";              ///< "empty" when no feature survives

  std::vector<std::string> consensus_names() const;
};

/// Key used to collapse parameterizations: `{channel}__{function}` for
/// catalog names, the name itself otherwise.
std::string feature_family(const std::string& name);

/// Intersects the accepted sets of all groups and keeps, per family, the
/// parameterization with the highest mean importance.
SelectionReport consensus_select(const std::vector<std::string>& columns, std::vector<GroupOutcome> groups);

/// Runs Boruta on every group (seeded per group) and combines the outcomes.
SelectionReport run_consensus(const std::vector<std::string>& columns, const std::vector<GroupData>& groups,
                              const BorutaOptions& options);

/// Per-channel count, total and average importance of the consensus set.
nlohmann::json channel_summary(const SelectionReport& report);
nlohmann::json to_json(const SelectionReport& report);

}  // namespace estrace::select
