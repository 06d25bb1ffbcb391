#include "estrace/consensus.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "estrace/errors.hpp"
#include "estrace/parallel.hpp"
#include "estrace/rng.hpp"
#include "estrace/tsfeat.hpp"

namespace estrace::select {

std::vector<std::string> SelectionReport::consensus_names() const {
  std::vector<std::string> out;
  for (const auto& e : consensus) out.push_back(e.feature);
  return out;
}

std::string feature_family(const std::string& name) {
  try {
    const auto spec = tsfeat::parse_feature_name(name);
    return std::string(channel_name(spec.channel)) + "__" + std::string(tsfeat::function_name(spec.function));
  } catch (const InputError&) {
    return name;
  }
}

SelectionReport consensus_select(const std::vector<std::string>& columns, std::vector<GroupOutcome> groups) {
  SelectionReport report;
  report.columns = columns;
  report.groups = std::move(groups);
  if (report.groups.empty()) {
    report.status = "empty";
    return report;
  }
  std::set<std::string> common(report.groups.front().accepted.begin(), report.groups.front().accepted.end());
  for (const auto& g : report.groups) {
    std::set<std::string> mine(g.accepted.begin(), g.accepted.end()), kept;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(), std::inserter(kept, kept.end()));
    common = std::move(kept);
  }
  std::map<std::string, ConsensusEntry> best;
  for (const auto& name : common) {
    const auto it = std::find(columns.begin(), columns.end(), name);
    double importance = 0.0;
    if (it != columns.end()) {
      const auto j = static_cast<std::size_t>(it - columns.begin());
      for (const auto& g : report.groups)
        if (j < g.importance.size()) importance += g.importance[j];
      importance /= static_cast<double>(report.groups.size());
    }
    const auto family = feature_family(name);
    auto found = best.find(family);
    if (found == best.end() || importance > found->second.importance) best[family] = {name, importance};
  }
  for (const auto& [family, entry] : best) report.consensus.push_back(entry);
  std::sort(report.consensus.begin(), report.consensus.end(),
            [](const ConsensusEntry& a, const ConsensusEntry& b) { return a.feature < b.feature; });
  if (report.consensus.empty()) report.status = "empty";
  return report;
}

SelectionReport run_consensus(const std::vector<std::string>& columns, const std::vector<GroupData>& groups,
                              const BorutaOptions& options) {
  std::vector<GroupOutcome> outcomes(groups.size());
  parallel_for(groups.size(), options.jobs, [&](std::size_t gi) {
    const auto& g = groups[gi];
    if (static_cast<std::size_t>(g.X.cols()) != columns.size()) throw InputError("group column count mismatch");
    BorutaOptions local = options;
    local.seed = derive_seed(options.seed, {static_cast<std::uint64_t>(g.fid), g.length});
    local.jobs = 1;
    const auto res = boruta_select(g.X, g.labels, g.n_classes, local);
    auto& out = outcomes[gi];
    out.fid = g.fid;
    out.length = g.length;
    out.iterations = res.iterations;
    out.importance = res.importance;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      switch (res.decisions[j]) {
        case Decision::accepted: out.accepted.push_back(columns[j]); break;
        case Decision::rejected: out.rejected.push_back(columns[j]); break;
        case Decision::tentative: out.tentative.push_back(columns[j]); break;
      }
    }
  });
  return consensus_select(columns, std::move(outcomes));
}

nlohmann::json channel_summary(const SelectionReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (auto c : kAllChannels) {
    std::size_t count = 0;
    double total = 0.0;
    for (const auto& e : report.consensus) {
      try {
        if (tsfeat::parse_feature_name(e.feature).channel != c) continue;
      } catch (const InputError&) {
        continue;
      }
      ++count;
      total += e.importance;
    }
    nlohmann::json row{{"series", channel_name(c)}, {"selected", count}};
    row["total_importance"] = count ? nlohmann::json(total) : nlohmann::json(nullptr);
    row["average_importance"] = count ? nlohmann::json(total / static_cast<double>(count)) : nlohmann::json(nullptr);
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const SelectionReport& report) {
  nlohmann::json j;
  j["status"] = report.status;
  j["raw_feature_count"] = report.columns.size();
  j["consensus_count"] = report.consensus.size();
  nlohmann::json consensus = nlohmann::json::array();
  for (const auto& e : report.consensus) consensus.push_back({{"feature", e.feature}, {"importance", e.importance}});
  j["consensus"] = consensus;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : report.groups)
    groups.push_back({{"fid", g.fid},
                      {"L", g.length},
                      {"iterations", g.iterations},
                      {"accepted", g.accepted},
                      {"tentative_count", g.tentative.size()},
                      {"rejected_count", g.rejected.size()}});
  j["groups"] = groups;
  j["channel_summary"] = channel_summary(report);
  return j;
}

}  // namespace estrace::select
