#include "estrace/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "estrace/bbob.hpp"
#include "estrace/errors.hpp"
#include "estrace/metrics.hpp"
#include "estrace/rng.hpp"

namespace estrace::analysis {

namespace {

learn::CVOptions cv_options(const LearnOptions& o, std::uint64_t key_a, std::uint64_t key_b = 0) {
  learn::CVOptions cv;
  cv.seed = derive_seed(o.seed, {key_a, key_b, 1});
  cv.stratified = o.stratified;
  cv.forest.n_trees = o.trees;
  cv.forest.seed = derive_seed(o.seed, {key_a, key_b, 2});
  cv.forest.jobs = o.jobs;
  return cv;
}

std::uint64_t length_key(const FeatureMatrix& m) { return m.rows.empty() ? 0 : m.rows.front().length; }

learn::Target variant_target(const FeatureMatrix& m) {
  std::vector<std::string> names;
  for (const auto& r : m.rows) names.push_back(r.variant);
  const auto enc = learn::LabelEncoder::fit(names);
  return learn::Target::classes(enc.transform(names), static_cast<int>(enc.classes.size()));
}

std::vector<std::size_t> rows_where(const FeatureMatrix& m, auto pred) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    if (pred(m.rows[i])) idx.push_back(i);
  return idx;
}

learn::CVResult classify_by(const FeatureMatrix& sub, const std::vector<std::string>& names, const LearnOptions& o,
                            std::uint64_t key) {
  const auto enc = learn::LabelEncoder::fit(names);
  const auto target = learn::Target::classes(enc.transform(names), static_cast<int>(enc.classes.size()));
  return learn::kfold_cv(sub.values, target, effective_folds(o.folds, sub.n_rows()), cv_options(o, key, length_key(sub)));
}

}  // namespace

std::size_t effective_folds(std::size_t requested, std::size_t rows) { return std::min(requested, rows); }

std::vector<FidResult> classify_variants_per_fid(const FeatureMatrix& m, const LearnOptions& o) {
  std::set<int> fids;
  for (const auto& r : m.rows) fids.insert(r.fid);
  std::vector<FidResult> out;
  for (int fid : fids) {
    const auto sub = m.subset_rows(rows_where(m, [&](const RowMeta& r) { return r.fid == fid; }));
    const auto target = variant_target(sub);
    out.push_back({fid, learn::kfold_cv(sub.values, target, effective_folds(o.folds, sub.n_rows()),
                                        cv_options(o, hash_string("variant-per-fid"), (length_key(sub) << 8) | static_cast<std::uint64_t>(fid)))});
  }
  return out;
}

JointResult classify_variants_all(const FeatureMatrix& m, const LearnOptions& o) {
  const auto target = variant_target(m);
  JointResult res;
  res.kfold = learn::kfold_cv(m.values, target, effective_folds(o.folds, m.n_rows()),
                              cv_options(o, hash_string("variant-all"), length_key(m)));
  std::vector<int> groups;
  for (const auto& r : m.rows) groups.push_back(r.fid);
  res.logo = learn::logo_cv(m.values, target, groups, cv_options(o, hash_string("variant-logo"), length_key(m)));
  return res;
}

learn::CVResult classify_fids(const FeatureMatrix& m, const LearnOptions& o, const std::string& reference) {
  const auto sub = m.subset_rows(rows_where(m, [&](const RowMeta& r) { return r.variant == reference; }));
  if (sub.n_rows() == 0) throw InputError("no rows of variant '" + reference + "'");
  std::vector<std::string> names;
  for (const auto& r : sub.rows) names.push_back(std::to_string(r.fid));
  return classify_by(sub, names, o, hash_string("fid"));
}

learn::CVResult classify_groups(const FeatureMatrix& m, const std::map<int, std::string>& grouping,
                                const LearnOptions& o, const std::string& reference) {
  const auto sub = m.subset_rows(rows_where(m, [&](const RowMeta& r) { return r.variant == reference; }));
  if (sub.n_rows() == 0) throw InputError("no rows of variant '" + reference + "'");
  std::vector<std::string> names;
  for (const auto& r : sub.rows) {
    auto it = grouping.find(r.fid);
    if (it == grouping.end()) throw ConfigError("grouping has no entry for fid " + std::to_string(r.fid));
    names.push_back(it->second);
  }
  return classify_by(sub, names, o, hash_string("group"));
}

learn::CVResult regress_targets(const FeatureMatrix& m, const LearnOptions& o) {
  Vector y(static_cast<Eigen::Index>(m.n_rows()));
  for (std::size_t i = 0; i < m.n_rows(); ++i) y[static_cast<Eigen::Index>(i)] = m.rows[i].targets_hit;
  return learn::kfold_cv(m.values, learn::Target::real(y), effective_folds(o.folds, m.n_rows()),
                         cv_options(o, hash_string("regress"), length_key(m)));
}

std::vector<std::pair<std::string, learn::CVResult>> regress_per_variant(const FeatureMatrix& m,
                                                                         const LearnOptions& o) {
  std::vector<std::string> order;
  for (const auto& r : m.rows)
    if (std::find(order.begin(), order.end(), r.variant) == order.end()) order.push_back(r.variant);
  std::vector<std::pair<std::string, learn::CVResult>> out;
  for (const auto& v : order) {
    const auto sub = m.subset_rows(rows_where(m, [&](const RowMeta& r) { return r.variant == v; }));
    Vector y(static_cast<Eigen::Index>(sub.n_rows()));
    for (std::size_t i = 0; i < sub.n_rows(); ++i) y[static_cast<Eigen::Index>(i)] = sub.rows[i].targets_hit;
    out.emplace_back(v, learn::kfold_cv(sub.values, learn::Target::real(y), effective_folds(o.folds, sub.n_rows()),
                                        cv_options(o, hash_string("regress-variant"), hash_string(v) ^ length_key(sub))));
  }
  return out;
}

std::map<int, std::string> bbob_grouping() {
  std::map<int, std::string> g;
  for (int fid = 1; fid <= 24; ++fid) g[fid] = "bbob" + std::to_string(bbob::default_group(fid));
  return g;
}

std::map<int, std::string> read_grouping_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("grouping file not found: " + path.string());
  std::map<int, std::string> g;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "fid,group") continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("grouping row without a comma: " + line);
    int fid = 0;
    try {
      fid = std::stoi(line.substr(0, comma));
    } catch (const std::logic_error&) {
      throw ConfigError("bad fid in grouping row: " + line);
    }
    if (fid < 1 || fid > 24) throw ConfigError("grouping file lists unknown fid " + std::to_string(fid));
    g[fid] = line.substr(comma + 1);
  }
  return g;
}

std::vector<select::GroupData> selection_groups(const std::vector<FeatureMatrix>& matrices) {
  std::vector<select::GroupData> out;
  for (const auto& m : matrices) {
    std::set<int> fids;
    for (const auto& r : m.rows) fids.insert(r.fid);
    for (int fid : fids) {
      const auto sub = m.subset_rows(rows_where(m, [&](const RowMeta& r) { return r.fid == fid; }));
      select::GroupData g;
      g.fid = fid;
      g.length = length_key(sub);
      g.X = sub.values;
      const auto t = variant_target(sub);
      g.labels = t.labels;
      g.n_classes = t.n_classes;
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace estrace::analysis
