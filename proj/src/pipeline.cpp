#include "estrace/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "estrace/analysis.hpp"
#include "estrace/cluster.hpp"
#include "estrace/errors.hpp"
#include "estrace/parallel.hpp"
#include "estrace/rng.hpp"
#include "estrace/variants.hpp"

namespace estrace::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

analysis::LearnOptions learn_options(const ExperimentConfig& c) {
  analysis::LearnOptions o;
  o.trees = c.trees;
  o.folds = c.folds;
  o.stratified = c.stratified;
  o.seed = derive_seed(c.master_seed, {hash_string("learn")});
  o.jobs = c.jobs;
  return o;
}

json stamped(const ExperimentConfig& c, const std::string& kind) {
  json j;
  j["kind"] = kind;
  j["config_digest"] = config_digest(c);
  j["config"] = config_json(c);
  return j;
}

void check_digest(const json& meta, const ExperimentConfig& c, const fs::path& where) {
  if (!meta.contains("config_digest") || meta["config_digest"] != config_digest(c))
    throw MissingInputError(where.string() + " was produced under a different config digest");
}

Trace read_trace(const Layout& layout, const ExperimentConfig& c, const RunSpec& spec, std::string& problem) {
  Trace t;
  const auto csv = layout.trace_csv(spec.variant, spec.fid, spec.run);
  const auto meta = layout.trace_meta(spec.variant, spec.fid, spec.run);
  if (!fs::exists(csv) || !fs::exists(meta)) {
    problem = "missing";
    return t;
  }
  const auto j = read_json(meta);
  if (j.value("config_digest", std::string()) != config_digest(c) || j.value("run_digest", std::string()) != run_digest(c, spec)) {
    problem = "stale digest";
    return t;
  }
  t.points = read_trace_csv(csv);
  if (t.points.size() != c.generations) {
    problem = "incomplete";
    return t;
  }
  t.meta.variant = spec.variant;
  t.meta.fid = spec.fid;
  t.meta.dim = c.dim;
  t.meta.run = spec.run;
  t.meta.seed = spec.seed;
  t.meta.transform_seed = c.transform_seed;
  t.meta.f_opt = j.at("f_opt").get<double>();
  t.targets_hit = j.at("targets_hit").get<int>();
  return t;
}

std::string length_key(std::size_t L) { return "L" + std::to_string(L); }

json cv_summary(const learn::CVResult& r) { return learn::to_json(r); }

std::map<int, std::string> mersmann_grouping(const ExperimentConfig& c) {
  if (!c.mersmann_groups) throw ConfigError("no Mersmann grouping file configured ([groups] mersmann)");
  return analysis::read_grouping_csv(*c.mersmann_groups);
}

}  // namespace

fs::path Layout::trace_csv(const std::string& variant, int fid, std::size_t run) const {
  return traces() / (trace_stem(variant, fid, run) + ".csv");
}

fs::path Layout::trace_meta(const std::string& variant, int fid, std::size_t run) const {
  return traces() / (trace_stem(variant, fid, run) + ".json");
}

fs::path Layout::feature_csv(const std::string& catalog, std::size_t length) const {
  return features() / (catalog + "_L" + std::to_string(length) + ".csv");
}

fs::path Layout::feature_meta(const std::string& catalog, std::size_t length) const {
  return features() / (catalog + "_L" + std::to_string(length) + ".json");
}

std::uint64_t run_seed(std::uint64_t master_seed, const std::string& variant, int fid, std::size_t run) {
  return derive_seed(master_seed, {hash_string(variant), static_cast<std::uint64_t>(fid), run});
}

std::vector<RunSpec> plan_runs(const ExperimentConfig& c) {
  std::vector<RunSpec> out;
  for (const auto& v : c.variants)
    for (int fid : c.fids)
      for (std::size_t r = 0; r < c.runs; ++r) out.push_back({v, fid, r, run_seed(c.master_seed, v, fid, r)});
  return out;
}

std::string run_digest(const ExperimentConfig& c, const RunSpec& spec) {
  std::ostringstream os;
  os << cma::describe(cma::variant_by_name(spec.variant).config) << ";fid=" << spec.fid << ";run=" << spec.run
     << ";seed=" << spec.seed << ";" << describe_generation(c);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_string(os.str())));
  return buf;
}

json config_json(const ExperimentConfig& c) {
  return json{{"variants", c.variants},
              {"fids", c.fids},
              {"dim", c.dim},
              {"runs", c.runs},
              {"lengths", c.lengths},
              {"generations", c.generations},
              {"master_seed", c.master_seed},
              {"transform_seed", c.transform_seed},
              {"trees", c.trees},
              {"folds", c.folds},
              {"stratified", c.stratified},
              {"catalog", c.catalog},
              {"boruta_max_iter", c.boruta_max_iter},
              {"boruta_trees", c.boruta_trees},
              {"boruta_alpha", c.boruta_alpha}};
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw MissingInputError("cannot write " + path.string());
    out << text;
    if (!out) throw MissingInputError("failed writing " + path.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

GenerateSummary generate(const ExperimentConfig& c) {
  c.validate();
  const Layout layout{c.output_dir};
  fs::create_directories(layout.traces());
  const auto plan = plan_runs(c);
  GenerateSummary summary;
  summary.planned = plan.size();
  std::vector<char> computed(plan.size(), 0);
  parallel_for(plan.size(), c.jobs, [&](std::size_t i) {
    const auto& spec = plan[i];
    const auto meta = layout.trace_meta(spec.variant, spec.fid, spec.run);
    const auto csv = layout.trace_csv(spec.variant, spec.fid, spec.run);
    const auto digest = run_digest(c, spec);
    if (fs::exists(csv) && fs::exists(meta)) {
      try {
        const auto j = read_json(meta);
        if (j.value("run_digest", std::string()) == digest && j.value("config_digest", std::string()) == config_digest(c))
          return;
      } catch (const InputError&) {
      }
    }
    const auto& variant = cma::variant_by_name(spec.variant);
    const auto trace = run_trace(spec.variant, variant.config, spec.fid, c.dim, spec.run, spec.seed, c.generations,
                                 c.transform_seed);
    write_trace_csv(csv, trace);
    json j{{"variant", spec.variant},
           {"fid", spec.fid},
           {"dim", c.dim},
           {"run", spec.run},
           {"seed", spec.seed},
           {"transform_seed", c.transform_seed},
           {"generations", c.generations},
           {"f_opt", trace.meta.f_opt},
           {"f_best_final", trace.points.back().f_best},
           {"targets_hit", trace.targets_hit},
           {"run_digest", digest},
           {"config_digest", config_digest(c)}};
    write_json(meta, j);
    computed[i] = 1;
  });
  for (char v : computed) summary.computed += static_cast<std::size_t>(v);
  summary.skipped = summary.planned - summary.computed;
  return summary;
}

std::vector<Trace> simulate(const ExperimentConfig& c) {
  c.validate();
  const auto plan = plan_runs(c);
  std::vector<Trace> traces(plan.size());
  parallel_for(plan.size(), c.jobs, [&](std::size_t i) {
    const auto& s = plan[i];
    traces[i] = run_trace(s.variant, cma::variant_by_name(s.variant).config, s.fid, c.dim, s.run, s.seed,
                          c.generations, c.transform_seed);
  });
  return traces;
}

std::vector<Trace> load_traces(const ExperimentConfig& c) {
  c.validate();
  const Layout layout{c.output_dir};
  const auto plan = plan_runs(c);
  std::vector<Trace> traces(plan.size());
  std::vector<std::string> problems(plan.size());
  parallel_for(plan.size(), c.jobs, [&](std::size_t i) { traces[i] = read_trace(layout, c, plan[i], problems[i]); });
  std::vector<std::string> gaps;
  for (std::size_t i = 0; i < plan.size(); ++i)
    if (!problems[i].empty()) gaps.push_back(trace_stem(plan[i].variant, plan[i].fid, plan[i].run) + " (" + problems[i] + ")");
  if (!gaps.empty()) {
    std::string msg = std::to_string(gaps.size()) + " of " + std::to_string(plan.size()) + " traces unavailable:";
    for (std::size_t i = 0; i < gaps.size() && i < 20; ++i) msg += "\n  " + gaps[i];
    if (gaps.size() > 20) msg += "\n  ...";
    throw MissingInputError(msg);
  }
  return traces;
}

void extract(const ExperimentConfig& c, const std::string& catalog) {
  if (catalog != "selected" && catalog != "raw" && catalog != "all")
    throw ConfigError("catalog must be selected, raw or all");
  const auto traces = load_traces(c);
  const Layout layout{c.output_dir};
  fs::create_directories(layout.features());
  std::vector<std::pair<std::string, std::vector<tsfeat::FeatureSpec>>> catalogs;
  if (catalog != "raw") catalogs.emplace_back("selected", tsfeat::selected_catalog());
  if (catalog != "selected") catalogs.emplace_back("raw", tsfeat::raw_catalog());
  for (const auto& [name, specs] : catalogs) {
    for (auto L : c.lengths) {
      const auto matrix = scale_unit_interval(build_feature_matrix(traces, specs, L, c.jobs));
      write_feature_csv(layout.feature_csv(name, L), matrix);
      json meta = stamped(c, "features");
      meta["catalog"] = name;
      meta["L"] = L;
      meta["rows"] = matrix.n_rows();
      meta["columns"] = matrix.n_cols();
      meta["scaled"] = true;
      write_json(layout.feature_meta(name, L), meta);
    }
  }
}

FeatureMatrix load_features(const ExperimentConfig& c, const std::string& catalog, std::size_t length) {
  const Layout layout{c.output_dir};
  const auto meta_path = layout.feature_meta(catalog, length);
  if (!fs::exists(meta_path))
    throw MissingInputError("feature matrix " + layout.feature_csv(catalog, length).string() +
                            " not found; run `extract --catalog " + catalog + "` first");
  check_digest(read_json(meta_path), c, meta_path);
  auto m = read_feature_csv(layout.feature_csv(catalog, length));
  m.scaled = true;
  return m;
}

FeatureMatrix analysis_features(const ExperimentConfig& c, std::size_t length) {
  if (c.catalog == "selected") return load_features(c, "selected", length);
  const Layout layout{c.output_dir};
  const auto path = layout.reports() / "selection.json";
  if (!fs::exists(path)) throw MissingInputError("selection.json not found; run `select` first");
  const auto j = read_json(path);
  check_digest(j, c, path);
  std::vector<std::string> names;
  for (const auto& e : j.at("consensus")) names.push_back(e.at("feature").get<std::string>());
  if (names.empty()) throw MissingInputError("consensus selection is empty");
  return load_features(c, "raw", length).subset_columns(names);
}

json run_select(const ExperimentConfig& c) {
  c.validate();
  std::vector<FeatureMatrix> matrices;
  for (auto L : c.lengths) matrices.push_back(load_features(c, "raw", L));
  select::BorutaOptions o;
  o.max_iter = c.boruta_max_iter;
  o.n_trees = c.boruta_trees;
  o.alpha = c.boruta_alpha;
  o.seed = derive_seed(c.master_seed, {hash_string("select")});
  o.jobs = c.jobs;
  const auto report = select::run_consensus(matrices.front().columns, analysis::selection_groups(matrices), o);
  json j = stamped(c, "selection");
  j.update(select::to_json(report));
  j["reduction"] = report.columns.empty() ? 0.0
                                          : 1.0 - static_cast<double>(report.consensus.size()) /
                                                      static_cast<double>(report.columns.size());
  write_json(Layout{c.output_dir}.reports() / "selection.json", j);
  return j;
}

json run_classify(const ExperimentConfig& c, const std::string& target) {
  c.validate();
  static const std::set<std::string> targets = {"variant-per-fid", "variant-all", "fid", "group-bbob",
                                                "group-mersmann", "all"};
  if (!targets.count(target)) throw ConfigError("unknown classification target '" + target + "'");
  const Layout layout{c.output_dir};
  const auto o = learn_options(c);
  std::vector<std::pair<std::size_t, FeatureMatrix>> data;
  for (auto L : c.lengths) data.emplace_back(L, analysis_features(c, L));
  const bool all = target == "all";
  json out = stamped(c, "classification");
  out["target"] = target;

  if (all || target == "variant-per-fid") {
    json section;
    std::map<int, std::map<std::size_t, learn::CVResult>> table;
    for (const auto& [L, m] : data) {
      json per_fid = json::array();
      std::vector<double> acc;
      for (const auto& r : analysis::classify_variants_per_fid(m, o)) {
        per_fid.push_back({{"fid", r.fid}, {"cv", cv_summary(r.cv)}});
        acc.push_back(r.cv.mean_accuracy);
        table[r.fid][L] = r.cv;
      }
      const auto [mean, sd] = learn::mean_std(acc);
      section[length_key(L)] = {{"per_fid", per_fid}, {"average_accuracy", {{"mean", mean}, {"std", sd}}}};
    }
    std::string csv = "fid";
    for (auto L : c.lengths) csv += ",acc_L" + std::to_string(L);
    for (auto L : c.lengths) csv += ",f1_L" + std::to_string(L);
    csv += '\n';
    for (const auto& [fid, byL] : table) {
      csv += std::to_string(fid);
      for (auto L : c.lengths) csv += ',' + format_double(byL.at(L).mean_accuracy);
      for (auto L : c.lengths) csv += ',' + format_double(byL.at(L).mean_f1);
      csv += '\n';
    }
    write_text(layout.reports() / "classify_variant_per_fid.csv", csv);
    out["variant_per_fid"] = section;
  }
  if (all || target == "variant-all") {
    json section;
    for (const auto& [L, m] : data) {
      const auto r = analysis::classify_variants_all(m, o);
      section[length_key(L)] = {{"kfold", cv_summary(r.kfold)}, {"logo", cv_summary(r.logo)}};
    }
    out["variant_all"] = section;
  }
  if (all || target == "fid") {
    json section;
    for (const auto& [L, m] : data) section[length_key(L)] = cv_summary(analysis::classify_fids(m, o));
    out["fid"] = section;
  }
  if (all || target == "group-bbob") {
    json section;
    const auto g = analysis::bbob_grouping();
    for (const auto& [L, m] : data) section[length_key(L)] = cv_summary(analysis::classify_groups(m, g, o));
    out["group_bbob"] = section;
  }
  if (target == "group-mersmann" || (all && c.mersmann_groups)) {
    json section;
    const auto g = mersmann_grouping(c);
    for (const auto& [L, m] : data) section[length_key(L)] = cv_summary(analysis::classify_groups(m, g, o));
    out["group_mersmann"] = section;
  }
  std::string name = target;
  std::replace(name.begin(), name.end(), '-', '_');
  write_json(layout.reports() / ("classify_" + name + ".json"), out);
  return out;
}

json run_cluster(const ExperimentConfig& c) {
  c.validate();
  const Layout layout{c.output_dir};
  json out = stamped(c, "clustering");
  for (auto by : {cluster::GroupBy::variant, cluster::GroupBy::fid}) {
    const std::string name = by == cluster::GroupBy::variant ? "variants" : "fids";
    json section;
    std::vector<cluster::DistanceMatrix> scaled;
    std::vector<cluster::Dendrogram> trees;
    for (auto L : c.lengths) {
      const auto m = analysis_features(c, L);
      const auto vectors = cluster::mean_vectors(m, by);
      if (vectors.labels.size() < 2) continue;
      const auto raw = cluster::euclidean_distances(vectors);
      const auto dist = cluster::scale_off_diagonal(raw);
      const auto tree = cluster::ward_linkage(raw);
      const auto stem = "cluster_" + name + "_L" + std::to_string(L);
      write_text(layout.reports() / (stem + ".newick"), cluster::to_newick(tree) + "\n");
      write_text(layout.reports() / (stem + "_merges.csv"), cluster::merge_table_csv(tree));
      write_text(layout.reports() / (stem + "_distance.csv"), cluster::distance_csv(dist));
      json merges = json::array();
      for (const auto& mg : tree.merges)
        merges.push_back({{"a", mg.a}, {"b", mg.b}, {"height", mg.height}, {"size", mg.size}});
      json matrix = json::array();
      for (Eigen::Index i = 0; i < dist.d.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < dist.d.cols(); ++j) row.push_back(dist.d(i, j));
        matrix.push_back(row);
      }
      section[length_key(L)] = {{"labels", dist.labels},
                                {"scaled_distance", matrix},
                                {"merges", merges},
                                {"newick", cluster::to_newick(tree)}};
      scaled.push_back(dist);
      trees.push_back(tree);
    }
    if (scaled.size() >= 2) {
      write_text(layout.reports() / ("cluster_" + name + "_combined_distance.csv"),
                 cluster::combined_distance_csv(scaled[0], scaled[1]));
      section["baker_gamma"] = cluster::baker_gamma(trees[0], trees[1]);
    }
    out[name] = section;
  }
  write_json(layout.reports() / "cluster.json", out);
  return out;
}

json run_regress(const ExperimentConfig& c) {
  c.validate();
  const Layout layout{c.output_dir};
  const auto o = learn_options(c);
  json out = stamped(c, "regression");
  std::string csv = "variant,L,fold,r2\n";
  for (auto L : c.lengths) {
    const auto m = analysis_features(c, L);
    json section;
    section["all_variants"] = cv_summary(analysis::regress_targets(m, o));
    json per_variant = json::array();
    for (const auto& [variant, r] : analysis::regress_per_variant(m, o)) {
      per_variant.push_back({{"variant", variant}, {"cv", cv_summary(r)}});
      for (const auto& f : r.folds) csv += variant + ',' + std::to_string(L) + ',' + f.name + ',' + format_double(f.r2) + '\n';
    }
    section["per_variant"] = per_variant;
    out[length_key(L)] = section;
  }
  write_text(layout.reports() / "regress_per_variant.csv", csv);
  write_json(layout.reports() / "regress.json", out);
  return out;
}

json run_report(const ExperimentConfig& c) {
  c.validate();
  const Layout layout{c.output_dir};
  json out = stamped(c, "report");
  std::size_t found = 0;
  if (fs::exists(layout.reports()))
    for (const auto& name : {"selection", "classify_all", "classify_variant_per_fid", "classify_variant_all",
                             "classify_fid", "classify_group_bbob", "classify_group_mersmann", "cluster", "regress"}) {
      const auto path = layout.reports() / (std::string(name) + ".json");
      if (!fs::exists(path)) continue;
      auto j = read_json(path);
      check_digest(j, c, path);
      j.erase("config");
      j.erase("config_digest");
      out["sections"][name] = j;
      ++found;
    }
  if (found == 0) throw MissingInputError("no reports found under " + layout.reports().string());
  write_json(layout.reports() / "report.json", out);
  return out;
}

}  // namespace estrace::pipeline
