// estrace: generate CMA-ES traces, extract features, and run the analyses.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "estrace/config.hpp"
#include "estrace/errors.hpp"
#include "estrace/pipeline.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::optional<std::size_t> length;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string target = "all";
  std::string catalog = "all";
};

estrace::ExperimentConfig resolve(const Options& o) {
  auto config = estrace::default_config();
  if (!o.preset.empty()) estrace::apply_preset(config, o.preset);
  if (!o.config_path.empty()) config = estrace::load_config(o.config_path, config);
  estrace::apply_environment(config);
  if (!o.output.empty()) config.output_dir = o.output;
  if (o.length) config.lengths = {*o.length};
  if (o.jobs) config.jobs = *o.jobs;
  if (o.seed) config.master_seed = *o.seed;
  config.validate();
  return config;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algorithm-side time-series features of modular CMA-ES runs"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "INI experiment config")->check(CLI::ExistingFile);
  app.add_option("--preset", o.preset, "paper or desk")->check(CLI::IsMember({"paper", "desk"}));
  app.add_option("--length", o.length, "Restrict to one series length L");
  app.add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--out", o.output, "Output directory (overrides config and ESTRACE_OUT)");

  auto* generate = app.add_subcommand("generate", "Run the variants and write traces");
  auto* extract = app.add_subcommand("extract", "Write scaled feature matrices");
  extract->add_option("--catalog", o.catalog, "selected, raw or all")
      ->check(CLI::IsMember({"selected", "raw", "all"}));
  auto* select = app.add_subcommand("select", "Consensus Boruta over the raw catalog");
  auto* classify = app.add_subcommand("classify", "Extra-trees classification");
  classify->add_option("--target", o.target, "variant-per-fid, variant-all, fid, group-bbob, group-mersmann or all")
      ->check(CLI::IsMember({"variant-per-fid", "variant-all", "fid", "group-bbob", "group-mersmann", "all"}));
  auto* cluster = app.add_subcommand("cluster", "Distance matrices and Ward dendrograms");
  auto* regress = app.add_subcommand("regress", "Predict targets hit from features");
  auto* report = app.add_subcommand("report", "Merge the reports into report.json");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = resolve(o);
    namespace p = estrace::pipeline;
    if (generate->parsed()) {
      const auto s = p::generate(config);
      std::cout << "traces: " << s.planned << " planned, " << s.computed << " computed, " << s.skipped
                << " up to date\n";
    } else if (extract->parsed()) {
      p::extract(config, o.catalog);
      std::cout << "features written to " << p::Layout{config.output_dir}.features().string() << '\n';
    } else if (select->parsed()) {
      const auto j = p::run_select(config);
      std::cout << "consensus: " << j["consensus"].size() << " of " << j["raw_feature_count"].get<std::size_t>() << " features ("
                << j["status"].get<std::string>() << ")\n";
    } else if (classify->parsed()) {
      print(p::run_classify(config, o.target));
    } else if (cluster->parsed()) {
      p::run_cluster(config);
      std::cout << "dendrograms written to " << p::Layout{config.output_dir}.reports().string() << '\n';
    } else if (regress->parsed()) {
      print(p::run_regress(config));
    } else if (report->parsed()) {
      p::run_report(config);
      std::cout << (p::Layout{config.output_dir}.reports() / "report.json").string() << '\n';
    }
  } catch (const estrace::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const estrace::MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << '\n';
    return 3;
  } catch (const estrace::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
