#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "estrace/config.hpp"
#include "estrace/errors.hpp"
#include "estrace/pipeline.hpp"
#include "oracles/feature_oracle.hpp"

using namespace estrace;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("estrace_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

ExperimentConfig tiny(const fs::path& out) {
  ExperimentConfig c = default_config();
  c.variants = {"Standard", "Active"};
  c.fids = {1, 2};
  c.runs = 3;
  c.generations = 60;
  c.lengths = {30, 60};
  c.output_dir = out;
  c.trees = 20;
  c.folds = 3;
  c.boruta_max_iter = 10;
  c.boruta_trees = 20;
  return c;
}

std::size_t count_files(const fs::path& dir, const std::string& extension) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == extension) ++n;
  return n;
}

int cli(const std::string& args) {
  const std::string command = std::string(ESTRACE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config files overlay the defaults") {
  const auto dir = scratch("config");
  const auto path = write_file(dir / "c.ini",
                               "# comment\n[experiment]\nvariants = Standard, TPA\nfids = 1-3, 7\nruns = 4\n"
                               "lengths = 50\ngenerations = 80\n[learn]\nstratified = false\n");
  const auto c = load_config(path);
  CHECK(c.variants == std::vector<std::string>{"Standard", "TPA"});
  CHECK(c.fids == std::vector<int>{1, 2, 3, 7});
  CHECK(c.runs == 4);
  CHECK(c.lengths == std::vector<std::size_t>{50});
  CHECK_FALSE(c.stratified);
  CHECK(c.dim == 5);
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_AS(load_config(write_file(dir / "u.ini", "[experiment]\ncolour = red\n")), ConfigError);
  CHECK_THROWS_AS(load_config(write_file(dir / "b.ini", "[experiment]\nruns = many\n")), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "absent.ini"), ConfigError);

  auto bad = c;
  bad.variants = {"Standard", "Simulated"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.lengths = {100};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.fids = {0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("presets and environment") {
  auto c = default_config();
  CHECK(c.variants.size() == 12);
  CHECK(c.fids.size() == 24);
  CHECK(c.runs == 100);
  apply_preset(c, "desk");
  CHECK(c.runs == 20);
  CHECK(c.fids == std::vector<int>{1, 2, 5, 8, 13, 21});
  CHECK_THROWS_AS(apply_preset(c, "huge"), ConfigError);

  setenv("ESTRACE_OUT", "/tmp/elsewhere", 1);
  apply_environment(c);
  unsetenv("ESTRACE_OUT");
  CHECK(c.output_dir == "/tmp/elsewhere");

  CHECK(parse_int_list("1-3,5") == std::vector<int>{1, 2, 3, 5});
  CHECK(parse_string_list(" a , b ") == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(parse_int_list("4-2"), ConfigError);
}

TEST_CASE("run seeds and digests") {
  const auto c = tiny("/tmp/unused");
  const auto plan = pipeline::plan_runs(c);
  REQUIRE(plan.size() == 12);
  CHECK(plan[0].variant == "Standard");
  CHECK(plan[6].variant == "Active");
  CHECK(pipeline::run_seed(1, "Standard", 1, 0) == pipeline::run_seed(1, "Standard", 1, 0));
  CHECK(pipeline::run_seed(1, "Standard", 1, 0) != pipeline::run_seed(1, "Standard", 1, 1));
  CHECK(pipeline::run_seed(1, "Standard", 1, 0) != pipeline::run_seed(1, "Active", 1, 0));
  auto other = c;
  other.output_dir = "/tmp/other";
  CHECK(config_digest(other) == config_digest(c));
  other.master_seed += 1;
  CHECK(config_digest(other) != config_digest(c));
  CHECK(pipeline::run_digest(other, plan[0]) != pipeline::run_digest(c, plan[0]));
}

TEST_CASE("generate, extract and analyse a tiny experiment") {
  const auto dir = scratch("tiny");
  const auto c = tiny(dir);
  const pipeline::Layout layout{dir};

  CHECK_THROWS_AS(pipeline::load_traces(c), MissingInputError);
  const auto first = pipeline::generate(c);
  CHECK(first.planned == 12);
  CHECK(first.computed == 12);
  CHECK(count_files(layout.traces(), ".csv") == 12);
  CHECK(count_files(layout.traces(), ".json") == 12);
  const auto again = pipeline::generate(c);
  CHECK(again.computed == 0);
  CHECK(again.skipped == 12);

  const auto traces = pipeline::load_traces(c);
  const auto memory = pipeline::simulate(c);
  REQUIRE(traces.size() == memory.size());
  for (std::size_t i = 0; i < traces.size(); ++i) CHECK(traces[i].points == memory[i].points);
  const auto sidecar = pipeline::read_json(layout.trace_meta("Active", 2, 1));
  CHECK(sidecar["generations"] == 60);
  CHECK(sidecar["config_digest"] == config_digest(c));

  pipeline::extract(c, "all");
  for (std::size_t L : c.lengths) {
    const auto m = pipeline::load_features(c, "selected", L);
    CHECK(m.n_rows() == 12);
    CHECK(m.n_cols() == 32);
    CHECK(m.scaled);
    const auto expected = scale_unit_interval(build_feature_matrix(traces, tsfeat::selected_catalog(), L));
    CHECK((m.values - expected.values).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(pipeline::load_features(c, "raw", L).n_cols() == tsfeat::raw_catalog().size());
  }
  const auto spec = tsfeat::selected_catalog()[5];
  const auto series = traces[0].series(spec.channel, 30);
  const auto unscaled = build_feature_matrix({traces[0]}, tsfeat::selected_catalog(), 30);
  CHECK(oracle::close(unscaled.values(0, 5), oracle::feature(spec.function, spec.params, series), false));

  const auto selection = pipeline::run_select(c);
  CHECK(selection["groups"].size() == 4);
  CHECK(selection["raw_feature_count"] == tsfeat::raw_catalog().size());

  const auto classify = pipeline::run_classify(c, "variant-per-fid");
  std::ifstream table(layout.reports() / "classify_variant_per_fid.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(table, line)) ++lines;
  CHECK(lines == 1 + c.fids.size());
  CHECK_THROWS_AS(pipeline::run_classify(c, "weather"), ConfigError);

  const auto regress = pipeline::run_regress(c);
  CHECK(fs::exists(layout.reports() / "regress_per_variant.csv"));
  const auto cluster = pipeline::run_cluster(c);
  CHECK(fs::exists(layout.reports() / "cluster_variants_L30.newick"));
  const auto report = pipeline::run_report(c);
  CHECK(report.contains("config"));

  auto changed = c;
  changed.master_seed += 1;
  CHECK_THROWS(pipeline::load_features(changed, "selected", 30));
  CHECK_THROWS_AS(pipeline::load_traces(changed), MissingInputError);
  fs::remove_all(dir);
}

TEST_CASE("missing traces are listed") {
  const auto dir = scratch("gaps");
  const auto c = tiny(dir);
  pipeline::generate(c);
  const pipeline::Layout layout{dir};
  fs::remove(layout.trace_csv("Active", 1, 2));
  try {
    pipeline::load_traces(c);
    FAIL("expected a missing input error");
  } catch (const MissingInputError& e) {
    CHECK(std::string(e.what()).find("Active_1_2") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  CHECK(cli("--help") == 0);
  CHECK(cli("--frobnicate generate") == 2);
  CHECK(cli("--config " + (dir / "absent.ini").string() + " generate") == 2);
  CHECK(cli("--preset desk --out " + dir.string() + " extract") == 3);
  CHECK(cli("--preset desk --out " + dir.string() + " classify --target weather") == 2);
  const auto ini = write_file(dir / "tiny.ini",
                              "[experiment]\nvariants = Standard\nfids = 1\nruns = 2\ngenerations = 20\nlengths = 10\n");
  CHECK(cli("--config " + ini.string() + " --out " + dir.string() + " generate") == 0);
  CHECK(count_files(dir / "traces", ".csv") == 2);
  fs::remove_all(dir);
}
