#include <cmath>
#include <set>

#include "doctest.h"
#include "estrace/errors.hpp"
#include "estrace/feature_matrix.hpp"
#include "estrace/tsfeat.hpp"
#include "estrace/variants.hpp"
#include "oracles/feature_oracle.hpp"

using namespace estrace;
using namespace estrace::tsfeat;

namespace {

double feat(Function f, std::vector<double> x, Params p = {}) { return compute_feature(f, p, x); }

std::vector<FeatureSpec> oracle_specs() {
  auto specs = raw_grid(Channel::sigma);
  for (auto s : selected_catalog()) {
    s.channel = Channel::sigma;
    if (std::find(specs.begin(), specs.end(), s) == specs.end()) specs.push_back(s);
  }
  return specs;
}

}  // namespace

TEST_CASE("worked examples") {
  CHECK(feat(Function::mean, {2, 2, 2, 2}) == 2.0);
  CHECK(feat(Function::absolute_sum_of_changes, {1, 2, 4}) == 3.0);
  CHECK(feat(Function::autocorrelation, {1, -1, 1, -1, 1, -1}) == doctest::Approx(-1.0).epsilon(1e-15));
  Params coeff;
  coeff.coeff = 0;
  coeff.attr = CoefficientPart::abs;
  CHECK(feat(Function::fft_coefficient, {1, -2, 4}, coeff) == doctest::Approx(3.0).epsilon(1e-15));
  Params half;
  half.q = 0.5;
  CHECK(feat(Function::index_mass_quantile, {1, 1, 1, 1}, half) == 0.5);
  CHECK(feat(Function::number_peaks, {0, 5, 0, 3, 0}) == 2.0);
  Params cross;
  cross.crossing = 1.0;
  CHECK(feat(Function::number_crossing_m, {0, 2, 0, 2}, cross) == 3.0);
  CHECK(feat(Function::median, {4, 1, 3, 2}) == 2.5);
  CHECK(feat(Function::minimum, {4, 1, 3, 2}) == 1.0);
  CHECK(feat(Function::sum_values, {4, 1, 3, 2}) == 10.0);
  CHECK(feat(Function::range_count, {-1, 0, 0.5, 1, 2}) == 3.0);
  CHECK(feat(Function::cid_ce, {0, 3, 7}) == 5.0);
  CHECK(feat(Function::partial_autocorrelation, {1, 3, 2, 5, 4, 6}) ==
        doctest::Approx(feat(Function::autocorrelation, {1, 3, 2, 5, 4, 6})).epsilon(1e-15));
  Params q;
  q.q = 0.1;
  CHECK(feat(Function::quantile, {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}, q) == doctest::Approx(10.0));
}

TEST_CASE("full corridor change_quantiles is the mean absolute change") {
  Params p;
  p.isabs = true;
  p.ql = 0.0;
  p.qh = 1.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = oracle::series(s, 50);
    CHECK(compute_feature(Function::change_quantiles, p, x) ==
          doctest::Approx(compute_feature(Function::absolute_sum_of_changes, {}, x) / 49.0).epsilon(1e-12));
  }
  Params swapped = p;
  swapped.ql = 0.8;
  swapped.qh = 0.2;
  Params ordered = p;
  ordered.ql = 0.2;
  ordered.qh = 0.8;
  const auto x = oracle::series(4, 40);
  CHECK(compute_feature(Function::change_quantiles, swapped, x) == compute_feature(Function::change_quantiles, ordered, x));
}

TEST_CASE("every catalog function agrees with the brute-force oracle") {
  const auto specs = oracle_specs();
  std::set<Function> covered;
  for (std::size_t length : {10, 100, 500}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto x = oracle::series(seed, length);
      SeriesCache cache(x);
      for (const auto& s : specs) {
        covered.insert(s.function);
        const double got = cache.compute(s.function, s.params);
        const double want = oracle::feature(s.function, s.params, x);
        const bool angle = s.function == Function::fft_coefficient && s.params.attr == CoefficientPart::angle;
        CAPTURE(feature_name(s));
        CAPTURE(length);
        CAPTURE(seed);
        CHECK(oracle::close(got, want, angle));
      }
    }
  }
  CHECK(covered.size() == kNumFunctions);
}

TEST_CASE("cached and single-shot evaluation agree bit for bit") {
  const auto x = oracle::series(9, 120);
  SeriesCache cache(x);
  for (const auto& s : oracle_specs()) CHECK(cache.compute(s.function, s.params) == compute_feature(s, x));
}

TEST_CASE("constant series give finite values and zero change features") {
  const std::vector<double> x(30, 3.5);
  SeriesCache cache(x);
  for (const auto& s : oracle_specs()) CHECK(std::isfinite(cache.compute(s.function, s.params)));
  CHECK(feat(Function::absolute_sum_of_changes, x) == 0.0);
  CHECK(feat(Function::cid_ce, x) == 0.0);
  CHECK(feat(Function::autocorrelation, x) == 0.0);
  CHECK(feat(Function::partial_autocorrelation, x) == 0.0);
  CHECK(feat(Function::approximate_entropy, x) == 0.0);
  Params cq;
  cq.ql = 0.2;
  cq.qh = 0.8;
  CHECK(compute_feature(Function::change_quantiles, cq, x) == 0.0);
  const std::vector<double> zeros(12, 0.0);
  CHECK(feat(Function::index_mass_quantile, zeros) == 1.0);
  CHECK(feat(Function::energy_ratio_by_chunks, zeros) == 0.0);
}

TEST_CASE("shift and scale behaviour") {
  const auto x = oracle::series(1, 80);
  auto shifted = x;
  for (double& v : shifted) v += 7.25;
  auto scaled = x;
  for (double& v : scaled) v *= 3.0;
  CHECK(feat(Function::mean, shifted) == doctest::Approx(feat(Function::mean, x) + 7.25).epsilon(1e-12));
  CHECK(feat(Function::absolute_sum_of_changes, shifted) == doctest::Approx(feat(Function::absolute_sum_of_changes, x)).epsilon(1e-12));
  CHECK(feat(Function::cid_ce, shifted) == doctest::Approx(feat(Function::cid_ce, x)).epsilon(1e-12));
  for (int lag = 1; lag < 5; ++lag) {
    Params p;
    p.lag = lag;
    CHECK(compute_feature(Function::autocorrelation, p, shifted) ==
          doctest::Approx(compute_feature(Function::autocorrelation, p, x)).epsilon(1e-9));
    CHECK(compute_feature(Function::autocorrelation, p, scaled) ==
          doctest::Approx(compute_feature(Function::autocorrelation, p, x)).epsilon(1e-9));
  }
}

TEST_CASE("input errors") {
  CHECK_THROWS_AS(feat(Function::mean, {1, 2}), InputError);
  CHECK_THROWS_AS(feat(Function::mean, {1, std::nan(""), 2}), InputError);
  CHECK_THROWS_AS(parse_feature_name("sigma__nonsense"), InputError);
  CHECK_THROWS_AS(function_from_name("median_of_medians"), InputError);
}

TEST_CASE("catalogs") {
  const auto selected = selected_catalog();
  CHECK(selected.size() == 32);
  std::set<std::string> names;
  for (const auto& s : selected) names.insert(feature_name(s));
  CHECK(names.size() == 32);
  CHECK(names.count("pc_norm__change_quantiles__f_agg_mean__isabs_false__ql_0.5__qh_0.6") == 1);
  CHECK(names.count("ps_norm__approximate_entropy__m_2__r_0.1") == 1);

  const auto raw = raw_catalog();
  CHECK(raw.size() == 8 * raw_grid(Channel::sigma).size());
  std::set<std::string> raw_names;
  for (const auto& s : raw) {
    const auto name = feature_name(s);
    raw_names.insert(name);
    CHECK(parse_feature_name(name) == s);
  }
  CHECK(raw_names.size() == raw.size());
  for (const auto& s : selected) CHECK(raw_names.count(feature_name(s)) == 1);
}

TEST_CASE("extraction truncates to the first L generations") {
  const auto& v = cma::variant_by_name("Standard");
  const auto t = run_trace(v.name, v.config, 2, 5, 0, 3, 200);
  const auto catalog = selected_catalog();
  const auto row = extract(t, catalog, 100);
  REQUIRE(row.size() == 32);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto series = t.series(catalog[i].channel, 100);
    CHECK(row[i] == compute_feature(catalog[i], series));
  }
  CHECK(extract(t, catalog, 100) == row);
  CHECK(extract(t, catalog) != row);
  CHECK_THROWS_AS(extract(t, catalog, 201), InputError);
}

TEST_CASE("unit interval scaling per fid") {
  FeatureMatrix m;
  m.columns = {"a", "b"};
  m.rows = {{"S", 1, 0, 100, 0}, {"S", 1, 1, 100, 0}, {"S", 1, 2, 100, 0}, {"S", 2, 0, 100, 0}, {"S", 2, 1, 100, 0}};
  m.values.resize(5, 2);
  m.values << 0, 4, 5, 4, 10, 4, 5, 1, 7, 2;
  const auto s = scale_unit_interval(m);
  CHECK(s.scaled);
  CHECK(s.values(0, 0) == 0.0);
  CHECK(s.values(1, 0) == 0.5);
  CHECK(s.values(2, 0) == 1.0);
  CHECK(s.values(0, 1) == 0.0);
  CHECK(s.values(3, 0) == 0.0);
  CHECK(s.values(4, 0) == 1.0);
  CHECK(s.values(1, 0) != s.values(3, 0));
}

TEST_CASE("feature matrix csv round trip and subsets") {
  const auto& v = cma::variant_by_name("Standard");
  std::vector<Trace> traces;
  for (int fid : {1, 2})
    for (std::size_t r = 0; r < 3; ++r) traces.push_back(run_trace(v.name, v.config, fid, 5, r, 10 + r, 120));
  const auto m = scale_unit_interval(build_feature_matrix(traces, selected_catalog(), 100, 2));
  for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
    CHECK(m.values.col(j).minCoeff() >= 0.0);
    CHECK(m.values.col(j).maxCoeff() <= 1.0);
  }
  const auto path = std::filesystem::temp_directory_path() / "estrace_fm_test.csv";
  write_feature_csv(path, m);
  const auto back = read_feature_csv(path);
  std::filesystem::remove(path);
  CHECK(back.columns == m.columns);
  CHECK(back.rows == m.rows);
  CHECK(back.values == m.values);
  const auto sub = m.subset_columns({m.columns[3], m.columns[0]});
  CHECK(sub.values.col(0) == m.values.col(3));
  CHECK(m.subset_rows({4, 1}).rows[0] == m.rows[4]);
  CHECK_THROWS_AS(m.subset_columns({"missing"}), InputError);
}
