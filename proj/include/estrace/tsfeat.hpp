#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "estrace/trace.hpp"

namespace estrace::tsfeat {

enum class Function {
  absolute_sum_of_changes,
  approximate_entropy,
  autocorrelation,
  change_quantiles,
  cid_ce,
  energy_ratio_by_chunks,
  fft_aggregated,
  fft_coefficient,
  index_mass_quantile,
  mean,
  median,
  minimum,
  number_crossing_m,
  number_peaks,
  partial_autocorrelation,
  quantile,
  range_count,
  sum_values,
};
inline constexpr std::size_t kNumFunctions = 18;

std::string_view function_name(Function f);
Function function_from_name(std::string_view name);  // throws InputError

enum class Aggregate { mean, var };
enum class SpectrumStat { centroid, variance, skew, kurtosis };
enum class CoefficientPart { real, imag, abs, angle };

/// Parameters of a feature function. Only the fields used by the function are
/// read; the others keep their defaults and are not part of the name.
struct Params {
  int m = 2;                 ///< approximate_entropy embedding length
  double r = 0.1;            ///< approximate_entropy tolerance (times std)
  int lag = 1;               ///< autocorrelation, partial_autocorrelation
  Aggregate f_agg = Aggregate::mean;
  bool isabs = false;
  double ql = 0.0;           ///< change_quantiles corridor, lower quantile
  double qh = 1.0;
  bool normalize = false;    ///< cid_ce
  int num_segments = 10;     ///< energy_ratio_by_chunks
  int segment_focus = 0;
  SpectrumStat aggtype = SpectrumStat::centroid;
  int coeff = 0;             ///< fft_coefficient
  CoefficientPart attr = CoefficientPart::abs;
  double q = 0.1;            ///< index_mass_quantile, quantile
  double crossing = 0.0;     ///< number_crossing_m
  int n = 1;                 ///< number_peaks support
  double lower = -1.0;       ///< range_count, half-open [lower, upper)
  double upper = 1.0;

  bool operator==(const Params&) const = default;
};

struct FeatureSpec {
  Function function = Function::mean;
  Channel channel = Channel::sigma;
  Params params;

  bool operator==(const FeatureSpec& o) const;
};

/// Canonical parameter rendering, e.g. `m_2__r_0.1`; empty for parameterless functions.
std::string render_params(Function f, const Params& p);
/// Column name `{channel}__{function}__{params}` (params part omitted when empty).
std::string feature_name(const FeatureSpec& spec);
/// Inverse of feature_name. Throws InputError on malformed names.
FeatureSpec parse_feature_name(std::string_view name);

/// Evaluates one feature function on a series. Throws InputError when the
/// series is shorter than 3 or contains non-finite values.
double compute_feature(Function f, const Params& p, std::span<const double> series);
double compute_feature(const FeatureSpec& spec, std::span<const double> series);

/// Shared intermediate results for many features on one series (sorted copy,
/// spectrum, autocorrelations). Values agree bit-for-bit with compute_feature.
class SeriesCache {
 public:
  explicit SeriesCache(std::span<const double> series);
  double compute(Function f, const Params& p);

 private:
  std::vector<double> x_;
  std::vector<double> sorted_;
  std::vector<double> spectrum_abs_;
  std::vector<double> spectrum_re_;
  std::vector<double> spectrum_im_;
  std::vector<std::optional<double>> acf_;
  std::vector<double> pacf_;
  double mean_ = 0.0;
  double var_ = 0.0;
  bool constant_ = false;

  const std::vector<double>& sorted();
  void ensure_spectrum();
  double acf(int lag);
  double pacf(int lag);
};

/// Feature row for one trace over its first `length` generations (all when 0),
/// in catalog order.
std::vector<double> extract(const Trace& trace, const std::vector<FeatureSpec>& catalog, std::size_t length = 0);

/// The 32 features of the selected catalog.
std::vector<FeatureSpec> selected_catalog();
/// The default raw grid: every function under its parameter grid on all 8 channels.
std::vector<FeatureSpec> raw_catalog();
/// Parameter grid of the raw catalog for one channel (raw_catalog().size() / 8 entries).
std::vector<FeatureSpec> raw_grid(Channel channel);

// Building blocks, exposed for tests.
double quantile_linear(std::span<const double> sorted, double q);
double approximate_entropy(std::span<const double> x, int m, double r);

}  // namespace estrace::tsfeat
