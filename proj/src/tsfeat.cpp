#include "estrace/tsfeat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "estrace/errors.hpp"

namespace estrace::tsfeat {

namespace {

void check_series(std::span<const double> x) {
  if (x.size() < 3) throw InputError("feature series needs at least 3 points");
  for (double v : x)
    if (!std::isfinite(v)) throw InputError("feature series contains a non-finite value");
}

double population_variance(std::span<const double> x, double mean) {
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size());
}

double median_of_sorted(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n % 2 == 1) return s[n / 2];
  return (s[n / 2 - 1] + s[n / 2]) / 2.0;
}

}  // namespace

double quantile_linear(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InputError("quantile of an empty series");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double approximate_entropy(std::span<const double> x, int m, double r) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  if (m < 1 || n <= m + 1) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double sd = std::sqrt(population_variance(x, mean));
  if (sd == 0.0) return 0.0;
  const double tol = r * sd;

  // Matches between windows starting at i and i + d are runs along diagonal d.
  const std::ptrdiff_t wm = n - m + 1;  // windows of length m
  const std::ptrdiff_t wm1 = n - m;     // windows of length m + 1
  std::vector<double> count_m(static_cast<std::size_t>(wm), 1.0);
  std::vector<double> count_m1(static_cast<std::size_t>(wm1), 1.0);
  std::vector<int> run(static_cast<std::size_t>(n) + 1, 0);
  for (std::ptrdiff_t d = 1; d < n; ++d) {
    run[static_cast<std::size_t>(n - d)] = 0;
    for (std::ptrdiff_t t = n - d - 1; t >= 0; --t)
      run[static_cast<std::size_t>(t)] =
          std::abs(x[static_cast<std::size_t>(t)] - x[static_cast<std::size_t>(t + d)]) <= tol
              ? run[static_cast<std::size_t>(t + 1)] + 1
              : 0;
    for (std::ptrdiff_t i = 0; i + d < wm; ++i) {
      const int len = run[static_cast<std::size_t>(i)];
      if (len >= m) {
        count_m[static_cast<std::size_t>(i)] += 1.0;
        count_m[static_cast<std::size_t>(i + d)] += 1.0;
        if (len >= m + 1 && i + d < wm1) {
          count_m1[static_cast<std::size_t>(i)] += 1.0;
          count_m1[static_cast<std::size_t>(i + d)] += 1.0;
        }
      }
    }
  }
  auto phi = [](const std::vector<double>& counts) {
    const auto w = static_cast<double>(counts.size());
    double s = 0.0;
    for (double c : counts) s += std::log(c / w);
    return s / w;
  };
  return std::abs(phi(count_m) - phi(count_m1));
}

SeriesCache::SeriesCache(std::span<const double> series) : x_(series.begin(), series.end()) {
  check_series(series);
  mean_ = std::accumulate(x_.begin(), x_.end(), 0.0) / static_cast<double>(x_.size());
  var_ = population_variance(x_, mean_);
  const auto [lo, hi] = std::minmax_element(x_.begin(), x_.end());
  constant_ = *lo == *hi;
}

const std::vector<double>& SeriesCache::sorted() {
  if (sorted_.empty()) {
    sorted_ = x_;
    std::sort(sorted_.begin(), sorted_.end());
  }
  return sorted_;
}

void SeriesCache::ensure_spectrum() {
  if (!spectrum_abs_.empty()) return;
  const std::size_t n = x_.size();
  const std::size_t half = n / 2;
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    cos_table[j] = std::cos(angle);
    sin_table[j] = std::sin(angle);
  }
  spectrum_re_.assign(half + 1, 0.0);
  spectrum_im_.assign(half + 1, 0.0);
  spectrum_abs_.assign(half + 1, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += x_[t] * cos_table[idx];
      im -= x_[t] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    spectrum_re_[k] = re;
    spectrum_im_[k] = im;
    spectrum_abs_[k] = std::hypot(re, im);
  }
}

double SeriesCache::acf(int lag) {
  if (lag < 1 || static_cast<std::size_t>(lag) >= x_.size()) return 0.0;
  if (acf_.size() <= static_cast<std::size_t>(lag)) acf_.resize(static_cast<std::size_t>(lag) + 1);
  auto& slot = acf_[static_cast<std::size_t>(lag)];
  if (!slot) {
    if (constant_ || var_ == 0.0) {
      slot = 0.0;
    } else {
      const std::size_t n = x_.size();
      const auto l = static_cast<std::size_t>(lag);
      double s = 0.0;
      for (std::size_t t = 0; t + l < n; ++t) s += (x_[t] - mean_) * (x_[t + l] - mean_);
      slot = s / (static_cast<double>(n - l) * var_);
    }
  }
  return *slot;
}

double SeriesCache::pacf(int lag) {
  if (lag < 1) return 0.0;
  // Durbin-Levinson recursion over the autocorrelations.
  const auto want = static_cast<std::size_t>(lag);
  if (pacf_.size() < want) {
    pacf_.clear();
    std::vector<double> phi, prev;
    for (int k = 1; k <= lag; ++k) {
      double num = acf(k), den = 1.0;
      for (int j = 1; j < k; ++j) {
        num -= prev[static_cast<std::size_t>(j - 1)] * acf(k - j);
        den -= prev[static_cast<std::size_t>(j - 1)] * acf(j);
      }
      const double kk = den == 0.0 || !std::isfinite(num / den) ? 0.0 : num / den;
      phi.assign(static_cast<std::size_t>(k), 0.0);
      for (int j = 1; j < k; ++j)
        phi[static_cast<std::size_t>(j - 1)] =
            prev[static_cast<std::size_t>(j - 1)] - kk * prev[static_cast<std::size_t>(k - j - 1)];
      phi[static_cast<std::size_t>(k - 1)] = kk;
      pacf_.push_back(kk);
      prev = phi;
    }
  }
  return pacf_[want - 1];
}

double SeriesCache::compute(Function f, const Params& p) {
  const std::size_t n = x_.size();
  const auto nd = static_cast<double>(n);
  switch (f) {
    case Function::absolute_sum_of_changes: {
      double s = 0.0;
      for (std::size_t t = 0; t + 1 < n; ++t) s += std::abs(x_[t + 1] - x_[t]);
      return s;
    }
    case Function::approximate_entropy:
      return approximate_entropy(x_, p.m, p.r);
    case Function::autocorrelation:
      return acf(p.lag);
    case Function::change_quantiles: {
      const double ql = std::min(p.ql, p.qh), qh = std::max(p.ql, p.qh);
      const auto& s = sorted();
      const double lo = quantile_linear(s, ql), hi = quantile_linear(s, qh);
      std::vector<double> diffs;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        if (x_[t] < lo || x_[t] > hi || x_[t + 1] < lo || x_[t + 1] > hi) continue;
        const double d = x_[t + 1] - x_[t];
        diffs.push_back(p.isabs ? std::abs(d) : d);
      }
      if (diffs.empty()) return 0.0;
      const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(diffs.size());
      return p.f_agg == Aggregate::mean ? mean : population_variance(diffs, mean);
    }
    case Function::cid_ce: {
      double scale = 1.0;
      if (p.normalize) {
        if (constant_ || var_ == 0.0) return 0.0;
        scale = 1.0 / std::sqrt(var_);
      }
      double s = 0.0;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        const double d = (x_[t + 1] - x_[t]) * scale;
        s += d * d;
      }
      return std::sqrt(s);
    }
    case Function::energy_ratio_by_chunks: {
      const auto k = static_cast<std::size_t>(std::max(1, p.num_segments));
      const auto focus = static_cast<std::size_t>(std::clamp(p.segment_focus, 0, p.num_segments - 1));
      double total = 0.0;
      for (double v : x_) total += v * v;
      if (total == 0.0) return 0.0;
      const std::size_t base = n / k, extra = n % k;
      const std::size_t begin = focus * base + std::min(focus, extra);
      const std::size_t len = base + (focus < extra ? 1 : 0);
      double part = 0.0;
      for (std::size_t t = begin; t < begin + len && t < n; ++t) part += x_[t] * x_[t];
      return part / total;
    }
    case Function::fft_aggregated: {
      ensure_spectrum();
      double mass = 0.0;
      for (double a : spectrum_abs_) mass += a;
      if (mass == 0.0) return 0.0;
      double m1 = 0.0;
      for (std::size_t k = 0; k < spectrum_abs_.size(); ++k) m1 += static_cast<double>(k) * spectrum_abs_[k];
      m1 /= mass;
      if (p.aggtype == SpectrumStat::centroid) return m1;
      double c2 = 0.0, c3 = 0.0, c4 = 0.0;
      for (std::size_t k = 0; k < spectrum_abs_.size(); ++k) {
        const double d = static_cast<double>(k) - m1;
        const double w = spectrum_abs_[k] / mass;
        c2 += w * d * d;
        c3 += w * d * d * d;
        c4 += w * d * d * d * d;
      }
      if (p.aggtype == SpectrumStat::variance) return c2;
      if (c2 < 0.5) return 0.0;
      return p.aggtype == SpectrumStat::skew ? c3 / std::pow(c2, 1.5) : c4 / (c2 * c2);
    }
    case Function::fft_coefficient: {
      ensure_spectrum();
      if (p.coeff < 0 || static_cast<std::size_t>(p.coeff) >= spectrum_abs_.size()) return 0.0;
      const auto k = static_cast<std::size_t>(p.coeff);
      switch (p.attr) {
        case CoefficientPart::real: return spectrum_re_[k];
        case CoefficientPart::imag: return spectrum_im_[k];
        case CoefficientPart::abs: return spectrum_abs_[k];
        case CoefficientPart::angle: return std::atan2(spectrum_im_[k], spectrum_re_[k]) * 180.0 / std::numbers::pi;
      }
      return 0.0;
    }
    case Function::index_mass_quantile: {
      double total = 0.0;
      for (double v : x_) total += std::abs(v);
      if (total == 0.0) return 1.0;
      const double goal = p.q * total;
      double cum = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        cum += std::abs(x_[t]);
        if (cum >= goal) return static_cast<double>(t + 1) / nd;
      }
      return 1.0;
    }
    case Function::mean:
      return mean_;
    case Function::median:
      return median_of_sorted(sorted());
    case Function::minimum:
      return sorted().front();
    case Function::number_crossing_m: {
      int count = 0;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        const double a = x_[t] - p.crossing, b = x_[t + 1] - p.crossing;
        if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) ++count;
      }
      return count;
    }
    case Function::number_peaks: {
      const auto support = static_cast<std::size_t>(std::max(1, p.n));
      int count = 0;
      for (std::size_t i = support; i + support < n; ++i) {
        bool peak = true;
        for (std::size_t k = 1; k <= support && peak; ++k) peak = x_[i] > x_[i - k] && x_[i] > x_[i + k];
        if (peak) ++count;
      }
      return count;
    }
    case Function::partial_autocorrelation:
      return pacf(p.lag);
    case Function::quantile:
      return quantile_linear(sorted(), p.q);
    case Function::range_count: {
      int count = 0;
      for (double v : x_)
        if (v >= p.lower && v < p.upper) ++count;
      return count;
    }
    case Function::sum_values:
      return std::accumulate(x_.begin(), x_.end(), 0.0);
  }
  throw InputError("unknown feature function");
}

double compute_feature(Function f, const Params& p, std::span<const double> series) {
  SeriesCache cache(series);
  return cache.compute(f, p);
}

double compute_feature(const FeatureSpec& spec, std::span<const double> series) {
  return compute_feature(spec.function, spec.params, series);
}

std::vector<double> extract(const Trace& trace, const std::vector<FeatureSpec>& catalog, std::size_t length) {
  if (catalog.empty()) throw InputError("empty feature catalog");
  if (length > trace.points.size()) throw InputError("trace shorter than the requested length");
  std::vector<double> row(catalog.size());
  for (auto channel : kAllChannels) {
    std::optional<SeriesCache> cache;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
      if (catalog[i].channel != channel) continue;
      if (!cache) cache.emplace(trace.series(channel, length));
      row[i] = cache->compute(catalog[i].function, catalog[i].params);
    }
  }
  return row;
}

}  // namespace estrace::tsfeat
