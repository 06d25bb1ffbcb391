#pragma once

// Brute-force reference implementations of the feature functions. Written
// for clarity, not speed: direct DFT with per-term angles, O(L^2 m) template
// matching for approximate entropy, Yule-Walker solves for the PACF.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "estrace/rng.hpp"
#include "estrace/tsfeat.hpp"

namespace oracle {

using estrace::tsfeat::Aggregate;
using estrace::tsfeat::CoefficientPart;
using estrace::tsfeat::Function;
using estrace::tsfeat::Params;
using estrace::tsfeat::SpectrumStat;

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double pvar(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

// Type 7: h = (n - 1) q, interpolate between the order statistics around h.
inline double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const double fl = std::floor(h);
  const auto i = static_cast<std::size_t>(fl);
  if (i + 1 >= x.size()) return x.back();
  return x[i] + (h - fl) * (x[i + 1] - x[i]);
}

inline double acf(const std::vector<double>& x, int lag) {
  const std::size_t n = x.size();
  if (lag < 1 || static_cast<std::size_t>(lag) >= n) return 0.0;
  if (*std::min_element(x.begin(), x.end()) == *std::max_element(x.begin(), x.end())) return 0.0;
  const double m = mean(x), v = pvar(x);
  double s = 0.0;
  for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < n; ++t) s += (x[t] - m) * (x[t + static_cast<std::size_t>(lag)] - m);
  return s / (static_cast<double>(n - static_cast<std::size_t>(lag)) * v);
}

// Last coefficient of the order-k Yule-Walker system.
inline double pacf(const std::vector<double>& x, int k) {
  Eigen::MatrixXd R(k, k);
  Eigen::VectorXd r(k);
  for (int i = 0; i < k; ++i) {
    r[i] = acf(x, i + 1);
    for (int j = 0; j < k; ++j) R(i, j) = i == j ? 1.0 : acf(x, std::abs(i - j));
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
  if (!lu.isInvertible()) return 0.0;
  const Eigen::VectorXd phi = lu.solve(r);
  return std::isfinite(phi[k - 1]) ? phi[k - 1] : 0.0;
}

inline double apen(const std::vector<double>& x, int m, double r) {
  const auto n = static_cast<int>(x.size());
  if (n <= m + 1) return 0.0;
  const double sd = std::sqrt(pvar(x));
  if (sd == 0.0) return 0.0;
  const double tol = r * sd;
  auto phi = [&](int len) {
    const int windows = n - len + 1;
    double total = 0.0;
    for (int i = 0; i < windows; ++i) {
      int count = 0;
      for (int j = 0; j < windows; ++j) {
        double dist = 0.0;
        for (int k = 0; k < len; ++k) dist = std::max(dist, std::abs(x[static_cast<std::size_t>(i + k)] - x[static_cast<std::size_t>(j + k)]));
        if (dist <= tol) ++count;
      }
      total += std::log(static_cast<double>(count) / windows);
    }
    return total / windows;
  };
  return std::abs(phi(m) - phi(m + 1));
}

struct Coefficient {
  double re = 0.0, im = 0.0;
};

inline Coefficient dft(const std::vector<double>& x, std::size_t k) {
  const auto n = static_cast<double>(x.size());
  Coefficient c;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(t) / n;
    c.re += x[t] * std::cos(angle);
    c.im -= x[t] * std::sin(angle);
  }
  return c;
}

inline double spectrum_stat(const std::vector<double>& x, SpectrumStat stat) {
  const std::size_t half = x.size() / 2;
  std::vector<double> a(half + 1);
  double mass = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const auto c = dft(x, k);
    a[k] = std::sqrt(c.re * c.re + c.im * c.im);
    mass += a[k];
  }
  if (mass == 0.0) return 0.0;
  // Raw moments of k under the normalized amplitude distribution.
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const double p = a[k] / mass, kk = static_cast<double>(k);
    r1 += p * kk;
    r2 += p * kk * kk;
    r3 += p * kk * kk * kk;
    r4 += p * kk * kk * kk * kk;
  }
  const double var = r2 - r1 * r1;
  if (stat == SpectrumStat::centroid) return r1;
  if (stat == SpectrumStat::variance) return var;
  if (var < 0.5) return 0.0;
  if (stat == SpectrumStat::skew) return (r3 - 3.0 * r1 * var - r1 * r1 * r1) / std::pow(var, 1.5);
  return (r4 - 4.0 * r1 * r3 + 6.0 * r1 * r1 * r2 - 3.0 * r1 * r1 * r1 * r1) / (var * var);
}

inline double feature(Function f, const Params& p, const std::vector<double>& x) {
  const std::size_t n = x.size();
  switch (f) {
    case Function::absolute_sum_of_changes: {
      double s = 0.0;
      for (std::size_t t = 1; t < n; ++t) s += std::abs(x[t] - x[t - 1]);
      return s;
    }
    case Function::approximate_entropy:
      return apen(x, p.m, p.r);
    case Function::autocorrelation:
      return acf(x, p.lag);
    case Function::change_quantiles: {
      const double lo = quantile(x, std::min(p.ql, p.qh)), hi = quantile(x, std::max(p.ql, p.qh));
      std::vector<double> d;
      for (std::size_t t = 1; t < n; ++t) {
        const bool inside = lo <= x[t - 1] && x[t - 1] <= hi && lo <= x[t] && x[t] <= hi;
        if (inside) d.push_back(p.isabs ? std::abs(x[t] - x[t - 1]) : x[t] - x[t - 1]);
      }
      if (d.empty()) return 0.0;
      return p.f_agg == Aggregate::mean ? mean(d) : pvar(d);
    }
    case Function::cid_ce: {
      std::vector<double> z = x;
      if (p.normalize) {
        const double m = mean(x), sd = std::sqrt(pvar(x));
        if (sd == 0.0) return 0.0;
        for (double& v : z) v = (v - m) / sd;
      }
      double s = 0.0;
      for (std::size_t t = 1; t < n; ++t) s += (z[t] - z[t - 1]) * (z[t] - z[t - 1]);
      return std::sqrt(s);
    }
    case Function::energy_ratio_by_chunks: {
      // array_split: the first n % k chunks get one extra element.
      const auto k = static_cast<std::size_t>(p.num_segments);
      std::vector<std::vector<double>> chunks(k);
      std::size_t t = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const std::size_t len = n / k + (c < n % k ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) chunks[c].push_back(x[t++]);
      }
      double total = 0.0, part = 0.0;
      for (double v : x) total += v * v;
      for (double v : chunks[static_cast<std::size_t>(p.segment_focus)]) part += v * v;
      return total == 0.0 ? 0.0 : part / total;
    }
    case Function::fft_aggregated:
      return spectrum_stat(x, p.aggtype);
    case Function::fft_coefficient: {
      if (static_cast<std::size_t>(p.coeff) > n / 2) return 0.0;
      const auto c = dft(x, static_cast<std::size_t>(p.coeff));
      switch (p.attr) {
        case CoefficientPart::real: return c.re;
        case CoefficientPart::imag: return c.im;
        case CoefficientPart::abs: return std::sqrt(c.re * c.re + c.im * c.im);
        case CoefficientPart::angle: return std::atan2(c.im, c.re) / std::numbers::pi * 180.0;
      }
      return 0.0;
    }
    case Function::index_mass_quantile: {
      double total = 0.0;
      for (double v : x) total += std::abs(v);
      if (total == 0.0) return 1.0;
      double cum = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        cum += std::abs(x[t]);
        if (cum / total >= p.q) return static_cast<double>(t + 1) / static_cast<double>(n);
      }
      return 1.0;
    }
    case Function::mean:
      return mean(x);
    case Function::median: {
      std::vector<double> s = x;
      std::sort(s.begin(), s.end());
      return n % 2 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
    }
    case Function::minimum:
      return *std::min_element(x.begin(), x.end());
    case Function::number_crossing_m: {
      auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
      int c = 0;
      for (std::size_t t = 1; t < n; ++t)
        if (sign(x[t - 1] - p.crossing) * sign(x[t] - p.crossing) < 0) ++c;
      return c;
    }
    case Function::number_peaks: {
      const auto s = static_cast<std::size_t>(p.n);
      int c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i < s || i + s >= n) continue;
        bool peak = true;
        for (std::size_t k = 1; k <= s; ++k)
          if (!(x[i] > x[i - k]) || !(x[i] > x[i + k])) peak = false;
        c += peak;
      }
      return c;
    }
    case Function::partial_autocorrelation:
      return pacf(x, p.lag);
    case Function::quantile:
      return quantile(x, p.q);
    case Function::range_count:
      return static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return p.lower <= v && v < p.upper; }));
    case Function::sum_values: {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    }
  }
  return 0.0;
}

// Agreement at the suite's tolerance; angles compare modulo 360 degrees.
inline bool close(double a, double b, bool angle = false, double rel = 1e-9) {
  double diff = a - b;
  if (angle) diff = std::remainder(diff, 360.0);
  return std::abs(diff) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

// Seeded test series of several shapes: white noise, random walk, decaying
// positive (step-size-like), rounded values with ties, noisy sinusoid.
inline std::vector<double> series(std::uint64_t seed, std::size_t length) {
  estrace::Rng rng(estrace::derive_seed(0xfea7, {seed, length}));
  std::vector<double> x(length);
  double level = 0.0;
  for (std::size_t t = 0; t < length; ++t) {
    const double u = rng.normal();
    const double tt = static_cast<double>(t);
    switch (seed % 5) {
      case 0: x[t] = u; break;
      case 1: level += u; x[t] = level; break;
      case 2: x[t] = 2.0 * std::exp(-0.02 * tt) * (1.0 + 0.1 * u); break;
      case 3: x[t] = std::round(2.0 * u); break;
      default: x[t] = 3.0 * std::sin(0.3 * tt) + 0.5 * u; break;
    }
  }
  return x;
}

}  // namespace oracle
