#include "estrace/sampling.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "estrace/errors.hpp"

namespace estrace::sampling {

namespace {

// Acklam's coefficients.
constexpr std::array<double, 6> kA = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kB = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                      6.680131188771972e+01,  -1.328068155288572e+01};
constexpr std::array<double, 6> kC = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kD = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                      3.754408661907416e+00};

double acklam(double p) {
  constexpr double low = 0.02425;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  if (p > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
         (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

// Joe & Kuo (2008) new-joe-kuo-6.21201, dimensions 2..21: degree s, polynomial a, initial m.
struct DirectionSpec {
  unsigned s;
  unsigned a;
  std::array<std::uint32_t, 7> m;
};

constexpr std::array<DirectionSpec, 20> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
}};

constexpr unsigned kBits = 32;

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ContractViolation("inverse_normal_cdf: p outside [0, 1]");
  }
  double x = acklam(p);
  // One Halley step on Phi(x) - p.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  for (std::uint32_t n = 2; primes.size() < count; ++n) {
    bool prime = true;
    for (auto p : primes) {
      if (p * p > n) break;
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(n);
  }
  return primes;
}

Halton::Halton(int dim) : bases_(first_primes(static_cast<std::size_t>(dim))) {}

Vector Halton::point(std::uint64_t index) const {
  Vector u(dim());
  for (int i = 0; i < dim(); ++i) u[i] = radical_inverse(index, bases_[static_cast<std::size_t>(i)]);
  return u;
}

Sobol::Sobol(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim)
    throw ConfigError("Sobol sequence supports 1.." + std::to_string(kMaxDim) + " dimensions, got " +
                      std::to_string(dim));
  directions_.assign(static_cast<std::size_t>(dim), std::vector<std::uint32_t>(kBits));
  for (unsigned k = 0; k < kBits; ++k) directions_[0][k] = 1u << (kBits - 1 - k);
  for (int d = 1; d < dim; ++d) {
    const auto& spec = kJoeKuo[static_cast<std::size_t>(d - 1)];
    auto& v = directions_[static_cast<std::size_t>(d)];
    const unsigned s = spec.s;
    for (unsigned k = 0; k < kBits && k < s; ++k) v[k] = spec.m[k] << (kBits - 1 - k);
    for (unsigned k = s; k < kBits; ++k) {
      std::uint32_t value = v[k - s] ^ (v[k - s] >> s);
      for (unsigned j = 1; j < s; ++j)
        if ((spec.a >> (s - 1 - j)) & 1u) value ^= v[k - j];
      v[k] = value;
    }
  }
}

Vector Sobol::point(std::uint64_t index) const {
  if (index >> kBits) throw ContractViolation("Sobol index exceeds 2^32");
  Vector u(dim_);
  for (int d = 0; d < dim_; ++d) {
    std::uint32_t x = 0;
    const auto& v = directions_[static_cast<std::size_t>(d)];
    for (unsigned k = 0; k < kBits; ++k)
      if ((index >> k) & 1u) x ^= v[k];
    u[d] = std::ldexp(static_cast<double>(x), -static_cast<int>(kBits));
  }
  return u;
}

}  // namespace estrace::sampling
