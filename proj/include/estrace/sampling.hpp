#pragma once

#include <cstdint>
#include <vector>

#include "estrace/linalg.hpp"

namespace estrace::sampling {

/// Inverse of the standard normal CDF. Rational approximation refined by one
/// Halley step; absolute error well below 1e-12 on (1e-300, 1 - 1e-16).
double inverse_normal_cdf(double p);

/// Radical inverse of `index` in the given integer base, no scrambling.
double radical_inverse(std::uint64_t index, std::uint32_t base);

/// First `count` primes.
std::vector<std::uint32_t> first_primes(std::size_t count);

/// Halton sequence; point n uses the radical inverse of n in the first d primes.
class Halton {
 public:
  explicit Halton(int dim);
  /// Point with the given index (index 0 is the all-zeros point).
  Vector point(std::uint64_t index) const;
  int dim() const { return static_cast<int>(bases_.size()); }

 private:
  std::vector<std::uint32_t> bases_;
};

/// Sobol sequence with Joe-Kuo direction numbers, evaluated directly from the
/// binary digits of the index (no Gray-code reordering), so that the first
/// coordinate is the van der Corput sequence 1/2, 1/4, 3/4, 1/8, ...
class Sobol {
 public:
  static constexpr int kMaxDim = 21;
  explicit Sobol(int dim);
  Vector point(std::uint64_t index) const;
  int dim() const { return dim_; }

 private:
  int dim_;
  // directions_[d][k] is the k-th direction number of dimension d scaled by 2^32.
  std::vector<std::vector<std::uint32_t>> directions_;
};

}  // namespace estrace::sampling
