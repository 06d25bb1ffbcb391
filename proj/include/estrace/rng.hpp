#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "estrace/linalg.hpp"

namespace estrace {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a sequence of keys.
/// Order matters: derive_seed(s, {a, b}) != derive_seed(s, {b, a}) in general.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> keys);

/// Stable 64-bit FNV-1a hash of a string (for keying seeds by names).
std::uint64_t hash_string(std::string_view text);

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  /// Uniform in [0, 1).
  double uniform() { return uniform_(engine_); }
  /// Uniform in the open interval (0, 1).
  double uniform_open();
  std::size_t index(std::size_t n);  // uniform in [0, n)
  Vector normal_vector(Eigen::Index n);

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace estrace
