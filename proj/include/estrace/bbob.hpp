#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "estrace/linalg.hpp"

namespace estrace::bbob {

inline constexpr int kNumFunctions = 24;

/// Test hooks. Production code uses the defaults.
struct ProblemOptions {
  bool oscillation = true;  ///< apply T_osz where the function definition uses it
};

/// One noiseless BBOB function instance.
///
/// All instance data (rotations, optimum, offset) are drawn from a PRNG keyed by
/// (fid, dim, transform_seed). The instance is immutable after construction apart
/// from the evaluation counter.
class Problem {
 public:
  /// Counts one evaluation. Throws ContractViolation on wrong length or
  /// non-finite coordinates.
  double evaluate(const Vector& x);
  /// Same value as evaluate() without touching the counter.
  double value(const Vector& x) const;

  int fid() const { return fid_; }
  int dim() const { return dim_; }
  std::uint64_t transform_seed() const { return seed_; }
  const Vector& x_opt() const { return x_opt_; }
  double f_opt() const { return f_opt_; }
  std::size_t evaluations() const { return evaluations_; }
  std::string_view name() const;

 private:
  friend Problem make_problem(int fid, int dim, std::uint64_t transform_seed, ProblemOptions options);
  Problem() = default;

  double raw_value(const Vector& x) const;

  int fid_ = 0;
  int dim_ = 0;
  std::uint64_t seed_ = 0;
  ProblemOptions options_{};
  Vector x_opt_;
  double f_opt_ = 0.0;
  Matrix rot_r_;
  Matrix rot_q_;
  Vector signs_;  // f20, f24: random +-1 vector; f5: slope signs
  // Gallagher peaks (f21, f22)
  std::vector<Vector> peak_centers_;
  std::vector<Vector> peak_scales_;
  std::vector<double> peak_weights_;
  std::size_t evaluations_ = 0;
};

/// Builds instance `fid` in `dim` dimensions. Throws ConfigError when fid is
/// outside [1, 24] or dim < 2.
Problem make_problem(int fid, int dim, std::uint64_t transform_seed, ProblemOptions options = {});

/// Short human-readable function name, e.g. "sphere" for fid 1.
std::string_view function_name(int fid);

/// BBOB's five default function groups: 1 separable (f1-f5), 2 low/moderate
/// conditioning (f6-f9), 3 high conditioning unimodal (f10-f14), 4 multimodal
/// with adequate global structure (f15-f19), 5 multimodal with weak global
/// structure (f20-f24).
int default_group(int fid);

/// Oscillation transform applied coordinate-wise.
double t_osz(double x);
Vector t_osz(const Vector& x);
/// Asymmetric transform with exponent beta.
Vector t_asy(const Vector& x, double beta);
/// Diagonal of the conditioning matrix Lambda^alpha.
Vector lambda_diagonal(double alpha, int dim);
/// Boundary penalty: sum of squared excess beyond |x_i| = 5.
double boundary_penalty(const Vector& x);

/// Random orthogonal matrix: QR of a standard-normal matrix with the sign of
/// each column fixed so that R has a positive diagonal.
Matrix random_rotation(int dim, std::uint64_t seed);

}  // namespace estrace::bbob
