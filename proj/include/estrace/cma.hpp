#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "estrace/bbob.hpp"
#include "estrace/linalg.hpp"
#include "estrace/rng.hpp"

namespace estrace::cma {

enum class Mirroring { off, mirrored, pairwise };
enum class Weighting { standard, equal };
enum class StepSizeRule { csa, msr, tpa };
enum class BaseSampler { gaussian, halton, sobol };

/// Which module mechanisms of the modular CMA-ES are switched on.
struct ModularConfig {
  bool active = false;
  bool elitist = false;
  Mirroring mirrored = Mirroring::off;
  bool orthogonal = false;
  Weighting weights = Weighting::standard;
  StepSizeRule step_size_rule = StepSizeRule::csa;
  BaseSampler base_sampler = BaseSampler::gaussian;
  bool threshold_convergence = false;
  std::optional<std::size_t> lambda;  ///< default 4 + floor(3 ln d)
  std::optional<std::size_t> mu;      ///< default floor(lambda / 2)
  double sigma0 = 2.0;
  std::size_t budget_generations = 500;

  bool operator==(const ModularConfig&) const = default;
};

/// Canonical key=value rendering, stable across runs; used for digests.
std::string describe(const ModularConfig& config);

/// One sampled point. `z` lives in the isotropic space, `y = B diag(D) z`,
/// `x = m + sigma * y`.
struct Candidate {
  Vector z;
  Vector y;
  Vector x;
  double f = 0.0;
};

/// Full strategy state of one run.
struct AlgorithmState {
  std::size_t dim = 0;
  std::size_t lambda = 0;  ///< evaluations per generation
  std::size_t mu = 0;
  std::uint64_t seed = 0;

  Vector m;
  double sigma = 0.0;
  Matrix C;
  Matrix B;
  Vector D;  ///< square roots of the eigenvalues of C
  Vector p_c;
  Vector p_sigma;
  std::size_t generation = 0;
  std::size_t evaluations = 0;
  double f_best = 0.0;
  Vector x_best;

  // Strategy constants. Public so tests can pin them.
  Vector weights;  ///< positive recombination weights, length mu, sum 1
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;
  double active_scale = 0.0;  ///< total magnitude of the negative weights

  // Module memory.
  std::vector<Candidate> parents;     ///< selected parents of the last generation
  std::vector<double> previous_f;     ///< sorted offspring values of the last generation (MSR)
  double msr_statistic = 0.0;
  double tpa_statistic = 0.0;
  double tpa_signal = 0.0;            ///< signed rank outcome of this generation's test points
  Vector previous_shift;              ///< (m - m_old) / sigma_old of the last generation
  std::uint64_t sequence_index = 0;   ///< next index of the quasi-random sequence
  Vector sequence_shift;              ///< per-run random shift of the quasi-random points, mod 1
  std::size_t degeneracy_events = 0;  ///< eigenvalue repairs performed so far
};

/// Output of selection: the recombination parents and the normalized mean shift.
struct Selection {
  std::vector<Candidate> parents;  ///< best mu of the pool, sorted by f
  std::vector<Candidate> pool;     ///< selection pool sorted by f (after pairwise reduction)
  Vector mean_shift;               ///< (m_new - m_old) / sigma_old
  Vector m_old;
  double sigma_old = 0.0;
};

/// Module constants that the literature leaves open; pinned here.
struct ModuleConstants {
  static constexpr double msr_fraction = 0.3;   ///< comparison index j = floor(0.3 lambda)
  static constexpr double msr_cumulation = 0.3;
  static constexpr double tpa_cumulation = 0.3;
  static constexpr double tpa_alpha = 0.5;      ///< alpha_up = alpha_down
  static constexpr double threshold_init = 0.2;
  static constexpr double threshold_decay = 0.995;
  static constexpr double eigen_floor = 1e-20;  ///< relative floor used by the repair step
};

/// Number of offspring sampled from the distribution (lambda minus the two TPA
/// test points when TPA is on).
std::size_t regular_offspring(const AlgorithmState& state, const ModularConfig& config);

/// Validates the config and builds the initial state.
AlgorithmState initialize(const ModularConfig& config, std::size_t dim, std::uint64_t seed);

/// Current threshold-convergence length (0 when the module is off).
double mutation_threshold(const AlgorithmState& state, const ModularConfig& config);

/// Samples the regular offspring of one generation (unevaluated).
std::vector<Candidate> sample_population(AlgorithmState& state, const ModularConfig& config, Rng& rng);

/// Applies selection and recombination to evaluated offspring; updates m and f_best.
Selection select_and_recombine(AlgorithmState& state, const ModularConfig& config,
                               const std::vector<Candidate>& evaluated);

/// Updates evolution paths, covariance, step size, and refreshes the
/// eigendecomposition.
void adapt(AlgorithmState& state, const ModularConfig& config, const std::vector<Candidate>& evaluated,
           const Selection& selection);

/// Evaluates the two TPA test points for this generation and stores the
/// signed outcome in state.tpa_signal. Counts two evaluations.
void evaluate_tpa_points(AlgorithmState& state, bbob::Problem& problem, Rng& rng);

/// One sample -> evaluate -> select -> adapt cycle.
void step(AlgorithmState& state, const ModularConfig& config, bbob::Problem& problem, Rng& rng);

/// Recomputes B and D from C, repairing non-positive eigenvalues. Returns
/// true if a repair was needed.
bool refresh_eigensystem(AlgorithmState& state);

/// max |B diag(D^2) B^T - C| / max |C|.
double eigen_residual(const AlgorithmState& state);

}  // namespace estrace::cma
