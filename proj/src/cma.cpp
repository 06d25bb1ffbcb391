#include "estrace/cma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "estrace/errors.hpp"
#include "estrace/sampling.hpp"

namespace estrace::cma {

namespace {

std::string_view to_string(Mirroring m) {
  switch (m) {
    case Mirroring::off: return "off";
    case Mirroring::mirrored: return "mirrored";
    case Mirroring::pairwise: return "pairwise";
  }
  return "?";
}

std::string_view to_string(StepSizeRule r) {
  switch (r) {
    case StepSizeRule::csa: return "csa";
    case StepSizeRule::msr: return "msr";
    case StepSizeRule::tpa: return "tpa";
  }
  return "?";
}

std::string_view to_string(BaseSampler s) {
  switch (s) {
    case BaseSampler::gaussian: return "gaussian";
    case BaseSampler::halton: return "halton";
    case BaseSampler::sobol: return "sobol";
  }
  return "?";
}

std::size_t pool_size(std::size_t offspring, const ModularConfig& config) {
  return config.mirrored == Mirroring::pairwise ? (offspring + 1) / 2 : offspring;
}

Vector draw_base(AlgorithmState& state, const ModularConfig& config, Rng& rng) {
  const auto d = static_cast<int>(state.dim);
  switch (config.base_sampler) {
    case BaseSampler::gaussian:
      return rng.normal_vector(d);
    case BaseSampler::halton:
    case BaseSampler::sobol: {
      const Vector u = config.base_sampler == BaseSampler::halton
                           ? sampling::Halton(d).point(state.sequence_index)
                           : sampling::Sobol(d).point(state.sequence_index);
      ++state.sequence_index;
      Vector z(d);
      for (int i = 0; i < d; ++i) {
        double shifted = u[i] + state.sequence_shift[i];
        if (shifted >= 1.0) shifted -= 1.0;
        shifted = std::clamp(shifted, 0x1p-53, 1.0 - 0x1p-53);
        z[i] = sampling::inverse_normal_cdf(shifted);
      }
      return z;
    }
  }
  return rng.normal_vector(d);
}

Matrix inverse_sqrt(const AlgorithmState& state) {
  return state.B * state.D.cwiseInverse().asDiagonal() * state.B.transpose();
}

}  // namespace

std::string describe(const ModularConfig& c) {
  std::ostringstream os;
  os << "active=" << c.active << ";elitist=" << c.elitist << ";mirrored=" << to_string(c.mirrored)
     << ";orthogonal=" << c.orthogonal << ";weights=" << (c.weights == Weighting::equal ? "equal" : "default")
     << ";step_size=" << to_string(c.step_size_rule) << ";sampler=" << to_string(c.base_sampler)
     << ";threshold=" << c.threshold_convergence << ";lambda=" << (c.lambda ? std::to_string(*c.lambda) : "auto")
     << ";mu=" << (c.mu ? std::to_string(*c.mu) : "auto") << ";sigma0=" << c.sigma0
     << ";budget=" << c.budget_generations;
  return os.str();
}

std::size_t regular_offspring(const AlgorithmState& state, const ModularConfig& config) {
  return config.step_size_rule == StepSizeRule::tpa ? state.lambda - 2 : state.lambda;
}

AlgorithmState initialize(const ModularConfig& config, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw ConfigError("dimension must be >= 2");
  if (!(config.sigma0 > 0.0) || !std::isfinite(config.sigma0)) throw ConfigError("sigma0 must be positive");
  if (config.budget_generations == 0) throw ConfigError("budget_generations must be positive");
  if (config.base_sampler == BaseSampler::sobol && dim > static_cast<std::size_t>(sampling::Sobol::kMaxDim))
    throw ConfigError("Sobol sampler supports at most 21 dimensions");

  AlgorithmState s;
  s.dim = dim;
  s.seed = seed;
  const auto n = static_cast<double>(dim);
  s.lambda = config.lambda.value_or(4 + static_cast<std::size_t>(std::floor(3.0 * std::log(n))));
  s.mu = config.mu.value_or(s.lambda / 2);
  if (s.mu == 0 || s.mu > s.lambda) throw ConfigError("need 1 <= mu <= lambda");
  if (config.mirrored == Mirroring::pairwise && s.lambda % 2 != 0)
    throw ConfigError("pairwise mirrored selection needs an even lambda");
  if (config.step_size_rule == StepSizeRule::tpa && s.lambda < 3)
    throw ConfigError("TPA needs lambda >= 3 (two evaluations are test points)");
  const std::size_t offspring = regular_offspring(s, config);
  if (config.mirrored == Mirroring::pairwise && offspring % 2 != 0)
    throw ConfigError("pairwise mirrored selection needs an even number of regular offspring");
  if (!config.elitist && pool_size(offspring, config) < s.mu)
    throw ConfigError("selection pool smaller than mu");

  s.weights = Vector(static_cast<Eigen::Index>(s.mu));
  const auto mu = static_cast<double>(s.mu);
  for (std::size_t i = 0; i < s.mu; ++i)
    s.weights[static_cast<Eigen::Index>(i)] =
        config.weights == Weighting::equal ? 1.0 / mu : std::log(mu + 0.5) - std::log(static_cast<double>(i + 1));
  s.weights /= s.weights.sum();
  s.mu_eff = 1.0 / s.weights.squaredNorm();

  s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
  s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) + s.c_sigma;
  s.c_c = (4.0 + s.mu_eff / n) / (n + 4.0 + 2.0 * s.mu_eff / n);
  s.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + s.mu_eff);
  s.c_mu = std::min(1.0 - s.c_1, 2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) / ((n + 2.0) * (n + 2.0) + s.mu_eff));
  s.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  if (config.active) {
    // Negative weights mirror the positive ones (sum 1) and are rescaled to the
    // smallest of the three safe totals. mu_eff of the negative set equals mu_eff.
    const double by_c1 = 1.0 + s.c_1 / s.c_mu;
    const double by_mueff = 1.0 + 2.0 * s.mu_eff / (s.mu_eff + 2.0);
    const double by_posdef = (1.0 - s.c_1 - s.c_mu) / (n * s.c_mu);
    s.active_scale = std::min({by_c1, by_mueff, by_posdef});
  }

  const auto d = static_cast<Eigen::Index>(dim);
  s.m = Vector::Zero(d);
  s.sigma = config.sigma0;
  s.C = Matrix::Identity(d, d);
  s.B = Matrix::Identity(d, d);
  s.D = Vector::Ones(d);
  s.p_c = Vector::Zero(d);
  s.p_sigma = Vector::Zero(d);
  s.f_best = std::numeric_limits<double>::infinity();
  s.x_best = s.m;
  s.previous_shift = Vector::Zero(d);
  s.sequence_index = 1;  // skip the all-zeros point of the quasi-random sequences
  Rng shift_rng(derive_seed(seed, {hash_string("sequence-shift")}));
  s.sequence_shift = Vector(d);
  for (Eigen::Index i = 0; i < d; ++i) s.sequence_shift[i] = shift_rng.uniform();
  return s;
}

double mutation_threshold(const AlgorithmState& state, const ModularConfig& config) {
  if (!config.threshold_convergence) return 0.0;
  const double total = static_cast<double>(state.lambda * config.budget_generations);
  const double left = std::max(0.0, (total - static_cast<double>(state.evaluations)) / total);
  const double diagonal = 10.0 * std::sqrt(static_cast<double>(state.dim));  // [-5, 5]^d
  return ModuleConstants::threshold_init * diagonal * std::pow(left, ModuleConstants::threshold_decay);
}

std::vector<Candidate> sample_population(AlgorithmState& state, const ModularConfig& config, Rng& rng) {
  const std::size_t n = regular_offspring(state, config);
  const bool mirror = config.mirrored != Mirroring::off;
  const std::size_t base_count = mirror ? (n + 1) / 2 : n;

  std::vector<Vector> base;
  base.reserve(base_count);
  for (std::size_t i = 0; i < base_count; ++i) base.push_back(draw_base(state, config, rng));

  if (config.orthogonal) {
    const std::size_t k = std::min(base_count, state.dim);
    for (std::size_t i = 0; i < k; ++i) {
      for (int attempt = 0;; ++attempt) {
        const double norm = base[i].norm();
        Vector v = base[i];
        for (std::size_t j = 0; j < i; ++j) v -= v.dot(base[j]) * base[j] / base[j].squaredNorm();
        const double vn = v.norm();
        if (norm > 0.0 && vn > 1e-12 * norm) {
          base[i] = v * (norm / vn);
          break;
        }
        if (attempt > 100) throw ContractViolation("orthogonal sampling failed to find an independent vector");
        base[i] = draw_base(state, config, rng);
      }
    }
  }

  std::vector<Candidate> out;
  out.reserve(n);
  const Matrix bd = state.B * state.D.asDiagonal();
  const double threshold = mutation_threshold(state, config);
  for (std::size_t i = 0; out.size() < n; ++i) {
    for (int sign : {1, -1}) {
      if (out.size() >= n) break;
      if (sign < 0 && !mirror) break;
      Candidate c;
      c.z = sign > 0 ? base[i] : Vector(-base[i]);
      c.y = bd * c.z;
      if (threshold > 0.0) {
        const double length = state.sigma * c.y.norm();
        if (length > 0.0 && length < threshold) {
          const double factor = (2.0 * threshold - length) / length;
          c.y *= factor;
          c.z *= factor;
        }
      }
      c.x = state.m + state.sigma * c.y;
      out.push_back(std::move(c));
    }
  }
  return out;
}

Selection select_and_recombine(AlgorithmState& state, const ModularConfig& config,
                               const std::vector<Candidate>& evaluated) {
  for (const auto& c : evaluated)
    if (!std::isfinite(c.f)) throw ContractViolation("candidate with non-finite objective value");

  Selection sel;
  if (config.mirrored == Mirroring::pairwise) {
    for (std::size_t k = 0; k < evaluated.size(); k += 2) {
      if (k + 1 < evaluated.size() && evaluated[k + 1].f < evaluated[k].f)
        sel.pool.push_back(evaluated[k + 1]);
      else
        sel.pool.push_back(evaluated[k]);
    }
  } else {
    sel.pool = evaluated;
  }
  if (config.elitist) sel.pool.insert(sel.pool.end(), state.parents.begin(), state.parents.end());
  std::stable_sort(sel.pool.begin(), sel.pool.end(), [](const Candidate& a, const Candidate& b) { return a.f < b.f; });
  if (sel.pool.size() < state.mu) throw ConfigError("fewer than mu candidates in the selection pool");

  sel.parents.assign(sel.pool.begin(), sel.pool.begin() + static_cast<std::ptrdiff_t>(state.mu));
  sel.m_old = state.m;
  sel.sigma_old = state.sigma;
  Vector m = Vector::Zero(state.m.size());
  for (std::size_t i = 0; i < state.mu; ++i) m += state.weights[static_cast<Eigen::Index>(i)] * sel.parents[i].x;
  state.m = m;
  sel.mean_shift = (state.m - sel.m_old) / sel.sigma_old;

  for (const auto& c : evaluated) {
    if (c.f < state.f_best) {
      state.f_best = c.f;
      state.x_best = c.x;
    }
  }
  return sel;
}

void adapt(AlgorithmState& state, const ModularConfig& config, const std::vector<Candidate>& evaluated,
           const Selection& selection) {
  const auto n = static_cast<double>(state.dim);
  const Matrix c_inv_sqrt = inverse_sqrt(state);
  const Vector& dm = selection.mean_shift;

  state.p_sigma = (1.0 - state.c_sigma) * state.p_sigma +
                  std::sqrt(state.c_sigma * (2.0 - state.c_sigma) * state.mu_eff) * (c_inv_sqrt * dm);
  const double decay = 1.0 - std::pow(1.0 - state.c_sigma, 2.0 * static_cast<double>(state.generation + 1));
  const double hsig_lhs = state.p_sigma.norm() / std::sqrt(decay);
  const bool hsig = hsig_lhs < (1.4 + 2.0 / (n + 1.0)) * state.chi_n;
  state.p_c = (1.0 - state.c_c) * state.p_c +
              (hsig ? std::sqrt(state.c_c * (2.0 - state.c_c) * state.mu_eff) : 0.0) * dm;

  const auto d = static_cast<Eigen::Index>(state.dim);
  Matrix rank_mu = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < state.mu; ++i) {
    // Stored mutation vectors; for elitist survivors these come from the
    // generation that sampled them.
    const Vector& y = selection.parents[i].y;
    rank_mu += state.weights[static_cast<Eigen::Index>(i)] * (y * y.transpose());
  }
  double weight_sum = 1.0;
  if (config.active && state.active_scale > 0.0) {
    std::vector<const Candidate*> sorted;
    for (const auto& c : evaluated) sorted.push_back(&c);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Candidate* a, const Candidate* b) { return a->f < b->f; });
    const std::size_t count = std::min(state.mu, sorted.size());
    double used = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const Candidate& worst = *sorted[sorted.size() - 1 - j];
      const double w = -state.active_scale * state.weights[static_cast<Eigen::Index>(j)];
      const Vector& y = worst.y;
      const double whitened = (c_inv_sqrt * y).squaredNorm();
      if (whitened <= 0.0) continue;
      rank_mu += w * n / whitened * (y * y.transpose());
      used += w;
    }
    weight_sum += used;
  }

  const double delta_h = hsig ? 0.0 : state.c_c * (2.0 - state.c_c);
  const double keep = 1.0 + state.c_1 * delta_h - state.c_1 - state.c_mu * weight_sum;
  state.C = keep * state.C + state.c_1 * (state.p_c * state.p_c.transpose()) + state.c_mu * rank_mu;
  state.C = 0.5 * (state.C + state.C.transpose()).eval();

  switch (config.step_size_rule) {
    case StepSizeRule::csa:
      state.sigma *= std::exp((state.c_sigma / state.d_sigma) * (state.p_sigma.norm() / state.chi_n - 1.0));
      break;
    case StepSizeRule::msr: {
      std::vector<double> f;
      f.reserve(evaluated.size());
      for (const auto& c : evaluated) f.push_back(c.f);
      std::sort(f.begin(), f.end());
      if (!state.previous_f.empty()) {
        const auto lam = static_cast<double>(f.size());
        const auto j = std::min(state.previous_f.size() - 1,
                                static_cast<std::size_t>(std::floor(ModuleConstants::msr_fraction * lam)));
        const double reference = state.previous_f[j];
        const auto successes = static_cast<double>(std::count_if(f.begin(), f.end(), [&](double v) { return v < reference; }));
        const double z = (2.0 / lam) * (successes - (lam + 1.0) / 2.0);
        state.msr_statistic = (1.0 - ModuleConstants::msr_cumulation) * state.msr_statistic +
                              ModuleConstants::msr_cumulation * z;
        state.sigma *= std::exp(state.msr_statistic / (2.0 - 2.0 / n));
      }
      state.previous_f = std::move(f);
      break;
    }
    case StepSizeRule::tpa:
      state.tpa_statistic = (1.0 - ModuleConstants::tpa_cumulation) * state.tpa_statistic +
                            ModuleConstants::tpa_cumulation * state.tpa_signal;
      state.sigma *= std::exp(state.tpa_statistic / state.d_sigma);
      break;
  }

  state.previous_shift = dm;
  state.parents = selection.parents;
  refresh_eigensystem(state);
}

void evaluate_tpa_points(AlgorithmState& state, bbob::Problem& problem, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(state.dim);
  Vector direction;
  bool informative = state.generation > 0 && state.previous_shift.norm() > 0.0;
  if (informative) {
    const double whitened = (inverse_sqrt(state) * state.previous_shift).norm();
    direction = state.chi_n * state.previous_shift / whitened;
  } else {
    const Vector z = rng.normal_vector(d);
    direction = state.chi_n * (state.B * state.D.asDiagonal() * z) / z.norm();
  }
  const Vector plus = state.m + state.sigma * direction;
  const Vector minus = state.m - state.sigma * direction;
  const double f_plus = problem.evaluate(plus);
  const double f_minus = problem.evaluate(minus);
  state.evaluations += 2;
  if (f_plus < state.f_best) {
    state.f_best = f_plus;
    state.x_best = plus;
  }
  if (f_minus < state.f_best) {
    state.f_best = f_minus;
    state.x_best = minus;
  }
  if (!informative || f_plus == f_minus)
    state.tpa_signal = 0.0;
  else
    state.tpa_signal = f_plus < f_minus ? ModuleConstants::tpa_alpha : -ModuleConstants::tpa_alpha;
}

void step(AlgorithmState& state, const ModularConfig& config, bbob::Problem& problem, Rng& rng) {
  if (state.generation >= config.budget_generations) throw ContractViolation("generation budget exhausted");
  if (static_cast<std::size_t>(problem.dim()) != state.dim) throw ContractViolation("problem dimension mismatch");
  if (config.step_size_rule == StepSizeRule::tpa) evaluate_tpa_points(state, problem, rng);
  auto offspring = sample_population(state, config, rng);
  for (auto& c : offspring) {
    c.f = problem.evaluate(c.x);
    ++state.evaluations;
  }
  const Selection sel = select_and_recombine(state, config, offspring);
  adapt(state, config, offspring, sel);
  ++state.generation;
}

bool refresh_eigensystem(AlgorithmState& state) {
  const auto d = static_cast<Eigen::Index>(state.dim);
  bool repaired = false;
  if (!state.C.allFinite()) {
    state.C = Matrix::Identity(d, d);
    repaired = true;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(state.C);
  Vector eig = solver.eigenvalues();
  state.B = solver.eigenvectors();
  const double top = eig.maxCoeff();
  if (!(top > 0.0)) {
    state.C = Matrix::Identity(d, d);
    state.B = Matrix::Identity(d, d);
    eig = Vector::Ones(d);
    repaired = true;
  } else {
    const double floor = ModuleConstants::eigen_floor * top;
    if (eig.minCoeff() < floor) {
      eig = eig.cwiseMax(floor);
      state.C = state.B * eig.asDiagonal() * state.B.transpose();
      state.C = 0.5 * (state.C + state.C.transpose()).eval();
      repaired = true;
    }
  }
  state.D = eig.cwiseSqrt();
  if (repaired) ++state.degeneracy_events;
  return repaired;
}

double eigen_residual(const AlgorithmState& state) {
  const Matrix rebuilt = state.B * state.D.cwiseAbs2().asDiagonal() * state.B.transpose();
  const double scale = state.C.cwiseAbs().maxCoeff();
  return (rebuilt - state.C).cwiseAbs().maxCoeff() / (scale > 0 ? scale : 1.0);
}

}  // namespace estrace::cma
