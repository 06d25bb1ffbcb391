#include "estrace/bbob.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "estrace/errors.hpp"
#include "estrace/rng.hpp"

namespace estrace::bbob {

namespace {

constexpr double kPi = std::numbers::pi;

// Streams drawn from the instance seed. Each quantity gets its own stream so
// that adding a draw to one function does not shift the others.
enum Stream : std::uint64_t {
  kStreamXopt = 1,
  kStreamFopt = 2,
  kStreamRotR = 3,
  kStreamRotQ = 4,
  kStreamSigns = 5,
  kStreamPeaks = 6,
};

constexpr std::array<std::string_view, kNumFunctions> kNames = {
    "sphere",
    "ellipsoid_separable",
    "rastrigin_separable",
    "bueche_rastrigin",
    "linear_slope",
    "attractive_sector",
    "step_ellipsoid",
    "rosenbrock",
    "rosenbrock_rotated",
    "ellipsoid",
    "discus",
    "bent_cigar",
    "sharp_ridge",
    "different_powers",
    "rastrigin",
    "weierstrass",
    "schaffers_f7",
    "schaffers_f7_ill_conditioned",
    "griewank_rosenbrock",
    "schwefel",
    "gallagher_101",
    "gallagher_21",
    "katsuura",
    "lunacek_bi_rastrigin",
};

double rastrigin_sum(const Vector& z) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += std::cos(2.0 * kPi * z[i]);
  return 10.0 * (static_cast<double>(z.size()) - s);
}

double power_weight(double base_exponent, Eigen::Index i, int dim) {
  return std::pow(10.0, base_exponent * static_cast<double>(i) / static_cast<double>(dim - 1));
}

Vector uniform_vector(Rng& rng, int dim, double lo, double hi) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

double draw_f_opt(std::uint64_t seed) {
  Rng rng(seed);
  const double a = rng.normal();
  double b = rng.normal();
  while (b == 0.0) b = rng.normal();
  double f = std::round(100.0 * 100.0 * a / b) / 100.0;
  return std::clamp(f, -1000.0, 1000.0);
}

}  // namespace

double t_osz(double x) {
  if (x == 0.0) return 0.0;
  const double xhat = std::log(std::abs(x));
  const double c1 = x > 0 ? 10.0 : 5.5;
  const double c2 = x > 0 ? 7.9 : 3.1;
  const double mag = std::exp(xhat + 0.049 * (std::sin(c1 * xhat) + std::sin(c2 * xhat)));
  return x > 0 ? mag : -mag;
}

Vector t_osz(const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = t_osz(x[i]);
  return out;
}

Vector t_asy(const Vector& x, double beta) {
  const auto d = x.size();
  Vector out = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (x[i] > 0) {
      const double e = 1.0 + beta * static_cast<double>(i) / static_cast<double>(d - 1) * std::sqrt(x[i]);
      out[i] = std::pow(x[i], e);
    }
  }
  return out;
}

Vector lambda_diagonal(double alpha, int dim) {
  Vector out(dim);
  for (int i = 0; i < dim; ++i)
    out[i] = std::pow(alpha, 0.5 * static_cast<double>(i) / static_cast<double>(dim - 1));
  return out;
}

double boundary_penalty(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double e = std::abs(x[i]) - 5.0;
    if (e > 0) s += e * e;
  }
  return s;
}

Matrix random_rotation(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(dim, dim);
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r < dim; ++r) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c)
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  return q;
}

std::string_view function_name(int fid) {
  if (fid < 1 || fid > kNumFunctions) throw ConfigError("fid out of range: " + std::to_string(fid));
  return kNames[static_cast<std::size_t>(fid - 1)];
}

int default_group(int fid) {
  if (fid < 1 || fid > kNumFunctions) throw ConfigError("fid out of range: " + std::to_string(fid));
  if (fid <= 5) return 1;
  if (fid <= 9) return 2;
  if (fid <= 14) return 3;
  if (fid <= 19) return 4;
  return 5;
}

std::string_view Problem::name() const { return function_name(fid_); }

Problem make_problem(int fid, int dim, std::uint64_t transform_seed, ProblemOptions options) {
  if (fid < 1 || fid > kNumFunctions) throw ConfigError("fid must be in [1, 24], got " + std::to_string(fid));
  if (dim < 2) throw ConfigError("dim must be >= 2, got " + std::to_string(dim));

  Problem p;
  p.fid_ = fid;
  p.dim_ = dim;
  p.seed_ = transform_seed;
  p.options_ = options;

  const auto key = [&](std::uint64_t stream) {
    return derive_seed(transform_seed, {static_cast<std::uint64_t>(fid), static_cast<std::uint64_t>(dim), stream});
  };

  Rng xrng(key(kStreamXopt));
  p.x_opt_ = uniform_vector(xrng, dim, -4.0, 4.0);
  p.f_opt_ = draw_f_opt(key(kStreamFopt));
  p.rot_r_ = random_rotation(dim, key(kStreamRotR));
  p.rot_q_ = random_rotation(dim, key(kStreamRotQ));

  Rng srng(key(kStreamSigns));
  p.signs_ = Vector(dim);
  for (int i = 0; i < dim; ++i) p.signs_[i] = srng.uniform() < 0.5 ? -1.0 : 1.0;

  const double rosen_factor = std::max(1.0, std::sqrt(static_cast<double>(dim)) / 8.0);

  switch (fid) {
    case 4:
      for (int i = 0; i < dim; i += 2) p.x_opt_[i] = std::abs(p.x_opt_[i]);
      break;
    case 5:
      p.x_opt_ = 5.0 * p.signs_;
      break;
    case 8:
      p.x_opt_ *= 0.75;
      break;
    case 9:
    case 19:
      // z = factor * R x + 0.5 equals the all-ones vector at the optimum.
      p.x_opt_ = p.rot_r_.transpose() * Vector::Constant(dim, 0.5 / rosen_factor);
      break;
    case 20:
      p.x_opt_ = 0.5 * 4.2096874633 * p.signs_;
      break;
    case 24:
      p.x_opt_ = 0.5 * 2.5 * p.signs_;
      break;
    case 21:
    case 22: {
      const int n_peaks = fid == 21 ? 101 : 21;
      const double spread = fid == 21 ? 5.0 : 4.9;
      const double first_condition = fid == 21 ? 1000.0 : 1.0e6;
      Rng prng(key(kStreamPeaks));
      std::vector<double> conditions(static_cast<std::size_t>(n_peaks - 1));
      for (int j = 0; j < n_peaks - 1; ++j)
        conditions[static_cast<std::size_t>(j)] = std::pow(1000.0, 2.0 * j / static_cast<double>(n_peaks - 2));
      std::shuffle(conditions.begin(), conditions.end(), prng.engine());
      conditions.insert(conditions.begin(), first_condition);

      for (int k = 0; k < n_peaks; ++k) {
        const double box = k == 0 ? 0.8 * spread : spread;
        p.peak_centers_.push_back(uniform_vector(prng, dim, -box, box));
        const double alpha = conditions[static_cast<std::size_t>(k)];
        Vector scale = lambda_diagonal(alpha, dim);
        std::vector<double> diag(scale.data(), scale.data() + dim);
        std::shuffle(diag.begin(), diag.end(), prng.engine());
        for (int i = 0; i < dim; ++i) scale[i] = diag[static_cast<std::size_t>(i)] / std::pow(alpha, 0.25);
        p.peak_scales_.push_back(scale);
        p.peak_weights_.push_back(k == 0 ? 10.0 : 1.1 + 8.0 * (k - 1) / static_cast<double>(n_peaks - 2));
      }
      p.x_opt_ = p.peak_centers_.front();
      break;
    }
    default:
      break;
  }
  return p;
}

double Problem::evaluate(const Vector& x) {
  const double f = value(x);
  ++evaluations_;
  return f;
}

double Problem::value(const Vector& x) const {
  if (x.size() != dim_)
    throw ContractViolation("dimension mismatch: expected " + std::to_string(dim_) + ", got " +
                            std::to_string(x.size()));
  if (!x.allFinite()) throw ContractViolation("non-finite coordinate in evaluation point");
  double raw = raw_value(x);
  // Every raw function value is non-negative in exact arithmetic; absorb
  // rounding noise from the composed transforms at the optimum.
  if (raw < 0.0 && raw > -1e-10) raw = 0.0;
  return raw + f_opt_;
}

double Problem::raw_value(const Vector& x) const {
  const int d = dim_;
  const auto dd = static_cast<double>(d);
  const auto osz = [this](const Vector& v) { return options_.oscillation ? t_osz(v) : v; };
  const auto oszs = [this](double v) { return options_.oscillation ? t_osz(v) : v; };

  switch (fid_) {
    case 1:
      return (x - x_opt_).squaredNorm();

    case 2: {
      const Vector z = osz(x - x_opt_);
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += power_weight(6.0, i, d) * z[i] * z[i];
      return s;
    }

    case 3: {
      const Vector z = lambda_diagonal(10.0, d).cwiseProduct(t_asy(osz(x - x_opt_), 0.2));
      return rastrigin_sum(z) + z.squaredNorm();
    }

    case 4: {
      Vector z = osz(x - x_opt_);
      for (int i = 0; i < d; ++i) {
        const double s = std::pow(10.0, 0.5 * i / (dd - 1));
        z[i] *= (i % 2 == 0 && z[i] > 0) ? 10.0 * s : s;
      }
      return rastrigin_sum(z) + z.squaredNorm() + 100.0 * boundary_penalty(x);
    }

    case 5: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double slope = signs_[i] * power_weight(1.0, i, d);
        const double zi = x_opt_[i] * x[i] < 25.0 ? x[i] : x_opt_[i];
        s += 5.0 * std::abs(slope) - slope * zi;
      }
      return s;
    }

    case 6: {
      const Vector z = rot_q_ * lambda_diagonal(10.0, d).cwiseProduct(rot_r_ * (x - x_opt_));
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double w = z[i] * x_opt_[i] > 0 ? 100.0 : 1.0;
        s += (w * z[i]) * (w * z[i]);
      }
      return std::pow(oszs(s), 0.9);
    }

    case 7: {
      const Vector zhat = lambda_diagonal(10.0, d).cwiseProduct(rot_r_ * (x - x_opt_));
      Vector ztilde(d);
      for (int i = 0; i < d; ++i)
        ztilde[i] = std::abs(zhat[i]) > 0.5 ? std::floor(0.5 + zhat[i]) : std::floor(0.5 + 10.0 * zhat[i]) / 10.0;
      const Vector z = rot_q_ * ztilde;
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += power_weight(2.0, i, d) * z[i] * z[i];
      return 0.1 * std::max(std::abs(zhat[0]) / 1.0e4, s) + boundary_penalty(x);
    }

    case 8:
    case 9: {
      const double factor = std::max(1.0, std::sqrt(dd) / 8.0);
      const Vector z = fid_ == 8 ? Vector((factor * (x - x_opt_)).array() + 1.0)
                                 : Vector((factor * (rot_r_ * x)).array() + 0.5);
      double s = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double a = z[i] * z[i] - z[i + 1];
        const double b = z[i] - 1.0;
        s += 100.0 * a * a + b * b;
      }
      return s;
    }

    case 10: {
      const Vector z = osz(rot_r_ * (x - x_opt_));
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += power_weight(6.0, i, d) * z[i] * z[i];
      return s;
    }

    case 11: {
      const Vector z = osz(rot_r_ * (x - x_opt_));
      return 1.0e6 * z[0] * z[0] + z.tail(d - 1).squaredNorm();
    }

    case 12: {
      const Vector z = rot_r_ * t_asy(rot_r_ * (x - x_opt_), 0.5);
      return z[0] * z[0] + 1.0e6 * z.tail(d - 1).squaredNorm();
    }

    case 13: {
      const Vector z = rot_q_ * lambda_diagonal(10.0, d).cwiseProduct(rot_r_ * (x - x_opt_));
      return z[0] * z[0] + 100.0 * z.tail(d - 1).norm();
    }

    case 14: {
      const Vector z = rot_r_ * (x - x_opt_);
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += std::pow(std::abs(z[i]), 2.0 + 4.0 * i / (dd - 1));
      return std::sqrt(s);
    }

    case 15: {
      const Vector inner = t_asy(osz(rot_r_ * (x - x_opt_)), 0.2);
      const Vector z = rot_r_ * lambda_diagonal(10.0, d).cwiseProduct(rot_q_ * inner);
      return rastrigin_sum(z) + z.squaredNorm();
    }

    case 16: {
      const Vector z = rot_r_ * lambda_diagonal(0.01, d).cwiseProduct(rot_q_ * osz(rot_r_ * (x - x_opt_)));
      // f0 is evaluated through the same expression as the sum so both round
      // identically at z = 0.
      double f0 = 0.0;
      for (int k = 0; k <= 11; ++k) f0 += std::pow(0.5, k) * std::cos(2.0 * kPi * std::pow(3.0, k) * 0.5);
      double s = 0.0;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k <= 11; ++k) s += std::pow(0.5, k) * std::cos(2.0 * kPi * std::pow(3.0, k) * (z[i] + 0.5));
      const double inner = s / dd - f0;
      return 10.0 * inner * inner * inner + 10.0 / dd * boundary_penalty(x);
    }

    case 17:
    case 18: {
      const double alpha = fid_ == 17 ? 10.0 : 1000.0;
      const Vector z = lambda_diagonal(alpha, d).cwiseProduct(rot_q_ * t_asy(rot_r_ * (x - x_opt_), 0.5));
      double s = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double si = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
        const double sq = std::sqrt(si);
        const double sn = std::sin(50.0 * std::pow(si, 0.2));
        s += sq + sq * sn * sn;
      }
      s /= (dd - 1.0);
      return s * s + 10.0 * boundary_penalty(x);
    }

    case 19: {
      const double factor = std::max(1.0, std::sqrt(dd) / 8.0);
      const Vector z = Vector((factor * (rot_r_ * x)).array() + 0.5);
      double s = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double a = z[i] * z[i] - z[i + 1];
        const double b = z[i] - 1.0;
        const double si = 100.0 * a * a + b * b;
        s += si / 4000.0 - std::cos(si);
      }
      // Ordering keeps the exact-arithmetic lower bound of 0 in floating point.
      return 10.0 * s / (dd - 1.0) + 10.0;
    }

    case 20: {
      const Vector two_abs_opt = 2.0 * x_opt_.cwiseAbs();
      const Vector xhat = 2.0 * signs_.cwiseProduct(x);
      Vector zhat = xhat;
      for (int i = 1; i < d; ++i) zhat[i] = xhat[i] + 0.25 * (xhat[i - 1] - two_abs_opt[i - 1]);
      const Vector z = 100.0 * (lambda_diagonal(10.0, d).cwiseProduct(zhat - two_abs_opt) + two_abs_opt);
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += z[i] * std::sin(std::sqrt(std::abs(z[i])));
      return -s / (100.0 * dd) + 4.189828872724339 + 100.0 * boundary_penalty(z / 100.0);
    }

    case 21:
    case 22: {
      double best = 0.0;
      for (std::size_t k = 0; k < peak_centers_.size(); ++k) {
        const Vector u = rot_r_ * (x - peak_centers_[k]);
        const double q = u.cwiseProduct(peak_scales_[k]).dot(u);
        best = std::max(best, peak_weights_[k] * std::exp(-q / (2.0 * dd)));
      }
      const double t = oszs(10.0 - best);
      return t * t + boundary_penalty(x);
    }

    case 23: {
      const Vector z = rot_q_ * lambda_diagonal(100.0, d).cwiseProduct(rot_r_ * (x - x_opt_));
      const double exponent = 10.0 / std::pow(dd, 1.2);
      double prod = 1.0;
      for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 1; j <= 32; ++j) {
          const double p2 = std::ldexp(1.0, j);
          const double v = p2 * z[i];
          s += std::abs(v - std::nearbyint(v)) / p2;
        }
        prod *= std::pow(1.0 + (i + 1) * s, exponent);
      }
      const double scale = 10.0 / (dd * dd);
      return scale * (prod - 1.0) + boundary_penalty(x);
    }

    case 24: {
      constexpr double mu0 = 2.5;
      constexpr double depth = 1.0;
      const double s = 1.0 - 1.0 / (2.0 * std::sqrt(dd + 20.0) - 8.2);
      const double mu1 = -std::sqrt((mu0 * mu0 - depth) / s);
      const Vector xhat = 2.0 * signs_.cwiseProduct(x);
      double a = 0.0;
      double b = 0.0;
      for (int i = 0; i < d; ++i) {
        a += (xhat[i] - mu0) * (xhat[i] - mu0);
        b += (xhat[i] - mu1) * (xhat[i] - mu1);
      }
      const Vector z = rot_q_ * lambda_diagonal(100.0, d).cwiseProduct(rot_r_ * (xhat.array() - mu0).matrix());
      return std::min(a, depth * dd + s * b) + rastrigin_sum(z) + 1.0e4 * boundary_penalty(x);
    }

    default:
      throw ConfigError("unknown fid " + std::to_string(fid_));
  }
}

}  // namespace estrace::bbob
