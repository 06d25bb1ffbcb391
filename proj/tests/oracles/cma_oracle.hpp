#pragma once

// One CSA step-size update from the initial state computed with scalars only:
// identity covariance, zero paths, candidates given as isotropic vectors.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

struct CsaStep {
  double sigma = 0.0;
  double ps_norm = 0.0;
  std::vector<double> ps;
  std::vector<double> mean;
};

inline CsaStep csa_first_step(const std::vector<std::vector<double>>& z, const std::vector<double>& f, double sigma0,
                              std::size_t mu) {
  const std::size_t d = z.front().size();
  const double n = static_cast<double>(d);
  std::vector<std::size_t> order(z.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });

  std::vector<double> w(mu);
  double wsum = 0.0;
  for (std::size_t i = 0; i < mu; ++i) {
    w[i] = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i) + 1.0);
    wsum += w[i];
  }
  double sq = 0.0;
  for (double& v : w) {
    v /= wsum;
    sq += v * v;
  }
  const double mueff = 1.0 / sq;
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double ds = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
  const double chi = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  CsaStep out;
  out.mean.assign(d, 0.0);
  out.ps.assign(d, 0.0);
  double norm2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double shift = 0.0;
    for (std::size_t i = 0; i < mu; ++i) shift += w[i] * z[order[i]][k];
    out.mean[k] = sigma0 * shift;
    const double ps = std::sqrt(cs * (2.0 - cs) * mueff) * shift;
    out.ps[k] = ps;
    norm2 += ps * ps;
  }
  out.ps_norm = std::sqrt(norm2);
  out.sigma = sigma0 * std::exp(cs / ds * (out.ps_norm / chi - 1.0));
  return out;
}

}  // namespace oracle
