#pragma once

// Scalar Ward clustering of 1-D points: distances kept in a plain table and
// updated with the Lance-Williams recurrence, merged pair found by full scan.

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline std::vector<double> ward_heights_1d(const std::vector<double>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i][j] = std::abs(points[i] - points[j]);
  std::vector<double> size(n, 1.0);
  std::vector<bool> alive(n, true);
  std::vector<double> heights;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (alive[i] && alive[j] && d[i][j] < best) {
          best = d[i][j];
          a = i;
          b = j;
        }
    heights.push_back(best);
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == a || k == b) continue;
      const double t = size[a] + size[b] + size[k];
      const double sq = ((size[a] + size[k]) * d[a][k] * d[a][k] + (size[b] + size[k]) * d[b][k] * d[b][k] -
                         size[k] * best * best) / t;
      d[a][k] = d[k][a] = std::sqrt(sq);
    }
    size[a] += size[b];
    alive[b] = false;
  }
  return heights;
}

// Ward distance from the definition: sqrt(2 na nb / (na + nb)) |ca - cb|.
inline double ward_distance(double ca, double na, double cb, double nb) {
  return std::sqrt(2.0 * na * nb / (na + nb)) * std::abs(ca - cb);
}

}  // namespace oracle
