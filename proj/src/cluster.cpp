#include "estrace/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "estrace/errors.hpp"

namespace estrace::cluster {

std::string fid_label(int fid) { return "f" + std::to_string(fid); }

LabeledVectors mean_vectors(const FeatureMatrix& matrix, GroupBy by, const std::string& reference_variant) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<Vector, std::size_t>> acc;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    const auto& r = matrix.rows[i];
    if (by == GroupBy::fid && r.variant != reference_variant) continue;
    const std::string key = by == GroupBy::variant ? r.variant : fid_label(r.fid);
    auto [it, inserted] = acc.try_emplace(key, Vector::Zero(matrix.values.cols()), 0);
    if (inserted) order.push_back(key);
    it->second.first += matrix.values.row(static_cast<Eigen::Index>(i)).transpose();
    ++it->second.second;
  }
  if (by == GroupBy::fid) {
    std::map<int, bool> fids;
    for (const auto& r : matrix.rows) fids[r.fid] = true;
    for (const auto& [fid, _] : fids)
      if (!acc.count(fid_label(fid)))
        throw InputError("no rows of variant '" + reference_variant + "' for " + fid_label(fid));
  }
  if (order.empty()) throw InputError("no rows to average");
  LabeledVectors out;
  out.labels = order;
  out.vectors.resize(static_cast<Eigen::Index>(order.size()), matrix.values.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& [sum, count] = acc.at(order[i]);
    out.vectors.row(static_cast<Eigen::Index>(i)) = (sum / static_cast<double>(count)).transpose();
  }
  return out;
}

double DistanceMatrix::at(const std::string& a, const std::string& b) const {
  auto ia = std::find(labels.begin(), labels.end(), a);
  auto ib = std::find(labels.begin(), labels.end(), b);
  if (ia == labels.end() || ib == labels.end()) throw InputError("label not in distance matrix");
  return d(ia - labels.begin(), ib - labels.begin());
}

DistanceMatrix euclidean_distances(const LabeledVectors& v) {
  const auto n = v.vectors.rows();
  if (static_cast<std::size_t>(n) != v.labels.size()) throw InputError("label count does not match vectors");
  if (n < 2) throw InputError("distance matrix needs at least 2 labels");
  DistanceMatrix m;
  m.labels = v.labels;
  m.d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) m.d(i, j) = m.d(j, i) = (v.vectors.row(i) - v.vectors.row(j)).norm();
  return m;
}

DistanceMatrix scale_off_diagonal(const DistanceMatrix& raw) {
  DistanceMatrix m = raw;
  const auto n = raw.d.rows();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) {
        lo = std::min(lo, raw.d(i, j));
        hi = std::max(hi, raw.d(i, j));
      }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m.d(i, j) = i == j || !(hi > lo) ? 0.0 : (raw.d(i, j) - lo) / (hi - lo);
  m.scaled = true;
  return m;
}

DistanceMatrix distance_matrix(const LabeledVectors& vectors) { return scale_off_diagonal(euclidean_distances(vectors)); }

std::vector<std::size_t> Dendrogram::members(std::size_t id) const {
  const std::size_t n = labels.size();
  if (id < n) return {id};
  const auto& m = merges.at(id - n);
  auto out = members(m.a);
  auto right = members(m.b);
  out.insert(out.end(), right.begin(), right.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::vector<std::string>, double>> Dendrogram::clusters() const {
  std::vector<std::pair<std::vector<std::string>, double>> out;
  for (std::size_t i = 0; i < merges.size(); ++i) {
    std::vector<std::string> names;
    for (auto leaf : members(labels.size() + i)) names.push_back(labels[leaf]);
    std::sort(names.begin(), names.end());
    out.emplace_back(std::move(names), merges[i].height);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Dendrogram ward_linkage(const LabeledVectors& vectors) {
  return ward_linkage(euclidean_distances(vectors));
}

Dendrogram ward_linkage(const DistanceMatrix& raw) {
  const std::size_t n = raw.labels.size();
  if (n < 2) throw InputError("clustering needs at least 2 labels");
  Dendrogram tree;
  tree.labels = raw.labels;

  // Active clusters: id, size, smallest member label, distances by slot.
  std::vector<std::size_t> id(n), size(n, 1);
  std::vector<std::string> key(raw.labels);
  std::vector<bool> alive(n, true);
  Matrix d = raw.d;
  for (std::size_t i = 0; i < n; ++i) id[i] = i;

  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_key;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double v = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        auto k = std::minmax(key[i], key[j]);
        std::pair<std::string, std::string> pk{k.first, k.second};
        if (v < best || (v == best && pk < best_key)) {
          best = v;
          bi = i;
          bj = j;
          best_key = pk;
        }
      }
    }
    const double ni = static_cast<double>(size[bi]), nj = static_cast<double>(size[bj]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      const double nk = static_cast<double>(size[k]);
      const auto K = static_cast<Eigen::Index>(k);
      const double dki = d(K, static_cast<Eigen::Index>(bi)), dkj = d(K, static_cast<Eigen::Index>(bj));
      const double v = std::sqrt(std::max(
          0.0, ((ni + nk) * dki * dki + (nj + nk) * dkj * dkj - nk * best * best) / (ni + nj + nk)));
      d(K, static_cast<Eigen::Index>(bi)) = d(static_cast<Eigen::Index>(bi), K) = v;
    }
    Merge m;
    m.a = std::min(id[bi], id[bj]);
    m.b = std::max(id[bi], id[bj]);
    m.height = best;
    m.size = size[bi] + size[bj];
    tree.merges.push_back(m);
    id[bi] = n + step;
    size[bi] += size[bj];
    key[bi] = std::min(key[bi], key[bj]);
    alive[bj] = false;
  }
  return tree;
}

double baker_gamma(const Dendrogram& a, const Dendrogram& b) {
  const std::size_t n = a.labels.size();
  if (b.labels.size() != n) throw InputError("dendrograms cover different labels");
  std::vector<std::size_t> to_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[i]);
    if (it == b.labels.end()) throw InputError("dendrograms cover different labels");
    to_b[i] = static_cast<std::size_t>(it - b.labels.begin());
  }
  // Largest number of clusters at which a pair still shares a cluster.
  auto level = [](const Dendrogram& t) {
    const std::size_t m = t.labels.size();
    Matrix k = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t s = 0; s < t.merges.size(); ++s) {
      const auto left = t.members(t.merges[s].a), right = t.members(t.merges[s].b);
      for (auto i : left)
        for (auto j : right)
          k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              k(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = static_cast<double>(m - s - 1);
    }
    return k;
  };
  const Matrix ka = level(a), kb = level(b);
  std::vector<double> xa, xb;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      xa.push_back(ka(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      xb.push_back(kb(static_cast<Eigen::Index>(to_b[i]), static_cast<Eigen::Index>(to_b[j])));
    }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return v[p] < v[q]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(xa), rb = ranks(xb);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 1.0 : 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace estrace::cluster
