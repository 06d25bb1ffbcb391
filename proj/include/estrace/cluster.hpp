#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "estrace/feature_matrix.hpp"
#include "estrace/linalg.hpp"

namespace estrace::cluster {

/// One vector per label, as matrix rows.
struct LabeledVectors {
  std::vector<std::string> labels;
  Matrix vectors;
};

enum class GroupBy { variant, fid };

/// Label of a fid group, e.g. `f13`.
std::string fid_label(int fid);

/// Row means per variant (all fids), or per fid using only rows of
/// `reference_variant`. Labels come out in first-appearance order.
LabeledVectors mean_vectors(const FeatureMatrix& matrix, GroupBy by, const std::string& reference_variant = "Standard");

struct DistanceMatrix {
  std::vector<std::string> labels;
  Matrix d;
  bool scaled = false;

  double at(const std::string& a, const std::string& b) const;
};

DistanceMatrix euclidean_distances(const LabeledVectors& vectors);
/// Min-max over the off-diagonal entries; a constant off-diagonal maps to 0.
DistanceMatrix scale_off_diagonal(const DistanceMatrix& raw);
/// Euclidean distances scaled to [0, 1].
DistanceMatrix distance_matrix(const LabeledVectors& vectors);

/// Merge of clusters `a` and `b` (leaves are 0..n-1, the i-th merge creates n+i).
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<Merge> merges;  ///< non-decreasing heights

  /// Members (leaf indices) of cluster id.
  std::vector<std::size_t> members(std::size_t id) const;
  /// Every internal node as (sorted member labels, height), sorted; independent of ids and label order.
  std::vector<std::pair<std::vector<std::string>, double>> clusters() const;
};

/// Agglomerative Ward clustering on Euclidean distances (Lance-Williams
/// update). Ties go to the pair whose smallest member labels sort first.
Dendrogram ward_linkage(const LabeledVectors& vectors);
Dendrogram ward_linkage(const DistanceMatrix& raw);

/// Newick with branch lengths; a node at height h sits at depth h / 2.
std::string to_newick(const Dendrogram& tree);
Dendrogram parse_newick(const std::string& text);

/// CSV `step,cluster_a,cluster_b,height,size`, one row per merge.
std::string merge_table_csv(const Dendrogram& tree);
Dendrogram parse_merge_table_csv(const std::vector<std::string>& labels, const std::string& csv);

/// Baker's gamma between two dendrograms over the same labels.
double baker_gamma(const Dendrogram& a, const Dendrogram& b);

/// Square CSV with labels in the header row and first column.
std::string distance_csv(const DistanceMatrix& m);
/// Lower triangle from `lower`, upper triangle from `upper`, zero diagonal.
std::string combined_distance_csv(const DistanceMatrix& lower, const DistanceMatrix& upper);

}  // namespace estrace::cluster
