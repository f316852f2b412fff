#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace specphen {

// Per-unit feature rows; values is n_units x n_features, row-major by unit.
struct FeatureMatrix {
  std::vector<std::string> unit_ids;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  bool standardized = false;

  int n_units() const { return static_cast<int>(unit_ids.size()); }
  int n_features() const { return static_cast<int>(columns.size()); }
};

struct ClusterModel {
  int k = 0;
  std::map<std::string, int> assignments;  // unit id -> label in 1..k
  std::vector<std::vector<double>> centroids;
  double wss = 0.0;  // total within-cluster sum of squares
  int restarts = 0;
  std::uint64_t seed = 0;
  // Objective after each Lloyd iteration of every restart, in restart
  // order; each inner sequence is non-increasing.
  std::vector<std::vector<double>> wss_traces;
};

// Column-wise z-scores with the sample standard deviation (divisor n-1).
FeatureMatrix standardize(const FeatureMatrix& features);

// Lloyd iterations with multiple restarts; the restart with the smallest
// objective wins. Deterministic under (seed, restarts): restart r draws
// from its own counter stream. Labels are canonicalized by descending
// centroid value of the "p_low" column (first column when absent) so
// reports are stable across seeds.
ClusterModel kmeans(const FeatureMatrix& features, int k, int restarts, std::uint64_t seed);

// Best-of-restarts objective for each candidate k.
std::vector<std::pair<int, double>> elbow_curve(const FeatureMatrix& features,
                                                const std::vector<int>& k_values, int restarts,
                                                std::uint64_t seed);

struct SilhouetteResult {
  double mean_width = 0.0;
  std::vector<double> widths;  // aligned with features.unit_ids
};

SilhouetteResult silhouette(const FeatureMatrix& features, const ClusterModel& model);

}  // namespace specphen
