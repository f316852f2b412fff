#include "specphen/cluster.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "specphen/errors.hpp"
#include "specphen/rng.hpp"

namespace specphen {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return acc;
}

struct LloydResult {
  std::vector<int> labels;  // 0-based
  std::vector<std::vector<double>> centroids;
  double wss = 0.0;
  std::vector<double> trace;  // wss after each iteration
};

LloydResult lloyd_once(const FeatureMatrix& f, int k, CounterRng& rng) {
  const int n = f.n_units();
  const int p = f.n_features();

  // Initial centroids: k distinct units, partial Fisher-Yates.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < k; ++j) {
    const int pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
    std::swap(idx[j], idx[pick]);
  }
  std::vector<std::vector<double>> centroids(k);
  for (int c = 0; c < k; ++c) centroids[c] = f.values[idx[c]];

  std::vector<int> labels(n, -1);
  double prev_wss = std::numeric_limits<double>::infinity();
  std::vector<double> trace;

  for (int iter = 0; iter < 100; ++iter) {
    // Assignment step; ties go to the lowest centroid index.
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(f.values[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(f.values[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    // Update step.
    std::vector<std::vector<double>> next(k, std::vector<double>(p, 0.0));
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      ++count[labels[i]];
      for (int j = 0; j < p; ++j) next[labels[i]][j] += f.values[i][j];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] == 0) {
        // Repair: reseed at the point farthest from its own centroid
        // (only points whose cluster can spare a member are eligible).
        int far_i = -1;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          if (count[labels[i]] <= 1) continue;
          const double d = sq_dist(f.values[i], centroids[labels[i]]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        if (far_i < 0) {
          throw EmptyClusterUnrecoverable("k-means could not repair an empty cluster (k=" +
                                          std::to_string(k) + ")");
        }
        --count[labels[far_i]];
        for (int j = 0; j < p; ++j) next[labels[far_i]][j] -= f.values[far_i][j];
        labels[far_i] = c;
        count[c] = 1;
        next[c] = f.values[far_i];
        changed = true;
      }
    }
    for (int c = 0; c < k; ++c) {
      for (int j = 0; j < p; ++j) next[c][j] /= count[c];
    }
    centroids = std::move(next);

    double wss = 0.0;
    for (int i = 0; i < n; ++i) wss += sq_dist(f.values[i], centroids[labels[i]]);
    // The objective never increases across Lloyd iterations.
    assert(wss <= prev_wss * (1.0 + 1e-12) + 1e-12);
    prev_wss = wss;
    trace.push_back(wss);

    if (!changed) break;
  }

  LloydResult res;
  res.labels = std::move(labels);
  res.centroids = std::move(centroids);
  res.wss = prev_wss;
  res.trace = std::move(trace);
  return res;
}

}  // namespace

FeatureMatrix standardize(const FeatureMatrix& features) {
  const int n = features.n_units();
  const int p = features.n_features();
  if (n < 2) throw TooFewObservations("standardize requires at least 2 units");

  FeatureMatrix out = features;
  for (int j = 0; j < p; ++j) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += features.values[i][j];
    mean /= n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = features.values[i][j] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1));
    if (sd <= 0.0) {
      throw ZeroVarianceColumn("feature column '" + features.columns[j] +
                               "' has zero variance");
    }
    for (int i = 0; i < n; ++i) out.values[i][j] = (features.values[i][j] - mean) / sd;
  }
  out.standardized = true;
  return out;
}

ClusterModel kmeans(const FeatureMatrix& features, int k, int restarts, std::uint64_t seed) {
  const int n = features.n_units();
  if (k < 1) throw Error("k must be >= 1");
  if (k > n) {
    throw KExceedsUnits("k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " units");
  }
  if (restarts < 1) throw Error("restarts must be >= 1");
  if (!features.standardized) {
    throw Error("kmeans expects a standardized feature matrix");
  }

  LloydResult best;
  best.wss = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> traces;
  traces.reserve(restarts);
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    LloydResult cand = lloyd_once(features, k, rng);
    traces.push_back(cand.trace);
    if (cand.wss < best.wss) best = std::move(cand);
  }

  // Canonical label order: descending centroid p_low (first column when
  // the feature set does not carry one).
  int order_col = 0;
  for (int j = 0; j < features.n_features(); ++j) {
    if (features.columns[j] == "p_low") {
      order_col = j;
      break;
    }
  }
  std::vector<int> cluster_order(k);
  std::iota(cluster_order.begin(), cluster_order.end(), 0);
  std::stable_sort(cluster_order.begin(), cluster_order.end(), [&](int a, int b) {
    return best.centroids[a][order_col] > best.centroids[b][order_col];
  });
  std::vector<int> relabel(k);
  for (int pos = 0; pos < k; ++pos) relabel[cluster_order[pos]] = pos + 1;

  ClusterModel model;
  model.k = k;
  model.restarts = restarts;
  model.seed = seed;
  model.wss = best.wss;
  model.wss_traces = std::move(traces);
  model.centroids.resize(k);
  for (int pos = 0; pos < k; ++pos) model.centroids[pos] = best.centroids[cluster_order[pos]];
  for (int i = 0; i < n; ++i) {
    model.assignments[features.unit_ids[i]] = relabel[best.labels[i]];
  }
  return model;
}

std::vector<std::pair<int, double>> elbow_curve(const FeatureMatrix& features,
                                                const std::vector<int>& k_values, int restarts,
                                                std::uint64_t seed) {
  if (k_values.empty()) throw Error("elbow_curve requires at least one k");
  std::vector<std::pair<int, double>> out;
  out.reserve(k_values.size());
  for (int k : k_values) {
    const ClusterModel model = kmeans(features, k, restarts, seed);
    out.emplace_back(k, model.wss);
  }
  return out;
}

SilhouetteResult silhouette(const FeatureMatrix& features, const ClusterModel& model) {
  if (model.k < 2) throw SingleCluster("silhouette requires k >= 2");
  const int n = features.n_units();

  std::vector<int> labels(n);
  std::vector<int> sizes(model.k, 0);
  for (int i = 0; i < n; ++i) {
    labels[i] = model.assignments.at(features.unit_ids[i]) - 1;
    ++sizes[labels[i]];
  }

  SilhouetteResult res;
  res.widths.resize(n, 0.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> mean_dist(model.k, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[labels[j]] += std::sqrt(sq_dist(features.values[i], features.values[j]));
    }
    double s = 0.0;
    if (sizes[labels[i]] > 1) {
      const double a = mean_dist[labels[i]] / (sizes[labels[i]] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (int c = 0; c < model.k; ++c) {
        if (c == labels[i] || sizes[c] == 0) continue;
        b = std::min(b, mean_dist[c] / sizes[c]);
      }
      const double denom = std::max(a, b);
      s = (denom > 0.0) ? (b - a) / denom : 0.0;
    }
    res.widths[i] = s;
    total += s;
  }
  res.mean_width = total / n;
  return res;
}

}  // namespace specphen
