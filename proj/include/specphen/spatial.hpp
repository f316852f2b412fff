#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace specphen {

struct GeoPoint {
  double x = 0.0;
  double y = 0.0;
};

using Ring = std::vector<GeoPoint>;          // closed or open; no duplicate closing point needed
using PolygonRings = std::vector<Ring>;      // first ring outer, rest holes
using MultiPolygon = std::vector<PolygonRings>;

struct UnitPolygons {
  std::vector<std::string> unit_ids;             // insertion order
  std::map<std::string, MultiPolygon> shapes;
};

// Symmetric binary adjacency over geographic units; no self links.
struct SpatialWeights {
  std::vector<std::string> unit_ids;
  std::map<std::string, std::set<std::string>> neighbors;

  // Sum of all weights == number of directed neighbor links.
  int s0() const;
  std::vector<std::string> islands() const;

  // Builds from an explicit link list, symmetrizing and validating.
  static SpatialWeights from_links(const std::vector<std::string>& ids,
                                   const std::vector<std::pair<std::string, std::string>>& links);
};

// Queen predicate: units are neighbors iff their boundaries share at
// least one point (vertex or edge). Shared vertices are found by snapped
// coordinate hashing (snap tolerance 1e-9 map units); remaining
// bounding-box-overlapping pairs fall back to segment intersection tests.
SpatialWeights queen_contiguity(const UnitPolygons& polygons);

enum class WeightStyle { binary, row_standardized };

// Global Moran's I on the units holding both a finite value and a weight
// entry; zero-neighbor units are excluded.
double morans_i(const std::map<std::string, double>& values, const SpatialWeights& weights,
                WeightStyle style = WeightStyle::binary);

struct MoranResult {
  double observed_i = 0.0;
  double expected_i = 0.0;  // -1/(n-1)
  double p_value = 1.0;     // one-sided greater, (count + 1)/(n_perm + 1)
  int n_used = 0;
  int n_permutations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> islands_dropped;
};

MoranResult moran_permutation(const std::map<std::string, double>& values,
                              const SpatialWeights& weights, int n_permutations,
                              std::uint64_t seed, WeightStyle style = WeightStyle::binary);

// Induced subgraph on the kept units; zero-neighbor survivors stay listed
// (reported via islands()) so callers can exclude them explicitly.
SpatialWeights subset_weights(const SpatialWeights& weights, const std::set<std::string>& keep);

}  // namespace specphen
