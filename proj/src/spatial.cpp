#include "specphen/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "specphen/errors.hpp"
#include "specphen/rng.hpp"

namespace specphen {

namespace {

constexpr double kSnapTol = 1e-9;

struct Segment {
  GeoPoint a, b;
};

struct BBox {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  void expand(const GeoPoint& p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  bool overlaps(const BBox& o, double tol) const {
    return xmin <= o.xmax + tol && o.xmin <= xmax + tol && ymin <= o.ymax + tol &&
           o.ymin <= ymax + tol;
  }
};

double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double point_segment_dist(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  const double px = a.x + t * dx - p.x;
  const double py = a.y + t * dy - p.y;
  return std::hypot(px, py);
}

// Touching counts: proper crossings, endpoint contacts and collinear
// overlap all make two segments "share a point" within tolerance.
bool segments_touch(const Segment& s, const Segment& t, double tol) {
  const double d1 = cross(s.a, s.b, t.a);
  const double d2 = cross(s.a, s.b, t.b);
  const double d3 = cross(t.a, t.b, s.a);
  const double d4 = cross(t.a, t.b, s.b);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return point_segment_dist(t.a, s.a, s.b) <= tol || point_segment_dist(t.b, s.a, s.b) <= tol ||
         point_segment_dist(s.a, t.a, t.b) <= tol || point_segment_dist(s.b, t.a, t.b) <= tol;
}

Ring normalized_ring(const Ring& ring, const std::string& unit) {
  Ring r = ring;
  if (r.size() >= 2 && std::fabs(r.front().x - r.back().x) <= kSnapTol &&
      std::fabs(r.front().y - r.back().y) <= kSnapTol) {
    r.pop_back();  // drop the closing duplicate
  }
  if (r.size() < 3) {
    throw InvalidGeometry("unit " + unit + " has a ring with fewer than 3 distinct vertices");
  }
  for (const auto& p : r) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidGeometry("unit " + unit + " has a non-finite coordinate");
    }
  }
  return r;
}

void check_self_intersection(const Ring& r, const std::string& unit) {
  const int n = static_cast<int>(r.size());
  for (int i = 0; i < n; ++i) {
    const Segment si{r[i], r[(i + 1) % n]};
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // closing edge is adjacent to the first
      const Segment sj{r[j], r[(j + 1) % n]};
      const double d1 = cross(si.a, si.b, sj.a);
      const double d2 = cross(si.a, si.b, sj.b);
      const double d3 = cross(sj.a, sj.b, si.a);
      const double d4 = cross(sj.a, sj.b, si.b);
      if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
          ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        throw InvalidGeometry("unit " + unit + " has a self-intersecting ring");
      }
    }
  }
}

std::int64_t snap(double v) { return std::llround(v / kSnapTol); }

}  // namespace

int SpatialWeights::s0() const {
  int total = 0;
  for (const auto& [id, nb] : neighbors) total += static_cast<int>(nb.size());
  return total;
}

std::vector<std::string> SpatialWeights::islands() const {
  std::vector<std::string> out;
  for (const auto& id : unit_ids) {
    auto it = neighbors.find(id);
    if (it == neighbors.end() || it->second.empty()) out.push_back(id);
  }
  return out;
}

SpatialWeights SpatialWeights::from_links(
    const std::vector<std::string>& ids,
    const std::vector<std::pair<std::string, std::string>>& links) {
  SpatialWeights w;
  w.unit_ids = ids;
  for (const auto& id : ids) w.neighbors[id];
  for (const auto& [a, b] : links) {
    if (a == b) throw Error("self link for unit " + a);
    if (!w.neighbors.count(a) || !w.neighbors.count(b)) {
      throw Error("link references unknown unit: " + a + " - " + b);
    }
    w.neighbors[a].insert(b);
    w.neighbors[b].insert(a);
  }
  return w;
}

SpatialWeights queen_contiguity(const UnitPolygons& polygons) {
  struct UnitGeom {
    std::vector<Ring> rings;
    std::vector<Segment> segments;
    BBox box;
  };
  std::vector<std::string> ids = polygons.unit_ids;
  std::vector<UnitGeom> geoms(ids.size());

  std::unordered_map<std::int64_t, std::unordered_map<std::int64_t, std::vector<int>>> vertex_units;

  for (std::size_t u = 0; u < ids.size(); ++u) {
    const auto& multi = polygons.shapes.at(ids[u]);
    UnitGeom& geom = geoms[u];
    bool first_point = true;
    for (const auto& poly : multi) {
      for (const auto& raw : poly) {
        Ring ring = normalized_ring(raw, ids[u]);
        check_self_intersection(ring, ids[u]);
        const int n = static_cast<int>(ring.size());
        for (int i = 0; i < n; ++i) {
          if (first_point) {
            geom.box = BBox{ring[i].x, ring[i].y, ring[i].x, ring[i].y};
            first_point = false;
          } else {
            geom.box.expand(ring[i]);
          }
          auto& units = vertex_units[snap(ring[i].x)][snap(ring[i].y)];
          if (units.empty() || units.back() != static_cast<int>(u)) {
            units.push_back(static_cast<int>(u));
          }
          geom.segments.push_back({ring[i], ring[(i + 1) % n]});
        }
        geom.rings.push_back(std::move(ring));
      }
    }
  }

  SpatialWeights weights;
  weights.unit_ids = ids;
  for (const auto& id : ids) weights.neighbors[id];

  auto link = [&](int a, int b) {
    weights.neighbors[ids[a]].insert(ids[b]);
    weights.neighbors[ids[b]].insert(ids[a]);
  };

  // Pass 1: exactly shared (snapped) vertices.
  for (const auto& [sx, col] : vertex_units) {
    for (const auto& [sy, units] : col) {
      for (std::size_t i = 0; i < units.size(); ++i) {
        for (std::size_t j = i + 1; j < units.size(); ++j) {
          if (units[i] != units[j]) link(units[i], units[j]);
        }
      }
    }
  }

  // Pass 2: boundary contact without a shared vertex (edge touching an
  // edge interior). Only bounding-box-overlapping, not-yet-linked pairs
  // pay for the segment tests.
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      if (weights.neighbors[ids[a]].count(ids[b])) continue;
      if (!geoms[a].box.overlaps(geoms[b].box, kSnapTol)) continue;
      bool touch = false;
      for (const auto& sa : geoms[a].segments) {
        BBox sb_box{std::min(sa.a.x, sa.b.x), std::min(sa.a.y, sa.b.y),
                    std::max(sa.a.x, sa.b.x), std::max(sa.a.y, sa.b.y)};
        for (const auto& sb : geoms[b].segments) {
          BBox bb{std::min(sb.a.x, sb.b.x), std::min(sb.a.y, sb.b.y), std::max(sb.a.x, sb.b.x),
                  std::max(sb.a.y, sb.b.y)};
          if (!sb_box.overlaps(bb, kSnapTol)) continue;
          if (segments_touch(sa, sb, kSnapTol)) {
            touch = true;
            break;
          }
        }
        if (touch) break;
      }
      if (touch) link(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return weights;
}

namespace {

struct MoranData {
  std::vector<std::string> ids;          // units entering the statistic
  std::vector<double> z;                 // centered values, aligned with ids
  std::vector<std::vector<int>> adj;     // neighbor indices
  std::vector<std::string> islands;      // valued units dropped for zero degree
  double s0 = 0.0;
};

MoranData prepare_moran(const std::map<std::string, double>& values,
                        const SpatialWeights& weights) {
  // Intersect valued units with weight units, then drop zero-degree units.
  std::set<std::string> valued;
  for (const auto& [id, v] : values) {
    if (std::isfinite(v) && weights.neighbors.count(id)) valued.insert(id);
  }

  MoranData d;
  std::map<std::string, int> index;
  for (const auto& id : valued) {
    int degree = 0;
    for (const auto& nb : weights.neighbors.at(id)) {
      if (valued.count(nb)) ++degree;
    }
    if (degree == 0) {
      d.islands.push_back(id);
    } else {
      index[id] = static_cast<int>(d.ids.size());
      d.ids.push_back(id);
    }
  }

  const int n = static_cast<int>(d.ids.size());
  if (n < 3) {
    throw TooFewUnits("Moran's I requires >= 3 connected units with values, got " +
                      std::to_string(n));
  }

  d.adj.resize(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& nb : weights.neighbors.at(d.ids[i])) {
      auto it = index.find(nb);
      if (it != index.end()) d.adj[i].push_back(it->second);
    }
    std::sort(d.adj[i].begin(), d.adj[i].end());
  }

  double mean = 0.0;
  for (const auto& id : d.ids) mean += values.at(id);
  mean /= n;
  d.z.reserve(n);
  bool all_equal = true;
  for (const auto& id : d.ids) {
    d.z.push_back(values.at(id) - mean);
    if (values.at(id) != values.at(d.ids.front())) all_equal = false;
  }
  if (all_equal) throw ConstantValues("Moran's I is undefined for constant values");

  for (int i = 0; i < n; ++i) d.s0 += static_cast<double>(d.adj[i].size());
  return d;
}

double moran_statistic(const MoranData& d, const std::vector<double>& z, WeightStyle style) {
  const int n = static_cast<int>(d.ids.size());
  double num = 0.0;
  double s0 = d.s0;
  if (style == WeightStyle::binary) {
    for (int i = 0; i < n; ++i) {
      for (int j : d.adj[i]) num += z[i] * z[j];
    }
  } else {
    num = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = 1.0 / static_cast<double>(d.adj[i].size());
      for (int j : d.adj[i]) num += w * z[i] * z[j];
    }
    s0 = n;  // row sums are 1
  }
  double denom = 0.0;
  for (double v : z) denom += v * v;
  return (n / s0) * num / denom;
}

}  // namespace

double morans_i(const std::map<std::string, double>& values, const SpatialWeights& weights,
                WeightStyle style) {
  const MoranData d = prepare_moran(values, weights);
  return moran_statistic(d, d.z, style);
}

MoranResult moran_permutation(const std::map<std::string, double>& values,
                              const SpatialWeights& weights, int n_permutations,
                              std::uint64_t seed, WeightStyle style) {
  if (n_permutations < 99) {
    throw Error("moran_permutation requires n_permutations >= 99");
  }
  const MoranData d = prepare_moran(values, weights);
  const int n = static_cast<int>(d.ids.size());

  MoranResult res;
  res.observed_i = moran_statistic(d, d.z, style);
  res.expected_i = -1.0 / (n - 1);
  res.n_used = n;
  res.n_permutations = n_permutations;
  res.seed = seed;
  res.islands_dropped = d.islands;

  int count_ge = 0;
  std::vector<double> perm = d.z;
  for (int r = 0; r < n_permutations; ++r) {
    // Per-replicate stream: replicate order never matters.
    CounterRng rng(seed, static_cast<std::uint64_t>(r) + 1);
    perm = d.z;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[i], perm[j]);
    }
    if (moran_statistic(d, perm, style) >= res.observed_i) ++count_ge;
  }
  res.p_value = static_cast<double>(count_ge + 1) / (n_permutations + 1);
  return res;
}

SpatialWeights subset_weights(const SpatialWeights& weights, const std::set<std::string>& keep) {
  if (keep.empty()) throw EmptyKeepSet("subset_weights requires a non-empty keep set");
  for (const auto& id : keep) {
    if (!weights.neighbors.count(id)) {
      throw Error("keep set references unknown unit " + id);
    }
  }
  SpatialWeights out;
  for (const auto& id : weights.unit_ids) {
    if (keep.count(id)) out.unit_ids.push_back(id);
  }
  for (const auto& id : out.unit_ids) {
    auto& nb = out.neighbors[id];
    for (const auto& other : weights.neighbors.at(id)) {
      if (keep.count(other)) nb.insert(other);
    }
  }
  return out;
}

}  // namespace specphen
