#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "specphen/errors.hpp"
#include "specphen/rng.hpp"
#include "specphen/spatial.hpp"
#include "specphen/synth.hpp"

using namespace specphen;

namespace {

// Rook links of an R x C grid with ids "00001".. in row-major order.
SpatialWeights rook_grid(int rows, int cols) {
  const UnitPolygons grid = grid_polygons(rows, cols, rows * cols);
  std::vector<std::pair<std::string, std::string>> links;
  const auto id = [&](int r, int c) { return grid.unit_ids[r * cols + c]; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) links.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) links.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return SpatialWeights::from_links(grid.unit_ids, links);
}

std::map<std::string, double> grid_values(const UnitPolygons& grid,
                                          const std::function<double(int, int)>& f, int cols) {
  std::map<std::string, double> values;
  for (std::size_t i = 0; i < grid.unit_ids.size(); ++i) {
    values[grid.unit_ids[i]] = f(static_cast<int>(i) / cols, static_cast<int>(i) % cols);
  }
  return values;
}

}  // namespace

TEST_CASE("queen contiguity on a 2x2 grid links every cell to the other three") {
  const SpatialWeights w = queen_contiguity(grid_polygons(2, 2, 4));
  CHECK(w.unit_ids.size() == 4);
  for (const auto& id : w.unit_ids) {
    CHECK(w.neighbors.at(id).size() == 3);
    CHECK_FALSE(w.neighbors.at(id).count(id));
  }
  CHECK(w.s0() == 12);
  CHECK(w.islands().empty());
}

TEST_CASE("disjoint squares form no links and surface as islands") {
  UnitPolygons polys;
  polys.unit_ids = {"00001", "00002"};
  polys.shapes["00001"] = {{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
  polys.shapes["00002"] = {{{{11, 0}, {12, 0}, {12, 1}, {11, 1}}}};
  const SpatialWeights w = queen_contiguity(polys);
  CHECK(w.s0() == 0);
  CHECK(w.islands().size() == 2);
}

TEST_CASE("4x4 queen grid has corner degree 3, edge degree 5, interior degree 8") {
  const SpatialWeights w = queen_contiguity(grid_polygons(4, 4, 16));
  std::map<int, int> degree_counts;
  for (const auto& id : w.unit_ids) {
    ++degree_counts[static_cast<int>(w.neighbors.at(id).size())];
  }
  CHECK(degree_counts[3] == 4);   // corners
  CHECK(degree_counts[5] == 8);   // edges
  CHECK(degree_counts[8] == 4);   // interior
}

TEST_CASE("edge contact without shared vertices still links (T-junction)") {
  // The right square's left edge lies inside the left square's right
  // edge, with no coincident vertices.
  UnitPolygons polys;
  polys.unit_ids = {"00001", "00002"};
  polys.shapes["00001"] = {{{{0, 0}, {1, 0}, {1, 3}, {0, 3}}}};
  polys.shapes["00002"] = {{{{1, 1}, {2, 1}, {2, 2}, {1, 2}}}};
  const SpatialWeights w = queen_contiguity(polys);
  CHECK(w.neighbors.at("00001").count("00002") == 1);
}

TEST_CASE("invalid geometry is rejected") {
  UnitPolygons degenerate;
  degenerate.unit_ids = {"00001"};
  degenerate.shapes["00001"] = {{{{0, 0}, {1, 1}}}};
  CHECK_THROWS_AS(queen_contiguity(degenerate), InvalidGeometry);

  UnitPolygons bowtie;
  bowtie.unit_ids = {"00001"};
  bowtie.shapes["00001"] = {{{{0, 0}, {2, 2}, {2, 0}, {0, 2}}}};
  CHECK_THROWS_AS(queen_contiguity(bowtie), InvalidGeometry);
}

TEST_CASE("weights stay symmetric with a zero diagonal") {
  const SpatialWeights w = queen_contiguity(grid_polygons(5, 7, 35));
  for (const auto& [id, nb] : w.neighbors) {
    CHECK_FALSE(nb.count(id));
    for (const auto& other : nb) CHECK(w.neighbors.at(other).count(id) == 1);
  }
}

TEST_CASE("checkerboard on the 2x2 rook grid gives I = -1") {
  const SpatialWeights w = rook_grid(2, 2);
  CHECK(w.s0() == 8);
  const std::map<std::string, double> values = {
      {"00001", 1.0}, {"00002", -1.0}, {"00003", -1.0}, {"00004", 1.0}};
  CHECK(morans_i(values, w) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("a smooth gradient on the 10x10 queen grid clusters strongly") {
  const UnitPolygons grid = grid_polygons(10, 10, 100);
  const SpatialWeights w = queen_contiguity(grid);
  const auto values = grid_values(grid, [](int r, int c) { return double(r + c); }, 10);
  CHECK(morans_i(values, w) > 0.8);
}

TEST_CASE("morans_i error paths") {
  const SpatialWeights w = rook_grid(2, 2);
  std::map<std::string, double> constant;
  for (const auto& id : w.unit_ids) constant[id] = 3.0;
  CHECK_THROWS_AS(morans_i(constant, w), ConstantValues);

  std::map<std::string, double> two = {{"00001", 1.0}, {"00002", 2.0}};
  CHECK_THROWS_AS(morans_i(two, w), TooFewUnits);

  // Edgeless weights raise rather than return 0.
  SpatialWeights edgeless;
  edgeless.unit_ids = {"a", "b", "c"};
  for (const auto& id : edgeless.unit_ids) edgeless.neighbors[id];
  std::map<std::string, double> vals = {{"a", 1.0}, {"b", 2.0}, {"c", 3.0}};
  CHECK_THROWS_AS(morans_i(vals, edgeless), TooFewUnits);
}

TEST_CASE("Moran's I is invariant under affine transforms of the values") {
  const UnitPolygons grid = grid_polygons(6, 6, 36);
  const SpatialWeights w = queen_contiguity(grid);
  CounterRng rng(71);
  std::map<std::string, double> values;
  for (const auto& id : grid.unit_ids) values[id] = rng.normal();
  const double base = morans_i(values, w);
  std::map<std::string, double> mapped;
  for (const auto& [id, v] : values) mapped[id] = -3.7 * v + 11.0;
  CHECK(morans_i(mapped, w) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("permutation p-value hits the floor for a deterministic gradient") {
  const UnitPolygons grid = grid_polygons(10, 10, 100);
  const SpatialWeights w = queen_contiguity(grid);
  const auto values = grid_values(grid, [](int r, int c) { return double(r + c); }, 10);
  const MoranResult res = moran_permutation(values, w, 999, 12345);
  CHECK(res.p_value == doctest::Approx(1.0 / 1000.0));
  CHECK(res.n_used == 100);
  CHECK(res.expected_i == doctest::Approx(-1.0 / 99.0));
}

TEST_CASE("greater-tailed test on the n = 4 checkerboard sits near p = 1") {
  // Exhaustive relabeling gives I in {-1 (8 of 24), 0 (16 of 24)}; the
  // observed checkerboard is the minimum, so every permutation ties or
  // beats it and the one-sided greater p-value is exactly 1.
  const SpatialWeights w = rook_grid(2, 2);
  const std::map<std::string, double> values = {
      {"00001", 1.0}, {"00002", -1.0}, {"00003", -1.0}, {"00004", 1.0}};
  const MoranResult res = moran_permutation(values, w, 999, 9);
  CHECK(res.p_value == doctest::Approx(1.0));
}

TEST_CASE("permutation p-values are deterministic under the seed") {
  const UnitPolygons grid = grid_polygons(5, 5, 25);
  const SpatialWeights w = queen_contiguity(grid);
  CounterRng rng(72);
  std::map<std::string, double> values;
  for (const auto& id : grid.unit_ids) values[id] = rng.normal();
  const MoranResult a = moran_permutation(values, w, 199, 55);
  const MoranResult b = moran_permutation(values, w, 199, 55);
  CHECK(a.p_value == b.p_value);
  CHECK(a.observed_i == b.observed_i);
}

TEST_CASE("subset_weights with the full set is the identity") {
  const SpatialWeights w = queen_contiguity(grid_polygons(3, 3, 9));
  std::set<std::string> all(w.unit_ids.begin(), w.unit_ids.end());
  const SpatialWeights sub = subset_weights(w, all);
  CHECK(sub.unit_ids == w.unit_ids);
  CHECK(sub.neighbors == w.neighbors);
}

TEST_CASE("dropping the center of a 3x3 grid removes one link from each neighbor") {
  const SpatialWeights w = queen_contiguity(grid_polygons(3, 3, 9));
  const std::string center = "00005";  // row-major middle cell
  CHECK(w.neighbors.at(center).size() == 8);
  std::set<std::string> keep(w.unit_ids.begin(), w.unit_ids.end());
  keep.erase(center);
  const SpatialWeights sub = subset_weights(w, keep);
  for (const auto& id : sub.unit_ids) {
    CHECK(sub.neighbors.at(id).size() == w.neighbors.at(id).size() - 1);
  }
}

TEST_CASE("a single kept unit is an island and Moran refuses downstream") {
  const SpatialWeights w = queen_contiguity(grid_polygons(3, 3, 9));
  const SpatialWeights sub = subset_weights(w, {"00001"});
  CHECK(sub.islands() == std::vector<std::string>{"00001"});
  std::map<std::string, double> values = {{"00001", 1.0}};
  CHECK_THROWS_AS(morans_i(values, sub), TooFewUnits);

  CHECK_THROWS_AS(subset_weights(w, {}), EmptyKeepSet);
}

TEST_CASE("islands are excluded but reported by the permutation test") {
  // 3x3 grid plus one far-away cell carrying a value.
  UnitPolygons polys = grid_polygons(3, 3, 9);
  polys.unit_ids.push_back("99999");
  polys.shapes["99999"] = {{{{100, 100}, {101, 100}, {101, 101}, {100, 101}}}};
  const SpatialWeights w = queen_contiguity(polys);
  CounterRng rng(73);
  std::map<std::string, double> values;
  for (const auto& id : w.unit_ids) values[id] = rng.normal();
  const MoranResult res = moran_permutation(values, w, 99, 3);
  CHECK(res.n_used == 9);
  REQUIRE(res.islands_dropped.size() == 1);
  CHECK(res.islands_dropped[0] == "99999");
}

TEST_CASE("row-standardized style changes the statistic but stays in range") {
  const UnitPolygons grid = grid_polygons(4, 4, 16);
  const SpatialWeights w = queen_contiguity(grid);
  const auto values = grid_values(grid, [](int r, int c) { return double(r * r + c); }, 4);
  const double binary = morans_i(values, w, WeightStyle::binary);
  const double row = morans_i(values, w, WeightStyle::row_standardized);
  CHECK(std::isfinite(binary));
  CHECK(std::isfinite(row));
  CHECK(binary > 0.0);
  CHECK(row > 0.0);
}
