#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "specphen/spatial.hpp"

namespace specphen {

// Parsed FeatureCollection: the original document is kept verbatim so
// attribute joins can re-emit geometry exactly as supplied.
struct GeoData {
  nlohmann::json root;  // the FeatureCollection
  UnitPolygons polygons;
};

// Reads a GeoJSON FeatureCollection whose features carry a "fips"
// property and Polygon/MultiPolygon geometry.
GeoData load_geojson(const std::filesystem::path& path);
GeoData parse_geojson(const std::string& text);

// FeatureCollection text for generated polygons (synth output path).
std::string polygons_to_geojson(const UnitPolygons& polygons);

}  // namespace specphen
