#include "specphen/geojson.hpp"

#include <fstream>

#include "specphen/errors.hpp"

namespace specphen {

using nlohmann::json;

namespace {

Ring parse_ring(const json& coords) {
  Ring ring;
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2) {
      throw InvalidGeometry("GeoJSON ring position must be [x, y]");
    }
    ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  return ring;
}

PolygonRings parse_polygon(const json& coords) {
  PolygonRings poly;
  for (const auto& ring : coords) poly.push_back(parse_ring(ring));
  return poly;
}

std::string fips_of(const json& feature) {
  if (!feature.contains("properties") || !feature["properties"].is_object()) {
    throw Error("GeoJSON feature has no properties object");
  }
  const auto& props = feature["properties"];
  if (!props.contains("fips")) {
    throw Error("GeoJSON feature properties lack a 'fips' entry");
  }
  const auto& f = props["fips"];
  std::string fips = f.is_string() ? f.get<std::string>() : std::to_string(f.get<long long>());
  if (fips.size() < 5 && !fips.empty()) fips.insert(fips.begin(), 5 - fips.size(), '0');
  return fips;
}

GeoData from_document(json doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features")) {
    throw Error("GeoJSON input must be a FeatureCollection");
  }

  GeoData geo;
  for (const auto& feature : doc["features"]) {
    const std::string fips = fips_of(feature);
    if (geo.polygons.shapes.count(fips)) {
      throw Error("GeoJSON contains duplicate fips " + fips);
    }
    const auto& geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    MultiPolygon multi;
    if (type == "Polygon") {
      multi.push_back(parse_polygon(geom["coordinates"]));
    } else if (type == "MultiPolygon") {
      for (const auto& poly : geom["coordinates"]) multi.push_back(parse_polygon(poly));
    } else {
      throw InvalidGeometry("unsupported geometry type '" + type + "' for unit " + fips);
    }
    geo.polygons.unit_ids.push_back(fips);
    geo.polygons.shapes[fips] = std::move(multi);
  }
  geo.root = std::move(doc);
  return geo;
}

}  // namespace

GeoData parse_geojson(const std::string& text) { return from_document(json::parse(text)); }

GeoData load_geojson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open GeoJSON file: " + path.string());
  json doc;
  in >> doc;
  return from_document(std::move(doc));
}

std::string polygons_to_geojson(const UnitPolygons& polygons) {
  json features = json::array();
  for (const auto& id : polygons.unit_ids) {
    const MultiPolygon& multi = polygons.shapes.at(id);
    json coords = json::array();
    for (const auto& poly : multi) {
      json rings = json::array();
      for (const auto& ring : poly) {
        json pts = json::array();
        for (const auto& p : ring) pts.push_back(json::array({p.x, p.y}));
        // Close the ring explicitly, as GeoJSON expects.
        if (!ring.empty()) pts.push_back(json::array({ring.front().x, ring.front().y}));
        rings.push_back(std::move(pts));
      }
      coords.push_back(std::move(rings));
    }
    json geometry;
    if (coords.size() == 1) {
      geometry = {{"type", "Polygon"}, {"coordinates", coords[0]}};
    } else {
      geometry = {{"type", "MultiPolygon"}, {"coordinates", coords}};
    }
    features.push_back({{"type", "Feature"},
                        {"properties", {{"fips", id}}},
                        {"geometry", std::move(geometry)}});
  }
  const json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump();
}

}  // namespace specphen
