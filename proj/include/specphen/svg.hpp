#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace specphen {

// Quantile-binned (5 classes) choropleth of one numeric property of a
// GeoJSON FeatureCollection. Features without a numeric value render in
// a neutral grey. Output bytes are a pure function of the input.
std::string render_choropleth(const nlohmann::json& feature_collection,
                              const std::string& property, const std::string& palette);

// Box-and-whisker chart, one box per labelled group. Whiskers reach the
// most extreme points within 1.5 IQR; points beyond render as dots.
std::string render_box_plot(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                            const std::string& title, const std::string& y_label);

// Palette lookup used by the choropleth legend (5 ordered fill colors).
std::vector<std::string> palette_colors(const std::string& name);

}  // namespace specphen
