#include "specphen/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "specphen/errors.hpp"

namespace specphen {

using nlohmann::json;

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 620;
constexpr int kMapHeight = 540;
constexpr int kBins = 5;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Type-7 quantile (linear interpolation of order statistics).
double quantile(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

struct Extent {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();
};

void extend_from_geometry(const json& geom, Extent& e) {
  const std::string type = geom.value("type", "");
  const auto each_point = [&](const json& ring) {
    for (const auto& pt : ring) {
      const double x = pt[0].get<double>();
      const double y = pt[1].get<double>();
      e.xmin = std::min(e.xmin, x);
      e.xmax = std::max(e.xmax, x);
      e.ymin = std::min(e.ymin, y);
      e.ymax = std::max(e.ymax, y);
    }
  };
  if (type == "Polygon") {
    for (const auto& ring : geom["coordinates"]) each_point(ring);
  } else if (type == "MultiPolygon") {
    for (const auto& poly : geom["coordinates"]) {
      for (const auto& ring : poly) each_point(ring);
    }
  }
}

std::string geometry_path(const json& geom, const Extent& e, double scale, double x_off,
                          double y_off) {
  std::string d;
  const auto ring_path = [&](const json& ring) {
    bool first = true;
    for (const auto& pt : ring) {
      const double x = x_off + (pt[0].get<double>() - e.xmin) * scale;
      const double y = y_off - (pt[1].get<double>() - e.ymin) * scale;  // y grows upward in data
      d += first ? "M" : "L";
      d += num(x) + " " + num(y) + " ";
      first = false;
    }
    d += "Z ";
  };
  const std::string type = geom.value("type", "");
  if (type == "Polygon") {
    for (const auto& ring : geom["coordinates"]) ring_path(ring);
  } else if (type == "MultiPolygon") {
    for (const auto& poly : geom["coordinates"]) {
      for (const auto& ring : poly) ring_path(ring);
    }
  }
  return d;
}

}  // namespace

std::vector<std::string> palette_colors(const std::string& name) {
  if (name == "blues") {
    return {"#eff3ff", "#bdd7e7", "#6baed6", "#3182bd", "#08519c"};
  }
  if (name == "oranges") {
    return {"#feedde", "#fdbe85", "#fd8d3c", "#e6550d", "#a63603"};
  }
  if (name == "greens") {
    return {"#edf8e9", "#bae4b3", "#74c476", "#31a354", "#006d2c"};
  }
  throw ConfigError("unknown palette '" + name + "' (expected blues, oranges or greens)");
}

std::string render_choropleth(const json& feature_collection, const std::string& property,
                              const std::string& palette) {
  const auto colors = palette_colors(palette);
  const auto& features = feature_collection.at("features");

  std::vector<double> values;
  for (const auto& f : features) {
    const auto& props = f.at("properties");
    if (props.contains(property) && props[property].is_number()) {
      values.push_back(props[property].get<double>());
    }
  }
  if (values.empty()) {
    throw NonNumericProperty("property '" + property + "' is numeric on no feature");
  }
  std::sort(values.begin(), values.end());

  // Quantile class breaks, deduplicated so constant data yields one class.
  std::vector<double> breaks;
  for (int b = 1; b < kBins; ++b) {
    const double q = quantile(values, static_cast<double>(b) / kBins);
    if (breaks.empty() || q > breaks.back()) breaks.push_back(q);
  }

  const auto class_of = [&](double v) {
    int c = 0;
    for (double br : breaks) {
      if (v > br) ++c;
    }
    return c;
  };

  Extent e;
  for (const auto& f : features) extend_from_geometry(f.at("geometry"), e);
  const double span_x = std::max(e.xmax - e.xmin, 1e-12);
  const double span_y = std::max(e.ymax - e.ymin, 1e-12);
  const double scale = std::min((kWidth - 40) / span_x, (kMapHeight - 40) / span_y);
  const double x_off = 20.0;
  const double y_off = 20.0 + span_y * scale;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) +
         " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"20\" y=\"16\" font-family=\"sans-serif\" font-size=\"14\">" + property +
         "</text>\n";

  for (const auto& f : features) {
    const auto& props = f.at("properties");
    std::string fill = "#cccccc";
    if (props.contains(property) && props[property].is_number()) {
      fill = colors[class_of(props[property].get<double>())];
    }
    svg += "<path d=\"" + geometry_path(f.at("geometry"), e, scale, x_off, y_off) +
           "\" fill=\"" + fill + "\" stroke=\"#555555\" stroke-width=\"0.5\"/>\n";
  }

  // Legend: one swatch per occupied class.
  const int n_classes = static_cast<int>(breaks.size()) + 1;
  double lo = values.front();
  for (int c = 0; c < n_classes; ++c) {
    const double hi = (c < static_cast<int>(breaks.size())) ? breaks[c] : values.back();
    const int y = kMapHeight + 14 + c * 15;
    svg += "<rect x=\"20\" y=\"" + std::to_string(y) + "\" width=\"12\" height=\"12\" fill=\"" +
           colors[c] + "\" stroke=\"#555555\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"38\" y=\"" + std::to_string(y + 10) +
           "\" font-family=\"sans-serif\" font-size=\"11\">[" + short_num(lo) + ", " +
           short_num(hi) + "]</text>\n";
    lo = hi;
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_box_plot(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                            const std::string& title, const std::string& y_label) {
  if (groups.empty()) throw Error("box plot requires at least one group");

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  for (const auto& [label, vals] : groups) {
    for (double v : vals) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (!(vmin <= vmax)) throw Error("box plot groups contain no values");
  if (vmax == vmin) vmax = vmin + 1.0;

  const int width = 620, height = 420;
  const double plot_x0 = 70, plot_x1 = width - 20;
  const double plot_y0 = 50, plot_y1 = height - 40;
  const auto y_of = [&](double v) {
    return plot_y1 - (v - vmin) / (vmax - vmin) * (plot_y1 - plot_y0);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"20\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" + title +
         "</text>\n";
  svg += "<text x=\"16\" y=\"" + num((plot_y0 + plot_y1) / 2) +
         "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         num((plot_y0 + plot_y1) / 2) + ")\">" + y_label + "</text>\n";
  svg += "<line x1=\"" + num(plot_x0) + "\" y1=\"" + num(plot_y0) + "\" x2=\"" + num(plot_x0) +
         "\" y2=\"" + num(plot_y1) + "\" stroke=\"#333333\"/>\n";
  svg += "<line x1=\"" + num(plot_x0) + "\" y1=\"" + num(plot_y1) + "\" x2=\"" + num(plot_x1) +
         "\" y2=\"" + num(plot_y1) + "\" stroke=\"#333333\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double v = vmin + (vmax - vmin) * tick / 4.0;
    svg += "<text x=\"" + num(plot_x0 - 6) + "\" y=\"" + num(y_of(v) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + short_num(v) +
           "</text>\n";
  }

  const double slot = (plot_x1 - plot_x0) / groups.size();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& vals_in = groups[g].second;
    const double cx = plot_x0 + slot * (g + 0.5);
    svg += "<text x=\"" + num(cx) + "\" y=\"" + std::to_string(height - 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           groups[g].first + "</text>\n";
    if (vals_in.empty()) continue;

    std::vector<double> vals = vals_in;
    std::sort(vals.begin(), vals.end());
    const double q1 = quantile(vals, 0.25);
    const double q2 = quantile(vals, 0.50);
    const double q3 = quantile(vals, 0.75);
    const double iqr = q3 - q1;
    double whisk_lo = vals.front(), whisk_hi = vals.back();
    for (double v : vals) {
      if (v >= q1 - 1.5 * iqr) {
        whisk_lo = v;
        break;
      }
    }
    for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
      if (*it <= q3 + 1.5 * iqr) {
        whisk_hi = *it;
        break;
      }
    }

    const double bw = slot * 0.35;
    svg += "<line x1=\"" + num(cx) + "\" y1=\"" + num(y_of(whisk_lo)) + "\" x2=\"" + num(cx) +
           "\" y2=\"" + num(y_of(whisk_hi)) + "\" stroke=\"#333333\"/>\n";
    svg += "<rect x=\"" + num(cx - bw / 2) + "\" y=\"" + num(y_of(q3)) + "\" width=\"" + num(bw) +
           "\" height=\"" + num(std::max(y_of(q1) - y_of(q3), 0.5)) +
           "\" fill=\"#bdd7e7\" stroke=\"#333333\"/>\n";
    svg += "<line x1=\"" + num(cx - bw / 2) + "\" y1=\"" + num(y_of(q2)) + "\" x2=\"" +
           num(cx + bw / 2) + "\" y2=\"" + num(y_of(q2)) +
           "\" stroke=\"#08519c\" stroke-width=\"2\"/>\n";
    for (double v : vals) {
      if (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr) {
        svg += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(y_of(v)) +
               "\" r=\"2\" fill=\"#333333\"/>\n";
      }
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace specphen
