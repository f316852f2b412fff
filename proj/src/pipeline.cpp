#include "specphen/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>

#include "specphen/csv.hpp"
#include "specphen/inference.hpp"
#include "specphen/rng.hpp"
#include "specphen/svg.hpp"

namespace specphen {

using nlohmann::json;

namespace {

constexpr const char* kNA = "NA";

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string(kNA);
}

std::string opt_cell(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string(kNA);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

std::string partition_label(const BandPartition& p) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g:%g", p.low_upper, p.mid_upper);
  return buf;
}

// Writes one artifact atomically: content lands under a temp name and is
// renamed into place, so a crash or failure never leaves partial files.
// Artifacts of a failing stage are rolled back as a group.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path out_dir) : out_dir_(std::move(out_dir)) {
    std::filesystem::create_directories(out_dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const auto tmp = out_dir_ / (".tmp." + name);
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw Error("cannot write artifact " + name);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::filesystem::rename(tmp, out_dir_ / name);
    manifest_.artifacts.push_back({name, content.size(), fnv1a64_hex(content)});
  }

  std::size_t count() const { return manifest_.artifacts.size(); }

  void rollback_to(std::size_t mark) {
    while (manifest_.artifacts.size() > mark) {
      std::error_code ec;
      std::filesystem::remove(out_dir_ / manifest_.artifacts.back().name, ec);
      manifest_.artifacts.pop_back();
    }
  }

  ArtifactManifest take_manifest() {
    std::sort(manifest_.artifacts.begin(), manifest_.artifacts.end(),
              [](const ArtifactEntry& a, const ArtifactEntry& b) { return a.name < b.name; });
    return std::move(manifest_);
  }

 private:
  std::filesystem::path out_dir_;
  ArtifactManifest manifest_;
};

}  // namespace

const ArtifactEntry* ArtifactManifest::find(const std::string& name) const {
  for (const auto& a : artifacts) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

SpectralOutputs compute_unit_features(const Panel& panel, const PipelineConfig& config) {
  SpectralOutputs out;
  out.records.reserve(panel.series.size());
  for (const auto& series : panel.series) {
    UnitFeatureRecord rec;
    rec.fips = series.fips;
    rec.name = series.name;

    const DemeanedSeries centered = demean(series);

    SpectrumEstimate spec = estimate_spectrum(centered, config.taper_proportion, config.spans);
    const BandPower bp = band_power(spec, config.bands);
    rec.p_low = bp.p_low;
    rec.p_mid = bp.p_mid;
    rec.p_high = bp.p_high;

    // The bispectrum works on the raw (untapered, unsmoothed) transform.
    BispectrumSummary bis = bispectrum_direct(dft(centered));
    bispectral_intensity(bis);
    rec.intensity = bis.intensity;
    rec.log10_intensity = bis.log10_intensity;

    out.spectra.emplace(series.fips, std::move(spec));
    out.bispectra.emplace(series.fips, std::move(bis));
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::map<std::string, double> overall_slopes(const Panel& panel) {
  std::map<std::string, double> slopes;
  for (const auto& series : panel.series) {
    const int n = series.size();
    double t_mean = 0.0, y_mean = 0.0;
    for (int i = 0; i < n; ++i) {
      t_mean += series.years[i];
      y_mean += series.rates[i];
    }
    t_mean /= n;
    y_mean /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dt = series.years[i] - t_mean;
      sxx += dt * dt;
      sxy += dt * (series.rates[i] - y_mean);
    }
    slopes[series.fips] = sxy / sxx;
  }
  return slopes;
}

FeatureMatrix clustering_matrix(const std::vector<UnitFeatureRecord>& records, bool use_mid,
                                bool log_intensity) {
  FeatureMatrix m;
  m.columns = {"p_low", "p_high"};
  if (use_mid) m.columns.push_back("p_mid");
  m.columns.push_back(log_intensity ? "log10_intensity" : "intensity");

  for (const auto& rec : records) {
    std::vector<double> row;
    bool complete = rec.p_low && rec.p_high && (!use_mid || rec.p_mid);
    if (log_intensity) {
      complete = complete && rec.log10_intensity.has_value();
    } else {
      complete = complete && rec.intensity.has_value();
    }
    if (!complete) continue;
    row.push_back(*rec.p_low);
    row.push_back(*rec.p_high);
    if (use_mid) row.push_back(*rec.p_mid);
    row.push_back(log_intensity ? *rec.log10_intensity : *rec.intensity);
    m.unit_ids.push_back(rec.fips);
    m.values.push_back(std::move(row));
  }
  return m;
}

json join_geo(const std::vector<UnitFeatureRecord>& records, const GeoData& geo,
              std::vector<std::string>* warnings) {
  std::map<std::string, const UnitFeatureRecord*> by_fips;
  for (const auto& rec : records) by_fips[rec.fips] = &rec;

  json out = geo.root;
  int matched = 0;
  std::size_t poly_index = 0;
  for (auto& feature : out.at("features")) {
    const std::string fips = geo.polygons.unit_ids.at(poly_index++);
    const auto it = by_fips.find(fips);
    if (it == by_fips.end()) {
      feature["properties"] = json(nullptr);
      if (warnings) warnings->push_back("polygon " + fips + " has no feature record");
      continue;
    }
    const UnitFeatureRecord& r = *it->second;
    feature["properties"] = json{{"fips", r.fips},
                                 {"name", r.name},
                                 {"p_low", opt_json(r.p_low)},
                                 {"p_mid", opt_json(r.p_mid)},
                                 {"p_high", opt_json(r.p_high)},
                                 {"intensity", opt_json(r.intensity)},
                                 {"log10_intensity", opt_json(r.log10_intensity)},
                                 {"cluster", opt_json(r.cluster)},
                                 {"break_year", opt_json(r.break_year)},
                                 {"beta1", opt_json(r.beta1)},
                                 {"beta2", opt_json(r.beta2)},
                                 {"delta_beta", opt_json(r.delta_beta)}};
    ++matched;
  }
  if (matched == 0) {
    throw NoMatchingUnits("no polygon fips matches any feature record");
  }
  if (warnings) {
    std::set<std::string> poly_ids(geo.polygons.unit_ids.begin(), geo.polygons.unit_ids.end());
    for (const auto& rec : records) {
      if (!poly_ids.count(rec.fips)) {
        warnings->push_back("unit " + rec.fips + " has no polygon");
      }
    }
  }
  return out;
}

std::string features_csv(const std::vector<UnitFeatureRecord>& records) {
  std::string out = csv_line({"fips", "name", "p_low", "p_mid", "p_high", "intensity",
                              "log10_intensity", "cluster", "break_year", "beta1", "beta2",
                              "delta_beta"});
  for (const auto& r : records) {
    out += csv_line({r.fips, r.name, opt_cell(r.p_low), opt_cell(r.p_mid), opt_cell(r.p_high),
                     opt_cell(r.intensity), opt_cell(r.log10_intensity), opt_cell(r.cluster),
                     opt_cell(r.break_year), opt_cell(r.beta1), opt_cell(r.beta2),
                     opt_cell(r.delta_beta)});
  }
  return out;
}

std::string breaks_csv(const std::vector<UnitFeatureRecord>& records,
                       const std::map<std::string, BreakFit>& fits) {
  std::string out = csv_line({"fips", "break_year", "beta1", "beta2", "delta_beta", "rss"});
  for (const auto& r : records) {
    const auto it = fits.find(r.fips);
    if (it == fits.end()) {
      // Excluded unit (T < 2h): reported, not silently dropped.
      out += csv_line({r.fips, kNA, kNA, kNA, kNA, kNA});
    } else {
      const BreakFit& f = it->second;
      out += csv_line({r.fips, std::to_string(f.break_year), format_double(f.beta1),
                       format_double(f.beta2), format_double(f.delta_beta),
                       format_double(f.rss)});
    }
  }
  return out;
}

ArtifactManifest run_pipeline(const PipelineConfig& config) {
  try {
    config.validate();
    if (config.polygons_geojson.empty()) {
      throw ConfigError("input.polygons is required for a full pipeline run");
    }
  } catch (const std::exception& e) {
    throw PipelineStageError("config", e.what());
  }

  ArtifactWriter artifacts(config.out_dir);
  const auto run_stage = [&artifacts](const std::string& name,
                                      const std::function<void()>& body) {
    const std::size_t mark = artifacts.count();
    try {
      body();
    } catch (const std::exception& e) {
      artifacts.rollback_to(mark);
      throw PipelineStageError(name, e.what());
    }
  };

  // ---- ingest ----
  Panel panel;
  run_stage("ingest", [&] {
    panel = load_panel(config.panel_csv, config.schema);
    if (!config.canonical_names.empty()) {
      panel = harmonize_names(panel, load_name_list(config.canonical_names));
    }
  });

  // ---- spectral + bispectral features ----
  SpectralOutputs features;
  run_stage("spectral", [&] { features = compute_unit_features(panel, config); });

  run_stage("bispectral", [&] {
    if (!config.dump_bispectrum) return;
    std::string grid = csv_line({"fips", "k", "l", "magnitude_sq"});
    for (const auto& [fips, summary] : features.bispectra) {
      for (const auto& [pair, value] : summary.magnitudes_sq) {
        grid += csv_line({fips, std::to_string(pair.first), std::to_string(pair.second),
                          format_double(value)});
      }
    }
    artifacts.write("bispectrum_grid.csv", grid);
  });

  // ---- clustering ----
  ClusterModel model;
  run_stage("cluster", [&] {
    FeatureMatrix matrix =
        clustering_matrix(features.records, config.cluster_use_mid, config.cluster_log_intensity);
    const FeatureMatrix standardized = standardize(matrix);
    model = kmeans(standardized, config.k, config.restarts, config.effective_cluster_seed());
    for (auto& rec : features.records) {
      const auto it = model.assignments.find(rec.fips);
      if (it != model.assignments.end()) rec.cluster = it->second;
    }

    std::string clusters = csv_line({"fips", "cluster"});
    for (const auto& rec : features.records) {
      clusters += csv_line({rec.fips, opt_cell(rec.cluster)});
    }
    artifacts.write("clusters.csv", clusters);

    std::vector<int> k_values;
    for (int k = 1; k <= std::min(8, standardized.n_units()); ++k) k_values.push_back(k);
    std::string elbow = csv_line({"k", "wss"});
    for (const auto& [k, wss] :
         elbow_curve(standardized, k_values, config.restarts, config.effective_cluster_seed())) {
      elbow += csv_line({std::to_string(k), format_double(wss)});
    }
    artifacts.write("elbow.csv", elbow);

    std::string sil = csv_line({"fips", "silhouette_width"});
    if (model.k >= 2) {
      const SilhouetteResult s = silhouette(standardized, model);
      for (int i = 0; i < standardized.n_units(); ++i) {
        sil += csv_line({standardized.unit_ids[i], format_double(s.widths[i])});
      }
      sil += csv_line({"__mean__", format_double(s.mean_width)});
    }
    artifacts.write("silhouette.csv", sil);
  });

  // ---- breakpoints ----
  std::map<std::string, BreakFit> fits;
  run_stage("breaks", [&] {
    for (const auto& series : panel.series) {
      if (series.size() < 2 * config.min_segment) continue;  // reported as NA rows
      fits.emplace(series.fips, find_breakpoint(series, config.min_segment));
    }
    for (auto& rec : features.records) {
      const auto it = fits.find(rec.fips);
      if (it == fits.end()) continue;
      rec.break_year = it->second.break_year;
      rec.beta1 = it->second.beta1;
      rec.beta2 = it->second.beta2;
      rec.delta_beta = it->second.delta_beta;
    }
    artifacts.write("breaks.csv", breaks_csv(features.records, fits));

    std::vector<BreakFit> fit_list;
    for (const auto& [fips, fit] : fits) {
      if (model.assignments.count(fips)) fit_list.push_back(fit);
    }
    std::map<std::string, int> assignments;
    for (const auto& [fips, cluster] : model.assignments) assignments[fips] = cluster;
    std::string summary = csv_line({"cluster", "n_units", "n_fitted", "detection_proportion",
                                    "median_break_year", "mean_delta_beta"});
    for (const auto& s : summarize_breaks(fit_list, assignments)) {
      summary += csv_line({std::to_string(s.cluster), std::to_string(s.n_units),
                           std::to_string(s.n_fitted), format_double(s.detection_proportion),
                           std::to_string(s.median_break_year),
                           format_double(s.mean_delta_beta)});
    }
    artifacts.write("cluster_break_summary.csv", summary);
    artifacts.write("features.csv", features_csv(features.records));
  });

  // ---- spatial statistics ----
  GeoData geo;
  run_stage("spatial", [&] {
    geo = load_geojson(config.polygons_geojson);
    const SpatialWeights weights = queen_contiguity(geo.polygons);

    struct FeatureSpec {
      const char* label;
      std::function<std::optional<double>(const UnitFeatureRecord&)> get;
    };
    const FeatureSpec specs[] = {
        {"p_low", [](const UnitFeatureRecord& r) { return r.p_low; }},
        {"log10_intensity", [](const UnitFeatureRecord& r) { return r.log10_intensity; }},
        {"delta_beta", [](const UnitFeatureRecord& r) { return r.delta_beta; }},
    };

    std::string report;
    report += "Moran's I report\n";
    report += "queen contiguity weights: " + std::to_string(weights.unit_ids.size()) +
              " units, S0 = " + std::to_string(weights.s0()) + ", style = " +
              (config.weight_style == WeightStyle::binary ? "binary" : "row-standardized") +
              "\n\n";

    int feature_index = 0;
    for (const auto& spec : specs) {
      std::map<std::string, double> values;
      for (const auto& rec : features.records) {
        const auto v = spec.get(rec);
        if (v) values[rec.fips] = *v;
      }
      report += std::string("feature ") + spec.label + ":\n";
      if (values.size() < 3) {
        report += "  skipped (fewer than 3 units with values)\n\n";
        ++feature_index;
        continue;
      }
      std::set<std::string> keep;
      for (const auto& [fips, v] : values) {
        if (weights.neighbors.count(fips)) keep.insert(fips);
      }
      if (keep.size() < 3) {
        report += "  skipped (fewer than 3 units with values and polygons)\n\n";
        ++feature_index;
        continue;
      }
      const SpatialWeights sub = subset_weights(weights, keep);
      const MoranResult res =
          moran_permutation(values, sub, config.n_permutations,
                            config.effective_spatial_seed() + feature_index, config.weight_style);
      report += "  I = " + format_double(res.observed_i) + "\n";
      report += "  E[I] = " + format_double(res.expected_i) + "\n";
      report += "  p = " + format_double(res.p_value) + " (one-sided greater, " +
                std::to_string(res.n_permutations) + " permutations)\n";
      report += "  n_used = " + std::to_string(res.n_used) + "\n";
      std::string islands = "none";
      if (!res.islands_dropped.empty()) {
        islands.clear();
        for (const auto& id : res.islands_dropped) {
          if (!islands.empty()) islands += ", ";
          islands += id;
        }
      }
      report += "  islands dropped: " + islands + "\n\n";
      ++feature_index;
    }
    artifacts.write("moran_report.txt", report);
  });

  // ---- associations (nested model comparisons) ----
  run_stage("associations", [&] {
    const auto slopes = overall_slopes(panel);

    std::vector<double> y;
    std::vector<double> x_plow, x_logi, x_slope;
    for (const auto& rec : features.records) {
      if (!rec.delta_beta || !rec.p_low || !rec.log10_intensity) continue;
      y.push_back(*rec.delta_beta);
      x_plow.push_back(*rec.p_low);
      x_logi.push_back(*rec.log10_intensity);
      x_slope.push_back(slopes.at(rec.fips));
    }

    std::string out = csv_line({"comparison", "n", "rss_reduced", "rss_full", "df1", "df2",
                                "f_statistic", "p_value", "below_floor"});
    struct Comparison {
      const char* label;
      const std::vector<double>* base;
      const char* base_name;
    };
    const Comparison comparisons[] = {
        {"delta_beta ~ p_low vs + log10_intensity", &x_plow, "p_low"},
        {"delta_beta ~ slope vs + log10_intensity", &x_slope, "slope"},
    };
    for (const auto& cmp : comparisons) {
      const OlsFit reduced = ols(y, {{cmp.base_name, *cmp.base}});
      const OlsFit full = ols(y, {{cmp.base_name, *cmp.base}, {"log10_intensity", x_logi}});
      const NestedFResult f = nested_f_test(reduced, full);
      out += csv_line({cmp.label, std::to_string(y.size()), format_double(reduced.rss),
                       format_double(full.rss), std::to_string(f.df1), std::to_string(f.df2),
                       format_double(f.f_statistic), format_double(f.p_value),
                       f.below_floor ? "1" : "0"});
    }
    artifacts.write("associations.csv", out);
  });

  // ---- band-partition sensitivity ----
  run_stage("sensitivity", [&] {
    std::vector<BandPartition> partitions = {config.bands};
    partitions.insert(partitions.end(), config.alt_partitions.begin(),
                      config.alt_partitions.end());

    // p_low per unit under every partition; unit order fixed by records.
    std::vector<std::vector<double>> plows(partitions.size());
    std::vector<double> y, x_logi;
    for (const auto& rec : features.records) {
      const auto& spec = features.spectra.at(rec.fips);
      for (std::size_t p = 0; p < partitions.size(); ++p) {
        plows[p].push_back(band_power(spec, partitions[p]).p_low);
      }
      if (rec.delta_beta && rec.log10_intensity) {
        y.push_back(*rec.delta_beta);
        x_logi.push_back(*rec.log10_intensity);
      }
    }

    std::string out = csv_line({"record_type", "partition_a", "partition_b", "statistic",
                                "value", "p_value"});
    for (std::size_t a = 0; a < partitions.size(); ++a) {
      for (std::size_t b = a + 1; b < partitions.size(); ++b) {
        const double rho = spearman(plows[a], plows[b]);
        out += csv_line({"ranking_agreement", partition_label(partitions[a]),
                         partition_label(partitions[b]), "spearman_rho", format_double(rho), ""});
      }
    }
    for (std::size_t p = 0; p < partitions.size(); ++p) {
      // The headline comparison refit under this partition's p_low.
      std::vector<double> x_plow;
      std::size_t row = 0;
      for (const auto& rec : features.records) {
        if (rec.delta_beta && rec.log10_intensity) x_plow.push_back(plows[p][row]);
        ++row;
      }
      const OlsFit reduced = ols(y, {{"p_low", x_plow}});
      const OlsFit full = ols(y, {{"p_low", x_plow}, {"log10_intensity", x_logi}});
      const NestedFResult f = nested_f_test(reduced, full);
      out += csv_line({"nested_f", partition_label(partitions[p]), "",
                       "delta_beta ~ p_low vs + log10_intensity", format_double(f.f_statistic),
                       format_double(f.p_value)});
    }
    artifacts.write("sensitivity.csv", out);
  });

  // ---- geographic join and rendering ----
  run_stage("geo", [&] {
    std::vector<std::string> warnings;
    const json joined = join_geo(features.records, geo, &warnings);
    artifacts.write("joined.geojson", joined.dump());

    for (const char* prop : {"p_low", "p_high", "log10_intensity", "cluster"}) {
      artifacts.write(std::string("map_") + prop + ".svg",
                      render_choropleth(joined, prop, config.palette));
    }

    std::vector<std::pair<std::string, std::vector<double>>> delta_groups, year_groups;
    std::map<int, std::vector<double>> deltas;
    std::map<int, std::vector<double>> years;
    for (const auto& rec : features.records) {
      if (!rec.cluster) continue;
      if (rec.delta_beta) deltas[*rec.cluster].push_back(*rec.delta_beta);
      if (rec.break_year) years[*rec.cluster].push_back(*rec.break_year);
    }
    for (const auto& [cluster, vals] : deltas) {
      delta_groups.emplace_back("cluster " + std::to_string(cluster), vals);
    }
    for (const auto& [cluster, vals] : years) {
      year_groups.emplace_back("cluster " + std::to_string(cluster), vals);
    }
    artifacts.write("box_delta_beta.svg",
                    render_box_plot(delta_groups, "Slope change at break by cluster",
                                    "delta beta (per 100,000 per year)"));
    artifacts.write("box_break_year.svg",
                    render_box_plot(year_groups, "Break year by cluster", "break year"));
  });

  // ---- manifest ----
  ArtifactManifest manifest = artifacts.take_manifest();
  run_stage("manifest", [&] {
    json doc;
    doc["artifacts"] = json::array();
    for (const auto& a : manifest.artifacts) {
      doc["artifacts"].push_back(
          {{"name", a.name}, {"bytes", a.bytes}, {"fnv1a64", a.fnv1a64}});
    }
    const std::string text = doc.dump(2) + "\n";
    std::ofstream out(config.out_dir / "manifest.json", std::ios::binary);
    out << text;
  });
  return manifest;
}

}  // namespace specphen
