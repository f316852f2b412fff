#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "specphen/config.hpp"
#include "specphen/csv.hpp"
#include "specphen/geojson.hpp"
#include "specphen/inference.hpp"
#include "specphen/pipeline.hpp"
#include "specphen/synth.hpp"

namespace {

using namespace specphen;

// Deferred "section.key = value" assignments collected from CLI flags;
// they override the config file through the same parsing path.
using Assignments = std::vector<std::pair<std::string, std::string>>;

void add_config_flag(CLI::App* cmd, Assignments& out, const std::string& flag,
                     const std::string& key, const std::string& desc) {
  cmd->add_option_function<std::string>(
      flag, [&out, key](const std::string& v) { out.emplace_back(key, v); }, desc);
}

void add_common_flags(CLI::App* cmd, Assignments& out) {
  cmd->set_help_flag("--help", "print this help");  // frees -h / --h for the break flag
  add_config_flag(cmd, out, "--panel", "input.panel", "panel CSV (one row per unit-year)");
  add_config_flag(cmd, out, "--polygons", "input.polygons", "GeoJSON FeatureCollection");
  add_config_flag(cmd, out, "--canonical-names", "input.canonical_names",
                  "newline-delimited canonical unit names");
  add_config_flag(cmd, out, "--name-column", "input.name_column", "CSV column for unit names");
  add_config_flag(cmd, out, "--fips-column", "input.fips_column", "CSV column for fips codes");
  add_config_flag(cmd, out, "--year-column", "input.year_column", "CSV column for years");
  add_config_flag(cmd, out, "--rate-column", "input.rate_column", "CSV column for rates");
  add_config_flag(cmd, out, "--taper", "spectral.taper", "split-cosine-bell taper proportion");
  add_config_flag(cmd, out, "--spans", "spectral.spans", "modified-Daniell spans, e.g. 3 or 3,5");
  add_config_flag(cmd, out, "--band-low", "spectral.band_low", "upper bound of the low band");
  add_config_flag(cmd, out, "--band-mid", "spectral.band_mid", "upper bound of the mid band");
  add_config_flag(cmd, out, "--alt-partitions", "spectral.alt_partitions",
                  "alternative partitions, e.g. 0.12:0.28,0.18:0.32");
  add_config_flag(cmd, out, "--k", "cluster.k", "number of clusters");
  add_config_flag(cmd, out, "--restarts", "cluster.restarts", "k-means restarts");
  add_config_flag(cmd, out, "--cluster-seed", "cluster.seed", "k-means seed");
  add_config_flag(cmd, out, "--use-mid", "cluster.use_mid",
                  "add mid-band power as a clustering feature (true/false)");
  add_config_flag(cmd, out, "--log-intensity", "cluster.log_intensity",
                  "cluster on log10 intensity (true/false)");
  add_config_flag(cmd, out, "--h", "breaks.h", "minimum segment length");
  add_config_flag(cmd, out, "--permutations", "spatial.permutations", "Moran permutations");
  add_config_flag(cmd, out, "--spatial-seed", "spatial.seed", "Moran permutation seed");
  add_config_flag(cmd, out, "--weight-style", "spatial.weight_style", "binary or row");
  add_config_flag(cmd, out, "--out", "output.dir", "output directory");
  add_config_flag(cmd, out, "--palette", "output.palette", "blues, oranges or greens");
  add_config_flag(cmd, out, "--dump-bispectrum", "output.dump_bispectrum",
                  "write the full magnitude grid (true/false)");
  add_config_flag(cmd, out, "--seed", "seed", "global seed (stage seeds derive from it)");
}

PipelineConfig build_config(const std::string& config_path, const Assignments& assignments) {
  PipelineConfig config = config_path.empty() ? PipelineConfig{} : load_config(config_path);
  for (const auto& [key, value] : assignments) apply_config_entry(config, key, value);
  return config;
}

Panel load_configured_panel(const PipelineConfig& config) {
  if (config.panel_csv.empty()) throw ConfigError("--panel (input.panel) is required");
  Panel panel = load_panel(config.panel_csv, config.schema);
  if (!config.canonical_names.empty()) {
    panel = harmonize_names(panel, load_name_list(config.canonical_names));
  }
  return panel;
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / name).string());
  out << content;
  std::cout << "wrote " << (dir / name).string() << "\n";
}

int cmd_run(const std::string& config_path, const Assignments& assignments) {
  const PipelineConfig config = build_config(config_path, assignments);
  const ArtifactManifest manifest = run_pipeline(config);
  for (const auto& a : manifest.artifacts) {
    std::cout << a.fnv1a64 << "  " << a.bytes << "  " << a.name << "\n";
  }
  std::cout << "pipeline complete: " << manifest.artifacts.size() << " artifacts in "
            << config.out_dir.string() << "\n";
  return 0;
}

int cmd_spectral(const std::string& config_path, const Assignments& assignments) {
  const PipelineConfig config = build_config(config_path, assignments);
  const Panel panel = load_configured_panel(config);
  const SpectralOutputs features = compute_unit_features(panel, config);
  std::string out = csv_line({"fips", "p_low", "p_mid", "p_high"});
  for (const auto& r : features.records) {
    out += csv_line({r.fips, format_double(*r.p_low), format_double(*r.p_mid),
                     format_double(*r.p_high)});
  }
  write_file(config.out_dir, "band_powers.csv", out);
  return 0;
}

int cmd_bispec(const std::string& config_path, const Assignments& assignments) {
  const PipelineConfig config = build_config(config_path, assignments);
  const Panel panel = load_configured_panel(config);
  const SpectralOutputs features = compute_unit_features(panel, config);
  std::string out = csv_line({"fips", "intensity", "log10_intensity"});
  for (const auto& r : features.records) {
    out += csv_line({r.fips, format_double(*r.intensity),
                     r.log10_intensity ? format_double(*r.log10_intensity) : "NA"});
  }
  write_file(config.out_dir, "intensity.csv", out);
  if (config.dump_bispectrum) {
    std::string grid = csv_line({"fips", "k", "l", "magnitude_sq"});
    for (const auto& [fips, summary] : features.bispectra) {
      for (const auto& [pair, value] : summary.magnitudes_sq) {
        grid += csv_line({fips, std::to_string(pair.first), std::to_string(pair.second),
                          format_double(value)});
      }
    }
    write_file(config.out_dir, "bispectrum_grid.csv", grid);
  }
  return 0;
}

int cmd_breaks(const std::string& config_path, const Assignments& assignments) {
  const PipelineConfig config = build_config(config_path, assignments);
  const Panel panel = load_configured_panel(config);
  std::vector<UnitFeatureRecord> records;
  std::map<std::string, BreakFit> fits;
  for (const auto& series : panel.series) {
    UnitFeatureRecord rec;
    rec.fips = series.fips;
    rec.name = series.name;
    records.push_back(rec);
    if (series.size() >= 2 * config.min_segment) {
      fits.emplace(series.fips, find_breakpoint(series, config.min_segment));
    }
  }
  write_file(config.out_dir, "breaks.csv", breaks_csv(records, fits));
  return 0;
}

int cmd_cluster(const std::string& config_path, const Assignments& assignments) {
  const PipelineConfig config = build_config(config_path, assignments);
  const Panel panel = load_configured_panel(config);
  const SpectralOutputs features = compute_unit_features(panel, config);
  const FeatureMatrix matrix =
      clustering_matrix(features.records, config.cluster_use_mid, config.cluster_log_intensity);
  const FeatureMatrix standardized = standardize(matrix);
  const ClusterModel model =
      kmeans(standardized, config.k, config.restarts, config.effective_cluster_seed());

  std::string clusters = csv_line({"fips", "cluster"});
  for (const auto& r : features.records) {
    const auto it = model.assignments.find(r.fips);
    clusters += csv_line({r.fips, it == model.assignments.end() ? "NA"
                                                                : std::to_string(it->second)});
  }
  write_file(config.out_dir, "clusters.csv", clusters);

  std::vector<int> k_values;
  for (int k = 1; k <= std::min(8, standardized.n_units()); ++k) k_values.push_back(k);
  std::string elbow = csv_line({"k", "wss"});
  for (const auto& [k, wss] :
       elbow_curve(standardized, k_values, config.restarts, config.effective_cluster_seed())) {
    elbow += csv_line({std::to_string(k), format_double(wss)});
  }
  write_file(config.out_dir, "elbow.csv", elbow);

  if (model.k >= 2) {
    const SilhouetteResult s = silhouette(standardized, model);
    std::string sil = csv_line({"fips", "silhouette_width"});
    for (int i = 0; i < standardized.n_units(); ++i) {
      sil += csv_line({standardized.unit_ids[i], format_double(s.widths[i])});
    }
    sil += csv_line({"__mean__", format_double(s.mean_width)});
    write_file(config.out_dir, "silhouette.csv", sil);
  }
  return 0;
}

int cmd_moran(const std::string& config_path, const Assignments& assignments) {
  PipelineConfig config = build_config(config_path, assignments);
  if (config.polygons_geojson.empty()) throw ConfigError("--polygons is required");
  const Panel panel = load_configured_panel(config);
  SpectralOutputs features = compute_unit_features(panel, config);
  for (auto& rec : features.records) {
    const CountySeries* series = panel.find(rec.fips);
    if (series->size() >= 2 * config.min_segment) {
      const BreakFit fit = find_breakpoint(*series, config.min_segment);
      rec.delta_beta = fit.delta_beta;
    }
  }

  const GeoData geo = load_geojson(config.polygons_geojson);
  const SpatialWeights weights = queen_contiguity(geo.polygons);

  std::string report = "Moran's I report\n";
  report += "queen contiguity weights: " + std::to_string(weights.unit_ids.size()) +
            " units, S0 = " + std::to_string(weights.s0()) + "\n\n";
  struct Item {
    const char* label;
    std::optional<double> UnitFeatureRecord::* field;
  };
  const Item items[] = {{"p_low", &UnitFeatureRecord::p_low},
                        {"log10_intensity", &UnitFeatureRecord::log10_intensity},
                        {"delta_beta", &UnitFeatureRecord::delta_beta}};
  int index = 0;
  for (const auto& item : items) {
    std::map<std::string, double> values;
    for (const auto& rec : features.records) {
      if (rec.*item.field) values[rec.fips] = *(rec.*item.field);
    }
    std::set<std::string> keep;
    for (const auto& [fips, v] : values) {
      if (weights.neighbors.count(fips)) keep.insert(fips);
    }
    report += std::string("feature ") + item.label + ":\n";
    if (keep.size() < 3) {
      report += "  skipped (fewer than 3 units with values and polygons)\n\n";
      ++index;
      continue;
    }
    const MoranResult res =
        moran_permutation(values, subset_weights(weights, keep), config.n_permutations,
                          config.effective_spatial_seed() + index, config.weight_style);
    report += "  I = " + format_double(res.observed_i) + "\n  E[I] = " +
              format_double(res.expected_i) + "\n  p = " + format_double(res.p_value) + " (" +
              std::to_string(res.n_permutations) + " permutations)\n  n_used = " +
              std::to_string(res.n_used) + "\n\n";
    ++index;
  }
  write_file(config.out_dir, "moran_report.txt", report);
  return 0;
}

std::string panel_csv_text(const Panel& panel) {
  std::string out = csv_line({"name", "fips", "year", "rate"});
  for (const auto& s : panel.series) {
    for (int i = 0; i < s.size(); ++i) {
      out += csv_line({s.name, s.fips, std::to_string(s.years[i]), format_double(s.rates[i])});
    }
  }
  return out;
}

int cmd_synth(const std::string& kind_name, int units, int years, int start_year,
              std::uint64_t seed, const std::string& out_dir,
              const std::vector<std::string>& params, int rows, int cols, double smoothness) {
  const SynthKind kind = synth_kind_from_string(kind_name);
  if (kind == SynthKind::spatial_surface) {
    const int r = rows > 0 ? rows : 10;
    const int c = cols > 0 ? cols : 10;
    const SurfaceResult surface = spatial_surface(r, c, smoothness, seed);
    write_file(out_dir, "polygons.geojson", polygons_to_geojson(surface.polygons));
    std::string values = csv_line({"fips", "value"});
    for (const auto& [fips, v] : surface.values) {
      values += csv_line({fips, format_double(v)});
    }
    write_file(out_dir, "surface.csv", values);
    return 0;
  }

  SynthSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.T = years;
  spec.n_units = units;
  spec.start_year = start_year;
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw InvalidSpec("--param expects NAME=VALUE, got " + p);
    spec.parameters[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
  }
  const Panel panel = generate_panel(spec);
  write_file(out_dir, "panel.csv", panel_csv_text(panel));

  const int grid_rows = rows > 0 ? rows : static_cast<int>(std::ceil(std::sqrt(units)));
  const int grid_cols =
      cols > 0 ? cols : static_cast<int>(std::ceil(static_cast<double>(units) / grid_rows));
  write_file(out_dir, "polygons.geojson",
             polygons_to_geojson(grid_polygons(grid_rows, grid_cols, units)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specphen: spectral and bispectral phenotyping of annual spatial panels"};
  app.require_subcommand(1);

  std::string config_path;
  Assignments assignments;

  auto* run = app.add_subcommand("run", "run the full pipeline");
  run->add_option("--config", config_path, "INI configuration file");
  add_common_flags(run, assignments);

  auto* spectral = app.add_subcommand("spectral", "band powers only");
  spectral->add_option("--config", config_path, "INI configuration file");
  add_common_flags(spectral, assignments);

  auto* bispec = app.add_subcommand("bispec", "bispectral intensity only");
  bispec->add_option("--config", config_path, "INI configuration file");
  add_common_flags(bispec, assignments);

  auto* breaks = app.add_subcommand("breaks", "single-break fits only");
  breaks->add_option("--config", config_path, "INI configuration file");
  add_common_flags(breaks, assignments);

  auto* cluster = app.add_subcommand("cluster", "phenotype clustering only");
  cluster->add_option("--config", config_path, "INI configuration file");
  add_common_flags(cluster, assignments);

  auto* moran = app.add_subcommand("moran", "spatial autocorrelation only");
  moran->add_option("--config", config_path, "INI configuration file");
  add_common_flags(moran, assignments);

  auto* synth = app.add_subcommand("synth", "generate synthetic inputs");
  std::string kind = "trend-plus-noise";
  int units = 100, years = 19, start_year = 2003, rows = 0, cols = 0;
  std::uint64_t seed = 1;
  double smoothness = 0.0;
  std::string synth_out = "synth";
  std::vector<std::string> params;
  synth->add_option("--kind", kind,
                    "sinusoid, coupled-triad, piecewise-linear, gaussian-noise, "
                    "trend-plus-noise or spatial-surface");
  synth->add_option("--units", units, "number of units");
  synth->add_option("--years", years, "observations per unit");
  synth->add_option("--start-year", start_year, "first calendar year");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--param", params, "kind-specific parameter NAME=VALUE (repeatable)");
  synth->add_option("--rows", rows, "grid rows (spatial-surface / polygon layout)");
  synth->add_option("--cols", cols, "grid cols");
  synth->add_option("--smoothness", smoothness, "surface moving-average radius");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, assignments);
    if (spectral->parsed()) return cmd_spectral(config_path, assignments);
    if (bispec->parsed()) return cmd_bispec(config_path, assignments);
    if (breaks->parsed()) return cmd_breaks(config_path, assignments);
    if (cluster->parsed()) return cmd_cluster(config_path, assignments);
    if (moran->parsed()) return cmd_moran(config_path, assignments);
    if (synth->parsed()) {
      return cmd_synth(kind, units, years, start_year, seed, synth_out, params, rows, cols,
                       smoothness);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
