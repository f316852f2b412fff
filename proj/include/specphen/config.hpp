#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specphen/panel.hpp"
#include "specphen/spatial.hpp"
#include "specphen/spectral.hpp"

namespace specphen {

// Full pipeline configuration. Every key of the INI file maps to a field
// here and to a CLI flag that overrides it.
struct PipelineConfig {
  // [input]
  std::filesystem::path panel_csv;
  std::filesystem::path polygons_geojson;   // optional; spatial stages skip without it
  std::filesystem::path canonical_names;    // optional
  CsvSchema schema;

  // [spectral]
  double taper_proportion = 0.1;
  std::vector<int> spans = {3};
  BandPartition bands;
  std::vector<BandPartition> alt_partitions = {{0.12, 0.28}, {0.18, 0.32}};

  // [cluster]
  int k = 4;
  int restarts = 50;
  std::optional<std::uint64_t> cluster_seed;
  bool cluster_use_mid = false;       // add p_mid as a fourth feature
  bool cluster_log_intensity = false; // cluster on log10 intensity instead of raw

  // [breaks]
  int min_segment = 5;  // h

  // [spatial]
  int n_permutations = 999;
  std::optional<std::uint64_t> spatial_seed;
  WeightStyle weight_style = WeightStyle::binary;

  // [output]
  std::filesystem::path out_dir = "out";
  std::string palette = "blues";
  bool dump_bispectrum = false;

  std::uint64_t seed = 20030321;  // global; stage seeds derive from it when unset

  std::uint64_t effective_cluster_seed() const { return cluster_seed.value_or(seed); }
  std::uint64_t effective_spatial_seed() const { return spatial_seed.value_or(seed); }

  void validate() const;
};

// INI reader: "[section]" headers, "key = value" lines, '#' or ';'
// comments. Unknown keys are rejected so typos fail loudly.
PipelineConfig load_config(const std::filesystem::path& path);

// Applies one "section.key" assignment; shared by the INI reader.
void apply_config_entry(PipelineConfig& config, const std::string& dotted_key,
                        const std::string& value);

std::vector<int> parse_span_list(const std::string& text);
std::vector<BandPartition> parse_partition_list(const std::string& text);

}  // namespace specphen
