#include "specphen/config.hpp"

#include <charconv>
#include <fstream>

#include "specphen/errors.hpp"

namespace specphen {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

long long to_int(const std::string& key, const std::string& value) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cur = trim(cur);
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

}  // namespace

std::vector<int> parse_span_list(const std::string& text) {
  std::vector<int> spans;
  for (const auto& part : split_list(text)) {
    spans.push_back(static_cast<int>(to_int("spectral.spans", part)));
  }
  if (spans.empty()) throw ConfigError("spectral.spans must list at least one span");
  return spans;
}

std::vector<BandPartition> parse_partition_list(const std::string& text) {
  std::vector<BandPartition> parts;
  for (const auto& item : split_list(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("alt_partitions entries use LOW:MID form, got '" + item + "'");
    }
    BandPartition p;
    p.low_upper = to_double("spectral.alt_partitions", trim(item.substr(0, colon)));
    p.mid_upper = to_double("spectral.alt_partitions", trim(item.substr(colon + 1)));
    parts.push_back(p);
  }
  return parts;
}

void apply_config_entry(PipelineConfig& c, const std::string& key, const std::string& value) {
  if (key == "input.panel") c.panel_csv = value;
  else if (key == "input.polygons") c.polygons_geojson = value;
  else if (key == "input.canonical_names") c.canonical_names = value;
  else if (key == "input.name_column") c.schema.name_col = value;
  else if (key == "input.fips_column") c.schema.fips_col = value;
  else if (key == "input.year_column") c.schema.year_col = value;
  else if (key == "input.rate_column") c.schema.rate_col = value;
  else if (key == "spectral.taper") c.taper_proportion = to_double(key, value);
  else if (key == "spectral.spans") c.spans = parse_span_list(value);
  else if (key == "spectral.band_low") c.bands.low_upper = to_double(key, value);
  else if (key == "spectral.band_mid") c.bands.mid_upper = to_double(key, value);
  else if (key == "spectral.alt_partitions") c.alt_partitions = parse_partition_list(value);
  else if (key == "cluster.k") c.k = static_cast<int>(to_int(key, value));
  else if (key == "cluster.restarts") c.restarts = static_cast<int>(to_int(key, value));
  else if (key == "cluster.seed") c.cluster_seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "cluster.use_mid") c.cluster_use_mid = to_bool(key, value);
  else if (key == "cluster.log_intensity") c.cluster_log_intensity = to_bool(key, value);
  else if (key == "breaks.h") c.min_segment = static_cast<int>(to_int(key, value));
  else if (key == "spatial.permutations") c.n_permutations = static_cast<int>(to_int(key, value));
  else if (key == "spatial.seed") c.spatial_seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "spatial.weight_style") {
    if (value == "binary") c.weight_style = WeightStyle::binary;
    else if (value == "row") c.weight_style = WeightStyle::row_standardized;
    else throw ConfigError("spatial.weight_style must be 'binary' or 'row'");
  }
  else if (key == "output.dir") c.out_dir = value;
  else if (key == "output.palette") c.palette = value;
  else if (key == "output.dump_bispectrum") c.dump_bispectrum = to_bool(key, value);
  else if (key == "seed" || key == "run.seed") c.seed = static_cast<std::uint64_t>(to_int(key, value));
  else throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());

  PipelineConfig config;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header at line " + std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value at line " + std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    apply_config_entry(config, section.empty() ? key : section + "." + key, value);
  }
  return config;
}

void PipelineConfig::validate() const {
  if (panel_csv.empty()) throw ConfigError("input.panel is required");
  if (!std::filesystem::exists(panel_csv)) {
    throw ConfigError("input.panel does not exist: " + panel_csv.string());
  }
  if (!polygons_geojson.empty() && !std::filesystem::exists(polygons_geojson)) {
    throw ConfigError("input.polygons does not exist: " + polygons_geojson.string());
  }
  if (!canonical_names.empty() && !std::filesystem::exists(canonical_names)) {
    throw ConfigError("input.canonical_names does not exist: " + canonical_names.string());
  }
  if (!(taper_proportion >= 0.0 && taper_proportion <= 0.5)) {
    throw ConfigError("spectral.taper must lie in [0, 0.5]");
  }
  const auto check_bands = [](const BandPartition& b, const std::string& what) {
    if (!(b.low_upper > 0.0 && b.low_upper < b.mid_upper && b.mid_upper < 0.5)) {
      throw ConfigError(what + " must satisfy 0 < low < mid < 0.5");
    }
  };
  check_bands(bands, "spectral band cutoffs");
  for (const auto& p : alt_partitions) check_bands(p, "alternative partition");
  if (k < 1) throw ConfigError("cluster.k must be >= 1");
  if (restarts < 1) throw ConfigError("cluster.restarts must be >= 1");
  if (min_segment < 2) throw ConfigError("breaks.h must be >= 2");
  if (n_permutations < 99) throw ConfigError("spatial.permutations must be >= 99");
}

}  // namespace specphen
