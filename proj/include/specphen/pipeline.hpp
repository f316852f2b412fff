#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specphen/bispectrum.hpp"
#include "specphen/breakpoint.hpp"
#include "specphen/cluster.hpp"
#include "specphen/config.hpp"
#include "specphen/errors.hpp"
#include "specphen/geojson.hpp"
#include "specphen/panel.hpp"

namespace specphen {

// One row of features.csv; optionals left unset are written as NA and
// serialized as null in GeoJSON, never silently zero.
struct UnitFeatureRecord {
  std::string fips;
  std::string name;
  std::optional<double> p_low, p_mid, p_high;
  std::optional<double> intensity, log10_intensity;
  std::optional<int> cluster;
  std::optional<int> break_year;
  std::optional<double> beta1, beta2, delta_beta;
};

inline constexpr int kUnitFeatureFieldCount = 12;

struct ArtifactEntry {
  std::string name;
  std::uint64_t bytes = 0;
  std::string fnv1a64;
};

struct ArtifactManifest {
  std::vector<ArtifactEntry> artifacts;

  const ArtifactEntry* find(const std::string& name) const;
};

// Error carrying the pipeline stage that raised it.
class PipelineStageError : public Error {
 public:
  PipelineStageError(std::string stage, const std::string& what)
      : Error("[stage=" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Spectral + bispectral features for every unit, plus the per-unit
// estimates the sensitivity stage re-partitions.
struct SpectralOutputs {
  std::vector<UnitFeatureRecord> records;
  std::map<std::string, SpectrumEstimate> spectra;
  std::map<std::string, BispectrumSummary> bispectra;
};

SpectralOutputs compute_unit_features(const Panel& panel, const PipelineConfig& config);

// Full-sample OLS slope of rates on calendar year, per unit.
std::map<std::string, double> overall_slopes(const Panel& panel);

// Feature matrix for clustering; units lacking a required value (for
// example log intensity when the log switch is on) are left out.
FeatureMatrix clustering_matrix(const std::vector<UnitFeatureRecord>& records, bool use_mid,
                                bool log_intensity);

// Joined FeatureCollection: matched features get exactly the record
// fields as properties; unmatched polygons are kept with null properties
// and a warning. Throws NoMatchingUnits when nothing joins.
nlohmann::json join_geo(const std::vector<UnitFeatureRecord>& records, const GeoData& geo,
                        std::vector<std::string>* warnings = nullptr);

// Runs ingest, spectral, bispectral, clustering, breaks, spatial,
// associations, sensitivity and rendering end to end, writing every
// artifact under config.out_dir. Artifacts appear atomically per stage;
// a failing stage leaves earlier artifacts intact and later ones absent.
ArtifactManifest run_pipeline(const PipelineConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Shared CSV serialization used by run_pipeline and the stage commands.
std::string features_csv(const std::vector<UnitFeatureRecord>& records);
std::string breaks_csv(const std::vector<UnitFeatureRecord>& records,
                       const std::map<std::string, BreakFit>& fits);

}  // namespace specphen
