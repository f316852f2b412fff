#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "specphen/panel.hpp"
#include "specphen/spatial.hpp"

namespace specphen {

enum class SynthKind {
  sinusoid,
  coupled_triad,
  piecewise_linear,
  gaussian_noise,
  trend_plus_noise,
  spatial_surface,
};

SynthKind synth_kind_from_string(const std::string& name);

// Seeded generator description. Parameters are kind-specific:
//   sinusoid:          amplitude, frequency (cycles/year), phase, noise_sd
//   coupled_triad:     freq_a, freq_b (cycles/year), phase1, phase2, noise_sd
//                      (third component sits at freq_a + freq_b with phase
//                      phase1 + phase2; omit phases to draw them per unit)
//   piecewise_linear:  alpha1, beta1, beta2, tau, noise_sd (continuous at tau)
//   gaussian_noise:    noise_sd
//   trend_plus_noise:  slope_min, slope_max (per-unit uniform), noise_sd
//   spatial_surface:   rows, cols, smoothness (see spatial_surface below)
// Every kind accepts "baseline", a constant offset keeping rates >= 0.
struct SynthSpec {
  SynthKind kind = SynthKind::gaussian_noise;
  std::map<std::string, double> parameters;
  std::uint64_t seed = 0;
  int T = 19;
  int n_units = 1;
  int start_year = 2003;
};

// One unit's series; unit_index selects the per-unit random stream.
CountySeries generate_series(const SynthSpec& spec, int unit_index = 0);

// Balanced panel of n_units series (streams derived from (seed, unit)).
Panel generate_panel(const SynthSpec& spec);

struct SurfaceResult {
  UnitPolygons polygons;                  // rows x cols unit squares
  std::map<std::string, double> values;   // smoothed Gaussian field
};

// Unit-square grid polygons plus a moving-average Gaussian field; the
// window radius is floor(smoothness), radius 0 yields iid values.
SurfaceResult spatial_surface(int rows, int cols, double smoothness, std::uint64_t seed);

// Grid polygons for the first n_units cells of a rows x cols lattice,
// with fips codes "00001", "00002", ...
UnitPolygons grid_polygons(int rows, int cols, int n_units);

}  // namespace specphen
