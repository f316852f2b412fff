#include "specphen/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "specphen/errors.hpp"
#include "specphen/rng.hpp"

namespace specphen {

namespace {

double param(const SynthSpec& spec, const std::string& name, double fallback) {
  auto it = spec.parameters.find(name);
  return it == spec.parameters.end() ? fallback : it->second;
}

double required_param(const SynthSpec& spec, const std::string& name) {
  auto it = spec.parameters.find(name);
  if (it == spec.parameters.end()) {
    throw InvalidSpec("synth spec is missing parameter '" + name + "'");
  }
  return it->second;
}

void check_frequency(double f, const std::string& name) {
  if (!(f > 0.0 && f <= 0.5)) {
    throw InvalidSpec("frequency '" + name + "' must lie in (0, 0.5], got " + std::to_string(f));
  }
}

std::string unit_fips(int unit_index) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%05d", unit_index + 1);
  return buf;
}

}  // namespace

SynthKind synth_kind_from_string(const std::string& name) {
  if (name == "sinusoid") return SynthKind::sinusoid;
  if (name == "coupled-triad" || name == "coupled_triad") return SynthKind::coupled_triad;
  if (name == "piecewise-linear" || name == "piecewise_linear") return SynthKind::piecewise_linear;
  if (name == "gaussian-noise" || name == "gaussian_noise") return SynthKind::gaussian_noise;
  if (name == "trend-plus-noise" || name == "trend_plus_noise") return SynthKind::trend_plus_noise;
  if (name == "spatial-surface" || name == "spatial_surface") return SynthKind::spatial_surface;
  throw InvalidSpec("unknown synth kind '" + name + "'");
}

CountySeries generate_series(const SynthSpec& spec, int unit_index) {
  if (spec.T < 2) throw InvalidSpec("synth spec requires T >= 2");
  if (spec.kind == SynthKind::spatial_surface) {
    throw InvalidSpec("spatial-surface specs generate surfaces, not series");
  }

  CounterRng rng(spec.seed, static_cast<std::uint64_t>(unit_index));
  const int t_len = spec.T;
  const double noise_sd =
      param(spec, "noise_sd", spec.kind == SynthKind::gaussian_noise ? 1.0 : 0.0);
  if (noise_sd < 0.0) throw InvalidSpec("noise_sd must be >= 0");
  const double baseline = param(spec, "baseline", 25.0);
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<double> values(t_len, 0.0);
  switch (spec.kind) {
    case SynthKind::sinusoid: {
      const double amplitude = param(spec, "amplitude", 1.0);
      const double freq = required_param(spec, "frequency");
      check_frequency(freq, "frequency");
      const double phase = param(spec, "phase", 0.0);
      for (int t = 1; t <= t_len; ++t) {
        values[t - 1] = amplitude * std::cos(two_pi * freq * t + phase);
      }
      break;
    }
    case SynthKind::coupled_triad: {
      const double fa = required_param(spec, "freq_a");
      const double fb = required_param(spec, "freq_b");
      check_frequency(fa, "freq_a");
      check_frequency(fb, "freq_b");
      check_frequency(fa + fb, "freq_a + freq_b");
      const bool have_phases = spec.parameters.count("phase1") && spec.parameters.count("phase2");
      const double p1 = have_phases ? spec.parameters.at("phase1") : two_pi * rng.uniform01();
      const double p2 = have_phases ? spec.parameters.at("phase2") : two_pi * rng.uniform01();
      for (int t = 1; t <= t_len; ++t) {
        values[t - 1] = std::cos(two_pi * fa * t + p1) + std::cos(two_pi * fb * t + p2) +
                        std::cos(two_pi * (fa + fb) * t + p1 + p2);
      }
      break;
    }
    case SynthKind::piecewise_linear: {
      const double alpha1 = param(spec, "alpha1", 2.0);
      const double beta1 = required_param(spec, "beta1");
      const double beta2 = required_param(spec, "beta2");
      const int tau = static_cast<int>(required_param(spec, "tau"));
      if (tau < 1 || tau >= t_len) {
        throw InvalidSpec("tau must lie in [1, T-1], got " + std::to_string(tau));
      }
      const double alpha2 = alpha1 + (beta1 - beta2) * tau;  // continuous at tau
      for (int t = 1; t <= t_len; ++t) {
        values[t - 1] = (t <= tau) ? alpha1 + beta1 * t : alpha2 + beta2 * t;
      }
      break;
    }
    case SynthKind::gaussian_noise:
      break;  // noise added below
    case SynthKind::trend_plus_noise: {
      const double lo = param(spec, "slope_min", 0.2);
      const double hi = param(spec, "slope_max", 3.0);
      if (hi < lo) throw InvalidSpec("slope_max must be >= slope_min");
      const double slope = lo + (hi - lo) * rng.uniform01();
      const double intercept = param(spec, "intercept", 5.0);
      for (int t = 1; t <= t_len; ++t) values[t - 1] = intercept + slope * t;
      break;
    }
    case SynthKind::spatial_surface:
      break;  // unreachable
  }

  CountySeries series;
  series.fips = unit_fips(unit_index);
  series.name = "Unit " + series.fips;
  series.years.reserve(t_len);
  series.rates.reserve(t_len);
  for (int t = 1; t <= t_len; ++t) {
    double v = values[t - 1] + baseline;
    if (noise_sd > 0.0) v += noise_sd * rng.normal();
    series.years.push_back(spec.start_year + t - 1);
    series.rates.push_back(v);
  }
  return series;
}

Panel generate_panel(const SynthSpec& spec) {
  if (spec.n_units < 1) throw InvalidSpec("synth spec requires n_units >= 1");
  Panel panel;
  panel.start_year = spec.start_year;
  panel.n_years = spec.T;
  panel.series.reserve(spec.n_units);
  for (int u = 0; u < spec.n_units; ++u) {
    panel.series.push_back(generate_series(spec, u));
  }
  return panel;
}

UnitPolygons grid_polygons(int rows, int cols, int n_units) {
  if (rows < 1 || cols < 1 || n_units < 1 || n_units > rows * cols) {
    throw InvalidGrid("grid " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " cannot host " + std::to_string(n_units) + " units");
  }
  UnitPolygons polys;
  for (int u = 0; u < n_units; ++u) {
    const int r = u / cols;
    const int c = u % cols;
    const double x0 = c, y0 = r, x1 = c + 1.0, y1 = r + 1.0;
    Ring ring = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    const std::string fips = [&] {
      char buf[8];
      std::snprintf(buf, sizeof(buf), "%05d", u + 1);
      return std::string(buf);
    }();
    polys.unit_ids.push_back(fips);
    polys.shapes[fips] = {{ring}};
  }
  return polys;
}

SurfaceResult spatial_surface(int rows, int cols, double smoothness, std::uint64_t seed) {
  if (rows < 2 || cols < 2) {
    throw InvalidGrid("spatial surface requires rows, cols >= 2");
  }
  if (smoothness < 0.0) throw InvalidGrid("smoothness must be >= 0");

  // iid field, one stream per cell so evaluation order is irrelevant.
  std::vector<double> noise(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      CounterRng rng(seed, static_cast<std::uint64_t>(r) * cols + c);
      noise[static_cast<std::size_t>(r) * cols + c] = rng.normal();
    }
  }

  const int radius = static_cast<int>(std::floor(smoothness));
  SurfaceResult out;
  out.polygons = grid_polygons(rows, cols, rows * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      int count = 0;
      for (int dr = -radius; dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          acc += noise[static_cast<std::size_t>(rr) * cols + cc];
          ++count;
        }
      }
      out.values[out.polygons.unit_ids[static_cast<std::size_t>(r) * cols + c]] = acc / count;
    }
  }
  return out;
}

}  // namespace specphen
