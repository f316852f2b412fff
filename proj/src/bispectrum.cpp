#include "specphen/bispectrum.hpp"

#include <cmath>
#include <numbers>

#include "specphen/errors.hpp"
#include "specphen/rng.hpp"

namespace specphen {

BispectrumSummary bispectrum_direct(const FourierCoefficients& coeffs) {
  const int t_len = coeffs.T;
  if (t_len < 4) throw SeriesTooShort("bispectrum requires T >= 4");

  BispectrumSummary out;
  for (int k = 1; k <= t_len - 2; ++k) {
    for (int l = 1; k + l <= t_len - 1; ++l) {
      const std::complex<double> b =
          coeffs.values[k] * coeffs.values[l] * std::conj(coeffs.values[k + l]);
      out.magnitudes_sq[{k, l}] = std::norm(b);
    }
  }
  out.domain_size = static_cast<int>(out.magnitudes_sq.size());
  return out;
}

double bispectral_intensity(BispectrumSummary& summary) {
  if (summary.magnitudes_sq.empty()) throw EmptyDomain("bispectrum domain is empty");
  double sum = 0.0;
  for (const auto& [pair, mag] : summary.magnitudes_sq) sum += mag;
  summary.intensity = sum / summary.domain_size;
  if (summary.intensity > 0.0) {
    summary.log10_intensity = std::log10(summary.intensity);
  } else {
    summary.log10_intensity.reset();
  }
  return summary.intensity;
}

FourierCoefficients random_phase_surrogate(const FourierCoefficients& coeffs, std::uint64_t seed) {
  FourierCoefficients out = coeffs;
  const int t_len = coeffs.T;
  CounterRng rng(seed);
  // k = 0 (and the Nyquist bin when T is even) stay untouched; the
  // remaining bins get fresh phases, mirrored for conjugate symmetry.
  for (int k = 1; k <= (t_len - 1) / 2; ++k) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    const double mag = std::abs(coeffs.values[k]);
    out.values[k] = std::polar(mag, theta);
    out.values[t_len - k] = std::conj(out.values[k]);
  }
  return out;
}

}  // namespace specphen
