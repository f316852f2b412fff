#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "specphen/spectral.hpp"

namespace specphen {

// Direct bispectrum estimate on the full valid index rectangle
// D = {(k, l): k >= 1, l >= 1, k + l <= T - 1}. Zero indices are excluded
// (demeaned input makes them vacuous); at T = 19 this gives M = 153 pairs.
struct BispectrumSummary {
  std::map<std::pair<int, int>, double> magnitudes_sq;  // |X(k) X(l) X*(k+l)|^2
  int domain_size = 0;                                  // M
  double intensity = 0.0;                               // mean of magnitudes_sq
  std::optional<double> log10_intensity;                // defined iff intensity > 0
};

// Magnitude grid only; intensity fields are filled by bispectral_intensity.
BispectrumSummary bispectrum_direct(const FourierCoefficients& coeffs);

// Mean squared bispectrum magnitude over the domain; also records the
// intensity and its log10 (left unset when the intensity is zero).
double bispectral_intensity(BispectrumSummary& summary);

// Surrogate with the exact amplitude spectrum of the input and phases
// drawn uniformly; conjugate symmetry is preserved so the inverse
// transform stays real. Deterministic under the seed.
FourierCoefficients random_phase_surrogate(const FourierCoefficients& coeffs, std::uint64_t seed);

}  // namespace specphen
