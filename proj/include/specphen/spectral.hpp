#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "specphen/panel.hpp"

namespace specphen {

// Full-length DFT X(k) = sum_{t=1..T} x(t) exp(-2*pi*i*t*k/T), k = 0..T-1.
// The t = 1..T phase convention matches the rest of the pipeline; it only
// rotates phases relative to the 0-based transform, magnitudes agree.
struct FourierCoefficients {
  std::vector<std::complex<double>> values;
  int T = 0;
};

// Frequency-band boundaries on the normalized axis f = k/T in (0, 0.5].
// Upper bounds are inclusive: f <= low_upper is low, f <= mid_upper is mid.
struct BandPartition {
  double low_upper = 0.15;
  double mid_upper = 0.30;
};

struct BandPower {
  double p_low = 0.0;
  double p_mid = 0.0;
  double p_high = 0.0;

  double total() const { return p_low + p_mid + p_high; }
};

// Smoothed spectral density on the positive Fourier grid k = 1..floor(T/2).
struct SpectrumEstimate {
  std::vector<double> freqs;     // k/T, strictly increasing, in (0, 0.5]
  std::vector<double> raw;       // periodogram of the (tapered) series
  std::vector<double> smoothed;  // after modified-Daniell passes
  double taper_proportion = 0.0;
  std::vector<int> smoothing_spans;
};

FourierCoefficients dft(std::span<const double> values);
FourierCoefficients dft(const DemeanedSeries& series);

// I(w_k) = |X(k)|^2 / T for k = 1..floor(T/2).
std::vector<double> raw_periodogram(const FourierCoefficients& coeffs);

// Split-cosine-bell taper over the first and last floor(proportion*T)
// points; proportion 0 returns the input unchanged.
DemeanedSeries taper(const DemeanedSeries& series, double proportion);

// Sequential modified-Daniell convolution, one pass per span (odd, >= 1),
// end weights halved, reflecting at the frequency-axis boundaries.
std::vector<double> smooth_periodogram(std::span<const double> raw, const std::vector<int>& spans);

// Full path: taper -> dft -> periodogram -> smooth.
SpectrumEstimate estimate_spectrum(const DemeanedSeries& series, double taper_proportion,
                                   const std::vector<int>& spans);

// Discrete band sums of the smoothed density; k = 0 is excluded (demeaned
// input makes it vacuous), so the three parts add up to the full sum over
// k = 1..floor(T/2).
BandPower band_power(const SpectrumEstimate& spec, const BandPartition& partition);

// Rank agreement of per-unit low-band power between two band partitions.
// Both maps must cover the same unit set.
struct BandSensitivity {
  double spearman_rho = 0.0;
  int n_units = 0;
};

BandSensitivity band_sensitivity(const std::map<std::string, double>& p_low_a,
                                 const std::map<std::string, double>& p_low_b);

}  // namespace specphen
