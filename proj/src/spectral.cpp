#include "specphen/spectral.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "specphen/errors.hpp"
#include "specphen/inference.hpp"

namespace specphen {

FourierCoefficients dft(std::span<const double> values) {
  const int t_len = static_cast<int>(values.size());
  if (t_len < 2) throw SeriesTooShort("dft requires T >= 2");

  FourierCoefficients out;
  out.T = t_len;
  out.values.resize(t_len);
  const double step = -2.0 * std::numbers::pi / t_len;
  for (int k = 0; k < t_len; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int t = 1; t <= t_len; ++t) {
      const double angle = step * static_cast<double>(t) * static_cast<double>(k);
      acc += values[t - 1] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out.values[k] = acc;
  }

#ifndef NDEBUG
  // Real input: X(T-k) == conj(X(k)).
  for (int k = 1; k < t_len; ++k) {
    assert(std::abs(out.values[t_len - k] - std::conj(out.values[k])) <=
           1e-9 * (1.0 + std::abs(out.values[k])));
  }
#endif
  return out;
}

FourierCoefficients dft(const DemeanedSeries& series) { return dft(series.values); }

std::vector<double> raw_periodogram(const FourierCoefficients& coeffs) {
  const int half = coeffs.T / 2;
  std::vector<double> out;
  out.reserve(half);
  for (int k = 1; k <= half; ++k) {
    out.push_back(std::norm(coeffs.values[k]) / coeffs.T);
  }
  return out;
}

DemeanedSeries taper(const DemeanedSeries& series, double proportion) {
  if (!(proportion >= 0.0 && proportion <= 0.5)) {
    throw InvalidProportion("taper proportion must lie in [0, 0.5], got " +
                            std::to_string(proportion));
  }
  DemeanedSeries out = series;
  const int n = static_cast<int>(out.values.size());
  const int m = static_cast<int>(std::floor(n * proportion));
  for (int j = 1; j <= m; ++j) {
    const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * (j - 0.5) / m));
    out.values[j - 1] *= w;
    out.values[n - j] *= w;
  }
  return out;
}

std::vector<double> smooth_periodogram(std::span<const double> raw, const std::vector<int>& spans) {
  const int n = static_cast<int>(raw.size());
  std::vector<double> cur(raw.begin(), raw.end());
  for (int span : spans) {
    if (span < 1 || span % 2 == 0 || span > 2 * n - 1) {
      throw InvalidSpan("smoothing span must be odd, >= 1 and <= " + std::to_string(2 * n - 1) +
                        ", got " + std::to_string(span));
    }
    const int h = (span - 1) / 2;
    if (h == 0) continue;

    // Modified Daniell: flat weights with halved ends.
    std::vector<double> w(2 * h + 1, 1.0 / (2 * h));
    w.front() = w.back() = 1.0 / (4 * h);

    std::vector<double> next(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = -h; j <= h; ++j) {
        int p = i + j;
        if (p < 0) p = -1 - p;           // reflect below k = 1
        else if (p >= n) p = 2 * n - 1 - p;  // reflect above k = floor(T/2)
        acc += w[j + h] * cur[p];
      }
      next[i] = acc;
    }
    cur = std::move(next);
  }
  return cur;
}

SpectrumEstimate estimate_spectrum(const DemeanedSeries& series, double taper_proportion,
                                   const std::vector<int>& spans) {
  const DemeanedSeries tapered = taper(series, taper_proportion);
  const FourierCoefficients coeffs = dft(tapered);

  SpectrumEstimate spec;
  spec.taper_proportion = taper_proportion;
  spec.smoothing_spans = spans;
  spec.raw = raw_periodogram(coeffs);
  spec.smoothed = smooth_periodogram(spec.raw, spans);
  const int half = coeffs.T / 2;
  spec.freqs.reserve(half);
  for (int k = 1; k <= half; ++k) {
    spec.freqs.push_back(static_cast<double>(k) / coeffs.T);
  }
  return spec;
}

BandSensitivity band_sensitivity(const std::map<std::string, double>& p_low_a,
                                 const std::map<std::string, double>& p_low_b) {
  if (p_low_a.size() != p_low_b.size()) {
    throw MismatchedUnitSets("partitions cover " + std::to_string(p_low_a.size()) + " and " +
                             std::to_string(p_low_b.size()) + " units");
  }
  std::vector<double> a, b;
  a.reserve(p_low_a.size());
  b.reserve(p_low_a.size());
  for (const auto& [fips, value] : p_low_a) {
    const auto it = p_low_b.find(fips);
    if (it == p_low_b.end()) {
      throw MismatchedUnitSets("unit " + fips + " is missing from the second partition");
    }
    a.push_back(value);
    b.push_back(it->second);
  }
  BandSensitivity out;
  out.n_units = static_cast<int>(a.size());
  out.spearman_rho = spearman(a, b);
  return out;
}

BandPower band_power(const SpectrumEstimate& spec, const BandPartition& partition) {
  BandPower bp;
  for (std::size_t i = 0; i < spec.freqs.size(); ++i) {
    const double f = spec.freqs[i];
    const double s = spec.smoothed[i];
    if (f <= partition.low_upper) {
      bp.p_low += s;
    } else if (f <= partition.mid_upper) {
      bp.p_mid += s;
    } else {
      bp.p_high += s;
    }
  }
  return bp;
}

}  // namespace specphen
