#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specphen/errors.hpp"
#include "specphen/rng.hpp"
#include "specphen/spectral.hpp"
#include "specphen/synth.hpp"
#include "test_support.hpp"

using namespace specphen;

namespace {

// Demeaned cosine at exact Fourier bin k, T = 19: |X(k)|^2 = (T/2)^2.
DemeanedSeries cosine_series(int bin, int t_len = 19) {
  std::vector<double> x(t_len);
  for (int t = 1; t <= t_len; ++t) {
    x[t - 1] = std::cos(2.0 * std::numbers::pi * bin * t / t_len);
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= t_len;
  DemeanedSeries d;
  d.fips = "13001";
  d.mean = mean;
  for (double v : x) d.values.push_back(v - mean);
  return d;
}

DemeanedSeries random_demeaned(CounterRng& rng, int t_len) {
  std::vector<double> x(t_len);
  for (auto& v : x) v = rng.normal();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= t_len;
  DemeanedSeries d;
  d.fips = "13001";
  d.mean = mean;
  for (double v : x) d.values.push_back(v - mean);
  return d;
}

}  // namespace

TEST_CASE("dft of the zero series is zero") {
  DemeanedSeries zero;
  zero.values.assign(19, 0.0);
  const auto coeffs = dft(zero);
  for (const auto& c : coeffs.values) CHECK(std::abs(c) == doctest::Approx(0.0));
}

TEST_CASE("dft concentrates a bin-4 cosine at k = 4 with |X|^2 = 90.25") {
  const auto coeffs = dft(cosine_series(4));
  CHECK(std::norm(coeffs.values[4]) == doctest::Approx(90.25).epsilon(1e-12));
  for (int k = 1; k <= 9; ++k) {
    if (k == 4) continue;
    CHECK(std::abs(coeffs.values[k]) <= 1e-9);
  }
}

TEST_CASE("dft matches the long-double naive summation oracle") {
  CounterRng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto series = random_demeaned(rng, 19);
    const auto got = dft(series);
    const auto want = testsupport::dft_oracle(series.values);
    for (int k = 0; k < 19; ++k) {
      CHECK(std::abs(got.values[k] - want[k]) <= 1e-10 * (1.0 + std::abs(want[k])));
    }
  }
}

TEST_CASE("dft output is conjugate-symmetric with a vanishing zero bin") {
  CounterRng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const int t_len = 2 + static_cast<int>(rng.below(30));
    const auto series = random_demeaned(rng, t_len);
    const auto coeffs = dft(series);
    double scale = 0.0;
    for (double v : series.values) scale = std::max(scale, std::fabs(v));
    CHECK(std::abs(coeffs.values[0]) <= 1e-9 * t_len * std::max(scale, 1.0));
    for (int k = 1; k < t_len; ++k) {
      CHECK(std::abs(coeffs.values[t_len - k] - std::conj(coeffs.values[k])) <=
            1e-9 * (1.0 + std::abs(coeffs.values[k])));
    }
  }
}

TEST_CASE("raw periodogram of the bin-4 cosine is 4.75 at k = 4") {
  const auto pgram = raw_periodogram(dft(cosine_series(4)));
  CHECK(pgram.size() == 9);
  CHECK(pgram[3] == doctest::Approx(90.25 / 19.0).epsilon(1e-12));
  for (int i = 0; i < 9; ++i) {
    if (i != 3) CHECK(pgram[i] <= 1e-18);
  }
}

TEST_CASE("Parseval identity holds on random series") {
  CounterRng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const int t_len = 4 + static_cast<int>(rng.below(28));
    const auto series = random_demeaned(rng, t_len);
    const auto coeffs = dft(series);
    double time_energy = 0.0;
    for (double v : series.values) time_energy += v * v;
    double freq_energy = 0.0;
    for (const auto& c : coeffs.values) freq_energy += std::norm(c);
    freq_energy /= t_len;
    CHECK(time_energy == doctest::Approx(freq_energy).epsilon(1e-9));
  }
}

TEST_CASE("taper with proportion 0 returns the series unchanged") {
  const auto series = cosine_series(3);
  const auto tapered = taper(series, 0.0);
  CHECK(tapered.values == series.values);
}

TEST_CASE("taper 0.1 at T = 19 halves the first and last points only") {
  // floor(0.1 * 19) = 1 tapered point per end; the split-cosine-bell
  // weight there is 0.5 * (1 - cos(pi * 0.5 / 1)) = 0.5.
  const auto series = cosine_series(3);
  const auto tapered = taper(series, 0.1);
  CHECK(tapered.values.front() == doctest::Approx(0.5 * series.values.front()).epsilon(1e-12));
  CHECK(tapered.values.back() == doctest::Approx(0.5 * series.values.back()).epsilon(1e-12));
  for (int i = 1; i < 18; ++i) {
    CHECK(tapered.values[i] == doctest::Approx(series.values[i]).epsilon(1e-15));
  }
}

TEST_CASE("tapered energy never exceeds the input energy") {
  CounterRng rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const auto series = random_demeaned(rng, 19);
    const double p = 0.5 * rng.uniform01();
    const auto tapered = taper(series, p);
    double before = 0.0, after = 0.0;
    for (double v : series.values) before += v * v;
    for (double v : tapered.values) after += v * v;
    CHECK(after <= before * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(taper(cosine_series(2), 0.6), InvalidProportion);
  CHECK_THROWS_AS(taper(cosine_series(2), -0.1), InvalidProportion);
}

TEST_CASE("smoothing with span 1 is the identity") {
  const std::vector<double> raw = {1.0, 5.0, 2.0, 8.0, 3.0};
  CHECK(smooth_periodogram(raw, {1}) == raw);
}

TEST_CASE("span-3 modified Daniell smoothing of a spike") {
  const std::vector<double> got = smooth_periodogram({0, 0, 9, 0, 0}, {3});
  const std::vector<double> want = {0.0, 2.25, 4.5, 2.25, 0.0};
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("smoothing matches the direct padded-convolution oracle") {
  CounterRng rng(35);
  const std::vector<std::vector<int>> span_sets = {{3}, {5}, {3, 3}, {3, 5}, {7}};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> raw(9);
    for (auto& v : raw) v = rng.uniform01() * 10.0;
    for (const auto& spans : span_sets) {
      const auto got = smooth_periodogram(raw, spans);
      const auto want = testsupport::smooth_oracle(raw, spans);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("smoothing preserves total mass under reflection") {
  CounterRng rng(36);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(12));
    std::vector<double> raw(n);
    for (auto& v : raw) v = rng.uniform01() * 10.0;
    const int max_span = 2 * n - 1;
    std::vector<int> spans = {static_cast<int>(rng.below((max_span + 1) / 2)) * 2 + 1};
    const auto smoothed = smooth_periodogram(raw, spans);
    double before = 0.0, after = 0.0;
    for (double v : raw) before += v;
    for (double v : smoothed) after += v;
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("smoothing a palindromic input yields a palindromic output") {
  const std::vector<double> raw = {1.0, 5.0, 2.0, 2.0, 5.0, 1.0};
  const auto smoothed = smooth_periodogram(raw, {3});
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(smoothed[i] == doctest::Approx(smoothed[raw.size() - 1 - i]).epsilon(1e-12));
  }
}

TEST_CASE("invalid spans are rejected") {
  const std::vector<double> raw(9, 1.0);
  CHECK_THROWS_AS(smooth_periodogram(raw, {2}), InvalidSpan);
  CHECK_THROWS_AS(smooth_periodogram(raw, {0}), InvalidSpan);
  CHECK_THROWS_AS(smooth_periodogram(raw, {-3}), InvalidSpan);
  CHECK_THROWS_AS(smooth_periodogram(raw, {19}), InvalidSpan);  // > 2*9 - 1
  CHECK_NOTHROW(smooth_periodogram(raw, {17}));
}

TEST_CASE("default band partition at T = 19 selects k {1,2}, {3,4,5}, {6..9}") {
  SpectrumEstimate spec;
  for (int k = 1; k <= 9; ++k) {
    spec.freqs.push_back(k / 19.0);
    spec.raw.push_back(0.0);
    spec.smoothed.push_back(static_cast<double>(k));  // identify bins by value
  }
  const BandPower bp = band_power(spec, BandPartition{});
  CHECK(bp.p_low == doctest::Approx(1 + 2));
  CHECK(bp.p_mid == doctest::Approx(3 + 4 + 5));
  CHECK(bp.p_high == doctest::Approx(6 + 7 + 8 + 9));
}

TEST_CASE("uniform density of 1.0 gives band powers (2, 3, 4)") {
  SpectrumEstimate spec;
  for (int k = 1; k <= 9; ++k) {
    spec.freqs.push_back(k / 19.0);
    spec.raw.push_back(1.0);
    spec.smoothed.push_back(1.0);
  }
  const BandPower bp = band_power(spec, BandPartition{});
  CHECK(bp.p_low == doctest::Approx(2.0));
  CHECK(bp.p_mid == doctest::Approx(3.0));
  CHECK(bp.p_high == doctest::Approx(4.0));
}

TEST_CASE("a bin-4 cosine puts at least 99% of its power in the mid band") {
  const auto spec = estimate_spectrum(cosine_series(4), 0.0, {1});
  const BandPower bp = band_power(spec, BandPartition{});
  CHECK(bp.p_mid >= 0.99 * bp.total());
}

TEST_CASE("band powers close to the total under random partitions") {
  CounterRng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const auto series = random_demeaned(rng, 19);
    const auto spec = estimate_spectrum(series, 0.1, {3});
    const double low = 0.05 + 0.3 * rng.uniform01();
    const double mid = low + 0.01 + (0.49 - low - 0.01) * rng.uniform01();
    const BandPower bp = band_power(spec, BandPartition{low, mid});
    double total = 0.0;
    for (double s : spec.smoothed) total += s;
    CHECK(bp.total() == doctest::Approx(total).epsilon(1e-9));
  }
}

TEST_CASE("taper 0 and spans {1} reduce the full path to the raw periodogram") {
  CounterRng rng(38);
  const auto series = random_demeaned(rng, 19);
  const auto spec = estimate_spectrum(series, 0.0, {1});
  const auto pgram = raw_periodogram(dft(series));
  REQUIRE(spec.smoothed.size() == pgram.size());
  for (std::size_t i = 0; i < pgram.size(); ++i) {
    CHECK(spec.smoothed[i] == doctest::Approx(pgram[i]).epsilon(1e-15));
    CHECK(spec.raw[i] == doctest::Approx(pgram[i]).epsilon(1e-15));
  }
}

TEST_CASE("band_sensitivity: identical and reversed rankings") {
  std::map<std::string, double> a, b, r;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "u" + std::to_string(i);
    a[id] = i + 1.0;
    b[id] = 2.0 * (i + 1.0);  // same order
    r[id] = 10.0 - i;         // reversed
  }
  CHECK(band_sensitivity(a, b).spearman_rho == doctest::Approx(1.0));
  CHECK(band_sensitivity(a, r).spearman_rho == doctest::Approx(-1.0));

  std::map<std::string, double> short_map(a);
  short_map.erase("u0");
  CHECK_THROWS_AS(band_sensitivity(a, short_map), MismatchedUnitSets);
}

TEST_CASE("trend-dominated panel keeps p_low rankings stable across partitions") {
  SynthSpec spec;
  spec.kind = SynthKind::trend_plus_noise;
  spec.seed = 99;
  spec.T = 19;
  spec.n_units = 100;
  spec.parameters["noise_sd"] = 0.5;
  const Panel panel = generate_panel(spec);

  const BandPartition base{0.15, 0.30};
  const BandPartition alt{0.12, 0.28};
  std::map<std::string, double> p_base, p_alt;
  for (const auto& series : panel.series) {
    const auto est = estimate_spectrum(demean(series), 0.1, {3});
    p_base[series.fips] = band_power(est, base).p_low;
    p_alt[series.fips] = band_power(est, alt).p_low;
  }
  CHECK(band_sensitivity(p_base, p_alt).spearman_rho >= 0.95);
}
