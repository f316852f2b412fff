#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "specphen/errors.hpp"
#include "specphen/inference.hpp"
#include "specphen/rng.hpp"
#include "test_support.hpp"

using namespace specphen;

TEST_CASE("ols recovers an exact line with zero residual") {
  std::vector<double> x, y;
  for (int t = 0; t < 12; ++t) {
    x.push_back(t);
    y.push_back(3.0 + 2.0 * t);
  }
  const OlsFit fit = ols(y, {{"x", x}});
  CHECK(fit.coefficient("(intercept)") == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.coefficient("x") == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.rss == doctest::Approx(0.0));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.df_residual == 10);
}

TEST_CASE("slopes vanish when y is orthogonal to the regressors") {
  // x sums to zero and y is constant, so every non-intercept coefficient
  // is zero and the intercept is mean(y).
  const std::vector<double> x = {-2, -1, 0, 1, 2};
  const std::vector<double> y = {7, 7, 7, 7, 7};
  const OlsFit fit = ols(y, {{"x", x}});
  CHECK(fit.coefficient("x") == doctest::Approx(0.0));
  CHECK(fit.coefficient("(intercept)") == doctest::Approx(7.0));
}

TEST_CASE("ols matches the Gram-Schmidt QR oracle on random designs") {
  CounterRng rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 50;
    std::vector<double> y(n), a(n), b(n), c(n), ones(n, 1.0);
    for (int i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
      c[i] = rng.normal();
      y[i] = 1.5 - 0.7 * a[i] + 0.2 * b[i] + rng.normal();
    }
    const OlsFit fit = ols(y, {{"a", a}, {"b", b}, {"c", c}});
    const auto oracle = testsupport::qr_ols_oracle(y, {ones, a, b, c});
    for (int j = 0; j < 4; ++j) {
      CHECK(fit.coefficients[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
    }
  }
}

TEST_CASE("ols residuals are orthogonal to every design column") {
  CounterRng rng(102);
  const int n = 40;
  std::vector<double> y(n), a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rng.normal() * 3.0;
    b[i] = rng.uniform01();
    y[i] = 2.0 + a[i] - 4.0 * b[i] + rng.normal();
  }
  const OlsFit fit = ols(y, {{"a", a}, {"b", b}});
  std::vector<double> resid(n);
  for (int i = 0; i < n; ++i) {
    resid[i] = y[i] - (fit.coefficients[0] + fit.coefficients[1] * a[i] +
                       fit.coefficients[2] * b[i]);
  }
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::fabs(v));
  for (const auto& col : {std::vector<double>(n, 1.0), a, b}) {
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += resid[i] * col[i];
    CHECK(std::fabs(dot) <= 1e-8 * n * scale);
  }
}

TEST_CASE("ols rejects rank-deficient and undersized problems") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> x2 = {2, 4, 6, 8, 10};  // collinear
  std::vector<double> y = {1, 2, 2, 3, 4};
  CHECK_THROWS_AS(ols(y, {{"x", x}, {"x2", x2}}), RankDeficientDesign);
  std::vector<double> tiny_y = {1, 2};
  std::vector<double> tiny_x = {1, 2};
  CHECK_THROWS_AS(ols(tiny_y, {{"x", tiny_x}}), TooFewObservations);
}

TEST_CASE("nested F: equal RSS gives F = 0 and p = 1") {
  // The added column is orthogonal to y's residual-generating structure:
  // use y exactly linear in x, add a junk column; both models fit exactly.
  std::vector<double> x, y, junk;
  CounterRng rng(103);
  for (int t = 0; t < 20; ++t) {
    x.push_back(t);
    y.push_back(1.0 + 0.5 * t);
    junk.push_back(rng.normal());
  }
  const OlsFit reduced = ols(y, {{"x", x}});
  OlsFit full = ols(y, {{"x", x}, {"junk", junk}});
  // Force exact equality to pin the degenerate branch.
  full.rss = reduced.rss;
  const NestedFResult res = nested_f_test(reduced, full);
  CHECK(res.f_statistic == doctest::Approx(0.0));
  CHECK(res.p_value == doctest::Approx(1.0));
}

TEST_CASE("nested F: perfect full fit reports the probability floor") {
  CounterRng rng(104);
  const int n = 15;
  std::vector<double> x(n), z(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.normal();
    z[i] = rng.normal();
    y[i] = 2.0 * z[i];  // exactly the added column
  }
  const OlsFit reduced = ols(y, {{"x", x}});
  const OlsFit full = ols(y, {{"x", x}, {"z", z}});
  const NestedFResult res = nested_f_test(reduced, full);
  CHECK(res.below_floor);
  CHECK(res.p_value == doctest::Approx(1e-300));
}

TEST_CASE("nested F rejects non-nested models") {
  std::vector<double> x, z, y;
  CounterRng rng(105);
  for (int t = 0; t < 20; ++t) {
    x.push_back(rng.normal());
    z.push_back(rng.normal());
    y.push_back(rng.normal());
  }
  const OlsFit a = ols(y, {{"x", x}});
  const OlsFit b = ols(y, {{"z", z}});
  CHECK_THROWS_AS(nested_f_test(a, b), NotNested);
}

TEST_CASE("nested F is invariant to rescaling y") {
  CounterRng rng(106);
  const int n = 30;
  std::vector<double> x(n), z(n), y(n), y_scaled(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.normal();
    z[i] = rng.normal();
    y[i] = 1.0 + x[i] + 0.3 * z[i] + rng.normal();
    y_scaled[i] = 17.5 * y[i];
  }
  const NestedFResult base =
      nested_f_test(ols(y, {{"x", x}}), ols(y, {{"x", x}, {"z", z}}));
  const NestedFResult scaled =
      nested_f_test(ols(y_scaled, {{"x", x}}), ols(y_scaled, {{"x", x}, {"z", z}}));
  CHECK(scaled.f_statistic == doctest::Approx(base.f_statistic).epsilon(1e-9));
}

TEST_CASE("F upper tail matches the quadrature oracle at tabulated points") {
  const struct {
    double df1, df2, x;
  } points[] = {
      {1, 1, 0.5},  {1, 1, 4.0},   {1, 5, 2.0},   {1, 10, 6.0},  {1, 97, 10.0},
      {2, 2, 1.0},  {2, 10, 3.5},  {2, 30, 5.0},  {3, 3, 0.25},  {3, 12, 2.2},
      {4, 8, 1.7},  {4, 40, 3.3},  {5, 5, 5.0},   {5, 20, 0.9},  {6, 60, 2.8},
      {8, 15, 1.2}, {10, 10, 2.5}, {10, 90, 1.8}, {12, 25, 0.6}, {20, 40, 2.1},
  };
  int checked = 0;
  for (const auto& pt : points) {
    const double got = f_upper_tail(pt.x, pt.df1, pt.df2);
    // Oracle route: P(F > x) = I_b(df2/2, df1/2) with b = df2/(df2+df1 x),
    // evaluated by adaptive Simpson quadrature of the beta density.
    const double want =
        testsupport::incomplete_beta_oracle(pt.df2 / (pt.df2 + pt.df1 * pt.x), pt.df2 / 2.0,
                                            pt.df1 / 2.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("null p-values of the nested F test are uniform (KS check)") {
  CounterRng rng(107);
  const int n_sims = 500;
  const int n = 40;
  std::vector<double> pvals;
  pvals.reserve(n_sims);
  for (int sim = 0; sim < n_sims; ++sim) {
    std::vector<double> x(n), z(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      z[i] = rng.normal();  // pure-noise column
      y[i] = 0.5 + 2.0 * x[i] + rng.normal();
    }
    const NestedFResult res =
        nested_f_test(ols(y, {{"x", x}}), ols(y, {{"x", x}, {"z", z}}));
    pvals.push_back(res.p_value);
  }
  std::sort(pvals.begin(), pvals.end());
  double ks = 0.0;
  for (int i = 0; i < n_sims; ++i) {
    const double ecdf_hi = static_cast<double>(i + 1) / n_sims;
    const double ecdf_lo = static_cast<double>(i) / n_sims;
    ks = std::max({ks, std::fabs(ecdf_hi - pvals[i]), std::fabs(pvals[i] - ecdf_lo)});
  }
  CHECK(ks < 1.628 / std::sqrt(static_cast<double>(n_sims)));  // 1% critical value
}

TEST_CASE("spearman basics") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> up, down;
  for (double v : x) {
    up.push_back(v * v);       // strictly increasing in x
    down.push_back(10.0 - v);  // strictly decreasing
  }
  CHECK(spearman(x, up) == doctest::Approx(1.0));
  CHECK(spearman(x, down) == doctest::Approx(-1.0));
}

TEST_CASE("spearman handles ties with mid-ranks") {
  const std::vector<double> x = {1, 2, 2, 4};
  const std::vector<double> y = {10, 20, 20, 40};
  CHECK(spearman(x, y) == doctest::Approx(1.0));
}

TEST_CASE("spearman error paths") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> longer = {1, 2, 3, 4};
  const std::vector<double> constant = {5, 5, 5};
  CHECK_THROWS_AS(spearman(x, longer), LengthMismatch);
  CHECK_THROWS_AS(spearman(x, constant), ConstantInput);
  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(spearman(two, two), TooFewObservations);
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
  CounterRng rng(108);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 20;
    std::vector<double> x(n), y(n), gx(n), hy(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
      gx[i] = std::exp(0.5 * x[i]) + 3.0;  // strictly increasing map
      hy[i] = std::atan(y[i]) * 2.0;
    }
    const double base = spearman(x, y);
    CHECK(spearman(gx, hy) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("midranks average tied positions") {
  const std::vector<double> v = {3.0, 1.0, 3.0, 2.0};
  const auto r = midranks(v);
  CHECK(r[0] == doctest::Approx(3.5));
  CHECK(r[1] == doctest::Approx(1.0));
  CHECK(r[2] == doctest::Approx(3.5));
  CHECK(r[3] == doctest::Approx(2.0));
}
