#include "specphen/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "specphen/errors.hpp"

namespace specphen {

double OlsFit::coefficient(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return coefficients[i];
  }
  throw Error("no coefficient named '" + name + "'");
}

OlsFit ols(std::span<const double> y,
           const std::vector<std::pair<std::string, std::vector<double>>>& columns,
           bool add_intercept) {
  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(columns.size()) + (add_intercept ? 1 : 0);
  if (p == 0) throw Error("ols requires at least one column");
  if (n <= p) {
    throw TooFewObservations("ols needs n > p, got n=" + std::to_string(n) +
                             " p=" + std::to_string(p));
  }
  for (const auto& [name, col] : columns) {
    if (static_cast<int>(col.size()) != n) {
      throw LengthMismatch("column '" + name + "' has length " + std::to_string(col.size()) +
                           ", expected " + std::to_string(n));
    }
  }

  // Design matrix, row-major.
  std::vector<double> x(static_cast<std::size_t>(n) * p);
  std::vector<std::string> names;
  int c0 = 0;
  if (add_intercept) {
    names.emplace_back("(intercept)");
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i) * p] = 1.0;
    c0 = 1;
  }
  for (int j = 0; j < static_cast<int>(columns.size()); ++j) {
    names.push_back(columns[j].first);
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i) * p + c0 + j] = columns[j].second[i];
    }
  }

  // Normal equations A b = g with A = X'X, g = X'y.
  std::vector<double> a(static_cast<std::size_t>(p) * p, 0.0);
  std::vector<double> g(p, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = &x[static_cast<std::size_t>(i) * p];
    for (int j = 0; j < p; ++j) {
      g[j] += row[j] * y[i];
      for (int k = j; k < p; ++k) a[static_cast<std::size_t>(j) * p + k] += row[j] * row[k];
    }
  }
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < j; ++k) {
      a[static_cast<std::size_t>(j) * p + k] = a[static_cast<std::size_t>(k) * p + j];
    }
  }

  double max_diag = 0.0;
  for (int j = 0; j < p; ++j) {
    max_diag = std::max(max_diag, a[static_cast<std::size_t>(j) * p + j]);
  }
  const double pivot_floor = 1e-10 * std::max(max_diag, 1e-300);

  // Gaussian elimination with partial pivoting.
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  for (int col = 0; col < p; ++col) {
    int best = col;
    for (int r = col + 1; r < p; ++r) {
      if (std::fabs(a[static_cast<std::size_t>(r) * p + col]) >
          std::fabs(a[static_cast<std::size_t>(best) * p + col])) {
        best = r;
      }
    }
    if (best != col) {
      for (int k = 0; k < p; ++k) {
        std::swap(a[static_cast<std::size_t>(col) * p + k], a[static_cast<std::size_t>(best) * p + k]);
      }
      std::swap(g[col], g[best]);
    }
    const double pivot = a[static_cast<std::size_t>(col) * p + col];
    if (std::fabs(pivot) < pivot_floor) {
      throw RankDeficientDesign("design matrix is rank deficient (pivot " +
                                std::to_string(pivot) + " below tolerance)");
    }
    for (int r = col + 1; r < p; ++r) {
      const double m = a[static_cast<std::size_t>(r) * p + col] / pivot;
      if (m == 0.0) continue;
      for (int k = col; k < p; ++k) {
        a[static_cast<std::size_t>(r) * p + k] -= m * a[static_cast<std::size_t>(col) * p + k];
      }
      g[r] -= m * g[col];
    }
  }
  std::vector<double> beta(p, 0.0);
  for (int r = p - 1; r >= 0; --r) {
    double acc = g[r];
    for (int k = r + 1; k < p; ++k) acc -= a[static_cast<std::size_t>(r) * p + k] * beta[k];
    beta[r] = acc / a[static_cast<std::size_t>(r) * p + r];
  }

  OlsFit fit;
  fit.names = std::move(names);
  fit.coefficients = std::move(beta);
  fit.n = n;
  fit.df_residual = n - p;

  double rss = 0.0;
  double y_mean = 0.0;
  for (int i = 0; i < n; ++i) y_mean += y[i];
  y_mean /= n;
  double tss = 0.0;
  for (int i = 0; i < n; ++i) {
    double pred = 0.0;
    const double* row = &x[static_cast<std::size_t>(i) * p];
    for (int j = 0; j < p; ++j) pred += row[j] * fit.coefficients[j];
    const double resid = y[i] - pred;
    rss += resid * resid;
    const double cen = add_intercept ? y[i] - y_mean : y[i];
    tss += cen * cen;
  }
  fit.rss = rss;
  fit.r_squared = (tss > 0.0) ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
  return fit;
}

NestedFResult nested_f_test(const OlsFit& reduced, const OlsFit& full) {
  if (reduced.n != full.n) {
    throw NotNested("models were fit on different sample sizes");
  }
  for (const auto& name : reduced.names) {
    if (std::find(full.names.begin(), full.names.end(), name) == full.names.end()) {
      throw NotNested("reduced-model column '" + name + "' is absent from the full model");
    }
  }
  const int df1 = reduced.df_residual - full.df_residual;
  if (df1 < 1) throw NotNested("full model adds no parameters");
  const int df2 = full.df_residual;
  if (df2 < 1) throw NotNested("full model has no residual degrees of freedom");
  const double scale = std::max({reduced.rss, full.rss, 1.0});
  if (full.rss > reduced.rss + 1e-9 * scale) {
    throw NotNested("full-model RSS exceeds reduced-model RSS; models are not nested");
  }

  NestedFResult res;
  res.df1 = df1;
  res.df2 = df2;

  const double rss_drop = std::max(0.0, reduced.rss - full.rss);
  if (full.rss <= 0.0 || full.rss < 1e-300 * scale) {
    // Perfect full fit: the statistic diverges, report the floor.
    res.f_statistic = std::numeric_limits<double>::infinity();
    res.p_value = kPValueFloor;
    res.below_floor = true;
    return res;
  }
  res.f_statistic = (rss_drop / df1) / (full.rss / df2);
  double p = f_upper_tail(res.f_statistic, df1, df2);
  if (p < kPValueFloor) {
    res.p_value = kPValueFloor;
    res.below_floor = true;
  } else {
    res.p_value = std::min(p, 1.0);
  }
  return res;
}

std::vector<double> midranks(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });

  std::vector<double> ranks(n, 0.0);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;  // average of 1-based positions
    for (int k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("spearman inputs have lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()));
  }
  if (x.size() < 3) throw TooFewObservations("spearman requires length >= 3");

  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const int n = static_cast<int>(x.size());
  const double mean = (n + 1) / 2.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw ConstantInput("spearman is undefined for a constant input");
  }
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz iteration.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double f_upper_tail(double f, double df1, double df2) {
  if (!(df1 > 0.0 && df2 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = df2 / (df2 + df1 * f);
  return regularized_incomplete_beta(x, df2 / 2.0, df1 / 2.0);
}

}  // namespace specphen
