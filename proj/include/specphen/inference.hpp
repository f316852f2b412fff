#pragma once

#include <span>
#include <string>
#include <vector>

namespace specphen {

struct OlsFit {
  std::vector<std::string> names;  // first entry is "(intercept)" when present
  std::vector<double> coefficients;
  double rss = 0.0;
  int df_residual = 0;
  int n = 0;
  double r_squared = 0.0;

  double coefficient(const std::string& name) const;
};

struct NestedFResult {
  double f_statistic = 0.0;
  int df1 = 0;
  int df2 = 0;
  double p_value = 1.0;
  // Set when the true p underflows the reporting floor (1e-300); p_value
  // then holds the floor itself.
  bool below_floor = false;
};

inline constexpr double kPValueFloor = 1e-300;

// Least squares of y on the named columns (an intercept column is
// prepended unless add_intercept is false), solved by pivoted elimination
// on the normal equations.
OlsFit ols(std::span<const double> y,
           const std::vector<std::pair<std::string, std::vector<double>>>& columns,
           bool add_intercept = true);

// ANOVA comparison of a reduced model against a full model that nests it.
NestedFResult nested_f_test(const OlsFit& reduced, const OlsFit& full);

// Spearman rank correlation with mid-ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Upper-tail probability P(F > f) for the F distribution, evaluated via
// the regularized incomplete beta function.
double f_upper_tail(double f, double df1, double df2);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// Mid-ranks (average ranks for ties), 1-based.
std::vector<double> midranks(std::span<const double> values);

}  // namespace specphen
