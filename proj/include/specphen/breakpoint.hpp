#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "specphen/panel.hpp"

namespace specphen {

struct SegmentFit {
  double alpha = 0.0;  // intercept
  double beta = 0.0;   // slope per unit time index
  double rss = 0.0;
};

// Simple OLS of y on the integer time index over the inclusive 1-based
// interval [first, last].
SegmentFit fit_segment(std::span<const double> y, int first, int last);

struct BreakFit {
  std::string fips;
  int tau_index = 0;   // last time index of the pre-break segment (1-based)
  int break_year = 0;  // start_year + tau_index - 1
  double alpha1 = 0.0, beta1 = 0.0;
  double alpha2 = 0.0, beta2 = 0.0;
  double delta_beta = 0.0;  // beta2 - beta1
  double rss = 0.0;
  std::map<int, double> candidate_rss;  // tau -> total RSS, all admissible tau
};

// Exhaustive single-break search over tau in {h, ..., T-h} with both
// segments refit at every candidate; equal-RSS ties resolve to the
// earliest tau.
BreakFit find_breakpoint(const CountySeries& series, int h);

struct ClusterBreakSummary {
  int cluster = 0;
  int n_units = 0;   // units assigned to the cluster
  int n_fitted = 0;  // of those, units with a break fit
  double detection_proportion = 0.0;
  int median_break_year = 0;  // lower median for even counts
  double mean_delta_beta = 0.0;
  std::vector<double> delta_beta_values;
};

std::vector<ClusterBreakSummary> summarize_breaks(const std::vector<BreakFit>& fits,
                                                  const std::map<std::string, int>& assignments);

}  // namespace specphen
