#include "specphen/breakpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "specphen/errors.hpp"

namespace specphen {

SegmentFit fit_segment(std::span<const double> y, int first, int last) {
  const int len = last - first + 1;
  if (first < 1 || last > static_cast<int>(y.size()) || len < 2) {
    throw DegenerateInterval("segment [" + std::to_string(first) + ", " + std::to_string(last) +
                             "] must lie in range and contain >= 2 points");
  }

  double st = 0.0, sy = 0.0;
  for (int t = first; t <= last; ++t) {
    st += t;
    sy += y[t - 1];
  }
  const double t_mean = st / len;
  const double y_mean = sy / len;

  double sxx = 0.0, sxy = 0.0;
  for (int t = first; t <= last; ++t) {
    const double dt = t - t_mean;
    sxx += dt * dt;
    sxy += dt * (y[t - 1] - y_mean);
  }

  SegmentFit fit;
  fit.beta = sxy / sxx;
  fit.alpha = y_mean - fit.beta * t_mean;
  double rss = 0.0;
  for (int t = first; t <= last; ++t) {
    const double r = y[t - 1] - (fit.alpha + fit.beta * t);
    rss += r * r;
  }
  fit.rss = rss;
  return fit;
}

BreakFit find_breakpoint(const CountySeries& series, int h) {
  const int t_len = series.size();
  if (h < 2) throw Error("minimum segment length h must be >= 2");
  if (t_len < 2 * h) {
    throw SeriesTooShortForBreak("unit " + series.fips + " has T=" + std::to_string(t_len) +
                                 " < 2h=" + std::to_string(2 * h));
  }

  BreakFit best;
  best.fips = series.fips;
  double best_rss = std::numeric_limits<double>::infinity();
  for (int tau = h; tau <= t_len - h; ++tau) {
    const SegmentFit pre = fit_segment(series.rates, 1, tau);
    const SegmentFit post = fit_segment(series.rates, tau + 1, t_len);
    const double rss = pre.rss + post.rss;
    best.candidate_rss[tau] = rss;
    if (rss < best_rss) {  // strict: equal RSS keeps the earliest tau
      best_rss = rss;
      best.tau_index = tau;
      best.alpha1 = pre.alpha;
      best.beta1 = pre.beta;
      best.alpha2 = post.alpha;
      best.beta2 = post.beta;
    }
  }
  best.rss = best_rss;
  best.delta_beta = best.beta2 - best.beta1;
  best.break_year = series.years.front() + best.tau_index - 1;
  return best;
}

std::vector<ClusterBreakSummary> summarize_breaks(const std::vector<BreakFit>& fits,
                                                  const std::map<std::string, int>& assignments) {
  std::map<int, ClusterBreakSummary> by_cluster;
  for (const auto& [fips, cluster] : assignments) {
    auto& s = by_cluster[cluster];
    s.cluster = cluster;
    ++s.n_units;
  }

  std::map<int, std::vector<int>> years;
  for (const auto& fit : fits) {
    const auto it = assignments.find(fit.fips);
    if (it == assignments.end()) {
      throw Error("fitted unit " + fit.fips + " has no cluster assignment");
    }
    auto& s = by_cluster[it->second];
    ++s.n_fitted;
    s.delta_beta_values.push_back(fit.delta_beta);
    years[it->second].push_back(fit.break_year);
  }

  std::vector<ClusterBreakSummary> out;
  for (auto& [cluster, s] : by_cluster) {
    s.detection_proportion = (s.n_units > 0) ? static_cast<double>(s.n_fitted) / s.n_units : 0.0;
    if (s.n_fitted > 0) {
      auto& ys = years[cluster];
      std::sort(ys.begin(), ys.end());
      s.median_break_year = ys[(ys.size() - 1) / 2];  // lower median
      double sum = 0.0;
      for (double d : s.delta_beta_values) sum += d;
      s.mean_delta_beta = sum / s.n_fitted;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace specphen
