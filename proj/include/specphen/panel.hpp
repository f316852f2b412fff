#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace specphen {

// One geographic unit's aligned annual trajectory.
struct CountySeries {
  std::string fips;  // 5-character geographic code
  std::string name;
  std::vector<int> years;    // strictly increasing, step 1
  std::vector<double> rates;  // deaths per 100,000, finite, >= 0

  int size() const { return static_cast<int>(rates.size()); }
};

// Balanced unit-by-year panel: every series spans exactly
// [start_year, start_year + n_years - 1] and fips codes are unique.
struct Panel {
  std::vector<CountySeries> series;
  int start_year = 0;
  int n_years = 0;
  std::vector<std::string> canonical_names;

  const CountySeries* find(const std::string& fips) const;
};

struct DemeanedSeries {
  std::string fips;
  std::vector<double> values;  // sums to ~0
  double mean = 0.0;           // the removed unit mean
};

// Column mapping for panel CSV input.
struct CsvSchema {
  std::string name_col = "name";
  std::string fips_col = "fips";
  std::string year_col = "year";
  std::string rate_col = "rate";
};

// Loads one row per (unit, year) and validates the balanced-panel
// contract over the year window observed in the file.
Panel load_panel(const std::filesystem::path& csv_path, const CsvSchema& schema = {});

// Replaces every series name by its canonical match. Matching is
// case-insensitive and strips a trailing " County".
Panel harmonize_names(const Panel& panel, const std::vector<std::string>& canonical);

DemeanedSeries demean(const CountySeries& series);

// Newline-delimited name list (blank lines skipped).
std::vector<std::string> load_name_list(const std::filesystem::path& path);

}  // namespace specphen
