#include "specphen/panel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "specphen/csv.hpp"
#include "specphen/errors.hpp"

namespace specphen {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Matching key: lowercase, trimmed, trailing " county" removed.
std::string match_key(const std::string& name) {
  std::string key = to_lower(trim(name));
  static const std::string suffix = " county";
  if (key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0) {
    key.erase(key.size() - suffix.size());
    key = trim(key);
  }
  return key;
}

std::string normalize_fips(const std::string& raw) {
  std::string f = trim(raw);
  const bool digits = !f.empty() && std::all_of(f.begin(), f.end(), [](unsigned char c) {
                        return std::isdigit(c);
                      });
  if (digits && f.size() < 5) f.insert(f.begin(), 5 - f.size(), '0');
  return f;
}

double parse_rate(const std::string& cell, const std::string& fips, int year) {
  const std::string s = trim(cell);
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw NonNumericRate("non-numeric rate '" + cell + "' for unit " + fips + " year " +
                         std::to_string(year));
  }
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidRate("rate must be finite and >= 0, got '" + cell + "' for unit " + fips +
                      " year " + std::to_string(year));
  }
  return v;
}

int parse_year(const std::string& cell) {
  const std::string s = trim(cell);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("non-integer year '" + cell + "'");
  }
  return v;
}

}  // namespace

const CountySeries* Panel::find(const std::string& fips) const {
  for (const auto& s : series) {
    if (s.fips == fips) return &s;
  }
  return nullptr;
}

Panel load_panel(const std::filesystem::path& csv_path, const CsvSchema& schema) {
  const CsvTable table = read_csv(csv_path);

  const int ci_name = table.column(schema.name_col);
  const int ci_fips = table.column(schema.fips_col);
  const int ci_year = table.column(schema.year_col);
  const int ci_rate = table.column(schema.rate_col);
  const std::pair<int, const std::string*> required[] = {
      {ci_name, &schema.name_col},
      {ci_fips, &schema.fips_col},
      {ci_year, &schema.year_col},
      {ci_rate, &schema.rate_col},
  };
  for (const auto& [idx, col] : required) {
    if (idx < 0) throw MissingColumn("CSV is missing required column '" + *col + "'");
  }

  struct UnitRows {
    std::string name;
    std::map<int, double> by_year;
  };
  std::map<std::string, UnitRows> units;  // keyed by fips, ordered

  int year_min = 0, year_max = 0;
  bool any = false;
  for (const auto& row : table.rows) {
    const auto need = static_cast<std::size_t>(std::max({ci_name, ci_fips, ci_year, ci_rate})) + 1;
    if (row.size() < need) throw Error("short CSV row (" + std::to_string(row.size()) + " cells)");
    const std::string fips = normalize_fips(row[ci_fips]);
    if (fips.empty()) throw Error("empty fips code in CSV row");
    const int year = parse_year(row[ci_year]);
    const double rate = parse_rate(row[ci_rate], fips, year);

    auto& unit = units[fips];
    if (unit.name.empty()) unit.name = trim(row[ci_name]);
    if (!unit.by_year.emplace(year, rate).second) {
      throw DuplicateYearForUnit("unit " + fips + " has duplicate rows for year " +
                                 std::to_string(year));
    }
    if (!any) {
      year_min = year_max = year;
      any = true;
    } else {
      year_min = std::min(year_min, year);
      year_max = std::max(year_max, year);
    }
  }
  if (!any) throw Error("panel CSV has no data rows");

  Panel panel;
  panel.start_year = year_min;
  panel.n_years = year_max - year_min + 1;
  for (auto& [fips, unit] : units) {
    CountySeries s;
    s.fips = fips;
    s.name = unit.name;
    for (int y = year_min; y <= year_max; ++y) {
      auto it = unit.by_year.find(y);
      if (it == unit.by_year.end()) {
        throw UnbalancedPanel("unit " + (unit.name.empty() ? fips : unit.name) + " (" + fips +
                              ") is missing year " + std::to_string(y));
      }
      s.years.push_back(y);
      s.rates.push_back(it->second);
    }
    panel.series.push_back(std::move(s));
  }
  return panel;
}

Panel harmonize_names(const Panel& panel, const std::vector<std::string>& canonical) {
  if (canonical.empty()) throw Error("canonical name list is empty");

  std::map<std::string, std::vector<std::string>> by_key;
  for (const auto& c : canonical) by_key[match_key(c)].push_back(c);

  Panel out = panel;
  out.canonical_names = canonical;
  for (auto& s : out.series) {
    auto it = by_key.find(match_key(s.name));
    if (it == by_key.end()) {
      throw UnmatchedUnit("unit name '" + s.name + "' (" + s.fips +
                          ") matches no canonical entry");
    }
    if (it->second.size() > 1) {
      throw AmbiguousMatch("unit name '" + s.name + "' matches " +
                           std::to_string(it->second.size()) + " canonical entries");
    }
    s.name = it->second.front();
  }
  return out;
}

DemeanedSeries demean(const CountySeries& series) {
  const int t = series.size();
  if (t < 2) {
    throw SeriesTooShort("demean requires at least 2 observations, unit " + series.fips +
                         " has " + std::to_string(t));
  }
  double sum = 0.0;
  for (double r : series.rates) sum += r;
  DemeanedSeries out;
  out.fips = series.fips;
  out.mean = sum / t;
  out.values.reserve(t);
  for (double r : series.rates) out.values.push_back(r - out.mean);
  return out;
}

std::vector<std::string> load_name_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open name list: " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = trim(line);
    if (!line.empty()) names.push_back(line);
  }
  return names;
}

}  // namespace specphen
