#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace specphen {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1 when absent.
  int column(const std::string& name) const;
};

// RFC-4180-style reader: header row, comma delimiter, double-quote
// escaping, tolerant of CRLF endings.
CsvTable read_csv(const std::filesystem::path& path);

// Formats a double with 17 significant digits so that parsing the text
// recovers the exact bit pattern.
std::string format_double(double v);

// One CSV line from already-formatted cells, quoting where needed.
std::string csv_line(const std::vector<std::string>& cells);

}  // namespace specphen
