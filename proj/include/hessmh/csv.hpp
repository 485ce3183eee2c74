#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmh {

/// Shortest decimal form that parses back to the same double, '.' decimal
/// point independent of locale. Non-finite values print as nan, inf, -inf.
std::string format_double(double v);

/// Inverse of format_double. Throws ConfigurationError on malformed input.
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> comments;  // "# ..." lines without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws ConfigurationError when absent.
  std::size_t column(const std::string& name) const;
};

/// Fields containing ',', '"' or newlines are quoted.
void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

}  // namespace hmh
