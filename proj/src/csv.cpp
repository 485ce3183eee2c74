#include "hessmh/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "hessmh/errors.hpp"

namespace hmh {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigurationError("not a number: '" + s + "'");
  }
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigurationError("no column named '" + name + "'");
}

namespace {

void write_field(std::ostream& os, const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) {
    os << f;
    return;
  }
  os << '"';
  for (char c : f) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

void write_record(std::ostream& os, const std::vector<std::string>& rec) {
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (i) os << ',';
    write_field(os, rec[i]);
  }
  os << '\n';
}

// Reads one record; quoted fields may span lines.
bool read_record(std::istream& is, std::vector<std::string>& out) {
  out.clear();
  std::string field;
  bool quoted = false, any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw ConfigurationError("unterminated quoted CSV field");
  if (!any) return false;
  out.push_back(std::move(field));
  return true;
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& table) {
  for (const auto& c : table.comments) os << "# " << c << '\n';
  write_record(os, table.header);
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) {
      throw ConfigurationError("CSV row width does not match the header");
    }
    write_record(os, r);
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::vector<std::string> rec;
  bool have_header = false;
  while (is.peek() == '#') {
    std::string line;
    std::getline(is, line);
    line.erase(0, 1);
    if (!line.empty() && line[0] == ' ') line.erase(0, 1);
    t.comments.push_back(line);
  }
  while (read_record(is, rec)) {
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (!have_header) {
      t.header = rec;
      have_header = true;
      continue;
    }
    if (rec.size() != t.header.size()) throw ConfigurationError("ragged CSV row");
    t.rows.push_back(rec);
  }
  if (!have_header) throw ConfigurationError("CSV has no header row");
  return t;
}

}  // namespace hmh
