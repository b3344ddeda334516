#include "bellcompat/family_csv.hpp"

#include "bellcompat/analysis.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace bellcompat {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t parse_index(std::string_view field, const std::string& source, std::size_t line) {
  std::size_t value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(source, line,
                     "variable index is not a nonnegative integer: '" + std::string(field) + "'");
  }
  if (value >= 63) throw ParseError(source, line, "variable index too large");
  return value;
}

}  // namespace

MarginalFamily parse_family_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
  std::size_t line_no = 1;
  if (trim(line) != kFamilyHeader) {
    throw ParseError(source, line_no,
                     "expected header '" + std::string(kFamilyHeader) + "', found '" +
                         std::string(trim(line)) + "'");
  }
  MarginalFamily family;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = row.find(',', start);
      fields.push_back(trim(row.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) {
      throw ParseError(source, line_no, "expected 6 fields, found " + std::to_string(fields.size()));
    }
    const std::size_t i = parse_index(fields[0], source, line_no);
    const std::size_t j = parse_index(fields[1], source, line_no);
    std::array<Rational, 4> cells;
    for (std::size_t k = 0; k < 4; ++k) {
      try {
        cells[k] = parse_rational(fields[2 + k]);
      } catch (const std::invalid_argument&) {
        throw ParseError(source, line_no,
                         "probability is not a number: '" + std::string(fields[2 + k]) + "'");
      }
    }
    family.n = std::max({family.n, i + 1, j + 1});
    family.tables.emplace_back(i, j, cells);
  }
  if (family.tables.empty()) throw ParseError(source, line_no + 1, "no tables after the header");
  return family;
}

MarginalFamily parse_family_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  return parse_family_csv(in, path.string());
}

void write_family_csv(std::ostream& out, const MarginalFamily& family) {
  out << kFamilyHeader << '\n';
  for (const auto& t : family.tables) {
    out << t.first() << ',' << t.second();
    for (const auto& c : t.cells()) out << ',' << to_string(c);
    out << '\n';
  }
}

}  // namespace bellcompat
