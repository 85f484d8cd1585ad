#include "symtest/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "symtest/errors.hpp"

namespace symtest {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_cell(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto res = std::from_chars(cell.data(), end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

}  // namespace

SampleMatrix read_matrix_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_number = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    std::size_t bad = cells.size();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_cell(cells[c], row[c])) {
        bad = c;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      cols = cells.size();
      if (bad != cells.size()) continue;  // header
    }
    if (cells.size() != cols) {
      throw ParseError(line_number, "expected " + std::to_string(cols) +
                                        " columns, found " + std::to_string(cells.size()));
    }
    if (bad != cells.size()) {
      throw ParseError(line_number, "column " + std::to_string(bad + 1) +
                                        ": not a number: '" + std::string(cells[bad]) + "'");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(row[c])) {
        throw ParseError(line_number,
                         "column " + std::to_string(c + 1) + ": value is not finite");
      }
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (in.bad()) throw Error("read error");
  if (rows == 0) throw EmptyInput("no data rows");
  return SampleMatrix(rows, cols, std::move(values));
}

SampleMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  return read_matrix_csv(f);
}

void write_matrix_csv(std::ostream& out, const SampleMatrix& x) {
  std::array<char, 64> buf{};
  std::string line;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j) line += ',';
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x(i, j));
      line.append(buf.data(), res.ptr);
    }
    line += '\n';
    out << line;
  }
}

}  // namespace symtest
