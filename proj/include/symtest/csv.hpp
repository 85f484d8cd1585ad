#pragma once

// Numeric matrix CSV: comma separated, '.' decimal point, at most one header
// row. The first line is a header when any of its cells is not a number.

#include <filesystem>
#include <iosfwd>

#include "symtest/linalg.hpp"

namespace symtest {

/// Throws ParseError (with the 1-based file line) on ragged rows,
/// non-numeric or non-finite cells, and EmptyInput when there are no rows.
SampleMatrix read_matrix_csv(std::istream& in);
/// As above; throws Error naming `path` when the file cannot be opened.
/// ParseError messages carry the line only; callers add the path.
SampleMatrix read_matrix_csv(const std::filesystem::path& path);

// Shortest round-trip representation of each value, no header.
void write_matrix_csv(std::ostream& out, const SampleMatrix& x);

}  // namespace symtest
