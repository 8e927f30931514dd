#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mrcd/types.hpp"

namespace mrcd {

/// Reads a comma-separated file with a header row. Every cell must parse
/// as a number, except the optional label column named `id_column`.
/// Throws IoError for unreadable files, ragged rows or non-numeric cells.
DataMatrix read_data_csv(const std::string& path,
                         const std::optional<std::string>& id_column = {});

DataMatrix parse_data_csv(std::istream& in,
                          const std::optional<std::string>& id_column = {});

/// Header-free numeric matrix.
Matrix read_matrix_csv(const std::string& path);

/// Writes a header-free matrix using shortest round-trip number formatting.
void write_matrix_csv(const std::string& path, const Matrix& m);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace mrcd
