#include "mrcd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "mrcd/error.hpp"

namespace mrcd {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) {
    return false;
  }
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  return in;
}

}  // namespace

DataMatrix parse_data_csv(std::istream& in,
                          const std::optional<std::string>& id_column) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("empty CSV input: missing header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const std::vector<std::string> header = split_line(line);
  std::ptrdiff_t id_pos = -1;
  if (id_column) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == *id_column) {
        id_pos = static_cast<std::ptrdiff_t>(j);
      }
    }
    if (id_pos < 0) {
      throw IoError("id column '" + *id_column + "' not found in header");
    }
  }

  DataMatrix data;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) != id_pos) {
      data.column_names.push_back(header[j]);
    }
  }
  const std::size_t p = data.column_names.size();
  if (p == 0) {
    throw IoError("CSV has no numeric columns");
  }

  std::vector<double> cells;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw IoError("line " + std::to_string(row) + ": expected " +
                    std::to_string(header.size()) + " fields, found " +
                    std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == id_pos) {
        data.row_labels.push_back(fields[j]);
        continue;
      }
      double value = 0.0;
      if (!parse_number(fields[j], value)) {
        throw IoError("line " + std::to_string(row) + ", column '" +
                      header[j] + "': non-numeric cell '" + fields[j] + "'");
      }
      cells.push_back(value);
    }
  }
  const Index n = static_cast<Index>(cells.size() / p);
  data.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                               Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), n, static_cast<Index>(p));
  return data;
}

DataMatrix read_data_csv(const std::string& path,
                         const std::optional<std::string>& id_column) {
  std::ifstream in = open_or_throw(path);
  return parse_data_csv(in, id_column);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> cells;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_line(line);
    if (rows == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw IoError("ragged matrix row " + std::to_string(rows + 1) + " in '" +
                    path + "'");
    }
    for (const std::string& f : fields) {
      double value = 0.0;
      if (!parse_number(f, value)) {
        throw IoError("non-numeric matrix cell '" + f + "' in '" + path + "'");
      }
      cells.push_back(value);
    }
    ++rows;
  }
  if (rows == 0) {
    throw IoError("empty matrix file '" + path + "'");
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
      cells.data(), static_cast<Index>(rows), static_cast<Index>(cols));
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace mrcd
