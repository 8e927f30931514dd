#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mrcd {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x p observation matrix; rows are observations.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> column_names;  // empty or one per column
  std::vector<std::string> row_labels;    // empty or one per row

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  /// Column name, falling back to the 1-based column number.
  std::string column_name(Index j) const {
    if (static_cast<std::size_t>(j) < column_names.size()) {
      return column_names[static_cast<std::size_t>(j)];
    }
    return "V" + std::to_string(j + 1);
  }
};

/// Sorted 0-based row indices of an h-subset.
using SubsetIndex = std::vector<Index>;

}  // namespace mrcd
