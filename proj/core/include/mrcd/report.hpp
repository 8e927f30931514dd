#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrcd/estimator.hpp"
#include "mrcd/types.hpp"

namespace mrcd {

/// Scatter and precision above this dimension go to sidecar CSV files.
inline constexpr Index kInlineMatrixLimit = 200;

/// Serializable summary of a fit. Observation indices are 1-based.
struct FitReport {
  std::string version;
  std::uint64_t seed = 0;
  std::string input;
  Index n = 0;
  Index p = 0;
  Index h = 0;
  std::string target;  // identity, equicorrelation or custom
  std::optional<double> target_correlation;
  double rho = 0.0;
  double c_alpha = 1.0;
  double objective = 0.0;
  double core_condition = 0.0;
  double scatter_condition = 0.0;
  double cutoff = 0.0;
  double seconds = 0.0;
  std::vector<std::string> columns;
  std::vector<std::string> row_labels;  // empty unless an id column was given
  Vector location;
  Matrix scatter;    // empty when only the sidecar name is known
  Matrix precision;
  std::string scatter_file;  // set when the matrix lives in a sidecar CSV
  std::string precision_file;
  std::vector<Index> subset;
  Vector distances;
  std::vector<Index> flagged;
};

struct ReportOptions {
  std::uint64_t seed = 0;
  std::string input;
  double seconds = 0.0;
  /// Base name for sidecar files, used when p exceeds kInlineMatrixLimit.
  std::string sidecar_stem = "report";
};

FitReport make_report(const MrcdFit& fit, const DataMatrix& x,
                      const ReportOptions& options = {});

std::string to_json(const FitReport& report);

/// Inverse of to_json; sidecar matrices are not read back.
FitReport parse_report(const std::string& json);

/// Writes the JSON to `path` and any sidecar CSV next to it.
void write_report(const std::string& path, const FitReport& report);

}  // namespace mrcd
