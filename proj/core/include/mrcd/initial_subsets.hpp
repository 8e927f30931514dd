#pragma once

#include <array>
#include <string_view>

#include "mrcd/types.hpp"

namespace mrcd {

inline constexpr std::size_t kStartCount = 6;

/// Names of the six deterministic starts, in start order.
inline constexpr std::array<std::string_view, kStartCount> kStartNames = {
    "tanh", "spearman", "normal_scores", "spatial_sign", "inner_half", "ogk"};

/// One deterministic start, expressed in the columnwise median/Qn
/// standardized coordinates of W.
struct InitialEstimate {
  Vector location;
  Matrix scatter;
  bool regularized = false;  // blended with the fallback rho
  Vector squared_distances;  // of every observation, w.r.t. this start
};

/// The six deterministic location/scatter starts for the subset search.
///
/// Raw scatters: correlations of tanh-transformed, rank and normal-score
/// transformed columns; the spatial sign covariance; the covariance of the
/// ceil(n/2) observations closest to the coordinatewise median; and OGK.
/// Each is turned into a scatter estimate by replacing its eigenvalues with
/// squared Qn scales of the data projected on its eigenvectors; the location
/// is the eigenbasis-median. A start whose condition number exceeds 1000 is
/// blended as 0.1 I + 0.9 S. Distances do not depend on h, so one instance
/// serves every subset size.
class InitialEstimates {
 public:
  explicit InitialEstimates(const Matrix& w);

  const std::array<InitialEstimate, kStartCount>& estimates() const {
    return starts_;
  }

  /// The h observations with the smallest distance for each start.
  std::array<SubsetIndex, kStartCount> subsets(Index h) const;

 private:
  std::array<InitialEstimate, kStartCount> starts_;
};

/// Raw (uncorrected) start scatter number `which` (0-based) of standardized
/// data `z`; exposed for tests.
Matrix raw_start_scatter(const Matrix& z, std::size_t which);

}  // namespace mrcd
