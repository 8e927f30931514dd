#pragma once

#include "mrcd/target.hpp"
#include "mrcd/types.hpp"

namespace mrcd {

/// Columnwise median/Qn standardization u_i = D^{-1}(x_i - nu).
struct Standardization {
  Vector location;  // nu, per-column medians
  Vector scale;     // D, per-column Qn scales (> 0)
  Matrix u;         // standardized n x p data

  /// x = nu + D u, applied row-wise.
  Matrix restore(const Matrix& standardized) const;
};

/// Throws DegenerateVariableError naming the first column whose Qn is 0.
Standardization standardize(const DataMatrix& x);

/// Standardized data expressed in the eigenbasis of the target:
/// w_i = Lambda^{-1/2} Q' u_i, so that S_W(H) = Lambda^{-1/2} Q' S_U(H) Q
/// Lambda^{-1/2} for every subset H.
struct WhitenedData {
  Matrix w;
  Matrix q;       // target eigenvectors
  Vector lambda;  // target eigenvalues
};

WhitenedData target_transform(const Matrix& u, const TargetSpec& target);

struct MeanCov {
  Vector mean;
  Matrix cov;  // divisor h
};

/// Mean and h-normalized scatter of the given rows.
MeanCov subset_mean_cov(const Matrix& rows);

/// Same, for the rows of `x` listed in `subset`.
MeanCov subset_mean_cov(const Matrix& x, const SubsetIndex& subset);

/// Gathers the listed rows of `x`.
Matrix select_rows(const Matrix& x, const SubsetIndex& subset);

}  // namespace mrcd
