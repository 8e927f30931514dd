#pragma once

#include <string>
#include <vector>

#include "mrcd/estimator.hpp"

namespace mrcd {

/// Plug-in regression from the MRCD scatter of [X | y].
struct RobustRegressionFit {
  Vector slopes;      // K_xx^{-1} K_xy
  double intercept = 0.0;  // m_y - m_x' slopes
  SubsetIndex subset;
  std::vector<Index> excluded_rows;
  Vector ols_slopes;
  double ols_intercept = 0.0;
  std::vector<std::string> predictor_names;
  MrcdFit joint;  // fit on the (q + 1)-column matrix, response last
};

RobustRegressionFit mrcd_regression(const Matrix& x, const Vector& y, Index h,
                                    TargetRule rule = TargetRule::identity,
                                    const FitOptions& options = {});

RobustRegressionFit mrcd_regression(const Matrix& x, const Vector& y, Index h,
                                    const TargetSpec& target,
                                    const FitOptions& options = {});

/// Splits `data` into predictors and the named response column.
/// Throws std::invalid_argument if the column is missing.
RobustRegressionFit mrcd_regression(const DataMatrix& data,
                                    const std::string& response, Index h,
                                    TargetRule rule = TargetRule::identity,
                                    const FitOptions& options = {});

/// Least-squares slopes and intercept.
std::pair<Vector, double> least_squares(const Matrix& x, const Vector& y);

}  // namespace mrcd
