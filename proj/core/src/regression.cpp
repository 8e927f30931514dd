#include "mrcd/regression.hpp"

#include <stdexcept>

#include "mrcd/error.hpp"

namespace mrcd {

namespace {

DataMatrix join(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) {
    throw std::invalid_argument("mrcd_regression: predictors have " +
                                std::to_string(x.rows()) + " rows, response " +
                                std::to_string(y.size()));
  }
  if (x.cols() < 1) {
    throw std::invalid_argument("mrcd_regression: need at least one predictor");
  }
  DataMatrix joined;
  joined.values.resize(x.rows(), x.cols() + 1);
  joined.values.leftCols(x.cols()) = x;
  joined.values.col(x.cols()) = y;
  return joined;
}

RobustRegressionFit finish(const Matrix& x, const Vector& y, MrcdFit joint) {
  const Index q = x.cols();
  RobustRegressionFit out;
  const Matrix kxx = joint.scatter.topLeftCorner(q, q);
  const Vector kxy = joint.scatter.topRightCorner(q, 1);
  const Eigen::LLT<Matrix> llt(kxx);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrixError("predictor block of the scatter is singular");
  }
  out.slopes = llt.solve(kxy);
  out.intercept = joint.location(q) - joint.location.head(q).dot(out.slopes);
  out.subset = joint.subset;
  std::size_t next = 0;
  for (Index i = 0; i < x.rows(); ++i) {
    if (next < out.subset.size() && out.subset[next] == i) {
      ++next;
    } else {
      out.excluded_rows.push_back(i);
    }
  }
  std::tie(out.ols_slopes, out.ols_intercept) = least_squares(x, y);
  out.joint = std::move(joint);
  return out;
}

}  // namespace

std::pair<Vector, double> least_squares(const Matrix& x, const Vector& y) {
  Matrix design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  const Vector beta = design.colPivHouseholderQr().solve(y);
  return {beta.tail(x.cols()), beta(0)};
}

RobustRegressionFit mrcd_regression(const Matrix& x, const Vector& y, Index h,
                                    TargetRule rule, const FitOptions& options) {
  return finish(x, y, fit(join(x, y), h, rule, options));
}

RobustRegressionFit mrcd_regression(const Matrix& x, const Vector& y, Index h,
                                    const TargetSpec& target,
                                    const FitOptions& options) {
  return finish(x, y, fit(join(x, y), h, target, options));
}

RobustRegressionFit mrcd_regression(const DataMatrix& data,
                                    const std::string& response, Index h,
                                    TargetRule rule, const FitOptions& options) {
  Index target_col = -1;
  for (Index j = 0; j < data.cols(); ++j) {
    if (data.column_name(j) == response) {
      target_col = j;
    }
  }
  if (target_col < 0) {
    throw std::invalid_argument("response column '" + response + "' not found");
  }
  Matrix x(data.rows(), data.cols() - 1);
  std::vector<std::string> names;
  Index out = 0;
  for (Index j = 0; j < data.cols(); ++j) {
    if (j != target_col) {
      x.col(out++) = data.values.col(j);
      names.push_back(data.column_name(j));
    }
  }
  const Vector y = data.values.col(target_col);
  DataMatrix joined = join(x, y);
  joined.column_names = names;
  joined.column_names.push_back(response);
  joined.row_labels = data.row_labels;
  RobustRegressionFit result = finish(x, y, fit(joined, h, rule, options));
  result.predictor_names = std::move(names);
  return result;
}

}  // namespace mrcd
