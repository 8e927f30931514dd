#include "mrcd/preprocess.hpp"

#include <stdexcept>
#include <vector>

#include "mrcd/error.hpp"
#include "mrcd/robust_univariate.hpp"

namespace mrcd {

Matrix Standardization::restore(const Matrix& standardized) const {
  return (standardized * scale.asDiagonal()).rowwise() + location.transpose();
}

Standardization standardize(const DataMatrix& x) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2) {
    throw std::invalid_argument("standardize: need at least 2 observations");
  }
  Standardization out;
  out.location.resize(p);
  out.scale.resize(p);
  out.u.resize(n, p);
  std::vector<double> column(static_cast<std::size_t>(n));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      column[static_cast<std::size_t>(i)] = x.values(i, j);
    }
    const double nu = median(column);
    const double d = qn_scale(column);
    if (!(d > 0.0)) {
      throw DegenerateVariableError(static_cast<std::size_t>(j),
                                    x.column_name(j));
    }
    out.location(j) = nu;
    out.scale(j) = d;
    out.u.col(j) = (x.values.col(j).array() - nu) / d;
  }
  return out;
}

WhitenedData target_transform(const Matrix& u, const TargetSpec& target) {
  if (target.dimension() != u.cols()) {
    throw TargetError("target dimension " +
                      std::to_string(target.dimension()) +
                      " does not match data dimension " +
                      std::to_string(u.cols()));
  }
  WhitenedData out;
  out.q = target.eigenvectors;
  out.lambda = target.eigenvalues;
  if (target.kind == TargetSpec::Kind::identity) {
    out.w = u;
    return out;
  }
  out.w = (u * out.q) * out.lambda.cwiseSqrt().cwiseInverse().asDiagonal();
  return out;
}

MeanCov subset_mean_cov(const Matrix& rows) {
  const Index h = rows.rows();
  if (h < 1) {
    throw std::invalid_argument("subset_mean_cov: empty subset");
  }
  MeanCov out;
  out.mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - out.mean.transpose();
  out.cov = (centered.transpose() * centered) / static_cast<double>(h);
  return out;
}

Matrix select_rows(const Matrix& x, const SubsetIndex& subset) {
  Matrix out(static_cast<Index>(subset.size()), x.cols());
  for (std::size_t r = 0; r < subset.size(); ++r) {
    out.row(static_cast<Index>(r)) = x.row(subset[r]);
  }
  return out;
}

MeanCov subset_mean_cov(const Matrix& x, const SubsetIndex& subset) {
  return subset_mean_cov(select_rows(x, subset));
}

}  // namespace mrcd
