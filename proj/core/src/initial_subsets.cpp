#include "mrcd/initial_subsets.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "mrcd/ogk.hpp"
#include "mrcd/preprocess.hpp"
#include "mrcd/robust_univariate.hpp"
#include "mrcd/scatter.hpp"
#include "mrcd/target.hpp"

namespace mrcd {

namespace {

std::vector<double> column_of(const Matrix& m, Index j) {
  return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

Matrix standardize_columns(const Matrix& w) {
  Matrix z(w.rows(), w.cols());
  for (Index j = 0; j < w.cols(); ++j) {
    const std::vector<double> col = column_of(w, j);
    const double med = median(col);
    double s = qn_scale(col);
    if (!(s > 0.0)) {
      s = 1.0;
    }
    z.col(j) = (w.col(j).array() - med) / s;
  }
  return z;
}

Matrix correlation(const Matrix& y) {
  const Matrix centered = y.rowwise() - y.colwise().mean();
  Matrix cov = centered.transpose() * centered;
  Vector sd = cov.diagonal().cwiseSqrt();
  for (Index j = 0; j < sd.size(); ++j) {
    if (!(sd(j) > 0.0)) {
      cov.row(j).setZero();
      cov.col(j).setZero();
      sd(j) = 1.0;
    }
  }
  Matrix r = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
  r.diagonal().setOnes();
  return r;
}

Matrix ranks_of(const Matrix& z) {
  Matrix r(z.rows(), z.cols());
  for (Index j = 0; j < z.cols(); ++j) {
    const std::vector<double> ranks = average_ranks(column_of(z, j));
    r.col(j) = Eigen::Map<const Vector>(ranks.data(), z.rows());
  }
  return r;
}

}  // namespace

Matrix raw_start_scatter(const Matrix& z, std::size_t which) {
  const Index n = z.rows();
  const Index p = z.cols();
  switch (which) {
    case 0:
      return correlation(z.array().tanh().matrix());
    case 1:
      return correlation(ranks_of(z));
    case 2: {
      const boost::math::normal normal;
      Matrix scores = ranks_of(z);
      const double denom = static_cast<double>(n) + 1.0 / 3.0;
      scores = scores.unaryExpr([&](double r) {
        return boost::math::quantile(normal, (r - 1.0 / 3.0) / denom);
      });
      return correlation(scores);
    }
    case 3: {
      Matrix s = Matrix::Zero(p, p);
      Matrix signs = z;
      for (Index i = 0; i < n; ++i) {
        const double norm = z.row(i).norm();
        if (norm > 0.0) {
          signs.row(i) /= norm;
        } else {
          signs.row(i).setZero();
        }
      }
      s = signs.transpose() * signs / static_cast<double>(n);
      return s;
    }
    case 4: {
      const Index half = (n + 1) / 2;
      const SubsetIndex inner =
          smallest_indices(z.rowwise().squaredNorm(), half);
      return subset_mean_cov(z, inner).cov;
    }
    case 5:
      return ogk_fit(z).scatter;
    default:
      throw std::out_of_range("raw_start_scatter: start index out of range");
  }
}

InitialEstimates::InitialEstimates(const Matrix& w) {
  const Matrix z = standardize_columns(w);
  const Index p = z.cols();
  for (std::size_t k = 0; k < kStartCount; ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(raw_start_scatter(z, k));
    Matrix e = eig.eigenvectors();
    // The basis of a null space is arbitrary, and so would be the Qn scales
    // along it. Pin it to the principal axes of the data projected onto it.
    const double tol = 1e-10 * std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    Index null_dim = 0;
    while (null_dim < p && eig.eigenvalues()(null_dim) <= tol) ++null_dim;
    if (null_dim > 1) {
      const Matrix v = e.leftCols(null_dim);
      const Matrix zv = z * v;
      Eigen::SelfAdjointEigenSolver<Matrix> inner(zv.transpose() * zv);
      e.leftCols(null_dim) = v * inner.eigenvectors();
    }
    const Matrix projected = z * e;

    Vector values(p);
    Vector centers(p);
    for (Index j = 0; j < p; ++j) {
      const std::vector<double> col = column_of(projected, j);
      const double s = qn_scale(col);
      values(j) = s * s;
      centers(j) = median(col);
    }
    InitialEstimate& start = starts_[k];
    const double hi = values.maxCoeff();
    const double lo = values.minCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
      values = (kFallbackRho + (1.0 - kFallbackRho) * values.array()).matrix();
      start.regularized = true;
    }
    start.location = e * centers;
    start.scatter = e * values.asDiagonal() * e.transpose();
    const Matrix centered_proj = projected.rowwise() - centers.transpose();
    start.squared_distances =
        centered_proj.array().square().matrix() * values.cwiseInverse();
  }
}

std::array<SubsetIndex, kStartCount> InitialEstimates::subsets(Index h) const {
  std::array<SubsetIndex, kStartCount> out;
  for (std::size_t k = 0; k < kStartCount; ++k) {
    out[k] = smallest_indices(starts_[k].squared_distances, h);
  }
  return out;
}

}  // namespace mrcd
