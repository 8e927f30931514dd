#include "mrcd/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mrcd/error.hpp"
#include "mrcd/preprocess.hpp"

namespace mrcd {

namespace {

constexpr double kRankTolerance = 1e-12;
constexpr double kSingularTolerance = 1e-15;

double condition_at(double rho, double hi, double lo) {
  return (rho + (1.0 - rho) * hi) / (rho + (1.0 - rho) * lo);
}

}  // namespace

double calibrate_rho(std::span<const double> eigenvalues, double kappa_max) {
  if (eigenvalues.empty()) {
    return 0.0;
  }
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (double v : eigenvalues) {
    const double clipped = std::max(v, 0.0);
    hi = std::max(hi, clipped);
    lo = std::min(lo, clipped);
  }
  if (!(hi > 0.0)) {
    return kFallbackRho;
  }
  if (lo > 0.0 && hi / lo <= kappa_max) {
    return 0.0;
  }
  const double accept = kappa_max * (1.0 + 1e-9);
  const double rho = (hi - kappa_max * lo) /
                     (kappa_max - kappa_max * lo - 1.0 + hi);
  if (rho >= 0.0 && rho < 1.0 && condition_at(rho, hi, lo) <= accept) {
    return rho;
  }
  // Condition number is decreasing in rho; bisect for the smallest feasible.
  double a = 0.0;
  double b = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (condition_at(mid, hi, lo) <= kappa_max) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return b;
}

RegularizedScatter::RegularizedScatter(const Matrix& w,
                                       const SubsetIndex& subset, double rho,
                                       double c_alpha)
    : rho_(rho), c_alpha_(c_alpha) {
  if (subset.empty()) {
    throw SubsetSizeError("regularized scatter of an empty subset");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("rho must lie in [0, 1]");
  }
  const Index h = static_cast<Index>(subset.size());
  const Index p = w.cols();
  const Matrix rows = select_rows(w, subset);
  mean_ = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - mean_.transpose();
  scatter_ = (centered.transpose() * centered) / static_cast<double>(h);

  eigenvalues_ = Vector::Zero(p);
  if (p <= h) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter_);
    // Eigen sorts ascending; store descending.
    basis_ = eig.eigenvectors().rowwise().reverse();
    basis_values_ =
        (c_alpha * eig.eigenvalues().reverse().cwiseMax(0.0)).eval();
    eigenvalues_ = basis_values_;
    complete_basis_ = true;
    return;
  }

  const Matrix gram = (centered * centered.transpose()) / static_cast<double>(h);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector values = eig.eigenvalues().reverse().cwiseMax(0.0);
  const Matrix vectors = eig.eigenvectors().rowwise().reverse();
  const double top = values.size() > 0 ? values(0) : 0.0;
  Index rank = 0;
  while (rank < values.size() && values(rank) > kRankTolerance * top &&
         values(rank) > 0.0) {
    ++rank;
  }
  basis_.resize(p, rank);
  for (Index j = 0; j < rank; ++j) {
    basis_.col(j) = centered.transpose() * vectors.col(j) /
                    std::sqrt(static_cast<double>(h) * values(j));
  }
  basis_values_ = c_alpha * values.head(rank);
  eigenvalues_.head(rank) = basis_values_;
  complete_basis_ = false;
}

Vector RegularizedScatter::core_eigenvalues() const {
  return (rho_ + (1.0 - rho_) * eigenvalues_.array()).matrix();
}

Matrix RegularizedScatter::core() const {
  Matrix k = (1.0 - rho_) * c_alpha_ * scatter_;
  k.diagonal().array() += rho_;
  return k;
}

bool RegularizedScatter::is_singular() const {
  const Vector ev = core_eigenvalues();
  const double top = ev.maxCoeff();
  return !(ev.minCoeff() > kSingularTolerance * top);
}

double RegularizedScatter::log_objective() const {
  if (is_singular()) {
    throw SingularMatrixError(
        "regularized scatter is singular, regularization required");
  }
  return core_eigenvalues().array().log().mean();
}

double RegularizedScatter::objective() const {
  return std::exp(log_objective());
}

double RegularizedScatter::condition_number() const {
  const Vector ev = core_eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return ev.maxCoeff() / ev.minCoeff();
}

Vector RegularizedScatter::squared_distances(const Matrix& w) const {
  if (is_singular()) {
    throw SingularMatrixError(
        "regularized scatter is singular, regularization required");
  }
  const Matrix centered = w.rowwise() - mean_.transpose();
  const Matrix proj = centered * basis_;
  const Vector inv_core =
      (rho_ + (1.0 - rho_) * basis_values_.array()).inverse().matrix();
  if (complete_basis_) {
    return proj.array().square().matrix() * inv_core;
  }
  const double inv_rho = 1.0 / rho_;
  const Vector correction = (inv_core.array() - inv_rho).matrix();
  return (inv_rho * centered.rowwise().squaredNorm()) +
         proj.array().square().matrix() * correction;
}

SubsetIndex smallest_indices(const Vector& values, Index h) {
  const Index n = values.size();
  if (h < 1 || h > n) {
    throw SubsetSizeError("cannot select " + std::to_string(h) + " of " +
                          std::to_string(n) + " observations");
  }
  SubsetIndex order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto by_value = [&](Index a, Index b) {
    return values(a) < values(b) || (values(a) == values(b) && a < b);
  };
  std::nth_element(order.begin(), order.begin() + (h - 1), order.end(),
                   by_value);
  order.resize(static_cast<std::size_t>(h));
  std::sort(order.begin(), order.end());
  return order;
}

SubsetIndex c_step(const SubsetIndex& subset, double rho, const Matrix& w,
                   double c_alpha) {
  const RegularizedScatter k(w, subset, rho, c_alpha);
  return smallest_indices(k.squared_distances(w),
                          static_cast<Index>(subset.size()));
}

Concentration concentrate(SubsetIndex start, double rho, const Matrix& w,
                          double c_alpha, int max_steps) {
  Concentration out;
  out.subset = std::move(start);
  const Index h = static_cast<Index>(out.subset.size());
  for (int step = 0; step <= max_steps; ++step) {
    const RegularizedScatter k(w, out.subset, rho, c_alpha);
    out.objectives.push_back(k.objective());
    SubsetIndex next = smallest_indices(k.squared_distances(w), h);
    if (next == out.subset) {
      out.converged = true;
      break;
    }
    out.subset = std::move(next);
    ++out.steps;
  }
  return out;
}

}  // namespace mrcd
