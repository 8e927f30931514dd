#include "mrcd/target.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "mrcd/csv.hpp"
#include "mrcd/error.hpp"
#include "mrcd/robust_univariate.hpp"

namespace mrcd {

namespace {

constexpr double kConditionSlack = 1e-9;

// Orthonormal eigenbasis of R_c: the normalized ones vector followed by
// the Helmert contrasts.
Matrix helmert_basis(Index p) {
  Matrix q = Matrix::Zero(p, p);
  q.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(p)));
  for (Index k = 1; k < p; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    q.col(k).head(k).setConstant(1.0 / norm);
    q(k, k) = -static_cast<double>(k) / norm;
  }
  return q;
}

}  // namespace

std::string TargetSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::identity:
      os << "identity";
      break;
    case Kind::equicorrelation:
      os << "equicorrelation(c=" << equicorrelation << ")";
      break;
    case Kind::custom:
      os << "custom";
      break;
  }
  return os.str();
}

TargetSpec identity_target(Index p) {
  if (p < 1) {
    throw TargetError("identity_target: dimension must be positive");
  }
  TargetSpec t;
  t.kind = TargetSpec::Kind::identity;
  t.matrix = Matrix::Identity(p, p);
  t.eigenvectors = Matrix::Identity(p, p);
  t.eigenvalues = Vector::Ones(p);
  return t;
}

TargetSpec equicorrelation_matrix(Index p, double c) {
  if (p < 2) {
    throw TargetError("equicorrelation target needs p >= 2");
  }
  const double lower = -1.0 / static_cast<double>(p - 1);
  if (!(c > lower && c < 1.0)) {
    throw TargetError("equicorrelation parameter outside (-1/(p-1), 1)");
  }
  TargetSpec t;
  t.kind = TargetSpec::Kind::equicorrelation;
  t.equicorrelation = c;
  t.matrix = Matrix::Constant(p, p, c);
  t.matrix.diagonal().setOnes();
  t.eigenvectors = helmert_basis(p);
  t.eigenvalues = Vector::Constant(p, 1.0 - c);
  t.eigenvalues(0) = 1.0 + static_cast<double>(p - 1) * c;
  if (t.condition_number() > kMaxCondition * (1.0 + kConditionSlack)) {
    throw TargetError("equicorrelation target has condition number " +
                      std::to_string(t.condition_number()) + " > 1000");
  }
  return t;
}

double clamp_equicorrelation(double c, Index p) {
  if (p < 2) {
    throw TargetError("equicorrelation target needs p >= 2");
  }
  const double lower = -1.0 / static_cast<double>(p - 1) + 0.1;
  const double upper = std::min(
      kEquicorrelationCap,
      (kMaxCondition - 1.0) / (static_cast<double>(p) + kMaxCondition - 1.0));
  return std::clamp(c, lower, upper);
}

TargetSpec equicorrelation_target(const Matrix& u) {
  const Index p = u.cols();
  if (p < 2) {
    return identity_target(std::max<Index>(p, 1));
  }
  const Index n = u.rows();
  std::vector<std::vector<double>> columns(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    columns[static_cast<std::size_t>(j)].assign(u.col(j).data(),
                                                u.col(j).data() + n);
  }
  double sum = 0.0;
  for (Index j = 0; j < p; ++j) {
    for (Index k = j + 1; k < p; ++k) {
      const KendallTau tau = kendall_tau(columns[static_cast<std::size_t>(j)],
                                         columns[static_cast<std::size_t>(k)]);
      sum += std::sin(0.5 * std::numbers::pi * tau.value);
    }
  }
  const double pairs = 0.5 * static_cast<double>(p) * static_cast<double>(p - 1);
  return equicorrelation_matrix(p, clamp_equicorrelation(sum / pairs, p));
}

TargetSpec validate_target(const Matrix& t) {
  if (t.rows() != t.cols() || t.rows() == 0) {
    throw TargetError("target must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw TargetError("target is not symmetric");
  }
  const Matrix sym = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw TargetError("target eigendecomposition failed");
  }
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw TargetError("target is not positive definite: smallest eigenvalue " +
                      std::to_string(lo));
  }
  if (hi / lo > kMaxCondition * (1.0 + kConditionSlack)) {
    throw TargetError("target condition number " + std::to_string(hi / lo) +
                      " exceeds 1000");
  }
  TargetSpec spec;
  spec.kind = sym.isIdentity(0.0) ? TargetSpec::Kind::identity
                                  : TargetSpec::Kind::custom;
  spec.matrix = sym;
  if (spec.kind == TargetSpec::Kind::identity) {
    spec.eigenvectors = Matrix::Identity(t.rows(), t.rows());
    spec.eigenvalues = Vector::Ones(t.rows());
  } else {
    spec.eigenvectors = eig.eigenvectors();
    spec.eigenvalues = eig.eigenvalues();
  }
  return spec;
}

TargetSpec load_target_csv(const std::string& path) {
  return validate_target(read_matrix_csv(path));
}

}  // namespace mrcd
