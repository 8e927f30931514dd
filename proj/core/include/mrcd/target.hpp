#pragma once

#include <string>

#include "mrcd/types.hpp"

namespace mrcd {

/// Largest condition number for which a matrix counts as well-conditioned.
inline constexpr double kMaxCondition = 1000.0;

/// Upper bound on the equicorrelation parameter before the condition cap.
inline constexpr double kEquicorrelationCap = 0.99;

/// Target matrix T for the regularized scatter, with its eigenbasis.
///
/// Invariants: symmetric, positive definite, condition number <= 1000.
/// `eigenvectors` are orthonormal columns and `eigenvalues` the matching
/// strictly positive eigenvalues, so T = Q diag(Lambda) Q'.
struct TargetSpec {
  enum class Kind { identity, equicorrelation, custom };

  Kind kind = Kind::identity;
  double equicorrelation = 0.0;  // c, only meaningful for equicorrelation
  Matrix matrix;
  Matrix eigenvectors;
  Vector eigenvalues;

  Index dimension() const { return matrix.rows(); }
  double condition_number() const {
    return eigenvalues.maxCoeff() / eigenvalues.minCoeff();
  }
  std::string describe() const;
};

/// T = I_p with the identity eigenbasis.
TargetSpec identity_target(Index p);

/// R_c = c J_p + (1 - c) I_p with its closed-form eigenstructure.
/// Throws TargetError unless -1/(p-1) < c < 1 and the condition number is
/// at most 1000.
TargetSpec equicorrelation_matrix(Index p, double c);

/// Clamps c to [-1/(p-1) + 0.1, min(0.99, 999/(p + 999))]; the upper end
/// keeps the condition number of R_c at most 1000.
double clamp_equicorrelation(double c, Index p);

/// Equicorrelation target estimated from standardized data: c is the
/// average of sin(pi/2 * tau) over all column pairs, clamped to
/// [-1/(p-1) + 0.1, min(0.99, 999/(p + 999))]. p = 1 yields the identity.
TargetSpec equicorrelation_target(const Matrix& u);

/// Checks symmetry (1e-10 relative), positive definiteness and the
/// condition-number cap, then caches the eigendecomposition.
TargetSpec validate_target(const Matrix& t);

/// Reads a square, header-free, comma-separated matrix and validates it.
TargetSpec load_target_csv(const std::string& path);

}  // namespace mrcd
