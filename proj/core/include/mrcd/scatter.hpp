#pragma once

#include <span>
#include <vector>

#include "mrcd/target.hpp"
#include "mrcd/types.hpp"

namespace mrcd {

/// Regularization weight applied to a (nearly) singular initial scatter
/// estimate, and the fallback rho when a subset scatter is identically 0.
inline constexpr double kFallbackRho = 0.1;

/// Consistency factor c_alpha = (h/n) / F_{chi2(p+2)}(chi2_p^{-1}(h/n)).
/// Equals 1 for h = n. Throws SubsetSizeError unless n/2 <= h <= n.
double consistency_factor(Index h, Index n, Index p);

/// Smallest rho in [0, 1) for which rho + (1 - rho) * lambda has condition
/// number at most `kappa_max`, where `eigenvalues` are those of c_alpha S_W.
/// Solved in closed form and verified; falls back to bisection if the
/// closed form misses. Returns kFallbackRho when every eigenvalue is 0.
double calibrate_rho(std::span<const double> eigenvalues,
                     double kappa_max = kMaxCondition);

/// The W-space core rho I + (1 - rho) c_alpha S_W(H) of the regularized
/// scatter of one h-subset.
///
/// The spectrum is taken from the smaller of S_W (p x p) and the centered
/// Gram matrix (h x h), so distances and determinants cost O(h^2 p) when
/// p exceeds h.
class RegularizedScatter {
 public:
  RegularizedScatter(const Matrix& w, const SubsetIndex& subset, double rho,
                     double c_alpha);

  double rho() const { return rho_; }
  double c_alpha() const { return c_alpha_; }
  Index dimension() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }

  /// S_W(H), divisor h.
  const Matrix& subset_scatter() const { return scatter_; }

  /// Eigenvalues of c_alpha S_W(H), descending, length p, clipped at 0.
  const Vector& scatter_eigenvalues() const { return eigenvalues_; }

  /// Eigenvalues rho + (1 - rho) lambda of the core, descending.
  Vector core_eigenvalues() const;

  /// rho I + (1 - rho) c_alpha S_W(H).
  Matrix core() const;

  bool is_singular() const;

  /// det(core)^(1/p) as exp(mean log eigenvalue).
  /// Throws SingularMatrixError when rho = 0 and S_W(H) is singular.
  double objective() const;
  double log_objective() const;
  double condition_number() const;

  /// (w_i - m)' core^{-1} (w_i - m) for every row of `w`.
  Vector squared_distances(const Matrix& w) const;

 private:
  double rho_;
  double c_alpha_;
  Vector mean_;
  Matrix scatter_;
  Vector eigenvalues_;
  Matrix basis_;        // eigenvectors of the retained eigenvalues
  Vector basis_values_; // matching eigenvalues of c_alpha S_W
  bool complete_basis_ = true;
};

/// The h indices with the smallest values, ties broken by lowest index,
/// returned in ascending index order.
SubsetIndex smallest_indices(const Vector& values, Index h);

/// One generalized concentration step in W-space: the h observations with
/// the smallest regularized distances relative to `subset`.
SubsetIndex c_step(const SubsetIndex& subset, double rho, const Matrix& w,
                   double c_alpha);

struct Concentration {
  SubsetIndex subset;
  std::vector<double> objectives;  // objective of every visited subset
  int steps = 0;
  bool converged = false;
};

/// Repeats c_step until the subset no longer changes.
Concentration concentrate(SubsetIndex start, double rho, const Matrix& w,
                          double c_alpha, int max_steps = 500);

}  // namespace mrcd
