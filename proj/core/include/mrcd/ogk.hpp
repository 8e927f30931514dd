#pragma once

#include <span>

#include "mrcd/types.hpp"

namespace mrcd {

/// Tuning of the univariate pair used by OGK: biweight weights with cutoff
/// `c_location` for the weighted mean, and rho(u) = min(u^2, c_scale^2) for
/// the one-step M-scale. The defaults are the Maronna-Zamar constants.
struct TauScaleTuning {
  double c_location = 4.5;
  double c_scale = 3.0;
};

struct LocationScale {
  double location = 0.0;
  double scale = 0.0;
};

/// Robust univariate location m(.) and scale s(.).
///
/// Starting from the median and Qn, m is the biweight-weighted mean and s is
/// one M-scale step, s^2 = s0^2 / (n b) * sum rho((x_i - m) / s0), where
/// b = E[rho(Z)] at the standard normal makes s consistent there.
/// A constant sample yields scale 0. Throws std::invalid_argument if empty.
LocationScale m_scale_pair(std::span<const double> x,
                           const TauScaleTuning& tuning = {});

/// E[min(Z^2, c^2)] for Z standard normal.
double truncated_second_moment(double c);

struct OgkFit {
  Vector location;
  Matrix scatter;
};

/// Orthogonalized Gnanadesikan-Kettenring location and scatter (single
/// orthogonalization pass). Columns with zero robust scale are left
/// unscaled; zero robust variances along the eigenvectors are replaced by
/// 1e-6 times the largest one.
OgkFit ogk_fit(const Matrix& x, const TauScaleTuning& tuning = {});

inline OgkFit ogk_fit(const DataMatrix& x, const TauScaleTuning& tuning = {}) {
  return ogk_fit(x.values, tuning);
}

}  // namespace mrcd
