#include "mrcd/ogk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mrcd/robust_univariate.hpp"

namespace mrcd {

double truncated_second_moment(double c) {
  const double tail = std::erfc(c / std::numbers::sqrt2);  // P(|Z| > c)
  const double density = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
  return (1.0 - tail) - 2.0 * c * density + c * c * tail;
}

LocationScale m_scale_pair(std::span<const double> x,
                           const TauScaleTuning& tuning) {
  if (x.empty()) {
    throw std::invalid_argument("m_scale_pair: empty sample");
  }
  const double med = median(x);
  if (x.size() < 2) {
    return {med, 0.0};
  }
  const double s0 = qn_scale(x);
  if (!(s0 > 0.0)) {
    return {med, 0.0};
  }

  double weight_sum = 0.0;
  double weighted = 0.0;
  for (double v : x) {
    const double u = (v - med) / (s0 * tuning.c_location);
    if (std::abs(u) < 1.0) {
      const double w = (1.0 - u * u) * (1.0 - u * u);
      weight_sum += w;
      weighted += w * v;
    }
  }
  const double location = weight_sum > 0.0 ? weighted / weight_sum : med;

  const double cap = tuning.c_scale * tuning.c_scale;
  double rho_sum = 0.0;
  for (double v : x) {
    const double u = (v - location) / s0;
    rho_sum += std::min(u * u, cap);
  }
  const double b = truncated_second_moment(tuning.c_scale);
  const double scale =
      s0 * std::sqrt(rho_sum / (static_cast<double>(x.size()) * b));
  return {location, scale};
}

namespace {

double scale_of(const Vector& v, const TauScaleTuning& tuning) {
  return m_scale_pair(std::span<const double>(v.data(), v.size()), tuning).scale;
}

}  // namespace

OgkFit ogk_fit(const Matrix& x, const TauScaleTuning& tuning) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2) {
    throw std::invalid_argument("ogk_fit: need at least 2 observations");
  }

  Vector d(p);
  for (Index j = 0; j < p; ++j) {
    const double s = scale_of(x.col(j), tuning);
    d(j) = s > 0.0 ? s : 1.0;
  }
  const Matrix y = x * d.cwiseInverse().asDiagonal();

  Matrix u = Matrix::Identity(p, p);
  Vector buffer(n);
  for (Index j = 0; j < p; ++j) {
    for (Index k = j + 1; k < p; ++k) {
      buffer = y.col(j) + y.col(k);
      const double plus = scale_of(buffer, tuning);
      buffer = y.col(j) - y.col(k);
      const double minus = scale_of(buffer, tuning);
      u(j, k) = u(k, j) = 0.25 * (plus * plus - minus * minus);
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(u);
  const Matrix& e = eig.eigenvectors();
  const Matrix v = y * e;
  Vector variances(p);
  Vector centers(p);
  for (Index j = 0; j < p; ++j) {
    const Vector col = v.col(j);
    const LocationScale ls =
        m_scale_pair(std::span<const double>(col.data(), col.size()), tuning);
    variances(j) = ls.scale * ls.scale;
    centers(j) = ls.location;
  }
  const double floor = 1e-6 * variances.maxCoeff();
  if (floor > 0.0) {
    variances = variances.cwiseMax(floor);
  }

  OgkFit fit;
  fit.location = d.asDiagonal() * (e * centers);
  const Matrix sigma_y = e * variances.asDiagonal() * e.transpose();
  fit.scatter = d.asDiagonal() * sigma_y * d.asDiagonal();
  fit.scatter = (0.5 * (fit.scatter + fit.scatter.transpose())).eval();
  return fit;
}

}  // namespace mrcd
