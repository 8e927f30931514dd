#pragma once

// Test helpers and brute-force reference implementations. Nothing here
// calls into the library, so the references stay independent of it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace support {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline Matrix gaussian(Eigen::Index n, Eigen::Index p, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = z(rng);
  return x;
}

inline std::vector<double> gaussian_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = z(rng);
  return v;
}

inline Matrix random_spd(Eigen::Index p, Rng& rng, double ridge = 0.5) {
  const Matrix a = gaussian(p, p, rng);
  Matrix s = a * a.transpose() / static_cast<double>(p);
  s.diagonal().array() += ridge;
  return s;
}

// All pairwise |x_i - x_j|, sorted, then the k-th (1-based).
inline double brute_kth_difference(const std::vector<double>& x, std::size_t k) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) d.push_back(std::abs(x[i] - x[j]));
  std::sort(d.begin(), d.end());
  return d.at(k - 1);
}

inline double brute_qn(const std::vector<double>& x) {
  const std::size_t n = x.size();
  static const double small[] = {0.399, 0.994, 0.512, 0.844, 0.611, 0.857, 0.669, 0.872};
  double cn;
  if (n <= 9) {
    cn = small[n - 2];
  } else {
    const double dn = static_cast<double>(n);
    cn = n % 2 == 1 ? dn / (dn + 1.4) : dn / (dn + 3.8);
  }
  const std::size_t h = n / 2 + 1;
  return 2.2219 * cn * brute_kth_difference(x, h * (h - 1) / 2);
}

// Kendall tau-b by direct pair enumeration.
inline double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  const double pairs = 0.5 * static_cast<double>(x.size()) * static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0) tie_x += 1;
      if (dy == 0) tie_y += 1;
      if (dx == 0 || dy == 0) continue;
      (dx * dy > 0 ? concordant : discordant) += 1;
    }
  }
  const double denom = std::sqrt((pairs - tie_x) * (pairs - tie_y));
  return denom > 0 ? (concordant - discordant) / denom : 0.0;
}

// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Chi-square CDF for 1 or 3 degrees of freedom, integrated in z = sqrt(t)
// so the integrand is smooth at the origin.
inline double chi2_cdf(double x, int df) {
  const double r = std::sqrt(x);
  if (df == 1) {
    return simpson([](double z) { return 2.0 * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }, 0.0, r);
  }
  if (df == 3) {
    // density t^{1/2} e^{-t/2} / (2^{3/2} Gamma(3/2)), dt = 2z dz
    const double norm = std::pow(2.0, 1.5) * 0.5 * std::sqrt(std::numbers::pi);
    return simpson([&](double z) { return 2.0 * z * z * std::exp(-0.5 * z * z) / norm; }, 0.0, r);
  }
  return std::nan("");
}

inline double chi2_quantile(double prob, int df) {
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(mid, df) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Determinant by Laplace expansion along the first row.
inline double cofactor_det(const Matrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  double det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index c2 = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, c2++) = a(r, c);
      }
    }
    det += (j % 2 == 0 ? 1.0 : -1.0) * a(0, j) * cofactor_det(minor);
  }
  return det;
}

// Mean and divisor-h scatter as explicit sums of outer products.
inline std::pair<Vector, Matrix> brute_mean_cov(const Matrix& rows) {
  const Eigen::Index h = rows.rows(), p = rows.cols();
  Vector m = Vector::Zero(p);
  for (Eigen::Index i = 0; i < h; ++i) m += rows.row(i).transpose();
  m /= static_cast<double>(h);
  Matrix s = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < h; ++i) {
    const Vector d = rows.row(i).transpose() - m;
    s += d * d.transpose();
  }
  return {m, s / static_cast<double>(h)};
}

// Calls f on every sorted h-subset of {0..n-1}.
inline void for_each_subset(int n, int h, const std::function<void(const std::vector<Eigen::Index>&)>& f) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(h));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == h) {
      f(idx);
      return;
    }
    for (int i = start; i <= n - (h - depth); ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

}  // namespace support
