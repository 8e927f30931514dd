#include <doctest.h>

#include "mrcd/ogk.hpp"
#include "support.hpp"

using namespace mrcd;

TEST_SUITE("ogk") {

TEST_CASE("univariate pair") {
  const std::vector<double> sym = {-2, -1, 0, 1, 2};
  CHECK(m_scale_pair(sym).location == doctest::Approx(0.0));

  support::Rng rng(40);
  const auto z = support::gaussian_vector(5000, rng);
  const LocationScale ls = m_scale_pair(z);
  CHECK(std::abs(ls.location) < 0.05);
  CHECK(std::abs(ls.scale - 1.0) < 0.05);

  std::vector<double> moved(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) moved[i] = 3.0 * z[i] - 7.0;
  const LocationScale m = m_scale_pair(moved);
  CHECK(m.location == doctest::Approx(3.0 * ls.location - 7.0).epsilon(1e-10));
  CHECK(m.scale == doctest::Approx(3.0 * ls.scale).epsilon(1e-10));

  const std::vector<double> flat(9, 4.0);
  CHECK(m_scale_pair(flat).scale == 0.0);
  CHECK(m_scale_pair(flat).location == 4.0);
  CHECK_THROWS_AS(m_scale_pair(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("truncated second moment") {
  // E[min(Z^2, c^2)] by quadrature.
  for (double c : {1.0, 3.0}) {
    const double pdf_norm = 1.0 / std::sqrt(2 * std::numbers::pi);
    const double v = 2 * support::simpson([&](double t) {
      return std::min(t * t, c * c) * pdf_norm * std::exp(-0.5 * t * t);
    }, 0.0, 12.0);
    CHECK(truncated_second_moment(c) == doctest::Approx(v).epsilon(1e-8));
  }
}

TEST_CASE("independent columns give a near-diagonal scatter") {
  support::Rng rng(41);
  const Matrix x = support::gaussian(2000, 4, rng);
  const OgkFit f = ogk_fit(x);
  for (Index i = 0; i < 4; ++i) {
    CHECK(std::abs(f.scatter(i, i) - 1.0) < 0.15);
    for (Index j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(f.scatter(i, j)) < 0.1);
    }
  }
}

TEST_CASE("diagonal equivariance and positive definiteness") {
  support::Rng rng(42);
  Matrix x = support::gaussian(300, 5, rng);
  x.col(1) += 0.8 * x.col(0);
  const Vector a = (Vector(5) << 2, 0.5, 10, 1, 3).finished();
  const Vector b = (Vector(5) << 1, -2, 0, 5, 100).finished();
  const OgkFit f = ogk_fit(x);
  const OgkFit g = ogk_fit(Matrix((x * a.asDiagonal()).rowwise() + b.transpose()));
  CHECK(support::rel_diff(g.scatter, a.asDiagonal() * f.scatter * a.asDiagonal()) < 1e-9);
  CHECK(support::max_abs(g.location - (a.cwiseProduct(f.location) + b)) < 1e-9);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(f.scatter).eigenvalues().minCoeff() > 0.0);
  CHECK(support::max_abs(f.scatter - f.scatter.transpose()) < 1e-12);
}

TEST_CASE("resists a cluster of outliers") {
  support::Rng rng(43);
  Matrix x = support::gaussian(400, 3, rng);
  for (Index i = 0; i < 40; ++i) x.row(i).setConstant(30.0);
  const OgkFit f = ogk_fit(x);
  CHECK(support::max_abs(f.location) < 0.5);
  CHECK(f.scatter.diagonal().maxCoeff() < 3.0);
}

TEST_CASE("too few rows") {
  CHECK_THROWS(ogk_fit(Matrix(1, 3)));
}

}
