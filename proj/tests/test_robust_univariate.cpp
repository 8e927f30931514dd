#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "mrcd/robust_univariate.hpp"
#include "support.hpp"

using namespace mrcd;

TEST_SUITE("univariate") {

TEST_CASE("median of odd, even and singleton samples") {
  CHECK(median(std::vector<double>{1, 2, 3}) == 2.0);
  CHECK(median(std::vector<double>{1, 2, 3, 4}) == 2.5);
  CHECK(median(std::vector<double>{5}) == 5.0);
  CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_WITH_AS(median(std::vector<double>{}), "median: empty sample",
                       std::invalid_argument);
}

TEST_CASE("median and qn ignore input order") {
  support::Rng rng(11);
  auto x = support::gaussian_vector(37, rng);
  const double m = median(x);
  const double q = qn_scale(x);
  std::shuffle(x.begin(), x.end(), rng);
  CHECK(median(x) == m);
  CHECK(qn_scale(x) == q);
}

TEST_CASE("qn of a constant sample is zero") {
  CHECK(qn_scale(std::vector<double>{3, 3, 3, 3}) == 0.0);
  CHECK(qn_scale(std::vector<double>{1, 3, 3, 3, 3}) == 0.0);
}

TEST_CASE("qn of 1..5 matches the ten-difference sort") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  // differences 1,1,1,1,2,2,2,3,3,4 and rank C(3,2) = 3
  CHECK(qn_rank(5) == 3);
  const double expected = 2.2219 * 0.844 * support::brute_kth_difference(x, 3);
  CHECK(qn_scale(x) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(qn_scale(x) == doctest::Approx(support::brute_qn(x)).epsilon(1e-15));
}

TEST_CASE("qn is scale equivariant and shift invariant") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> doubled(x.size());
  std::transform(x.begin(), x.end(), doubled.begin(), [](double v) { return 2 * v; });
  CHECK(qn_scale(doubled) == doctest::Approx(2 * qn_scale(x)).epsilon(1e-14));

  support::Rng rng(5);
  const auto y = support::gaussian_vector(41, rng);
  for (double a : {-3.5, 0.25, 7.0}) {
    std::vector<double> t(y.size());
    std::transform(y.begin(), y.end(), t.begin(), [&](double v) { return a * v + 11.0; });
    CHECK(qn_scale(t) == doctest::Approx(std::abs(a) * qn_scale(y)).epsilon(1e-12));
  }
}

TEST_CASE("qn rejects fewer than two observations") {
  CHECK_THROWS_AS(qn_scale(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("qn correction factors") {
  CHECK(qn_correction(2) == 0.399);
  CHECK(qn_correction(9) == 0.872);
  CHECK(qn_correction(10) == doctest::Approx(10.0 / 13.8));
  CHECK(qn_correction(11) == doctest::Approx(11.0 / 12.4));
}

TEST_CASE("kth pairwise difference agrees with brute force including ties") {
  support::Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 120;
    std::vector<double> x(n);
    for (double& v : x) {
      v = trial % 3 == 0 ? static_cast<double>(rng() % 4)
                         : std::normal_distribution<double>(0, 1)(rng);
    }
    const std::size_t pairs = n * (n - 1) / 2;
    for (std::size_t k : {std::size_t{1}, pairs, 1 + pairs / 4, 1 + rng() % pairs}) {
      REQUIRE(kth_pairwise_difference(x, k) == support::brute_kth_difference(x, k));
    }
  }
}

TEST_CASE("kendall tau on three points") {
  const std::vector<double> x{1, 2, 3};
  CHECK(kendall_tau(x, std::vector<double>{10, 20, 30}).value == 1.0);
  CHECK(kendall_tau(x, std::vector<double>{30, 20, 10}).value == -1.0);
  CHECK(kendall_tau(x, std::vector<double>{1, 3, 2}).value == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("kendall tau symmetry, sign flip and degeneracy") {
  support::Rng rng(3);
  const auto x = support::gaussian_vector(60, rng);
  const auto y = support::gaussian_vector(60, rng);
  const double t = kendall_tau(x, y).value;
  CHECK(kendall_tau(y, x).value == doctest::Approx(t).epsilon(1e-15));
  std::vector<double> flipped(y.size());
  std::transform(y.begin(), y.end(), flipped.begin(), [](double v) { return -2 * v + 1; });
  CHECK(kendall_tau(x, flipped).value == doctest::Approx(-t).epsilon(1e-15));

  const KendallTau flat = kendall_tau(x, std::vector<double>(60, 4.0));
  CHECK(flat.value == 0.0);
  CHECK(flat.degenerate);
  CHECK_THROWS_AS(kendall_tau(x, std::vector<double>(59, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(kendall_tau(std::vector<double>{1}, std::vector<double>{1}),
                  std::invalid_argument);
}

TEST_CASE("kendall tau-b agrees with pair enumeration") {
  support::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = trial % 2 ? static_cast<double>(rng() % 5) : std::normal_distribution<double>()(rng);
      y[i] = static_cast<double>(rng() % 7) + (trial % 4 == 0 ? 0.0 : 0.5 * x[i]);
    }
    REQUIRE(kendall_tau(x, y).value ==
            doctest::Approx(support::brute_tau_b(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("average ranks share tied positions") {
  const auto r = average_ranks(std::vector<double>{10, 20, 20, 5});
  CHECK(r == std::vector<double>{2, 3.5, 3.5, 1});
}

}
