#pragma once

#include <span>
#include <vector>

namespace mrcd {

/// Sample median; the midpoint of the central pair for even lengths.
/// Throws std::invalid_argument on an empty sample.
double median(std::span<const double> x);

/// Asymptotic normal-consistency constant of Qn.
inline constexpr double kQnConsistency = 2.2219;

/// Finite-sample correction c_n for Qn.
///
/// n = 2..9 use the tabulated small-sample constants
///   0.399, 0.994, 0.512, 0.844, 0.611, 0.857, 0.669, 0.872;
/// n > 9 uses n / (n + 1.4) for odd n and n / (n + 3.8) for even n.
double qn_correction(std::size_t n);

/// Order-statistic rank k = C(floor(n/2) + 1, 2) used by Qn (1-based).
std::size_t qn_rank(std::size_t n);

/// k-th smallest (1-based) of the pairwise distances |x_i - x_j|, i < j.
/// Exact: bisects on the value until at most 4n candidate pairs remain,
/// then selects among them.
double kth_pairwise_difference(std::span<const double> x, std::size_t k);

/// Qn scale estimate: 2.2219 * c_n * {|x_i - x_j|; i < j}_(k).
/// Requires n >= 2. Returns 0 when more than half of the values coincide.
double qn_scale(std::span<const double> x);

struct KendallTau {
  double value = 0.0;
  bool degenerate = false;  // one input is constant; value is 0
};

/// Kendall's tau-b with tie correction, computed in O(n log n).
/// Throws std::invalid_argument on length mismatch or n < 2.
KendallTau kendall_tau(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based, ties get the mean rank).
std::vector<double> average_ranks(std::span<const double> x);

}  // namespace mrcd
