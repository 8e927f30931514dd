#include <boost/math/distributions/chi_squared.hpp>

#include "mrcd/error.hpp"
#include "mrcd/scatter.hpp"

namespace mrcd {

double consistency_factor(Index h, Index n, Index p) {
  if (n < 1 || p < 1 || 2 * h < n || h > n) {
    throw SubsetSizeError("subset size h=" + std::to_string(h) +
                          " outside [n/2, n] for n=" + std::to_string(n));
  }
  if (h == n) {
    return 1.0;
  }
  const double alpha = static_cast<double>(h) / static_cast<double>(n);
  const boost::math::chi_squared chi_p(static_cast<double>(p));
  const boost::math::chi_squared chi_p2(static_cast<double>(p + 2));
  const double q = boost::math::quantile(chi_p, alpha);
  return alpha / boost::math::cdf(chi_p2, q);
}

}  // namespace mrcd
