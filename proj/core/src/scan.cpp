#include <algorithm>

#include "mrcd/error.hpp"
#include "mrcd/estimator.hpp"
#include "mrcd/scatter.hpp"

namespace mrcd {

std::vector<ScanRow> scan_h(const PreparedData& prepared,
                            const std::vector<Index>& h_values,
                            const FitOptions& options) {
  if (h_values.empty()) {
    throw SubsetSizeError("scan_h: empty range of subset sizes");
  }
  if (!std::is_sorted(h_values.begin(), h_values.end()) ||
      std::adjacent_find(h_values.begin(), h_values.end()) != h_values.end()) {
    throw SubsetSizeError("scan_h: subset sizes must be strictly ascending");
  }

  std::vector<ScanRow> rows;
  rows.reserve(h_values.size());
  Matrix previous;
  for (Index h : h_values) {
    const SubsetSearch search = search_subset(prepared, h, options);
    const MeanCov mc = subset_mean_cov(prepared.whitened.w, search.subset());
    Matrix current;
    if (options.rescaling == Rescaling::consistency) {
      current = (1.0 - search.rho) * search.c_alpha * mc.cov;
    } else {
      Vector scales = mc.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
      for (Index j = 0; j < scales.size(); ++j) {
        if (!(scales(j) > 0.0)) scales(j) = 1.0;
      }
      const Vector inv = scales.cwiseInverse();
      current = (1.0 - search.rho) * (inv.asDiagonal() * mc.cov * inv.asDiagonal());
    }
    current.diagonal().array() += search.rho;

    ScanRow row;
    row.h = h;
    row.objective = search.rho == search.search_rho
                        ? search.objective()
                        : RegularizedScatter(prepared.whitened.w, search.subset(),
                                             search.rho, search.c_alpha)
                              .objective();
    row.rho = search.rho;
    if (previous.size() > 0) {
      row.frobenius_gap = (current - previous).norm();
    }
    rows.push_back(row);
    previous = std::move(current);
  }
  return rows;
}

std::vector<ScanRow> scan_h(const DataMatrix& x, const std::vector<Index>& h_values,
                            const TargetSpec& target, const FitOptions& options) {
  if (h_values.empty()) {
    throw SubsetSizeError("scan_h: empty range of subset sizes");
  }
  return scan_h(prepare(x, target), h_values, options);
}

std::vector<ScanRow> scan_h(const DataMatrix& x, const std::vector<Index>& h_values,
                            TargetRule rule, const FitOptions& options) {
  if (h_values.empty()) {
    throw SubsetSizeError("scan_h: empty range of subset sizes");
  }
  return scan_h(prepare(x, rule), h_values, options);
}

}  // namespace mrcd
