#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mrcd/initial_subsets.hpp"
#include "mrcd/preprocess.hpp"
#include "mrcd/scatter.hpp"
#include "mrcd/target.hpp"
#include "mrcd/types.hpp"

namespace mrcd {

/// Built-in target constructions, resolved on the standardized data.
enum class TargetRule { identity, equicorrelation };

enum class PrecisionMethod {
  automatic,  // Woodbury when h < p and rho > 0, dense otherwise
  direct,
  woodbury,
};

/// Threshold used to flag outlying robust distances.
struct CutoffRule {
  enum class Kind {
    chi_square,  // sqrt of the chi-square(p) quantile at `level`
    empirical,   // the `level` quantile of the fitted distances
    fixed,       // `value` as given
  };
  Kind kind = Kind::chi_square;
  double level = 0.975;
  double value = 0.0;
};

/// Inner matrix M of the final scatter D Q Lambda^{1/2} M Lambda^{1/2} Q' D.
enum class Rescaling {
  consistency,  // M = rho I + (1 - rho) c_alpha S_W(H), the objective's own matrix
  correlation,  // M = rho I + (1 - rho) S*, S* = D_W^{-1} S_W(H) D_W^{-1}
};

struct FitOptions {
  double kappa_max = kMaxCondition;
  /// Skip calibration and use this rho (0 gives the plain MCD).
  std::optional<double> fixed_rho;
  int max_csteps = 500;
  /// rho is calibrated on the six starting subsets and held through the
  /// C-steps, so the winning subset can exceed kappa_max. When set, rho is
  /// raised afterwards to the smallest value that restores the cap.
  bool cap_final_condition = true;
  PrecisionMethod precision = PrecisionMethod::automatic;
  Rescaling rescaling = Rescaling::consistency;
  CutoffRule cutoff;
};

/// Everything that depends on the data but not on h.
struct PreparedData {
  Standardization standardization;
  TargetSpec target;
  WhitenedData whitened;
  InitialEstimates starts;

  Index rows() const { return whitened.w.rows(); }
  Index cols() const { return whitened.w.cols(); }
};

PreparedData prepare(const DataMatrix& x, const TargetSpec& target);
PreparedData prepare(const DataMatrix& x, TargetRule rule);

/// Outcome of concentrating one start.
struct StartRun {
  SubsetIndex initial;
  SubsetIndex final_subset;
  double start_rho = 0.0;  // rho_i calibrated on the initial subset
  double objective = 0.0;  // at the final subset, with the global rho
  int steps = 0;
  bool converged = false;
};

/// Subset search result for one h.
struct SubsetSearch {
  Index h = 0;
  double search_rho = 0.0;  // held fixed through the C-steps
  double rho = 0.0;         // for the estimates: search_rho, raised only
                            // under FitOptions::cap_final_condition
  double c_alpha = 1.0;
  std::array<StartRun, kStartCount> runs;
  std::size_t best = 0;

  const SubsetIndex& subset() const { return runs[best].final_subset; }
  double objective() const { return runs[best].objective; }
};

/// Initial subsets, global rho = max_i rho_i, C-steps per start, lowest
/// objective wins (ties go to the lowest start index). Objectives of the
/// runs are evaluated at search_rho.
SubsetSearch search_subset(const PreparedData& prepared, Index h,
                           const FitOptions& options = {});

/// Fitted MRCD model. Subset indices are 0-based.
struct MrcdFit {
  Vector location;   // m_MRCD, data units
  Matrix scatter;    // K_MRCD
  Matrix precision;  // K_MRCD^{-1}
  SubsetIndex subset;
  double rho = 0.0;
  double c_alpha = 1.0;
  double objective = 0.0;  // det(rho I + (1 - rho) c_alpha S_W(H))^(1/p)
  Vector distances;        // robust distances of the fitted rows
  double cutoff = 0.0;
  std::vector<Index> flagged;  // rows with distance above the cutoff
  Index h = 0;
  Index n = 0;
  Index p = 0;
  TargetSpec target;
  Rescaling rescaling = Rescaling::consistency;
  Matrix s_star;       // D_W^{-1} S_W(H) D_W^{-1}
  Vector w_scales;     // D_W
  double core_condition = 0.0;     // of rho I + (1 - rho) c_alpha S_W(H)
  double core_min_eigenvalue = 0.0;
  double scatter_condition = 0.0;  // of K_MRCD
  Standardization standardization;
  WhitenedData whitened;
  SubsetSearch search;

  /// The inner matrix M selected by `rescaling`.
  Matrix standardized_scatter() const;
};

MrcdFit fit(const DataMatrix& x, Index h, const TargetSpec& target,
            const FitOptions& options = {});
MrcdFit fit(const DataMatrix& x, Index h, TargetRule rule = TargetRule::identity,
            const FitOptions& options = {});

/// Finishes a fit from a completed subset search.
MrcdFit assemble_fit(const DataMatrix& x, const PreparedData& prepared,
                     SubsetSearch search, const FitOptions& options = {});

/// Default subset size ceil(0.75 n).
Index default_subset_size(Index n);

/// Inverse of the fitted scatter, through the dense or Woodbury route.
Matrix precision(const MrcdFit& fit,
                 PrecisionMethod method = PrecisionMethod::automatic);

/// sqrt((x_i - m)' K^{-1} (x_i - m)) for every row of `x`.
Vector robust_distances(const MrcdFit& fit, const Matrix& x);
inline Vector robust_distances(const MrcdFit& fit, const DataMatrix& x) {
  return robust_distances(fit, x.values);
}

double distance_cutoff(const CutoffRule& rule, Index p, const Vector& distances);

/// Rows whose distance exceeds `cutoff`, ascending.
std::vector<Index> flag_outliers(const Vector& distances, double cutoff);

/// One row of an h scan.
struct ScanRow {
  Index h = 0;
  double objective = 0.0;
  std::optional<double> frobenius_gap;  // missing for the first h
  double rho = 0.0;
};

/// Fits every h in `h_values` (sorted ascending, within [ceil(n/2), n]),
/// reusing the standardization, target and starts. The gap is the Frobenius
/// distance between the inner matrices M (see Rescaling) at consecutive
/// listed values of h.
std::vector<ScanRow> scan_h(const DataMatrix& x, const std::vector<Index>& h_values,
                            const TargetSpec& target, const FitOptions& options = {});
std::vector<ScanRow> scan_h(const DataMatrix& x, const std::vector<Index>& h_values,
                            TargetRule rule, const FitOptions& options = {});
std::vector<ScanRow> scan_h(const PreparedData& prepared,
                            const std::vector<Index>& h_values,
                            const FitOptions& options = {});

}  // namespace mrcd
