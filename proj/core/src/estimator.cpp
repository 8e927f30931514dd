#include "mrcd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "mrcd/error.hpp"

namespace mrcd {

namespace {

void check_subset_size(Index h, Index n) {
  if (n < 2) {
    throw SubsetSizeError("need at least 2 observations, got " +
                          std::to_string(n));
  }
  if (2 * h < n || h > n) {
    throw SubsetSizeError("subset size h=" + std::to_string(h) +
                          " outside [" + std::to_string((n + 1) / 2) + ", " +
                          std::to_string(n) + "]");
  }
}

struct SubsetScales {
  Vector w_mean;
  Vector w_scales;  // D_W
  Matrix cov;       // S_W(H)
  Matrix s_star;
};

SubsetScales subset_scales(const Matrix& w, const SubsetIndex& subset) {
  MeanCov mc = subset_mean_cov(w, subset);
  SubsetScales out;
  out.w_mean = mc.mean;
  out.w_scales = mc.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (Index j = 0; j < out.w_scales.size(); ++j) {
    if (!(out.w_scales(j) > 0.0)) {
      out.w_scales(j) = 1.0;
    }
  }
  const Vector inv = out.w_scales.cwiseInverse();
  out.s_star = inv.asDiagonal() * mc.cov * inv.asDiagonal();
  out.cov = std::move(mc.cov);
  return out;
}

Matrix blend(double rho, const Matrix& s) {
  Matrix m = (1.0 - rho) * s;
  m.diagonal().array() += rho;
  return m;
}

// B = Lambda^{-1/2} Q' D^{-1}, so that K^{-1} = B' M^{-1} B.
Matrix whitening_map(const MrcdFit& fit) {
  const Vector inv_root = fit.whitened.lambda.cwiseSqrt().cwiseInverse();
  return inv_root.asDiagonal() * fit.whitened.q.transpose() *
         fit.standardization.scale.cwiseInverse().asDiagonal();
}

}  // namespace

Index default_subset_size(Index n) {
  return static_cast<Index>(std::ceil(0.75 * static_cast<double>(n)));
}

PreparedData prepare(const DataMatrix& x, const TargetSpec& target) {
  Standardization st = standardize(x);
  WhitenedData wd = target_transform(st.u, target);
  InitialEstimates starts(wd.w);
  return PreparedData{std::move(st), target, std::move(wd), std::move(starts)};
}

PreparedData prepare(const DataMatrix& x, TargetRule rule) {
  Standardization st = standardize(x);
  TargetSpec target = rule == TargetRule::identity
                          ? identity_target(x.cols())
                          : equicorrelation_target(st.u);
  WhitenedData wd = target_transform(st.u, target);
  InitialEstimates starts(wd.w);
  return PreparedData{std::move(st), std::move(target), std::move(wd),
                      std::move(starts)};
}

SubsetSearch search_subset(const PreparedData& prepared, Index h,
                           const FitOptions& options) {
  const Matrix& w = prepared.whitened.w;
  const Index n = w.rows();
  const Index p = w.cols();
  check_subset_size(h, n);

  SubsetSearch out;
  out.h = h;
  out.c_alpha = consistency_factor(h, n, p);
  const auto initial = prepared.starts.subsets(h);

  double rho = 0.0;
  for (std::size_t k = 0; k < kStartCount; ++k) {
    StartRun& run = out.runs[k];
    run.initial = initial[k];
    if (options.fixed_rho) {
      run.start_rho = *options.fixed_rho;
    } else {
      const RegularizedScatter k0(w, run.initial, 0.0, out.c_alpha);
      const Vector& ev = k0.scatter_eigenvalues();
      run.start_rho = calibrate_rho(std::span<const double>(ev.data(), ev.size()),
                                    options.kappa_max);
    }
    rho = std::max(rho, run.start_rho);
  }
  out.rho = options.fixed_rho ? *options.fixed_rho : rho;

  for (std::size_t k = 0; k < kStartCount; ++k) {
    StartRun& run = out.runs[k];
    const auto same = std::find_if(
        out.runs.begin(), out.runs.begin() + static_cast<std::ptrdiff_t>(k),
        [&](const StartRun& r) { return r.initial == run.initial; });
    if (same != out.runs.begin() + static_cast<std::ptrdiff_t>(k)) {
      run.final_subset = same->final_subset;
      run.objective = same->objective;
      run.steps = same->steps;
      run.converged = same->converged;
      continue;
    }
    Concentration c =
        concentrate(run.initial, out.rho, w, out.c_alpha, options.max_csteps);
    run.final_subset = std::move(c.subset);
    run.objective = c.objectives.back();
    run.steps = c.steps;
    run.converged = c.converged;
  }

  out.best = 0;
  for (std::size_t k = 1; k < kStartCount; ++k) {
    if (out.runs[k].objective < out.runs[out.best].objective) {
      out.best = k;
    }
  }

  // rho was set on the starting subsets; the winner can be worse conditioned.
  out.search_rho = out.rho;
  if (options.cap_final_condition && !options.fixed_rho) {
    const RegularizedScatter winner(w, out.subset(), 0.0, out.c_alpha);
    const Vector& ev = winner.scatter_eigenvalues();
    out.rho = std::max(out.rho, calibrate_rho(std::span<const double>(ev.data(), ev.size()),
                                              options.kappa_max));
  }
  return out;
}

static Matrix inner_matrix(Rescaling rescaling, double rho, double c_alpha,
                    const Matrix& s_w, const Matrix& s_star) {
  return rescaling == Rescaling::consistency ? blend(rho, c_alpha * s_w)
                                             : blend(rho, s_star);
}

Matrix MrcdFit::standardized_scatter() const {
  if (rescaling == Rescaling::correlation) {
    return blend(rho, s_star);
  }
  const Vector d = w_scales;
  return blend(rho, c_alpha * (d.asDiagonal() * s_star * d.asDiagonal()));
}

MrcdFit assemble_fit(const DataMatrix& x, const PreparedData& prepared,
                     SubsetSearch search, const FitOptions& options) {
  MrcdFit f;
  f.n = prepared.rows();
  f.p = prepared.cols();
  f.h = search.h;
  f.rho = search.rho;
  f.c_alpha = search.c_alpha;
  f.subset = search.subset();
  f.target = prepared.target;
  f.standardization = prepared.standardization;
  f.whitened = prepared.whitened;

  const Matrix& w = prepared.whitened.w;
  const RegularizedScatter core(w, f.subset, f.rho, f.c_alpha);
  f.objective = core.objective();
  f.core_condition = core.condition_number();
  f.core_min_eigenvalue = core.core_eigenvalues().minCoeff();

  const SubsetScales scales = subset_scales(w, f.subset);
  f.rescaling = options.rescaling;
  f.s_star = scales.s_star;
  f.w_scales = scales.w_scales;

  const Vector u_mean = subset_mean_cov(f.standardization.u, f.subset).mean;
  f.location = f.standardization.location +
               f.standardization.scale.cwiseProduct(u_mean);

  const Matrix m =
      inner_matrix(f.rescaling, f.rho, f.c_alpha, scales.cov, scales.s_star);
  const Matrix a = f.standardization.scale.asDiagonal() * f.whitened.q *
                   f.whitened.lambda.cwiseSqrt().asDiagonal();
  f.scatter = a * m * a.transpose();
  f.scatter = (0.5 * (f.scatter + f.scatter.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(f.scatter, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  f.scatter_condition = lo > 0.0 ? eig.eigenvalues().maxCoeff() / lo
                                 : std::numeric_limits<double>::infinity();

  f.search = std::move(search);
  f.precision = precision(f, options.precision);
  f.distances = robust_distances(f, x.values);
  f.cutoff = distance_cutoff(options.cutoff, f.p, f.distances);
  f.flagged = flag_outliers(f.distances, f.cutoff);
  return f;
}

MrcdFit fit(const DataMatrix& x, Index h, const TargetSpec& target,
            const FitOptions& options) {
  check_subset_size(h, x.rows());
  const PreparedData prepared = prepare(x, target);
  return assemble_fit(x, prepared, search_subset(prepared, h, options), options);
}

MrcdFit fit(const DataMatrix& x, Index h, TargetRule rule,
            const FitOptions& options) {
  check_subset_size(h, x.rows());
  const PreparedData prepared = prepare(x, rule);
  return assemble_fit(x, prepared, search_subset(prepared, h, options), options);
}

Matrix precision(const MrcdFit& fit, PrecisionMethod method) {
  const Index p = fit.p;
  const Index h = fit.h;
  if (method == PrecisionMethod::automatic) {
    method = (fit.rho > 0.0 && h < p) ? PrecisionMethod::woodbury
                                      : PrecisionMethod::direct;
  }

  Matrix m_inv;
  if (method == PrecisionMethod::direct) {
    const Eigen::LLT<Matrix> llt(fit.standardized_scatter());
    if (llt.info() != Eigen::Success) {
      throw SingularMatrixError(
          "scatter is singular, regularization required");
    }
    m_inv = llt.solve(Matrix::Identity(p, p));
  } else {
    if (!(fit.rho > 0.0)) {
      throw SingularMatrixError("Woodbury precision requires rho > 0");
    }
    const Matrix rows = select_rows(fit.whitened.w, fit.subset);
    const Vector mean = rows.colwise().mean().transpose();
    // M = rho I + c Z'Z with Z the centered subset rows, scaled by D_W^{-1}
    // for the correlation form.
    Matrix z = rows.rowwise() - mean.transpose();
    double c = (1.0 - fit.rho) / static_cast<double>(h);
    if (fit.rescaling == Rescaling::correlation) {
      z = z * fit.w_scales.cwiseInverse().asDiagonal();
    } else {
      c *= fit.c_alpha;
    }
    Matrix g = (c / fit.rho) * (z * z.transpose());
    g.diagonal().array() += 1.0;
    const Matrix g_inv_z = g.llt().solve(z);
    m_inv = -(c / (fit.rho * fit.rho)) * (z.transpose() * g_inv_z);
    m_inv.diagonal().array() += 1.0 / fit.rho;
  }
  const Matrix b = whitening_map(fit);
  Matrix out = b.transpose() * m_inv * b;
  return 0.5 * (out + out.transpose());
}

Vector robust_distances(const MrcdFit& fit, const Matrix& x) {
  if (x.cols() != fit.p) {
    throw std::invalid_argument("robust_distances: data has " +
                                std::to_string(x.cols()) +
                                " columns, fit has " + std::to_string(fit.p));
  }
  const Matrix centered = x.rowwise() - fit.location.transpose();
  const Vector d2 = (centered * fit.precision).cwiseProduct(centered).rowwise().sum();
  return d2.cwiseMax(0.0).cwiseSqrt();
}

double distance_cutoff(const CutoffRule& rule, Index p, const Vector& distances) {
  switch (rule.kind) {
    case CutoffRule::Kind::chi_square: {
      const boost::math::chi_squared chi(static_cast<double>(p));
      return std::sqrt(boost::math::quantile(chi, rule.level));
    }
    case CutoffRule::Kind::empirical: {
      if (distances.size() == 0) {
        return 0.0;
      }
      std::vector<double> sorted(distances.data(),
                                 distances.data() + distances.size());
      std::sort(sorted.begin(), sorted.end());
      const double pos = std::clamp(rule.level, 0.0, 1.0) *
                         static_cast<double>(sorted.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
    case CutoffRule::Kind::fixed:
      return rule.value;
  }
  return rule.value;
}

std::vector<Index> flag_outliers(const Vector& distances, double cutoff) {
  std::vector<Index> out;
  for (Index i = 0; i < distances.size(); ++i) {
    if (distances(i) > cutoff) {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace mrcd
