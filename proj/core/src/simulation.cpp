#include "mrcd/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mrcd/csv.hpp"
#include "mrcd/error.hpp"
#include "mrcd/ogk.hpp"

namespace mrcd::sim {

Rng replication_rng(std::uint64_t seed, std::uint64_t replication) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(replication >> 32), 0x6d726364u};
  return Rng(seq);
}

std::string to_string(DataModel m) {
  return m == DataModel::alyz ? "alyz" : "factor";
}

std::string to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::mrcd:
      return "mrcd";
    case EstimatorKind::mcd:
      return "mcd";
    case EstimatorKind::ogk:
      return "ogk";
  }
  return "?";
}

Index subset_size(double fraction, Index n) {
  const auto h = static_cast<Index>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  return std::clamp<Index>(h, (n + 1) / 2, n);
}

std::vector<std::string> SimConfig::warnings() const {
  std::vector<std::string> out;
  const auto outliers = static_cast<Index>(std::floor(epsilon * static_cast<double>(n)));
  for (double f : h_fractions) {
    const Index h = subset_size(f, n);
    if (outliers > n - h) {
      std::ostringstream os;
      os << "h fraction " << f << " (h=" << h << ") leaves room for " << n - h
         << " outliers but " << outliers << " are planted";
      out.push_back(os.str());
    }
  }
  return out;
}

namespace {

Matrix standard_normal(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      g(i, j) = normal(rng);
    }
  }
  return g;
}

Matrix haar_orthogonal(Index p, Rng& rng) {
  const Matrix g = standard_normal(p, p, rng);
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) = -q.col(j);
    }
  }
  return q;
}

Matrix to_correlation(const Matrix& s) {
  const Vector inv = s.diagonal().cwiseSqrt().cwiseInverse();
  Matrix r = inv.asDiagonal() * s * inv.asDiagonal();
  r = (0.5 * (r + r.transpose())).eval();
  r.diagonal().setOnes();
  return r;
}

// Symmetric square root factor L with L L' = sigma.
Matrix psd_factor(const Matrix& sigma, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw std::invalid_argument(std::string(what) +
                                " is not positive semidefinite");
  }
  return eig.eigenvectors() *
         eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

Matrix alyz_correlation(Index p, double condition, Rng& rng) {
  if (p < 2) {
    throw std::invalid_argument("alyz_correlation: need p >= 2");
  }
  if (!(condition >= 1.0)) {
    throw std::invalid_argument("alyz_correlation: condition must be >= 1");
  }
  std::uniform_real_distribution<double> uniform(1.0, condition);
  Vector lambda(p);
  lambda(0) = 1.0;
  lambda(1) = condition;
  for (Index j = 2; j < p; ++j) {
    lambda(j) = uniform(rng);
  }
  const Matrix q = haar_orthogonal(p, rng);
  const Vector log_lambda = lambda.array().log().matrix();

  // Rescaling to unit diagonal shrinks the spread, so search the exponent t
  // in lambda^t whose correlation matrix has the requested condition number.
  auto build = [&](double t, double& cond) {
    const Vector spread = (t * log_lambda).array().exp().matrix();
    Matrix r = to_correlation(q * spread.asDiagonal() * q.transpose());
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(r, Eigen::EigenvaluesOnly)
                          .eigenvalues();
    cond = ev(p - 1) / ev(0);
    return r;
  };
  double cond = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  Matrix r = build(hi, cond);
  for (int it = 0; it < 60 && cond < condition; ++it) {
    lo = hi;
    hi *= 2.0;
    r = build(hi, cond);
  }
  for (int it = 0; it < 200 && std::abs(cond - condition) > 1e-9 * condition; ++it) {
    const double mid = 0.5 * (lo + hi);
    r = build(mid, cond);
    (cond < condition ? lo : hi) = mid;
  }
  if (!(cond >= 0.9 * condition && cond <= 1.1 * condition)) {
    throw std::runtime_error("alyz_correlation: condition number " +
                             std::to_string(cond) + " outside band around " +
                             std::to_string(condition));
  }
  return r;
}

Matrix sample_normal(Index n, const Vector& mean, const Matrix& sigma, Rng& rng) {
  const Matrix factor = psd_factor(sigma, "covariance");
  Matrix x = standard_normal(n, sigma.rows(), rng) * factor.transpose();
  x.rowwise() += mean.transpose();
  return x;
}

FactorSample factor_model_sample(Index n, Index p, const FactorModelParams& params,
                                 Rng& rng) {
  const Index r = params.factor_mean.size();
  if (params.factor_cov.rows() != r || params.loading_mean.size() != r ||
      params.loading_cov.rows() != r) {
    throw std::invalid_argument("factor model parameters have mismatched sizes");
  }
  const Matrix loading_factor = psd_factor(params.loading_cov, "loading covariance");
  const Matrix factor_factor = psd_factor(params.factor_cov, "factor covariance");

  Matrix b = standard_normal(p, r, rng) * loading_factor.transpose();
  b.rowwise() += params.loading_mean.transpose();

  Vector sd(p);
  if (params.gamma_shape > 0.0 && params.gamma_scale > 0.0) {
    std::gamma_distribution<double> gamma(params.gamma_shape, params.gamma_scale);
    for (Index j = 0; j < p; ++j) {
      sd(j) = std::max(gamma(rng), params.sd_floor);
    }
  } else {
    sd.setConstant(params.sd_floor);
  }

  Matrix f = standard_normal(n, r, rng) * factor_factor.transpose();
  f.rowwise() += params.factor_mean.transpose();
  const Matrix noise = standard_normal(n, p, rng) * sd.asDiagonal();

  FactorSample out;
  out.x = f * b.transpose() + noise;
  out.sigma = b * params.factor_cov * b.transpose();
  out.sigma.diagonal() += sd.array().square().matrix();
  out.sigma = (0.5 * (out.sigma + out.sigma.transpose())).eval();
  return out;
}

Contamination contaminate(const Matrix& x, const Matrix& sigma, double epsilon,
                          double k, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("contaminate: epsilon must lie in [0, 0.5)");
  }
  Contamination out;
  out.x = x;
  const Index n = x.rows();
  const auto count = static_cast<Index>(std::floor(epsilon * static_cast<double>(n)));

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
  Vector direction = eig.eigenvectors().col(0);
  Index pivot = 0;
  direction.cwiseAbs().maxCoeff(&pivot);
  if (direction(pivot) < 0.0) {
    direction = -direction;
  }
  out.outlier = x.colwise().mean().transpose() + k * direction;
  if (count == 0) {
    return out;
  }

  // Partial Fisher-Yates draw of `count` distinct rows.
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(rows[static_cast<std::size_t>(i)],
              rows[static_cast<std::size_t>(pick(rng))]);
  }
  out.replaced.assign(rows.begin(), rows.begin() + count);
  std::sort(out.replaced.begin(), out.replaced.end());
  for (Index i : out.replaced) {
    out.x.row(i) = out.outlier.transpose();
  }
  return out;
}

double mse(const std::vector<Matrix>& estimates, const std::vector<Matrix>& truths) {
  if (estimates.size() != truths.size() || estimates.empty()) {
    throw std::invalid_argument("mse: need equally many estimates and truths");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < estimates.size(); ++m) {
    if (estimates[m].rows() != truths[m].rows() ||
        estimates[m].cols() != truths[m].cols() ||
        estimates[m].rows() != estimates[m].cols()) {
      throw std::invalid_argument("mse: shape mismatch in pair " + std::to_string(m));
    }
    const double p = static_cast<double>(estimates[m].rows());
    total += (estimates[m] - truths[m]).squaredNorm() / (p * p);
  }
  return total / static_cast<double>(estimates.size());
}

namespace {

std::vector<ReplicationRecord> run_replication(const SimConfig& cfg, int rep) {
  Rng rng = replication_rng(cfg.seed, static_cast<std::uint64_t>(rep));
  Matrix sigma;
  Matrix clean;
  if (cfg.dgp == DataModel::alyz) {
    sigma = alyz_correlation(cfg.p, cfg.condition, rng);
    clean = sample_normal(cfg.n, Vector::Zero(cfg.p), sigma, rng);
  } else {
    FactorSample fs = factor_model_sample(cfg.n, cfg.p, cfg.factor, rng);
    sigma = std::move(fs.sigma);
    clean = std::move(fs.x);
  }
  const Contamination data = contaminate(clean, sigma, cfg.epsilon, cfg.k, rng);
  DataMatrix x;
  x.values = data.x;

  const double p2 = static_cast<double>(cfg.p) * static_cast<double>(cfg.p);
  std::vector<ReplicationRecord> records;
  std::optional<PreparedData> prepared;
  std::string prepare_error;

  for (EstimatorKind est : cfg.estimators) {
    if (est == EstimatorKind::ogk) {
      ReplicationRecord rec;
      rec.replication = rep;
      rec.estimator = est;
      try {
        const OgkFit f = ogk_fit(x.values);
        rec.squared_error = (f.scatter - sigma).squaredNorm() / p2;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      records.push_back(std::move(rec));
      continue;
    }
    if (!prepared && prepare_error.empty()) {
      try {
        prepared.emplace(prepare(x, cfg.target));
      } catch (const std::exception& e) {
        prepare_error = e.what();
      }
    }
    for (double fraction : cfg.h_fractions) {
      ReplicationRecord rec;
      rec.replication = rep;
      rec.estimator = est;
      rec.h_fraction = fraction;
      rec.h = subset_size(fraction, cfg.n);
      if (!prepared) {
        rec.error = prepare_error;
        records.push_back(std::move(rec));
        continue;
      }
      try {
        FitOptions options;
        if (est == EstimatorKind::mcd) {
          options.fixed_rho = 0.0;
        }
        const MrcdFit f = assemble_fit(
            x, *prepared, search_subset(*prepared, rec.h, options), options);
        rec.squared_error = (f.scatter - sigma).squaredNorm() / p2;
        rec.rho = f.rho;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace

SimResult run_experiment(const SimConfig& cfg) {
  if (cfg.replications < 1) {
    throw std::invalid_argument("run_experiment: need at least one replication");
  }
  std::vector<std::vector<ReplicationRecord>> per_rep(
      static_cast<std::size_t>(cfg.replications));
  const int workers = std::clamp(cfg.threads, 1, cfg.replications);
  if (workers == 1) {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      per_rep[static_cast<std::size_t>(rep)] = run_replication(cfg, rep);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int rep = next++; rep < cfg.replications; rep = next++) {
          per_rep[static_cast<std::size_t>(rep)] = run_replication(cfg, rep);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SimResult result;
  result.config = cfg;
  for (auto& recs : per_rep) {
    for (auto& r : recs) result.records.push_back(std::move(r));
  }

  // Cells in configuration order: estimators, then h fractions.
  for (EstimatorKind est : cfg.estimators) {
    std::vector<std::optional<double>> fractions;
    if (est == EstimatorKind::ogk) {
      fractions.push_back(std::nullopt);
    } else {
      fractions.assign(cfg.h_fractions.begin(), cfg.h_fractions.end());
    }
    for (const auto& fraction : fractions) {
      SimCell cell;
      cell.estimator = est;
      cell.h_fraction = fraction;
      cell.h = fraction ? subset_size(*fraction, cfg.n) : cfg.n;
      double err = 0.0;
      double rho = 0.0;
      for (const ReplicationRecord& r : result.records) {
        if (r.estimator != est || r.h_fraction != fraction) continue;
        if (r.error) {
          ++cell.failures;
          continue;
        }
        ++cell.successes;
        err += r.squared_error;
        rho += r.rho;
      }
      if (cell.successes > 0) {
        cell.mse = err / cell.successes;
        cell.average_rho = rho / cell.successes;
      } else {
        cell.mse = std::numeric_limits<double>::quiet_NaN();
        cell.average_rho = std::numeric_limits<double>::quiet_NaN();
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

void write_csv(std::ostream& out, const SimResult& result) {
  const SimConfig& c = result.config;
  out << "estimator,h_fraction,h,n,p,dgp,epsilon,k,M,seed,mse,average_rho,"
         "successes,failures,version\n";
  for (const SimCell& cell : result.cells) {
    out << to_string(cell.estimator) << ','
        << (cell.h_fraction ? format_double(*cell.h_fraction) : std::string())
        << ',' << cell.h << ',' << c.n << ',' << c.p << ',' << to_string(c.dgp)
        << ',' << format_double(c.epsilon) << ',' << format_double(c.k) << ','
        << c.replications << ',' << c.seed << ',' << format_double(cell.mse)
        << ',';
    if (cell.estimator != EstimatorKind::ogk) {
      out << format_double(cell.average_rho);
    }
    out << ',' << cell.successes << ',' << cell.failures << ',' << MRCD_VERSION
        << '\n';
  }
}

std::string format_table(const SimResult& result) {
  const SimConfig& c = result.config;
  std::ostringstream os;
  os << c.n << "x" << c.p << "  dgp=" << to_string(c.dgp)
     << "  epsilon=" << c.epsilon << "  k=" << c.k << "  M=" << c.replications
     << "  seed=" << c.seed << '\n';
  os << std::left << std::setw(26) << "" << std::right << std::setw(10) << "MSE"
     << std::setw(12) << "avg rho" << std::setw(10) << "failed" << '\n';
  for (const SimCell& cell : result.cells) {
    std::ostringstream label;
    if (cell.estimator == EstimatorKind::ogk) {
      label << "OGK";
    } else {
      label << "h=" << cell.h << " (" << *cell.h_fraction << "n)";
      if (cell.estimator == EstimatorKind::mcd) label << ", rho=0";
    }
    os << std::left << std::setw(26) << label.str() << std::right << std::fixed
       << std::setprecision(4) << std::setw(10) << cell.mse;
    if (cell.estimator == EstimatorKind::ogk) {
      os << std::setw(12) << "";
    } else {
      os << std::setw(12) << cell.average_rho;
    }
    os << std::setw(10) << cell.failures << '\n';
  }
  return os.str();
}

}  // namespace mrcd::sim
