#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mrcd/estimator.hpp"
#include "mrcd/types.hpp"

namespace mrcd::sim {

using Rng = std::mt19937_64;

/// Independent stream for one replication, derived from (seed, index) only.
Rng replication_rng(std::uint64_t seed, std::uint64_t replication);

enum class DataModel { alyz, factor };
enum class EstimatorKind { mrcd, mcd, ogk };

std::string to_string(DataModel m);
std::string to_string(EstimatorKind e);

/// Three-factor model x_i = b f_i + e_i. Defaults follow the calibration of
/// Fan, Fan and Lv (2008), Table 1.
struct FactorModelParams {
  Vector factor_mean = (Vector(3) << 0.02355, 0.01298, 0.02071).finished();
  Matrix factor_cov = (Matrix(3, 3) << 1.2507, -0.0350, -0.2042,
                                       -0.0350, 0.3156, -0.0023,
                                       -0.2042, -0.0023, 0.1930).finished();
  Vector loading_mean = (Vector(3) << 0.7828, 0.5180, 0.4100).finished();
  Matrix loading_cov = (Matrix(3, 3) << 0.02915, 0.02387, 0.01018,
                                        0.02387, 0.05395, -0.00697,
                                        0.01018, -0.00697, 0.08686).finished();
  double gamma_shape = 3.3586;  // error standard deviations ~ Gamma(shape, scale)
  double gamma_scale = 0.1876;
  double sd_floor = 0.1950;     // lower bound on the error standard deviations
};

struct SimConfig {
  Index n = 100;
  Index p = 10;
  DataModel dgp = DataModel::alyz;
  double epsilon = 0.0;
  double k = 50.0;
  std::vector<double> h_fractions = {0.75};
  int replications = 1;  // M
  std::uint64_t seed = 1;
  std::vector<EstimatorKind> estimators = {EstimatorKind::mrcd};
  double condition = 100.0;  // ALYZ target condition number
  TargetRule target = TargetRule::equicorrelation;
  FactorModelParams factor;
  int threads = 1;

  /// Warnings for settings where n - h cannot absorb the outliers.
  std::vector<std::string> warnings() const;
};

/// Subset size ceil(fraction * n), kept inside [ceil(n/2), n].
Index subset_size(double fraction, Index n);

/// Random correlation matrix with condition number `condition`: eigenvalues
/// 1, condition and p - 2 uniform draws in between, a Haar random basis, and
/// a bisection on the exponent t of lambda^t so that the matrix rescaled to
/// unit diagonal hits the requested condition number. Throws if the result
/// leaves the band [0.9, 1.1] * condition.
Matrix alyz_correlation(Index p, double condition, Rng& rng);

/// n draws from N(mean, sigma) (sigma positive semidefinite).
Matrix sample_normal(Index n, const Vector& mean, const Matrix& sigma, Rng& rng);

struct FactorSample {
  Matrix x;
  Matrix sigma;  // b Cov(f) b' + diag(sd^2)
};

/// Throws std::invalid_argument if a covariance has a negative eigenvalue.
FactorSample factor_model_sample(Index n, Index p, const FactorModelParams& params,
                                 Rng& rng);

struct Contamination {
  Matrix x;
  std::vector<Index> replaced;  // ascending
  Vector outlier;               // the common replacement row
};

/// Replaces floor(epsilon n) random rows by mean(x) + k v, v the unit
/// eigenvector of the smallest eigenvalue of sigma.
Contamination contaminate(const Matrix& x, const Matrix& sigma, double epsilon,
                          double k, Rng& rng);

/// (1/M)(1/p^2) sum_m ||S_m - Sigma_m||_F^2.
double mse(const std::vector<Matrix>& estimates, const std::vector<Matrix>& truths);

struct ReplicationRecord {
  int replication = 0;
  EstimatorKind estimator = EstimatorKind::mrcd;
  std::optional<double> h_fraction;  // absent for OGK
  Index h = 0;
  double squared_error = 0.0;  // ||S - Sigma||_F^2 / p^2
  double rho = 0.0;
  std::optional<std::string> error;
};

struct SimCell {
  EstimatorKind estimator = EstimatorKind::mrcd;
  std::optional<double> h_fraction;
  Index h = 0;
  double mse = 0.0;
  double average_rho = 0.0;
  int successes = 0;
  int failures = 0;
};

struct SimResult {
  SimConfig config;
  std::vector<SimCell> cells;
  std::vector<ReplicationRecord> records;
};

/// Runs every replication and aggregates in replication order, so the
/// result is identical for any thread count.
SimResult run_experiment(const SimConfig& config);

/// One row per estimator x h cell.
void write_csv(std::ostream& out, const SimResult& result);

/// Fixed-width text table of MSE and average rho per cell.
std::string format_table(const SimResult& result);

/// Parses the key = value config format; see README for the schema.
/// Throws ConfigError listing every offending key.
SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::string& path);

}  // namespace mrcd::sim
