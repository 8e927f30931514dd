// mrcd: command-line front end for fitting, h scans, simulations,
// regression and OGK.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrcd/csv.hpp"
#include "mrcd/error.hpp"
#include "mrcd/estimator.hpp"
#include "mrcd/ogk.hpp"
#include "mrcd/regression.hpp"
#include "mrcd/report.hpp"
#include "mrcd/simulation.hpp"

namespace {

using Json = nlohmann::ordered_json;

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUnreadable = 2,
  kDegenerate = 3,
  kBadSubsetSize = 4,
  kBadConfig = 5,
};

struct TargetChoice {
  std::optional<mrcd::TargetRule> rule;
  std::string file;
};

TargetChoice parse_target(const std::string& text) {
  if (text == "identity") return {mrcd::TargetRule::identity, {}};
  if (text == "equicorr" || text == "equicorrelation") {
    return {mrcd::TargetRule::equicorrelation, {}};
  }
  if (text.rfind("file=", 0) == 0 && text.size() > 5) return {std::nullopt, text.substr(5)};
  throw CLI::ValidationError("--target", "expected identity, equicorr or file=PATH");
}

mrcd::CutoffRule parse_cutoff(const std::string& text) {
  mrcd::CutoffRule rule;
  auto level_after = [&](std::size_t pos) {
    const double v = std::stod(text.substr(pos));
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("level");
    return v;
  };
  try {
    if (text == "chi2") {
      rule.kind = mrcd::CutoffRule::Kind::chi_square;
    } else if (text.rfind("chi2:", 0) == 0) {
      rule.kind = mrcd::CutoffRule::Kind::chi_square;
      rule.level = level_after(5);
    } else if (text.rfind("empirical:", 0) == 0) {
      rule.kind = mrcd::CutoffRule::Kind::empirical;
      rule.level = level_after(10);
    } else {
      std::size_t used = 0;
      rule.kind = mrcd::CutoffRule::Kind::fixed;
      rule.value = std::stod(text, &used);
      if (used != text.size() || !(rule.value >= 0.0)) throw std::invalid_argument("value");
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--cutoff",
                               "expected chi2, chi2:LEVEL, empirical:LEVEL or a distance");
  }
  return rule;
}

mrcd::Rescaling parse_rescaling(const std::string& text) {
  if (text == "consistency") return mrcd::Rescaling::consistency;
  if (text == "correlation") return mrcd::Rescaling::correlation;
  throw CLI::ValidationError("--rescaling", "expected consistency or correlation");
}

mrcd::PreparedData prepare_for(const mrcd::DataMatrix& x, const TargetChoice& t) {
  if (t.rule) return mrcd::prepare(x, *t.rule);
  return mrcd::prepare(x, mrcd::load_target_csv(t.file));
}

mrcd::Index resolve_h(const std::optional<long long>& h, const std::optional<double>& frac,
                      mrcd::Index n) {
  if (h) return static_cast<mrcd::Index>(*h);
  if (frac) return static_cast<mrcd::Index>(std::ceil(*frac * static_cast<double>(n)));
  return mrcd::default_subset_size(n);
}

// Writes `text` to `path`, or to stdout when `path` is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw mrcd::IoError("cannot write " + path);
}

Json vector_json(const mrcd::Vector& v) {
  Json a = Json::array();
  for (mrcd::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const mrcd::Matrix& m) {
  Json rows = Json::array();
  for (mrcd::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

std::string row_name(const mrcd::DataMatrix& x, mrcd::Index i) {
  if (!x.row_labels.empty()) return x.row_labels[static_cast<std::size_t>(i)];
  return std::to_string(i + 1);
}

struct FitArgs {
  std::string input;
  std::optional<long long> h;
  std::optional<double> h_frac;
  std::string target = "equicorr";
  std::string cutoff = "chi2";
  std::string rescaling = "consistency";
  bool no_cap_condition = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string id_column;
};

int run_fit(const FitArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const mrcd::DataMatrix x = mrcd::read_data_csv(
      a.input, a.id_column.empty() ? std::nullopt : std::optional(a.id_column));
  mrcd::FitOptions options;
  options.cutoff = parse_cutoff(a.cutoff);
  options.rescaling = parse_rescaling(a.rescaling);
  options.cap_final_condition = !a.no_cap_condition;
  const mrcd::Index h = resolve_h(a.h, a.h_frac, x.rows());
  const TargetChoice target = parse_target(a.target);

  const mrcd::PreparedData prepared = prepare_for(x, target);
  const mrcd::MrcdFit fit =
      mrcd::assemble_fit(x, prepared, mrcd::search_subset(prepared, h, options), options);

  mrcd::ReportOptions ro;
  ro.seed = a.seed;
  ro.input = a.input;
  ro.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.out.empty()) ro.sidecar_stem = std::filesystem::path(a.out).stem().string();
  const mrcd::FitReport report = mrcd::make_report(fit, x, ro);
  if (a.out.empty()) {
    std::cout << mrcd::to_json(report);
    return kOk;
  }
  mrcd::write_report(a.out, report);
  std::cout << "n=" << fit.n << " p=" << fit.p << " h=" << fit.h << " rho=" << fit.rho
            << " condition=" << fit.core_condition << " flagged=" << fit.flagged.size()
            << "\n";
  return kOk;
}

struct ScanArgs {
  std::string input;
  std::optional<long long> h_min;
  std::optional<long long> h_max;
  std::string target = "equicorr";
  std::string rescaling = "consistency";
  std::uint64_t seed = 0;
  std::string out;
};

int run_scan(const ScanArgs& a) {
  const mrcd::DataMatrix x = mrcd::read_data_csv(a.input);
  const mrcd::Index n = x.rows();
  const mrcd::Index lo = a.h_min ? static_cast<mrcd::Index>(*a.h_min) : (n + 1) / 2;
  const mrcd::Index hi = a.h_max ? static_cast<mrcd::Index>(*a.h_max) : n;
  if (lo > hi) throw mrcd::SubsetSizeError("--h-min exceeds --h-max");
  std::vector<mrcd::Index> hs;
  for (mrcd::Index h = lo; h <= hi; ++h) hs.push_back(h);

  mrcd::FitOptions options;
  options.rescaling = parse_rescaling(a.rescaling);
  const auto rows = mrcd::scan_h(prepare_for(x, parse_target(a.target)), hs, options);

  std::string text = "h,objective,frobenius_gap,rho\n";
  for (const mrcd::ScanRow& r : rows) {
    text += std::to_string(r.h) + "," + mrcd::format_double(r.objective) + "," +
            (r.frobenius_gap ? mrcd::format_double(*r.frobenius_gap) : std::string()) +
            "," + mrcd::format_double(r.rho) + "\n";
  }
  emit(a.out, text);
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int run_simulate(const SimulateArgs& a) {
  mrcd::sim::SimConfig cfg = mrcd::sim::load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  for (const std::string& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  const mrcd::sim::SimResult result = mrcd::sim::run_experiment(cfg);
  std::cout << mrcd::sim::format_table(result);
  std::ostringstream csv;
  mrcd::sim::write_csv(csv, result);
  if (!a.out.empty()) emit(a.out, csv.str());
  for (const auto& r : result.records) {
    if (r.error) {
      std::cerr << "replication " << r.replication << " (" << mrcd::sim::to_string(r.estimator)
                << ", h=" << r.h << ") failed: " << *r.error << "\n";
    }
  }
  return kOk;
}

struct RegressArgs {
  std::string input;
  std::string response;
  std::optional<long long> h;
  std::optional<double> h_frac;
  std::string target = "identity";
  std::uint64_t seed = 0;
  std::string id_column;
  std::string out;
};

int run_regress(const RegressArgs& a) {
  const mrcd::DataMatrix x = mrcd::read_data_csv(
      a.input, a.id_column.empty() ? std::nullopt : std::optional(a.id_column));
  const mrcd::Index h = resolve_h(a.h, a.h_frac, x.rows());
  const TargetChoice target = parse_target(a.target);
  if (!target.rule) {
    throw CLI::ValidationError("--target", "regress supports identity or equicorr");
  }
  const mrcd::RobustRegressionFit r = mrcd::mrcd_regression(x, a.response, h, *target.rule);

  Json j;
  j["version"] = MRCD_VERSION;
  j["seed"] = a.seed;
  j["input"] = a.input;
  j["response"] = a.response;
  j["h"] = h;
  j["rho"] = r.joint.rho;
  j["predictors"] = r.predictor_names;
  j["slopes"] = vector_json(r.slopes);
  j["intercept"] = r.intercept;
  j["ols_slopes"] = vector_json(r.ols_slopes);
  j["ols_intercept"] = r.ols_intercept;
  Json excluded = Json::array();
  for (mrcd::Index i : r.excluded_rows) excluded.push_back(row_name(x, i));
  j["excluded"] = excluded;
  if (!a.out.empty()) emit(a.out, j.dump(2) + "\n");

  std::cout << "predictor,mrcd,ols\n";
  for (std::size_t k = 0; k < r.predictor_names.size(); ++k) {
    const auto i = static_cast<mrcd::Index>(k);
    std::cout << r.predictor_names[k] << "," << mrcd::format_double(r.slopes(i)) << ","
              << mrcd::format_double(r.ols_slopes(i)) << "\n";
  }
  std::cout << "(intercept)," << mrcd::format_double(r.intercept) << ","
            << mrcd::format_double(r.ols_intercept) << "\n";
  std::cout << "excluded:";
  for (const auto& e : excluded) std::cout << " " << e.get<std::string>();
  std::cout << "\n";
  return kOk;
}

struct OgkArgs {
  std::string input;
  std::uint64_t seed = 0;
  std::string out;
};

int run_ogk(const OgkArgs& a) {
  const mrcd::DataMatrix x = mrcd::read_data_csv(a.input);
  const mrcd::OgkFit f = mrcd::ogk_fit(x);
  Json j;
  j["version"] = MRCD_VERSION;
  j["seed"] = a.seed;
  j["input"] = a.input;
  Json cols = Json::array();
  for (mrcd::Index k = 0; k < x.cols(); ++k) cols.push_back(x.column_name(k));
  j["columns"] = cols;
  j["location"] = vector_json(f.location);
  j["scatter"] = matrix_json(f.scatter);
  emit(a.out, j.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum regularized covariance determinant estimation"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(MRCD_VERSION));
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit location and scatter, write a JSON report");
  fit->add_option("input", fit_args.input, "CSV with a header row")->required();
  auto* h_opt = fit->add_option("--h", fit_args.h, "Subset size");
  fit->add_option("--h-frac", fit_args.h_frac, "Subset size as a fraction of n")
      ->excludes(h_opt);
  fit->add_option("--target", fit_args.target, "identity, equicorr or file=PATH")
      ->capture_default_str();
  fit->add_option("--cutoff", fit_args.cutoff,
                  "chi2, chi2:LEVEL, empirical:LEVEL or a fixed distance")
      ->capture_default_str();
  fit->add_option("--rescaling", fit_args.rescaling, "consistency or correlation")
      ->capture_default_str();
  fit->add_flag("--no-cap-condition", fit_args.no_cap_condition,
                "Keep the rho of the starting subsets even if the final core exceeds condition 1000");
  fit->add_option("--seed", fit_args.seed, "Recorded in the report");
  fit->add_option("--out", fit_args.out, "Report path (stdout if omitted)");
  fit->add_option("--id-column", fit_args.id_column, "Non-numeric label column");

  ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan-h", "Objective and scatter change over a range of h");
  scan->add_option("input", scan_args.input, "CSV with a header row")->required();
  scan->add_option("--h-min", scan_args.h_min, "Smallest h (default ceil(n/2))");
  scan->add_option("--h-max", scan_args.h_max, "Largest h (default n)");
  scan->add_option("--target", scan_args.target, "identity, equicorr or file=PATH")
      ->capture_default_str();
  scan->add_option("--rescaling", scan_args.rescaling, "consistency or correlation")
      ->capture_default_str();
  scan->add_option("--seed", scan_args.seed, "Accepted for symmetry; the scan is deterministic");
  scan->add_option("--out", scan_args.out, "CSV path (stdout if omitted)");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
  simulate->add_option("config", sim_args.config, "key = value config file")->required();
  simulate->add_option("--out", sim_args.out, "Results CSV");
  simulate->add_option("--seed", sim_args.seed, "Override the config seed");
  simulate->add_option("--threads", sim_args.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  RegressArgs reg_args;
  auto* regress = app.add_subcommand("regress", "Regression from the MRCD scatter");
  regress->add_option("input", reg_args.input, "CSV with a header row")->required();
  regress->add_option("--response", reg_args.response, "Response column")->required();
  auto* rh = regress->add_option("--h", reg_args.h, "Subset size");
  regress->add_option("--h-frac", reg_args.h_frac, "Subset size as a fraction of n")
      ->excludes(rh);
  regress->add_option("--target", reg_args.target, "identity or equicorr")
      ->capture_default_str();
  regress->add_option("--seed", reg_args.seed, "Recorded in the output");
  regress->add_option("--id-column", reg_args.id_column, "Non-numeric label column");
  regress->add_option("--out", reg_args.out, "JSON path");

  OgkArgs ogk_args;
  auto* ogk = app.add_subcommand("ogk", "Orthogonalized Gnanadesikan-Kettenring estimate");
  ogk->add_option("input", ogk_args.input, "CSV with a header row")->required();
  ogk->add_option("--seed", ogk_args.seed, "Recorded in the output");
  ogk->add_option("--out", ogk_args.out, "JSON path (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) return run_fit(fit_args);
    if (*scan) return run_scan(scan_args);
    if (*simulate) return run_simulate(sim_args);
    if (*regress) return run_regress(reg_args);
    if (*ogk) return run_ogk(ogk_args);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const mrcd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnreadable;
  } catch (const mrcd::DegenerateVariableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const mrcd::SubsetSizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadSubsetSize;
  } catch (const mrcd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
