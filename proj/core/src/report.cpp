#include "mrcd/report.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "mrcd/csv.hpp"
#include "mrcd/error.hpp"

namespace mrcd {

namespace {

using Json = nlohmann::ordered_json;

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

Vector vector_from(const Json& a) {
  Vector v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
  return v;
}

Matrix matrix_from(const Json& rows) {
  const auto r = static_cast<Index>(rows.size());
  const Index c = r > 0 ? static_cast<Index>(rows[0].size()) : 0;
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != c) throw IoError("report: ragged matrix");
    for (Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

}  // namespace

FitReport make_report(const MrcdFit& fit, const DataMatrix& x,
                      const ReportOptions& options) {
  FitReport r;
  r.version = MRCD_VERSION;
  r.seed = options.seed;
  r.input = options.input;
  r.n = fit.n;
  r.p = fit.p;
  r.h = fit.h;
  switch (fit.target.kind) {
    case TargetSpec::Kind::identity:
      r.target = "identity";
      break;
    case TargetSpec::Kind::equicorrelation:
      r.target = "equicorrelation";
      r.target_correlation = fit.target.equicorrelation;
      break;
    case TargetSpec::Kind::custom:
      r.target = "custom";
      break;
  }
  r.rho = fit.rho;
  r.c_alpha = fit.c_alpha;
  r.objective = fit.objective;
  r.core_condition = fit.core_condition;
  r.scatter_condition = fit.scatter_condition;
  r.cutoff = fit.cutoff;
  r.seconds = options.seconds;
  for (Index j = 0; j < x.cols(); ++j) r.columns.push_back(x.column_name(j));
  r.row_labels = x.row_labels;
  r.location = fit.location;
  r.scatter = fit.scatter;
  r.precision = fit.precision;
  if (fit.p > kInlineMatrixLimit) {
    r.scatter_file = options.sidecar_stem + ".scatter.csv";
    r.precision_file = options.sidecar_stem + ".precision.csv";
  }
  r.subset.reserve(fit.subset.size());
  for (Index i : fit.subset) r.subset.push_back(i + 1);
  r.distances = fit.distances;
  for (Index i : fit.flagged) r.flagged.push_back(i + 1);
  return r;
}

std::string to_json(const FitReport& r) {
  Json j;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["input"] = r.input;
  j["n"] = r.n;
  j["p"] = r.p;
  j["h"] = r.h;
  j["target"] = r.target;
  if (r.target_correlation) j["target_correlation"] = *r.target_correlation;
  j["rho"] = r.rho;
  j["c_alpha"] = r.c_alpha;
  j["objective"] = r.objective;
  j["core_condition"] = r.core_condition;
  j["scatter_condition"] = r.scatter_condition;
  j["cutoff"] = r.cutoff;
  j["seconds"] = r.seconds;
  j["columns"] = r.columns;
  if (!r.row_labels.empty()) j["row_labels"] = r.row_labels;
  j["location"] = vector_json(r.location);
  if (r.scatter_file.empty()) {
    j["scatter"] = matrix_json(r.scatter);
  } else {
    j["scatter_file"] = r.scatter_file;
  }
  if (r.precision_file.empty()) {
    j["precision"] = matrix_json(r.precision);
  } else {
    j["precision_file"] = r.precision_file;
  }
  // Indices are stored 1-based already.
  Json subset = Json::array();
  for (Index i : r.subset) subset.push_back(i);
  j["subset"] = subset;
  j["distances"] = vector_json(r.distances);
  Json flagged = Json::array();
  for (Index i : r.flagged) flagged.push_back(i);
  j["flagged"] = flagged;
  return j.dump(2) + "\n";
}

FitReport parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
  FitReport r;
  try {
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.input = j.at("input").get<std::string>();
    r.n = j.at("n").get<Index>();
    r.p = j.at("p").get<Index>();
    r.h = j.at("h").get<Index>();
    r.target = j.at("target").get<std::string>();
    if (j.contains("target_correlation")) {
      r.target_correlation = j["target_correlation"].get<double>();
    }
    r.rho = j.at("rho").get<double>();
    r.c_alpha = j.at("c_alpha").get<double>();
    r.objective = j.at("objective").get<double>();
    r.core_condition = j.at("core_condition").get<double>();
    r.scatter_condition = j.at("scatter_condition").get<double>();
    r.cutoff = j.at("cutoff").get<double>();
    r.seconds = j.at("seconds").get<double>();
    r.columns = j.at("columns").get<std::vector<std::string>>();
    if (j.contains("row_labels")) {
      r.row_labels = j["row_labels"].get<std::vector<std::string>>();
    }
    r.location = vector_from(j.at("location"));
    if (j.contains("scatter_file")) {
      r.scatter_file = j["scatter_file"].get<std::string>();
    } else {
      r.scatter = matrix_from(j.at("scatter"));
    }
    if (j.contains("precision_file")) {
      r.precision_file = j["precision_file"].get<std::string>();
    } else {
      r.precision = matrix_from(j.at("precision"));
    }
    r.subset = j.at("subset").get<std::vector<Index>>();
    r.distances = vector_from(j.at("distances"));
    r.flagged = j.at("flagged").get<std::vector<Index>>();
  } catch (const Json::exception& e) {
    throw IoError(std::string("report: ") + e.what());
  }
  return r;
}

void write_report(const std::string& path, const FitReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(report);
  if (!out) throw IoError("write failed for " + path);
  const auto dir = std::filesystem::path(path).parent_path();
  if (!report.scatter_file.empty()) {
    write_matrix_csv((dir / report.scatter_file).string(), report.scatter);
  }
  if (!report.precision_file.empty()) {
    write_matrix_csv((dir / report.precision_file).string(), report.precision);
  }
}

}  // namespace mrcd
