#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mrcd/error.hpp"
#include "mrcd/simulation.hpp"

namespace mrcd::sim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_integer(const std::string& s) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> to_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : split(s, ',')) {
    const auto v = to_double(part);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<Vector> to_vector(const std::string& s, Index size) {
  const auto list = to_list(s);
  if (!list || static_cast<Index>(list->size()) != size) return std::nullopt;
  return Eigen::Map<const Vector>(list->data(), size);
}

// Rows separated by ';', entries by ','; must be square and symmetric.
std::optional<Matrix> to_matrix(const std::string& s, Index size) {
  const auto rows = split(s, ';');
  if (static_cast<Index>(rows.size()) != size) return std::nullopt;
  Matrix m(size, size);
  for (Index i = 0; i < size; ++i) {
    const auto row = to_vector(rows[static_cast<std::size_t>(i)], size);
    if (!row) return std::nullopt;
    m.row(i) = row->transpose();
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return std::nullopt;
  return m;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n",           "p",           "dgp",          "epsilon",     "k",
      "h_fractions", "M",           "seed",         "estimators",  "condition",
      "target",      "threads",     "factor_mean",  "factor_cov",  "loading_mean",
      "loading_cov", "gamma_shape", "gamma_scale",  "sd_floor"};
  return keys;
}

}  // namespace

SimConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> values;
  std::vector<std::string> bad;
  std::vector<std::string> problems;
  auto reject = [&](const std::string& key, const std::string& why) {
    if (std::find(bad.begin(), bad.end(), key) == bad.end()) bad.push_back(key);
    problems.push_back(key + ": " + why);
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      reject("line " + std::to_string(line_no), "expected key = value");
      continue;
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (!known_keys().count(key)) {
      reject(key.empty() ? "line " + std::to_string(line_no) : key, "unknown key");
      continue;
    }
    if (values.count(key)) {
      reject(key, "given more than once");
      continue;
    }
    values[key] = value;
  }

  SimConfig cfg;
  auto count = [&](const std::string& key, std::int64_t minimum, auto& field) {
    const auto it = values.find(key);
    if (it == values.end()) return;
    const auto v = to_integer(it->second);
    if (!v || *v < minimum) {
      reject(key, "expected an integer >= " + std::to_string(minimum));
      return;
    }
    field = static_cast<std::decay_t<decltype(field)>>(*v);
  };
  auto real = [&](const std::string& key, double lo, double hi, bool open_hi,
                  double& field) {
    const auto it = values.find(key);
    if (it == values.end()) return;
    const auto v = to_double(it->second);
    if (!v || *v < lo || *v > hi || (open_hi && *v == hi)) {
      reject(key, "value out of range");
      return;
    }
    field = *v;
  };

  for (const char* required : {"n", "p"}) {
    if (!values.count(required)) reject(required, "required key missing");
  }
  count("n", 2, cfg.n);
  count("p", 1, cfg.p);
  count("M", 1, cfg.replications);
  count("threads", 1, cfg.threads);
  if (const auto it = values.find("seed"); it != values.end()) {
    const auto v = to_integer(it->second);
    if (!v || *v < 0) {
      reject("seed", "expected a non-negative integer");
    } else {
      cfg.seed = static_cast<std::uint64_t>(*v);
    }
  }
  real("epsilon", 0.0, 0.5, true, cfg.epsilon);
  real("k", 0.0, 1e300, false, cfg.k);
  real("condition", 1.0, 1e300, false, cfg.condition);

  if (const auto it = values.find("dgp"); it != values.end()) {
    if (it->second == "alyz") {
      cfg.dgp = DataModel::alyz;
    } else if (it->second == "factor") {
      cfg.dgp = DataModel::factor;
    } else {
      reject("dgp", "expected alyz or factor");
    }
  }
  if (const auto it = values.find("target"); it != values.end()) {
    if (it->second == "identity") {
      cfg.target = TargetRule::identity;
    } else if (it->second == "equicorrelation" || it->second == "equicorr") {
      cfg.target = TargetRule::equicorrelation;
    } else {
      reject("target", "expected identity or equicorrelation");
    }
  }
  if (const auto it = values.find("h_fractions"); it != values.end()) {
    const auto list = to_list(it->second);
    if (!list || std::any_of(list->begin(), list->end(),
                             [](double f) { return f < 0.5 || f > 1.0; })) {
      reject("h_fractions", "expected a comma list of fractions in [0.5, 1]");
    } else {
      cfg.h_fractions = *list;
    }
  }
  if (const auto it = values.find("estimators"); it != values.end()) {
    std::vector<EstimatorKind> list;
    bool ok = true;
    for (const std::string& name : split(it->second, ',')) {
      if (name == "mrcd") {
        list.push_back(EstimatorKind::mrcd);
      } else if (name == "mcd") {
        list.push_back(EstimatorKind::mcd);
      } else if (name == "ogk") {
        list.push_back(EstimatorKind::ogk);
      } else {
        ok = false;
      }
    }
    if (!ok || list.empty()) {
      reject("estimators", "expected a comma list of mrcd, mcd, ogk");
    } else {
      cfg.estimators = list;
    }
  }

  FactorModelParams& f = cfg.factor;
  const Index r = f.factor_mean.size();
  auto vec = [&](const std::string& key, Vector& field) {
    const auto it = values.find(key);
    if (it == values.end()) return;
    const auto v = to_vector(it->second, r);
    if (!v) {
      reject(key, "expected " + std::to_string(r) + " comma-separated numbers");
    } else {
      field = *v;
    }
  };
  auto mat = [&](const std::string& key, Matrix& field) {
    const auto it = values.find(key);
    if (it == values.end()) return;
    const auto m = to_matrix(it->second, r);
    if (!m) {
      reject(key, "expected a symmetric " + std::to_string(r) + "x" +
                      std::to_string(r) + " matrix, rows separated by ';'");
    } else {
      field = *m;
    }
  };
  vec("factor_mean", f.factor_mean);
  vec("loading_mean", f.loading_mean);
  mat("factor_cov", f.factor_cov);
  mat("loading_cov", f.loading_cov);
  real("gamma_shape", 0.0, 1e300, false, f.gamma_shape);
  real("gamma_scale", 0.0, 1e300, false, f.gamma_scale);
  real("sd_floor", 0.0, 1e300, false, f.sd_floor);

  if (bad.empty() && cfg.dgp == DataModel::alyz && cfg.p < 2) {
    reject("p", "the alyz model needs p >= 2");
  }

  if (!bad.empty()) {
    std::string what = "invalid simulation config:";
    for (const std::string& p : problems) what += "\n  " + p;
    throw ConfigError(what, bad);
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file " + path);
  }
  return parse_config(in);
}

}  // namespace mrcd::sim
