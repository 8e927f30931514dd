#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrcd/csv.hpp"
#include "mrcd/error.hpp"
#include "mrcd/report.hpp"
#include "support.hpp"

using namespace mrcd;

namespace {

DataMatrix parse(const std::string& text, std::optional<std::string> id = {}) {
  std::istringstream in(text);
  return parse_data_csv(in, id);
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mrcd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("data CSV") {
  const DataMatrix d = parse("a,b\n1,2\n3.5,-4e2\n");
  CHECK(d.rows() == 2);
  CHECK(d.column_names == std::vector<std::string>{"a", "b"});
  CHECK(d.values(1, 1) == -400.0);

  const DataMatrix l = parse("state,x\nOhio,1\nIowa,2\n", "state");
  CHECK(l.cols() == 1);
  CHECK(l.row_labels == std::vector<std::string>{"Ohio", "Iowa"});

  CHECK_THROWS_AS(parse("a,b\n1,2\n3\n"), IoError);
  CHECK_THROWS_AS(parse("a,b\n1,x\n"), IoError);
  CHECK_THROWS_AS(parse("a,b\n1,2\n", "id"), IoError);
  CHECK_THROWS_AS(read_data_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("numbers round-trip through their text form") {
  support::Rng rng(60);
  std::uniform_real_distribution<double> e(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, e(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("matrix CSV round trip") {
  const auto dir = scratch_dir("matrix");
  support::Rng rng(61);
  const Matrix m = support::gaussian(4, 3, rng);
  write_matrix_csv((dir / "m.csv").string(), m);
  CHECK(read_matrix_csv((dir / "m.csv").string()) == m);
}

TEST_CASE("report JSON round trip") {
  support::Rng rng(62);
  DataMatrix x;
  x.values = support::gaussian(30, 3, rng);
  x.column_names = {"a", "b", "c"};
  const MrcdFit f = fit(x, 23, TargetRule::equicorrelation);
  ReportOptions opt;
  opt.seed = 11;
  opt.input = "data.csv";
  const FitReport r = make_report(f, x, opt);
  CHECK(r.n == 30);
  CHECK(r.target == "equicorrelation");
  REQUIRE(r.subset.size() == 23);
  CHECK(r.subset.front() == f.subset.front() + 1);
  const std::string json = to_json(r);
  const FitReport back = parse_report(json);
  CHECK(to_json(back) == json);
  CHECK(back.scatter == f.scatter);
  CHECK(back.distances == f.distances);
}

TEST_CASE("large matrices go to sidecar files") {
  support::Rng rng(63);
  DataMatrix x;
  x.values = support::gaussian(40, 201, rng);
  const MrcdFit f = fit(x, 30, TargetRule::identity);
  const auto dir = scratch_dir("report");
  ReportOptions opt;
  opt.sidecar_stem = "fit";
  const FitReport r = make_report(f, x, opt);
  CHECK_FALSE(r.scatter_file.empty());
  write_report((dir / "fit.json").string(), r);
  CHECK(std::filesystem::exists(dir / r.scatter_file));
  CHECK(std::filesystem::exists(dir / r.precision_file));
  CHECK(read_matrix_csv((dir / r.scatter_file).string()) == f.scatter);
  std::ifstream in(dir / "fit.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(parse_report(text).scatter.size() == 0);
}

}
