#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "svycal/error.hpp"
#include "svycal/io.hpp"

using namespace svycal;

namespace {

std::string data_dir() {
  const char* env = std::getenv("SVYCAL_DATA_DIR");
  REQUIRE(env != nullptr);
  return env;
}

}  // namespace

TEST_CASE("population parsing accepts headers, comments, and delimiters") {
  std::istringstream with_header("y,x\n1.5,2\n3,4\n");
  const FinitePopulation a = read_population(with_header);
  CHECK(a.size() == 2);
  CHECK(a.y()[0] == 1.5);
  CHECK(a.x()[1] == 4.0);

  std::istringstream bare("1.5,2\n3,4\n");
  const FinitePopulation b = read_population(bare);
  CHECK(b.total_y() == doctest::Approx(4.5));

  std::istringstream semi("# comment\n1.5;2\n3;4\n");
  const FinitePopulation c = read_population(semi, ';');
  CHECK(c.total_x() == doctest::Approx(6.0));

  std::istringstream swapped("x,y\n2,1.5\n4,3\n");
  const FinitePopulation d = read_population(swapped, ',', ColumnMap{1, 0});
  CHECK(d.y()[0] == 1.5);
  CHECK(d.x()[0] == 2.0);

  std::istringstream crlf("1,2\r\n3,4\r\n");
  CHECK(read_population(crlf).size() == 2);
}

TEST_CASE("population parse failures carry line and column") {
  std::istringstream bad("1,2\n3,oops\n");
  try {
    read_population(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "parse-error");
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
  std::istringstream short_row("1,2\n3\n");
  try {
    read_population(short_row);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("missing column") != std::string::npos);
  }
}

TEST_CASE("bundled populations load") {
  const FinitePopulation pop20 = read_population_file(data_dir() + "/pop20.csv");
  CHECK(pop20.size() == 20);
  const FinitePopulation pop10 = read_population_file(data_dir() + "/pop10.csv");
  CHECK(pop10.size() == 10);
}

TEST_CASE("q specifications resolve to uniform values or files") {
  const std::vector<double> uniform = resolve_q_spec("2.5", 3);
  CHECK(uniform == std::vector<double>{2.5, 2.5, 2.5});
  CHECK(resolve_q_spec("", 2) == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(resolve_q_spec("-1", 2), Error);

  const std::string path = "/tmp/svycal_test_q.txt";
  {
    std::ofstream out(path);
    out << "0.5\n1.5\n2.5\n";
  }
  CHECK(resolve_q_spec(path, 3) == std::vector<double>{0.5, 1.5, 2.5});
  CHECK_THROWS_AS(resolve_q_spec(path, 4), Error);
  std::remove(path.c_str());
}

TEST_CASE("stratified input groups rows and reads the sidecar") {
  const StratifiedInput input = read_stratified_files(
      data_dir() + "/strat.csv", data_dir() + "/strat.sizes");
  CHECK(input.sample.stratum_count() == 3);
  CHECK(input.labels == std::vector<std::string>{"A", "B", "C"});
  CHECK(input.sample.strata()[0].population_size == 40);
  CHECK(input.sample.sample_size(1) == 5);
  CHECK(input.sample.total_population() == 130);
  REQUIRE(input.known_x_variance.count("B") == 1);
  CHECK(input.known_x_variance.at("B") == doctest::Approx(0.55));

  std::istringstream data("A,1,2\nA,2,3\nD,4,5\nD,6,7\n");
  std::istringstream sizes("A = 10\n");
  CHECK_THROWS_WITH_AS(read_stratified(data, sizes),
                       doctest::Contains("'D' has no population size"), Error);
}

TEST_CASE("reports survive a round trip through the csv form") {
  ExperimentReport finite;
  finite.scenario = "monte-carlo";
  finite.n = 50;
  finite.rho_or_transform = "0.7";
  finite.mse_lr = 1.2345678901234567;
  finite.mse_ds = 2.0000000000000004;
  finite.re_status = ReStatus::kFinite;
  finite.re_percent = 100.0 * finite.mse_ds / finite.mse_lr;
  finite.sample_count = 15000;
  finite.skipped = 3;

  ExperimentReport infinite = finite;
  infinite.scenario = "enumeration";
  infinite.rho_or_transform = "sqrt:y";
  infinite.re_status = ReStatus::kInfinite;

  ExperimentReport undefined = finite;
  undefined.re_status = ReStatus::kUndefined;

  const std::vector<ExperimentReport> reports{finite, infinite, undefined};
  const std::string csv = format_report_csv(reports, ',');
  std::istringstream in(csv);
  const std::vector<ExperimentReport> parsed = parse_report_csv(in, ',');
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].scenario == "monte-carlo");
  CHECK(parsed[0].n == 50);
  CHECK(parsed[0].rho_or_transform == "0.7");
  CHECK(parsed[0].mse_lr == finite.mse_lr);  // exact: %.17g round-trips
  CHECK(parsed[0].mse_ds == finite.mse_ds);
  CHECK(parsed[0].re_percent == finite.re_percent);
  CHECK(parsed[0].skipped == 3);
  CHECK(parsed[1].re_status == ReStatus::kInfinite);
  CHECK(parsed[2].re_status == ReStatus::kUndefined);

  // Alternate delimiter follows the same rules.
  const std::string semi = format_report_csv(reports, ';');
  std::istringstream in2(semi);
  CHECK(parse_report_csv(in2, ';').size() == 3);
}

TEST_CASE("machine format keeps 17 significant digits") {
  const double value = 0.1 + 0.2;
  CHECK(std::stod(format_full(value)) == value);
  CHECK(format_human(123.456) == "123.46");
  CHECK(format_human(2.0) == "2.00");
}

TEST_CASE("human table renders every report row") {
  ExperimentReport r;
  r.scenario = "enumeration";
  r.n = 5;
  r.rho_or_transform = "log:x";
  r.mse_lr = 0.5;
  r.mse_ds = 1.0;
  r.re_status = ReStatus::kFinite;
  r.re_percent = 200.0;
  const std::string table = format_report_table(std::vector<ExperimentReport>{r});
  CHECK(table.find("log:x") != std::string::npos);
  CHECK(table.find("200.00") != std::string::npos);
}
