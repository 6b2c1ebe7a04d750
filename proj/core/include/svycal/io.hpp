#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svycal/design.hpp"
#include "svycal/experiment.hpp"
#include "svycal/stratified.hpp"

namespace svycal {

// Which 0-based field holds which variable.
struct ColumnMap {
  int y = 0;
  int x = 1;
};

// Delimiter-separated rows of (y, x) values, one unit per line. A first line
// that does not parse as numbers is treated as a header. Failures name the
// offending line and column.
FinitePopulation read_population(std::istream& in, char delimiter = ',',
                                 ColumnMap columns = {});
FinitePopulation read_population_file(const std::string& path, char delimiter = ',',
                                      ColumnMap columns = {});

// Three-column rows (stratum-label, y, x) plus a sidecar key-value section
// holding the stratum population sizes ("<label> = N_h") and optionally the
// known per-stratum x-variances ("shx2.<label> = value").
struct StratifiedInput {
  StratifiedSample sample;
  std::vector<std::string> labels;                // stratum order of appearance
  std::map<std::string, double> known_x_variance; // from shx2.* keys
};
StratifiedInput read_stratified(std::istream& data, std::istream& sizes,
                                char delimiter = ',');
StratifiedInput read_stratified_files(const std::string& data_path,
                                      const std::string& sizes_path,
                                      char delimiter = ',');

// A q specification is either a number (uniform) or a path to a file with
// one value per line.
std::vector<double> resolve_q_spec(const std::string& spec, std::size_t count);

// Machine report: 17 significant digits, header row, '#'-prefixed comment
// lines allowed. Human table: 2 decimals.
std::string format_report_csv(std::span<const ExperimentReport> reports,
                              char delimiter = ',');
std::string format_report_table(std::span<const ExperimentReport> reports);
std::vector<ExperimentReport> parse_report_csv(std::istream& in, char delimiter = ',');

// printf round-trip formatting helpers used for all machine output.
std::string format_full(double value);   // %.17g
std::string format_human(double value);  // %.2f

}  // namespace svycal
