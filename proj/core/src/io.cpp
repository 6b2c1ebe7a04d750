#include "svycal/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "svycal/error.hpp"

namespace svycal {

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == delimiter) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size();
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t column,
                             const std::string& detail) {
  fail("parse-error", "line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + detail);
}

double require_double(const std::string& field, std::size_t line, std::size_t column) {
  double v = 0.0;
  if (!parse_double(field, v))
    parse_fail(line, column, "'" + trim(field) + "' is not a number");
  return v;
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io-error", "cannot open '" + path + "'");
  return in;
}

}  // namespace

FinitePopulation read_population(std::istream& in, char delimiter, ColumnMap columns) {
  std::vector<double> y, x;
  std::string line;
  std::size_t line_no = 0;
  const int needed = std::max(columns.y, columns.x) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const std::vector<std::string> fields = split_line(line, delimiter);
    double yv = 0.0, xv = 0.0;
    const bool numeric =
        static_cast<int>(fields.size()) >= needed &&
        parse_double(fields[static_cast<std::size_t>(columns.y)], yv) &&
        parse_double(fields[static_cast<std::size_t>(columns.x)], xv);
    if (!numeric) {
      // One non-numeric leading line is an optional header.
      if (line_no == 1 && y.empty()) continue;
      if (static_cast<int>(fields.size()) < needed)
        parse_fail(line_no, fields.size() + 1, "missing column");
      double probe = 0.0;
      const std::size_t bad_col =
          parse_double(fields[static_cast<std::size_t>(columns.y)], probe)
              ? static_cast<std::size_t>(columns.x)
              : static_cast<std::size_t>(columns.y);
      parse_fail(line_no, bad_col + 1, "'" + trim(fields[bad_col]) + "' is not a number");
    }
    y.push_back(yv);
    x.push_back(xv);
  }
  if (y.size() < 2) fail("parse-error", "population input has fewer than 2 units");
  return FinitePopulation(std::move(y), std::move(x));
}

FinitePopulation read_population_file(const std::string& path, char delimiter,
                                      ColumnMap columns) {
  std::ifstream in = open_or_fail(path);
  return read_population(in, delimiter, columns);
}

StratifiedInput read_stratified(std::istream& data, std::istream& sizes,
                                char delimiter) {
  // Sidecar: "<label> = N_h" and "shx2.<label> = value" entries.
  std::map<std::string, std::size_t> stratum_sizes;
  std::map<std::string, double> known_x_variance;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(sizes, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail("parse-error", "sizes line " + std::to_string(line_no) +
                              ", column 1: expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.rfind("shx2.", 0) == 0) {
      double v = 0.0;
      if (!parse_double(value, v))
        fail("parse-error", "sizes line " + std::to_string(line_no) +
                                ": '" + value + "' is not a number");
      known_x_variance[key.substr(5)] = v;
    } else {
      double v = 0.0;
      if (!parse_double(value, v) || v < 1.0 || v != std::floor(v))
        fail("parse-error", "sizes line " + std::to_string(line_no) +
                                ": '" + value + "' is not a positive integer");
      stratum_sizes[key] = static_cast<std::size_t>(v);
    }
  }

  std::vector<std::string> labels;
  std::map<std::string, Stratum> strata;
  line_no = 0;
  while (std::getline(data, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    const std::vector<std::string> fields = split_line(line, delimiter);
    if (fields.size() < 3) parse_fail(line_no, fields.size() + 1, "missing column");
    const std::string label = trim(fields[0]);
    double yv = 0.0, xv = 0.0;
    const bool numeric = parse_double(fields[1], yv) && parse_double(fields[2], xv);
    if (!numeric) {
      if (line_no == 1 && labels.empty()) continue;  // optional header
      const std::size_t bad_col = parse_double(fields[1], yv) ? 3 : 2;
      parse_fail(line_no, bad_col, "'" + trim(fields[bad_col - 1]) + "' is not a number");
    }
    auto [it, inserted] = strata.try_emplace(label);
    if (inserted) {
      labels.push_back(label);
      const auto size_it = stratum_sizes.find(label);
      if (size_it == stratum_sizes.end())
        fail("parse-error",
             "stratum '" + label + "' has no population size in the sizes file");
      it->second.population_size = size_it->second;
    }
    it->second.y.push_back(yv);
    it->second.x.push_back(xv);
  }
  if (labels.empty()) fail("parse-error", "stratified input holds no rows");

  std::vector<Stratum> ordered;
  ordered.reserve(labels.size());
  for (const std::string& label : labels) ordered.push_back(std::move(strata[label]));
  return StratifiedInput{StratifiedSample(std::move(ordered)), std::move(labels),
                         std::move(known_x_variance)};
}

StratifiedInput read_stratified_files(const std::string& data_path,
                                      const std::string& sizes_path, char delimiter) {
  std::ifstream data = open_or_fail(data_path);
  std::ifstream sizes = open_or_fail(sizes_path);
  return read_stratified(data, sizes, delimiter);
}

std::vector<double> resolve_q_spec(const std::string& spec, std::size_t count) {
  if (spec.empty()) return std::vector<double>(count, 1.0);
  double uniform = 0.0;
  if (parse_double(spec, uniform)) {
    if (!(uniform > 0.0))
      fail("invalid-config[q]", "uniform q must be strictly positive");
    return std::vector<double>(count, uniform);
  }
  std::ifstream in = open_or_fail(spec);
  std::vector<double> q;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    double v = 0.0;
    if (!parse_double(t, v))
      fail("parse-error",
           "q file line " + std::to_string(line_no) + ": '" + t + "' is not a number");
    q.push_back(v);
  }
  if (q.size() != count)
    fail("invalid-config[q]", "q file holds " + std::to_string(q.size()) +
                                  " values, expected " + std::to_string(count));
  return q;
}

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_human(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string format_report_csv(std::span<const ExperimentReport> reports,
                              char delimiter) {
  const char d = delimiter;
  std::ostringstream out;
  out << "scenario" << d << "n" << d << "rho_or_transform" << d << "mse_lr" << d
      << "mse_ds" << d << "re_percent" << d << "skipped" << '\n';
  for (const ExperimentReport& r : reports) {
    out << r.scenario << d << r.n << d << r.rho_or_transform << d
        << format_full(r.mse_lr) << d << format_full(r.mse_ds) << d << re_to_string(r)
        << d << r.skipped << '\n';
  }
  return out.str();
}

std::string format_report_table(std::span<const ExperimentReport> reports) {
  std::ostringstream out;
  out << "scenario        n     rho/transform   mse_lr        mse_ds        RE(%)    skipped\n";
  for (const ExperimentReport& r : reports) {
    char buf[160];
    const std::string re = r.re_status == ReStatus::kFinite
                               ? format_human(r.re_percent)
                               : re_to_string(r);
    std::snprintf(buf, sizeof(buf), "%-15s %-5d %-15s %-13s %-13s %-8s %llu\n",
                  r.scenario.c_str(), r.n, r.rho_or_transform.c_str(),
                  format_human(r.mse_lr).c_str(), format_human(r.mse_ds).c_str(),
                  re.c_str(), static_cast<unsigned long long>(r.skipped));
    out << buf;
  }
  return out.str();
}

std::vector<ExperimentReport> parse_report_csv(std::istream& in, char delimiter) {
  std::vector<ExperimentReport> reports;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // first non-comment line is the header
      continue;
    }
    const std::vector<std::string> fields = split_line(line, delimiter);
    if (fields.size() != 7) parse_fail(line_no, fields.size() + 1, "expected 7 columns");
    ExperimentReport r;
    r.scenario = trim(fields[0]);
    r.n = static_cast<int>(require_double(fields[1], line_no, 2));
    r.rho_or_transform = trim(fields[2]);
    r.mse_lr = require_double(fields[3], line_no, 4);
    r.mse_ds = require_double(fields[4], line_no, 5);
    const std::string re = trim(fields[5]);
    if (re == "inf") {
      r.re_status = ReStatus::kInfinite;
    } else if (re == "undef") {
      r.re_status = ReStatus::kUndefined;
    } else {
      r.re_status = ReStatus::kFinite;
      r.re_percent = require_double(fields[5], line_no, 6);
    }
    r.skipped = static_cast<std::uint64_t>(require_double(fields[6], line_no, 7));
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace svycal
