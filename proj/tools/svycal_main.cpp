// Command-line front end: data ingestion, estimator invocation, experiment
// execution, and table emission.
//
// Exit status is 0 on success and nonzero exactly when a single
// machine-parseable "error: <code>: <detail>" line was written to stderr.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svycal/calibrate.hpp"
#include "svycal/design.hpp"
#include "svycal/error.hpp"
#include "svycal/experiment.hpp"
#include "svycal/io.hpp"
#include "svycal/stratified.hpp"
#include "svycal/variance.hpp"

namespace {

using namespace svycal;

struct CommonOptions {
  std::string input;
  std::string output;
  std::string delimiter = ",";
  std::string columns = "y,x";
  unsigned threads = 0;  // 0 = library decides
};

char delimiter_char(const CommonOptions& common) {
  if (common.delimiter.size() != 1)
    fail("invalid-config[delimiter]", "delimiter must be a single character");
  return common.delimiter[0];
}

ColumnMap column_map(const CommonOptions& common) {
  if (common.columns == "y,x") return ColumnMap{0, 1};
  if (common.columns == "x,y") return ColumnMap{1, 0};
  fail("invalid-config[columns]", "columns must be 'y,x' or 'x,y'");
}

unsigned resolve_threads(const CommonOptions& common) {
  if (common.threads != 0) return common.threads;
  if (const char* env = std::getenv("SVYCAL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 0;  // auto
}

void emit(const CommonOptions& common, const std::string& machine_text,
          const std::string& human_text) {
  if (!common.output.empty()) {
    std::ofstream out(common.output, std::ios::binary);
    if (!out) fail("io-error", "cannot write '" + common.output + "'");
    out << machine_text;
    std::cout << human_text;
  } else {
    std::cout << machine_text;
  }
}

// The input file holds the observed sample, one "y<delim>x" row per drawn
// unit; population_size fixes the SRSWOR design (census when it equals the
// row count).
DesignSample load_sample(const CommonOptions& common, std::size_t population_size) {
  const FinitePopulation rows =
      read_population_file(common.input, delimiter_char(common), column_map(common));
  const std::size_t n = rows.size();
  if (population_size < n)
    fail("invalid-config[n]", "population size is smaller than the sample file");
  const SrsworDesign design(population_size, n);
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  std::vector<double> pi(n, design.first_order_probability());
  return DesignSample(std::move(indices), rows.y(), rows.x(), std::move(pi),
                      design.joint_probability());
}

std::string key_value(const std::string& key, const std::string& value) {
  return key + "=" + value + "\n";
}

int run_estimate(const CommonOptions& common, std::size_t population_size,
                 const std::string& method, const std::string& q_spec,
                 std::optional<double> aux_total) {
  const DesignSample sample = load_sample(common, population_size);
  std::ostringstream out;
  out << key_value("method", method);
  out << key_value("n", std::to_string(sample.size()));
  if (method == "ht") {
    out << key_value("total", format_full(ht_total(sample)));
  } else {
    if (!aux_total)
      fail("invalid-config[aux-total]", "--aux-total is required for " + method);
    const std::vector<double> q = resolve_q_spec(q_spec, sample.size());
    if (method == "greg") {
      const CalibrationSpec spec = CalibrationSpec::aux_only(*aux_total, q);
      const CalibratedWeights cw = greg_weights(sample, spec);
      const EstimatedTotal t = greg_total(sample, spec);
      out << key_value("total", format_full(t.total));
      out << key_value("slope", format_full(t.slope));
      out << key_value("distance", format_full(cw.distance));
      out << key_value("negative_weights", std::to_string(cw.negative_count));
    } else {  // lr
      const CalibrationSpec spec = CalibrationSpec::with_weight_sum(*aux_total, q);
      const CalibratedWeights cw = lr_weights(sample, spec);
      const EstimatedTotal t = lr_total(sample, spec);
      out << key_value("total", format_full(t.total));
      out << key_value("slope", format_full(t.slope));
      out << key_value("distance", format_full(cw.distance));
      out << key_value("negative_weights", std::to_string(cw.negative_count));
    }
  }
  emit(common, out.str(), out.str());
  return 0;
}

int run_variance(const CommonOptions& common, std::size_t population_size,
                 const std::string& method, const std::string& q_spec,
                 std::optional<double> aux_total, std::optional<double> known_v,
                 std::optional<double> pop_x_variance) {
  const DesignSample sample = load_sample(common, population_size);
  const std::vector<double> q = resolve_q_spec(q_spec, sample.size());
  std::ostringstream out;
  out << key_value("method", method);
  out << key_value("n", std::to_string(sample.size()));

  auto require_aux = [&]() -> double {
    if (!aux_total)
      fail("invalid-config[aux-total]", "--aux-total is required for " + method);
    return *aux_total;
  };

  if (method == "syg") {
    out << key_value("variance", format_full(syg_variance_estimate(sample, sample.y())));
  } else if (method == "ds") {
    const CalibrationSpec spec = CalibrationSpec::aux_only(require_aux(), q);
    const CalibratedWeights cw = greg_weights(sample, spec);
    const ResidualSet res = residuals_through_origin(sample, q);
    out << key_value("variance", format_full(ds_variance_estimate(sample, cw, res)));
  } else if (method == "shy") {
    const CalibrationSpec spec = CalibrationSpec::with_weight_sum(require_aux(), q);
    const CalibratedWeights cw = lr_weights(sample, spec);
    const ResidualSet res = residuals_with_intercept(sample, q);
    out << key_value("variance", format_full(singh_horn_yu_variance(sample, cw, res)));
  } else if (method == "calibrated") {
    if (!known_v)
      fail("invalid-config[known-v]", "--known-v is required for calibrated");
    const CalibrationSpec spec = CalibrationSpec::with_weight_sum(require_aux(), q);
    const CalibratedWeights cw = lr_weights(sample, spec);
    const ResidualSet res = residuals_with_intercept(sample, q);
    const CalibratedVariance cv = calibrated_lr_variance(sample, cw, res, {}, *known_v);
    out << key_value("variance", format_full(cv.estimate));
    out << key_value("b2", format_full(cv.b2));
    out << key_value("uncalibrated", format_full(cv.vs));
    out << key_value("vsyg_x", format_full(cv.vsyg_x));
  } else {  // das-tripathi
    if (!pop_x_variance)
      fail("invalid-config[pop-x-variance]",
           "--pop-x-variance is required for das-tripathi");
    out << key_value("variance", format_full(das_tripathi_variance(sample, *pop_x_variance)));
  }
  emit(common, out.str(), out.str());
  return 0;
}

int run_stratified(const CommonOptions& common, const std::string& sizes_path,
                   const std::string& q_spec, double xbar, bool with_variance,
                   std::optional<double> b_st_override,
                   std::optional<double> known_vx_flag) {
  const StratifiedInput input =
      read_stratified_files(common.input, sizes_path, delimiter_char(common));
  const StratifiedSample& s = input.sample;
  const std::vector<double> q = resolve_q_spec(q_spec, s.stratum_count());

  const CombinedMean combined = combined_lr_mean(s, q, xbar);
  std::ostringstream out;
  out << key_value("strata", std::to_string(s.stratum_count()));
  out << key_value("mean", format_full(combined.mean));
  out << key_value("beta_st", format_full(combined.calibration.beta));
  double sum_w0 = 0.0;
  for (double w : combined.calibration.w0) sum_w0 += w;
  out << key_value("sum_w0", format_full(sum_w0));

  if (with_variance) {
    const double b_st = b_st_override ? *b_st_override : combined_regression_slope(s);
    out << key_value("b_st", format_full(b_st));
    out << key_value("variance",
                     format_full(combined_lr_variance(s, combined.calibration, b_st)));

    // Calibrated variance needs the known stratum x-variances (or an
    // explicit known variance of the stratified auxiliary mean).
    std::optional<double> known_vx = known_vx_flag;
    if (!known_vx && input.known_x_variance.size() == s.stratum_count()) {
      double v = 0.0;
      bool complete = true;
      for (std::size_t h = 0; h < s.stratum_count(); ++h) {
        const auto it = input.known_x_variance.find(input.labels[h]);
        if (it == input.known_x_variance.end()) {
          complete = false;
          break;
        }
        const double wh = s.weight(h);
        v += wh * wh * (1.0 - s.sampling_fraction(h)) /
             static_cast<double>(s.sample_size(h)) * it->second;
      }
      if (complete) known_vx = v;
    }
    if (known_vx) {
      const CalibratedCombinedVariance cv =
          calibrated_combined_variance(s, combined.calibration, b_st, q, *known_vx);
      out << key_value("known_vx", format_full(*known_vx));
      out << key_value("calibrated_variance", format_full(cv.estimate));
      out << key_value("b_st_cal", format_full(cv.b_st));
    }
  }
  emit(common, out.str(), out.str());
  return 0;
}

int run_enumerate(const CommonOptions& common, std::size_t n,
                  const std::string& transform, const std::string& q_spec,
                  std::uint64_t cap, const std::string& policy_name) {
  FinitePopulation pop =
      read_population_file(common.input, delimiter_char(common), column_map(common));
  const Transformation t = parse_transformation(transform);
  pop = apply_transformation(pop, t);
  const DegeneratePolicy policy = policy_name == "fallback" ? DegeneratePolicy::kFallback
                                                            : DegeneratePolicy::kSkip;
  const std::vector<double> q = q_spec.empty() ? std::vector<double>(n, 1.0)
                                               : resolve_q_spec(q_spec, n);
  const ExperimentReport report =
      exact_enumeration_re(pop, n, q, policy, cap, to_string(t));
  const std::vector<ExperimentReport> reports{report};

  // Population correlation of the transformed columns.
  double sy = 0.0, sx = 0.0;
  const std::size_t N = pop.size();
  for (std::size_t i = 0; i < N; ++i) {
    sy += pop.y()[i];
    sx += pop.x()[i];
  }
  const double my = sy / static_cast<double>(N), mx = sx / static_cast<double>(N);
  double vy = 0.0, vx = 0.0, cxy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    vy += (pop.y()[i] - my) * (pop.y()[i] - my);
    vx += (pop.x()[i] - mx) * (pop.x()[i] - mx);
    cxy += (pop.y()[i] - my) * (pop.x()[i] - mx);
  }
  const double rho_xy =
      vy > 0.0 && vx > 0.0 ? cxy / std::sqrt(vy * vx) : 0.0;

  std::ostringstream machine;
  machine << format_report_csv(reports, delimiter_char(common));
  std::ostringstream human;
  human << format_report_table(reports);
  human << "sample_count=" << report.sample_count << "\n";
  human << "rho_xy=" << format_full(rho_xy) << "\n";
  emit(common, machine.str(), human.str());
  if (common.output.empty()) {
    std::cout << "sample_count=" << report.sample_count << "\n";
    std::cout << "rho_xy=" << format_full(rho_xy) << "\n";
  }
  return 0;
}

int run_simulate(const CommonOptions& common, const std::vector<double>& rhos,
                 const std::vector<int>& ns, int replicates, std::uint64_t seed,
                 double sy2, double sx2, double mu_y, double mu_x,
                 const std::string& policy_name) {
  MonteCarloConfig base;
  base.replicates = replicates;
  base.seed = seed;
  base.sy2 = sy2;
  base.sx2 = sx2;
  base.mu_y = mu_y;
  base.mu_x = mu_x;
  const DegeneratePolicy policy = policy_name == "fallback" ? DegeneratePolicy::kFallback
                                                            : DegeneratePolicy::kSkip;
  const std::vector<ExperimentReport> reports =
      simulation_grid(rhos, ns, base, policy, resolve_threads(common));
  emit(common, format_report_csv(reports, delimiter_char(common)),
       format_report_table(reports));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-based survey estimation: calibrated weights, variance "
               "estimation, and efficiency experiments"};
  app.set_config("--config", "", "Key-value config file; command line wins");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--delimiter", common.delimiter, "Field delimiter (default ',')")
      ->capture_default_str();
  app.add_option("--columns", common.columns, "Column order, 'y,x' or 'x,y'")
      ->capture_default_str();
  app.add_option("--output", common.output, "Write the machine report to this path");
  app.add_option("--threads", common.threads,
                 "Worker parallelism (default: SVYCAL_THREADS or all cores)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Point estimates of the y-total");
  estimate->fallthrough();
  std::size_t population_size = 0;
  std::string method = "ht", q_spec;
  std::optional<double> aux_total;
  estimate->add_option("--input", common.input, "Sample file (y,x rows)")->required();
  estimate->add_option("--n", population_size, "Population size of the SRSWOR design")
      ->required();
  estimate->add_option("--method", method, "ht | greg | lr")
      ->check(CLI::IsMember({"ht", "greg", "lr"}))
      ->required();
  estimate->add_option("--q", q_spec, "Uniform q value or per-unit file");
  estimate->add_option("--aux-total", aux_total, "Known auxiliary total X");

  // variance
  auto* variance = app.add_subcommand("variance", "Variance estimates");
  variance->fallthrough();
  std::optional<double> known_v, pop_x_variance;
  variance->add_option("--input", common.input, "Sample file (y,x rows)")->required();
  variance->add_option("--n", population_size, "Population size of the SRSWOR design")
      ->required();
  variance->add_option("--method", method, "syg | ds | shy | calibrated | das-tripathi")
      ->check(CLI::IsMember({"syg", "ds", "shy", "calibrated", "das-tripathi"}))
      ->required();
  variance->add_option("--q", q_spec, "Uniform q value or per-unit file");
  variance->add_option("--aux-total", aux_total, "Known auxiliary total X");
  variance->add_option("--known-v", known_v, "Known variance of the auxiliary total");
  variance->add_option("--pop-x-variance", pop_x_variance,
                       "Known population x-variance");

  // stratified
  auto* stratified = app.add_subcommand("stratified", "Combined regression estimates");
  stratified->fallthrough();
  std::string sizes_path;
  double xbar = 0.0;
  bool with_variance = false;
  std::optional<double> b_st_override, known_vx;
  stratified->add_option("--input", common.input, "Rows: stratum-label,y,x")->required();
  stratified->add_option("--sizes", sizes_path, "Sidecar with stratum sizes")->required();
  stratified->add_option("--q", q_spec, "Uniform per-stratum weight or file");
  stratified->add_option("--xbar", xbar, "Known overall auxiliary mean")->required();
  stratified->add_flag("--variance", with_variance, "Also estimate the variance");
  stratified->add_option("--b-st", b_st_override, "Override the pooled slope");
  stratified->add_option("--known-vx", known_vx,
                         "Known variance of the stratified auxiliary mean");

  // enumerate
  auto* enumerate = app.add_subcommand("enumerate", "Exhaustive efficiency study");
  enumerate->fallthrough();
  std::size_t subset_size = 0;
  std::string transform = "id:y", policy_name = "skip";
  std::uint64_t cap = kDefaultEnumerationCap;
  enumerate->add_option("--input", common.input, "Population file (y,x rows)")->required();
  enumerate->add_option("--n", subset_size, "Sample size to enumerate")->required();
  enumerate->add_option("--transform", transform, "{id|sqrt|log}:{y|x}")
      ->capture_default_str();
  enumerate->add_option("--q", q_spec, "Uniform q* value or per-unit file");
  enumerate->add_option("--cap", cap, "Enumeration cap")->capture_default_str();
  enumerate->add_option("--policy", policy_name, "skip | fallback")
      ->check(CLI::IsMember({"skip", "fallback"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Superpopulation efficiency study");
  simulate->fallthrough();
  std::vector<double> rhos;
  std::vector<int> ns;
  int replicates = 15000;
  std::uint64_t seed = 0;
  double sy2 = 50.0, sx2 = 50.0, mu_y = 100.0, mu_x = 90.0;
  simulate->add_option("--rho", rhos, "Correlation grid")->required()->delimiter(',');
  simulate->add_option("--n", ns, "Sample-size grid")->required()->delimiter(',');
  simulate->add_option("--replicates", replicates, "Replicates per cell")
      ->capture_default_str();
  simulate->add_option("--seed", seed, "Stream seed")->capture_default_str();
  simulate->add_option("--sy2", sy2, "Study variance")->capture_default_str();
  simulate->add_option("--sx2", sx2, "Auxiliary variance")->capture_default_str();
  simulate->add_option("--mu-y", mu_y, "Study mean")->capture_default_str();
  simulate->add_option("--mu-x", mu_x, "Auxiliary mean")->capture_default_str();
  simulate->add_option("--policy", policy_name, "skip | fallback")
      ->check(CLI::IsMember({"skip", "fallback"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::ostringstream msg;
    msg << e.what();
    std::string flat = msg.str();
    for (char& c : flat)
      if (c == '\n') c = ' ';
    std::cerr << "error: cli[usage]: " << flat << "\n";
    return 2;
  }

  try {
    if (estimate->parsed())
      return run_estimate(common, population_size, method, q_spec, aux_total);
    if (variance->parsed())
      return run_variance(common, population_size, method, q_spec, aux_total, known_v,
                          pop_x_variance);
    if (stratified->parsed())
      return run_stratified(common, sizes_path, q_spec, xbar, with_variance,
                            b_st_override, known_vx);
    if (enumerate->parsed())
      return run_enumerate(common, subset_size, transform, q_spec, cap, policy_name);
    if (simulate->parsed())
      return run_simulate(common, rhos, ns, replicates, seed, sy2, sx2, mu_y, mu_x,
                          policy_name);
  } catch (const svycal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
