#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svycal/design.hpp"
#include "svycal/rng.hpp"

namespace svycal {

enum class TransformTarget { kY, kX };
enum class TransformMap { kIdentity, kSqrt, kLog };

struct Transformation {
  TransformTarget target = TransformTarget::kY;
  TransformMap map = TransformMap::kIdentity;
};

// Token form "map:target", e.g. "sqrt:y", "log:x", "id:y".
Transformation parse_transformation(std::string_view token);
std::string to_string(const Transformation& t);

// Pointwise map of the selected column; the other column is untouched.
FinitePopulation apply_transformation(const FinitePopulation& pop,
                                      const Transformation& t);

// What to do with a drawn sample whose regression slopes are undefined
// (constant x): drop it, or fall back to the sample mean for both methods.
enum class DegeneratePolicy { kSkip, kFallback };

struct MonteCarloConfig {
  double rho = 0.0;
  int n = 25;
  int replicates = 15000;
  double sy2 = 50.0;
  double sx2 = 50.0;
  double mu_y = 100.0;
  double mu_x = 90.0;
  std::uint64_t seed = 0;
};

enum class ReStatus { kFinite, kInfinite, kUndefined };

struct ExperimentReport {
  std::string scenario;          // "enumeration" or "monte-carlo"
  int n = 0;
  std::string rho_or_transform;  // e.g. "sqrt:y" or "0.5"
  double mse_lr = 0.0;
  double mse_ds = 0.0;
  ReStatus re_status = ReStatus::kFinite;
  double re_percent = 0.0;  // meaningful only when finite
  std::uint64_t sample_count = 0;
  std::uint64_t skipped = 0;
};

// 100 * mse_ds / mse_lr with sentinel states for vanishing denominators.
// A mean squared error counts as zero below 1e-20 relative to the squared
// target scale, so exact fits hit the sentinels despite rounding dust.
ExperimentReport make_re_report(std::string scenario, int n,
                                std::string rho_or_transform, double mse_lr,
                                double mse_ds, double target_scale,
                                std::uint64_t sample_count, std::uint64_t skipped);

// Serialized RE: 17 significant digits, or the tokens "inf" / "undef".
std::string re_to_string(const ExperimentReport& report);

// One synthetic sample of n correlated pairs:
//   y_i = mu_y + sqrt(sy2 (1 - rho^2)) g_i + rho sqrt(sy2) h_i
//   x_i = mu_x + sqrt(sx2) h_i
// with (g_i, h_i) independent standard normal.
void generate_correlated_pair_sample(const MonteCarloConfig& cfg, CounterRng& rng,
                                     std::span<double> y, std::span<double> x);

// Exhaustive efficiency study: every n-subset contributes the regression
// and through-origin estimators of the population mean; mean squared errors
// use the full subset count as divisor. `label` names the scenario row
// (typically the transformation token applied to the population).
ExperimentReport exact_enumeration_re(const FinitePopulation& pop, std::size_t n,
                                      std::span<const double> q_star = {},
                                      DegeneratePolicy policy = DegeneratePolicy::kSkip,
                                      std::uint64_t cap = kDefaultEnumerationCap,
                                      std::string label = "id:y");

// Superpopulation study: `replicates` fresh samples from the generator above,
// squared errors against mu_y with the known mean mu_x, fixed divisor
// `replicates`. Replicate streams are keyed by (seed, replicate), so results
// are identical for every thread count.
ExperimentReport monte_carlo_re(const MonteCarloConfig& cfg,
                                DegeneratePolicy policy = DegeneratePolicy::kSkip,
                                unsigned threads = 1);

std::vector<ExperimentReport> simulation_grid(std::span<const double> rhos,
                                              std::span<const int> ns,
                                              const MonteCarloConfig& base,
                                              DegeneratePolicy policy,
                                              unsigned threads);

}  // namespace svycal
