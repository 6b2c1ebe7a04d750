#pragma once

#include <span>
#include <vector>

#include "svycal/design.hpp"

namespace svycal {

enum class ConstraintMode {
  kAuxTotalOnly,          // sum w_i x_i = X
  kAuxTotalAndWeightSum,  // additionally sum w_i = sum d_i
};

// Per-unit tuning weights plus the known auxiliary total. q holds q_i in
// single-constraint mode and q_i* in double-constraint mode; q defaults to 1.
struct CalibrationSpec {
  std::vector<double> q;
  double aux_total = 0.0;
  ConstraintMode mode = ConstraintMode::kAuxTotalOnly;

  static CalibrationSpec aux_only(double aux_total, std::vector<double> q = {});
  static CalibrationSpec with_weight_sum(double aux_total, std::vector<double> q = {});
};

struct CalibratedWeights {
  std::vector<double> w;
  ConstraintMode mode = ConstraintMode::kAuxTotalOnly;
  double slope = 0.0;     // regression coefficient the weights embed
  double distance = 0.0;  // achieved chi-square distance from the design weights
  bool aux_satisfied = false;
  bool weight_sum_satisfied = false;
  int negative_count = 0;  // calibrated weights may go negative; reported, not clamped
};

struct EstimatedTotal {
  double total = 0.0;
  double slope = 0.0;
};

// Minimum chi-square weights under the auxiliary-total constraint alone:
// w_i = d_i + d_i q_i x_i (X - sum d x) / sum d q x^2.
CalibratedWeights greg_weights(const DesignSample& sample, const CalibrationSpec& spec);
EstimatedTotal greg_total(const DesignSample& sample, const CalibrationSpec& spec);

// The q substitution that turns the single-constraint weights into the
// weight-sum-preserving ones. Verification bridge only: divides by x_i and
// may produce negative entries.
std::vector<double> q_substitution(const DesignSample& sample,
                                   std::span<const double> q_star);

// Minimum chi-square weights under both constraints, computed from the
// closed form directly (no q substitution, so x_i = 0 is fine).
CalibratedWeights lr_weights(const DesignSample& sample, const CalibrationSpec& spec);
EstimatedTotal lr_total(const DesignSample& sample, const CalibrationSpec& spec);

// sum (w_i - d_i)^2 / (d_i q_i); requires d_i q_i > 0.
double chi_square_distance(std::span<const double> w, std::span<const double> d,
                           std::span<const double> q);

// Scale-free zero test for denominators: |value| < 1e-12 * (sum of |terms|).
bool denominator_negligible(double value, double term_scale);

}  // namespace svycal
