#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "svycal/calibrate.hpp"
#include "svycal/design.hpp"

namespace svycal {

enum class ResidualKind {
  kThroughOrigin,  // e_i = y_i - b x_i, b the through-origin slope
  kWithIntercept,  // e_i = y_i - a - b x_i, weighted least squares
  kRawY,           // e_i = y_i (reduction case where the fit is bypassed)
};

struct ResidualSet {
  std::vector<double> e;
  ResidualKind kind = ResidualKind::kRawY;
  double slope = 0.0;
  double intercept = 0.0;
};

ResidualSet residuals_through_origin(const DesignSample& sample,
                                     std::span<const double> q = {});
ResidualSet residuals_with_intercept(const DesignSample& sample,
                                     std::span<const double> q_star = {});
ResidualSet residuals_raw_y(const DesignSample& sample);

// Wraps the design weights as a (trivially) calibrated weight set, for the
// reduction cases that plug w_i = d_i into the pairwise estimators.
CalibratedWeights design_weight_identity(const DesignSample& sample);

// Sen-Yates-Grundy estimator of the variance of the expansion total of z:
// (1/2) sum_{i != j in s} D_ij (d_i z_i - d_j z_j)^2 with
// D_ij = (pi_i pi_j - pi_ij) / pi_ij.
double syg_variance_estimate(const DesignSample& sample, std::span<const double> z);

// Its population-level counterpart, the exact design variance of the
// expansion total under a fixed-size design:
// (1/2) sum_{i != j in pop} (pi_i pi_j - pi_ij) (d_i z_i - d_j z_j)^2.
double syg_true_variance(const FinitePopulation& pop, const SrsworDesign& design,
                         std::span<const double> z);

// Pairwise residual-difference estimator with calibrated weights and
// through-origin residuals.
double ds_variance_estimate(const DesignSample& sample, const CalibratedWeights& weights,
                            const ResidualSet& residuals);

// Same pair form with weight-sum-preserving weights and intercept residuals
// (raw-y residuals are accepted for the reduction case).
double singh_horn_yu_variance(const DesignSample& sample,
                              const CalibratedWeights& weights,
                              const ResidualSet& residuals);

enum class PairWeightMode {
  kRaw,                  // distance weights used as given
  kWeightSumPreserving,  // transformed so the pair-weight sum is preserved
};

// Number of unordered sample pairs and the index of pair (i, j), i < j,
// in the packed upper-triangle layout used below.
inline std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }
inline std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Symmetric pairwise weights over sample pairs, packed by pair_index.
struct PairWeightSet {
  std::size_t n = 0;
  PairWeightMode mode = PairWeightMode::kRaw;
  std::vector<double> d;      // D_ij
  std::vector<double> q;      // the Q actually entering the solution
  std::vector<double> omega;  // calibrated pair weights
  std::vector<double> delta;  // (d_i x_i - d_j x_j)^2

  double D(std::size_t i, std::size_t j) const { return d[pair_index(i, j, n)]; }
  double Q(std::size_t i, std::size_t j) const { return q[pair_index(i, j, n)]; }
  double Omega(std::size_t i, std::size_t j) const { return omega[pair_index(i, j, n)]; }
  double Delta(std::size_t i, std::size_t j) const { return delta[pair_index(i, j, n)]; }
};

// Minimum chi-square pairwise weights reproducing the known variance of the
// auxiliary expansion total: (1/2) sum_{i != j} Omega_ij delta_ij = known_v.
// In weight-sum-preserving mode additionally sum Omega = sum D, via the
// transformed pair weights (every delta_ij must then be positive).
// qij holds one value per unordered pair (pair_index layout), or a single
// value broadcast to all pairs; empty means 1.
PairWeightSet calibrate_pair_weights(const DesignSample& sample,
                                     std::span<const double> qij, double known_v,
                                     PairWeightMode mode);

struct CalibratedVariance {
  double estimate = 0.0;  // calibrated variance of the regression estimator
  double b2 = 0.0;        // pairwise regression coefficient
  double vs = 0.0;        // uncalibrated pair-form value
  double vsyg_x = 0.0;    // SYG estimate for the auxiliary variable
};

// Regression-calibrated variance estimator: vs + b2 * (known_v - vsyg_x),
// identically the weight-sum-preserving pair calibration applied to the
// residual pair form.
CalibratedVariance calibrated_lr_variance(const DesignSample& sample,
                                          const CalibratedWeights& weights,
                                          const ResidualSet& residuals,
                                          std::span<const double> qij, double known_v);

// Regression estimator of the finite-population variance of y:
// s_y^2 + b2 (S_x^2 - s_x^2) with b2 the slope of squared y-deviations on
// squared x-deviations (central-moment ratio, n-1 divisors). SRSWOR only.
double das_tripathi_variance(const DesignSample& sample, double pop_x_variance);

}  // namespace svycal
