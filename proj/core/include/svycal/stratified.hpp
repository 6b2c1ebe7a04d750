#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace svycal {

// Per-stratum SRSWOR draw: N_h known, (y, x) observed for the n_h units.
struct Stratum {
  std::size_t population_size = 0;
  std::vector<double> y;
  std::vector<double> x;
};

class StratifiedSample {
 public:
  explicit StratifiedSample(std::vector<Stratum> strata);

  std::size_t stratum_count() const noexcept { return strata_.size(); }
  std::size_t total_population() const noexcept { return total_population_; }
  const std::vector<Stratum>& strata() const noexcept { return strata_; }

  std::size_t sample_size(std::size_t h) const { return strata_[h].y.size(); }
  double weight(std::size_t h) const;             // W_h = N_h / N
  double sampling_fraction(std::size_t h) const;  // f_h = n_h / N_h
  double mean_y(std::size_t h) const { return mean_y_[h]; }
  double mean_x(std::size_t h) const { return mean_x_[h]; }
  double var_y(std::size_t h) const { return var_y_[h]; }   // s_hy^2, n_h-1 divisor
  double var_x(std::size_t h) const { return var_x_[h]; }   // s_hx^2
  double cov_xy(std::size_t h) const { return cov_xy_[h]; } // s_hxy

 private:
  std::vector<Stratum> strata_;
  std::size_t total_population_ = 0;
  std::vector<double> mean_y_, mean_x_, var_y_, var_x_, cov_xy_;
};

// Calibrated stratum weights and the regression coefficient they embed.
struct StratumCalibration {
  std::vector<double> w0;  // W_h^0
  std::vector<double> q;   // Q_h actually used
  double beta = 0.0;
};

// sum W_h ybar_h.
double stratified_mean(const StratifiedSample& s);

// Single-constraint calibration of the stratum weights on the known overall
// auxiliary mean; ratio-type correction through the origin of the stratum
// means.
double shy_calibrated_mean(const StratifiedSample& s, std::span<const double> q,
                           double xbar_known);

struct CombinedMean {
  double mean = 0.0;
  StratumCalibration calibration;
};

// Double-constraint calibration (weight-sum preserved): the combined linear
// regression estimator of the population mean.
CombinedMean combined_lr_mean(const StratifiedSample& s, std::span<const double> q,
                              double xbar_known);

// Pooled within-stratum regression slope used for the variance residuals;
// callers may override it.
double combined_regression_slope(const StratifiedSample& s);

// sum_h D_h (W_h^0 / W_h)^2 s^2_{e,h} with D_h = W_h^2 (1 - f_h) / n_h and
// e_hi = (y_hi - ybar_h) - b (x_hi - xbar_h). With W^0 = W this is the
// textbook variance estimator of the combined regression estimator.
double combined_lr_variance(const StratifiedSample& s, const StratumCalibration& calib,
                            double b_st);

struct CalibratedCombinedVariance {
  double estimate = 0.0;
  double b_st = 0.0;           // calibration regression coefficient
  std::vector<double> omega0;  // calibrated per-stratum variance weights
  double vhat_x = 0.0;         // sum D_h s_hx^2
};

// Second-level calibration: per-stratum variance weights Omega_h^0 reproduce
// the known variance of the stratified auxiliary mean while preserving the
// weight sum; the estimate equals the first form corrected by
// b_st (known_vx - vhat_x).
CalibratedCombinedVariance calibrated_combined_variance(
    const StratifiedSample& s, const StratumCalibration& calib, double b_st,
    std::span<const double> q, double known_vx);

}  // namespace svycal
