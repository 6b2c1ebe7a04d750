#include "svycal/calibrate.hpp"

#include <cmath>
#include <string>

#include "svycal/error.hpp"

namespace svycal {

namespace {

constexpr double kResidualTol = 1e-10;

std::vector<double> resolve_q(const CalibrationSpec& spec, std::size_t n,
                              bool require_positive, const char* site) {
  std::vector<double> q = spec.q;
  if (q.empty()) q.assign(n, 1.0);
  if (q.size() != n)
    fail(std::string("invalid-config[") + site + "]",
         "q length " + std::to_string(q.size()) + " does not match sample size " +
             std::to_string(n));
  if (require_positive) {
    for (double v : q)
      if (!(v > 0.0))
        fail(std::string("invalid-config[") + site + "]",
             "tuning weights must be strictly positive");
  }
  return q;
}

// Distance diagnostic tolerant of q_i = 0 entries, where the closed forms
// leave w_i = d_i exactly and the contribution is zero.
double distance_diagnostic(std::span<const double> w, std::span<const double> d,
                           std::span<const double> q) {
  double dist = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double denom = d[i] * q[i];
    if (denom == 0.0) continue;
    const double diff = w[i] - d[i];
    dist += diff * diff / denom;
  }
  return dist;
}

void finish(CalibratedWeights& out, const DesignSample& sample,
            const CalibrationSpec& spec, std::span<const double> q) {
  double sum_w = 0.0, sum_wx = 0.0, sum_d = 0.0;
  for (std::size_t i = 0; i < out.w.size(); ++i) {
    sum_w += out.w[i];
    sum_wx += out.w[i] * sample.x()[i];
    sum_d += sample.weights()[i];
    if (out.w[i] < 0.0) ++out.negative_count;
  }
  const double aux_scale = std::abs(spec.aux_total) > 0 ? std::abs(spec.aux_total) : 1.0;
  out.aux_satisfied = std::abs(sum_wx - spec.aux_total) <= kResidualTol * aux_scale;
  out.weight_sum_satisfied = std::abs(sum_w - sum_d) <= kResidualTol * std::abs(sum_d);
  out.distance = distance_diagnostic(out.w, sample.weights(), q);
}

}  // namespace

CalibrationSpec CalibrationSpec::aux_only(double aux_total, std::vector<double> q) {
  return CalibrationSpec{std::move(q), aux_total, ConstraintMode::kAuxTotalOnly};
}

CalibrationSpec CalibrationSpec::with_weight_sum(double aux_total,
                                                 std::vector<double> q) {
  return CalibrationSpec{std::move(q), aux_total, ConstraintMode::kAuxTotalAndWeightSum};
}

bool denominator_negligible(double value, double term_scale) {
  return std::abs(value) < 1e-12 * term_scale || term_scale == 0.0;
}

CalibratedWeights greg_weights(const DesignSample& sample, const CalibrationSpec& spec) {
  if (spec.mode != ConstraintMode::kAuxTotalOnly)
    fail("wrong-constraint-mode[greg]", "spec is not single-constraint");
  const std::size_t n = sample.size();
  // The bridge substitution legitimately feeds negative q here.
  const std::vector<double> q = resolve_q(spec, n, /*require_positive=*/false, "greg");

  const auto& d = sample.weights();
  const auto& x = sample.x();
  double sdx = 0.0, sdqxx = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sdx += d[i] * x[i];
    const double term = d[i] * q[i] * x[i] * x[i];
    sdqxx += term;
    scale += std::abs(term);
  }
  if (denominator_negligible(sdqxx, scale))
    fail("singular-calibration[greg]", "sum d q x^2 vanishes");

  CalibratedWeights out;
  out.mode = spec.mode;
  out.w.resize(n);
  const double shortfall = spec.aux_total - sdx;
  for (std::size_t i = 0; i < n; ++i)
    out.w[i] = d[i] + d[i] * q[i] * x[i] * shortfall / sdqxx;

  double sdqxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sdqxy += d[i] * q[i] * x[i] * sample.y()[i];
  out.slope = sdqxy / sdqxx;
  finish(out, sample, spec, q);
  return out;
}

EstimatedTotal greg_total(const DesignSample& sample, const CalibrationSpec& spec) {
  const CalibratedWeights cw = greg_weights(sample, spec);
  double total = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) total += cw.w[i] * sample.y()[i];
  return EstimatedTotal{total, cw.slope};
}

std::vector<double> q_substitution(const DesignSample& sample,
                                   std::span<const double> q_star) {
  const std::size_t n = sample.size();
  if (q_star.size() != n)
    fail("invalid-config[qsub]", "q* length does not match sample size");
  const auto& d = sample.weights();
  const auto& x = sample.x();
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] == 0.0)
      fail("division-by-zero[qsub]",
           "x is zero at sample position " + std::to_string(i));
  double sdq = 0.0, sdqx = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sdq += d[i] * q_star[i];
    const double term = d[i] * q_star[i] * x[i];
    sdqx += term;
    scale += std::abs(term);
  }
  if (denominator_negligible(sdqx, scale))
    fail("singular-substitution[qsub]", "sum d q* x vanishes");
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = q_star[i] * (sdq / sdqx - 1.0 / x[i]);
  return q;
}

CalibratedWeights lr_weights(const DesignSample& sample, const CalibrationSpec& spec) {
  if (spec.mode != ConstraintMode::kAuxTotalAndWeightSum)
    fail("wrong-constraint-mode[lr]", "spec is not double-constraint");
  const std::size_t n = sample.size();
  const std::vector<double> q = resolve_q(spec, n, /*require_positive=*/true, "lr");

  const auto& d = sample.weights();
  const auto& x = sample.x();
  const auto& y = sample.y();
  double sdq = 0.0, sdqx = 0.0, sdqxx = 0.0, sdqy = 0.0, sdqxy = 0.0, sdx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dq = d[i] * q[i];
    sdq += dq;
    sdqx += dq * x[i];
    sdqxx += dq * x[i] * x[i];
    sdqy += dq * y[i];
    sdqxy += dq * x[i] * y[i];
    sdx += d[i] * x[i];
  }
  const double det = sdqxx * sdq - sdqx * sdqx;
  const double det_scale = std::abs(sdqxx * sdq) + sdqx * sdqx;
  if (denominator_negligible(det, det_scale))
    fail("singular-calibration[lr]", "weighted x-variance vanishes (x constant)");

  CalibratedWeights out;
  out.mode = spec.mode;
  out.w.resize(n);
  const double shortfall = spec.aux_total - sdx;
  for (std::size_t i = 0; i < n; ++i) {
    const double direction = d[i] * q[i] * (x[i] * sdq - sdqx);
    out.w[i] = d[i] + direction / det * shortfall;
  }
  out.slope = (sdq * sdqxy - sdqy * sdqx) / det;
  finish(out, sample, spec, q);
  return out;
}

EstimatedTotal lr_total(const DesignSample& sample, const CalibrationSpec& spec) {
  const CalibratedWeights cw = lr_weights(sample, spec);
  double total = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) total += cw.w[i] * sample.y()[i];
  return EstimatedTotal{total, cw.slope};
}

double chi_square_distance(std::span<const double> w, std::span<const double> d,
                           std::span<const double> q) {
  if (w.size() != d.size() || w.size() != q.size())
    fail("invalid-distance", "weight sequences differ in length");
  double dist = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double denom = d[i] * q[i];
    if (!(denom > 0.0))
      fail("invalid-distance",
           "nonpositive d*q at position " + std::to_string(i));
    const double diff = w[i] - d[i];
    dist += diff * diff / denom;
  }
  return dist;
}

}  // namespace svycal
