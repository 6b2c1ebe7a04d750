#include "svycal/stratified.hpp"

#include <cmath>
#include <string>

#include "svycal/calibrate.hpp"
#include "svycal/error.hpp"

namespace svycal {

namespace {

std::vector<double> resolve_stratum_q(std::span<const double> q, std::size_t count,
                                      const char* site) {
  std::vector<double> out;
  if (q.empty())
    out.assign(count, 1.0);
  else if (q.size() == 1)
    out.assign(count, q[0]);
  else if (q.size() == count)
    out.assign(q.begin(), q.end());
  else
    fail(std::string("invalid-config[") + site + "]",
         "per-stratum weight length does not match the number of strata");
  for (double v : out)
    if (!(v > 0.0))
      fail(std::string("invalid-config[") + site + "]",
           "per-stratum weights must be strictly positive");
  return out;
}

double variance_scale(const StratifiedSample& s, std::size_t h) {
  // D_h = W_h^2 (1 - f_h) / n_h
  const double w = s.weight(h);
  return w * w * (1.0 - s.sampling_fraction(h)) / static_cast<double>(s.sample_size(h));
}

double residual_variance(const StratifiedSample& s, std::size_t h, double b_st) {
  const Stratum& st = s.strata()[h];
  const double my = s.mean_y(h);
  const double mx = s.mean_x(h);
  double acc = 0.0;
  for (std::size_t i = 0; i < st.y.size(); ++i) {
    const double e = (st.y[i] - my) - b_st * (st.x[i] - mx);
    acc += e * e;
  }
  return acc / static_cast<double>(st.y.size() - 1);
}

}  // namespace

StratifiedSample::StratifiedSample(std::vector<Stratum> strata)
    : strata_(std::move(strata)) {
  if (strata_.empty()) fail("invalid-sample[stratified]", "no strata");
  mean_y_.resize(strata_.size());
  mean_x_.resize(strata_.size());
  var_y_.resize(strata_.size());
  var_x_.resize(strata_.size());
  cov_xy_.resize(strata_.size());
  for (std::size_t h = 0; h < strata_.size(); ++h) {
    const Stratum& st = strata_[h];
    const std::size_t nh = st.y.size();
    if (st.x.size() != nh)
      fail("invalid-sample[stratified]", "stratum y and x differ in length");
    if (nh < 2)
      fail("insufficient-stratum",
           "stratum " + std::to_string(h) + " has fewer than 2 sample units");
    if (nh > st.population_size)
      fail("invalid-sample[stratified]",
           "stratum " + std::to_string(h) + " sample exceeds its population");
    total_population_ += st.population_size;

    double my = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < nh; ++i) {
      my += st.y[i];
      mx += st.x[i];
    }
    my /= static_cast<double>(nh);
    mx /= static_cast<double>(nh);
    double vy = 0.0, vx = 0.0, cxy = 0.0;
    for (std::size_t i = 0; i < nh; ++i) {
      const double ay = st.y[i] - my;
      const double ax = st.x[i] - mx;
      vy += ay * ay;
      vx += ax * ax;
      cxy += ax * ay;
    }
    const double divisor = static_cast<double>(nh - 1);
    mean_y_[h] = my;
    mean_x_[h] = mx;
    var_y_[h] = vy / divisor;
    var_x_[h] = vx / divisor;
    cov_xy_[h] = cxy / divisor;
  }
}

double StratifiedSample::weight(std::size_t h) const {
  return static_cast<double>(strata_[h].population_size) /
         static_cast<double>(total_population_);
}

double StratifiedSample::sampling_fraction(std::size_t h) const {
  return static_cast<double>(strata_[h].y.size()) /
         static_cast<double>(strata_[h].population_size);
}

double stratified_mean(const StratifiedSample& s) {
  double mean = 0.0;
  for (std::size_t h = 0; h < s.stratum_count(); ++h)
    mean += s.weight(h) * s.mean_y(h);
  return mean;
}

double shy_calibrated_mean(const StratifiedSample& s, std::span<const double> q,
                           double xbar_known) {
  const std::size_t L = s.stratum_count();
  const std::vector<double> Q = resolve_stratum_q(q, L, "stratified");
  double swqxy = 0.0, swqxx = 0.0, swx = 0.0, mean = 0.0, scale = 0.0;
  for (std::size_t h = 0; h < L; ++h) {
    const double w = s.weight(h);
    const double xb = s.mean_x(h);
    const double yb = s.mean_y(h);
    swqxy += w * Q[h] * xb * yb;
    const double term = w * Q[h] * xb * xb;
    swqxx += term;
    scale += std::abs(term);
    swx += w * xb;
    mean += w * yb;
  }
  if (denominator_negligible(swqxx, scale))
    fail("singular-calibration[stratified]", "sum W Q xbar^2 vanishes");
  return mean + swqxy / swqxx * (xbar_known - swx);
}

CombinedMean combined_lr_mean(const StratifiedSample& s, std::span<const double> q,
                              double xbar_known) {
  const std::size_t L = s.stratum_count();
  const std::vector<double> Q = resolve_stratum_q(q, L, "stratified");

  double swq = 0.0, swqx = 0.0, swqxx = 0.0, swqy = 0.0, swqxy = 0.0;
  double swx = 0.0, swy = 0.0;
  for (std::size_t h = 0; h < L; ++h) {
    const double w = s.weight(h);
    const double xb = s.mean_x(h);
    const double yb = s.mean_y(h);
    const double wq = w * Q[h];
    swq += wq;
    swqx += wq * xb;
    swqxx += wq * xb * xb;
    swqy += wq * yb;
    swqxy += wq * xb * yb;
    swx += w * xb;
    swy += w * yb;
  }
  const double det = swq * swqxx - swqx * swqx;
  if (denominator_negligible(det, std::abs(swq * swqxx) + swqx * swqx))
    fail("singular-calibration[stratified]",
         "stratum auxiliary means do not spread (or single stratum)");

  CombinedMean out;
  out.calibration.q = Q;
  out.calibration.beta = (swqxy * swq - swqy * swqx) / det;
  out.calibration.w0.resize(L);
  const double shortfall = xbar_known - swx;
  for (std::size_t h = 0; h < L; ++h) {
    const double w = s.weight(h);
    const double direction = w * Q[h] * s.mean_x(h) * swq - w * Q[h] * swqx;
    out.calibration.w0[h] = w + direction / det * shortfall;
  }
  out.mean = swy + out.calibration.beta * shortfall;
  return out;
}

double combined_regression_slope(const StratifiedSample& s) {
  double num = 0.0, den = 0.0, scale = 0.0;
  for (std::size_t h = 0; h < s.stratum_count(); ++h) {
    const double dh = variance_scale(s, h);
    num += dh * s.cov_xy(h);
    const double term = dh * s.var_x(h);
    den += term;
    scale += std::abs(term);
  }
  if (denominator_negligible(den, scale))
    fail("singular-calibration[stratified]", "within-stratum x-variance vanishes");
  return num / den;
}

double combined_lr_variance(const StratifiedSample& s, const StratumCalibration& calib,
                            double b_st) {
  if (calib.w0.size() != s.stratum_count())
    fail("invalid-config[stratified]", "calibration does not match the sample");
  double total = 0.0;
  for (std::size_t h = 0; h < s.stratum_count(); ++h) {
    const double ratio = calib.w0[h] / s.weight(h);
    total += variance_scale(s, h) * ratio * ratio * residual_variance(s, h, b_st);
  }
  return total;
}

CalibratedCombinedVariance calibrated_combined_variance(
    const StratifiedSample& s, const StratumCalibration& calib, double b_st,
    std::span<const double> q, double known_vx) {
  const std::size_t L = s.stratum_count();
  if (calib.w0.size() != L)
    fail("invalid-config[stratified]", "calibration does not match the sample");
  const std::vector<double> Q = resolve_stratum_q(q, L, "stratified");

  std::vector<double> dh(L), se2(L), ratio2(L);
  double sdq = 0.0, sdqs = 0.0, sdqss = 0.0, vhat = 0.0;
  for (std::size_t h = 0; h < L; ++h) {
    dh[h] = variance_scale(s, h);
    se2[h] = residual_variance(s, h, b_st);
    const double r = calib.w0[h] / s.weight(h);
    ratio2[h] = r * r;
    const double dq = dh[h] * Q[h];
    const double sx2 = s.var_x(h);
    sdq += dq;
    sdqs += dq * sx2;
    sdqss += dq * sx2 * sx2;
    vhat += dh[h] * sx2;
  }
  const double det = sdq * sdqss - sdqs * sdqs;
  if (denominator_negligible(det, std::abs(sdq * sdqss) + sdqs * sdqs))
    fail("singular-calibration[stratified]",
         "stratum x-variances do not spread");

  CalibratedCombinedVariance out;
  out.vhat_x = vhat;
  out.omega0.resize(L);
  const double gap = known_vx - vhat;
  double bnum = 0.0;
  double base = 0.0;
  for (std::size_t h = 0; h < L; ++h) {
    const double dq = dh[h] * Q[h];
    const double sx2 = s.var_x(h);
    out.omega0[h] = dh[h] + (dq * sx2 * sdq - dq * sdqs) / det * gap;
    bnum += dq * sx2 * ratio2[h] * se2[h] * sdq - dq * ratio2[h] * se2[h] * sdqs;
    base += dh[h] * ratio2[h] * se2[h];
  }
  out.b_st = bnum / det;
  out.estimate = base + out.b_st * gap;
  return out;
}

}  // namespace svycal
