#include "svycal/variance.hpp"

#include <cmath>
#include <string>

#include "svycal/error.hpp"

namespace svycal {

namespace {

struct WeightedFit {
  double slope = 0.0;
  double intercept = 0.0;
};

std::vector<double> resolve_unit_q(std::span<const double> q, std::size_t n,
                                   const char* site) {
  if (q.empty()) return std::vector<double>(n, 1.0);
  if (q.size() == 1) return std::vector<double>(n, q[0]);
  if (q.size() != n)
    fail(std::string("invalid-config[") + site + "]",
         "q length does not match sample size");
  return {q.begin(), q.end()};
}

WeightedFit fit_through_origin(const DesignSample& sample, std::span<const double> q) {
  const auto& d = sample.weights();
  const auto& x = sample.x();
  const auto& y = sample.y();
  double sdqxx = 0.0, sdqxy = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double term = d[i] * q[i] * x[i] * x[i];
    sdqxx += term;
    scale += std::abs(term);
    sdqxy += d[i] * q[i] * x[i] * y[i];
  }
  if (denominator_negligible(sdqxx, scale))
    fail("singular-calibration[residuals]", "sum d q x^2 vanishes");
  return WeightedFit{sdqxy / sdqxx, 0.0};
}

WeightedFit fit_with_intercept(const DesignSample& sample, std::span<const double> q) {
  const auto& d = sample.weights();
  const auto& x = sample.x();
  const auto& y = sample.y();
  double sdq = 0.0, sdqx = 0.0, sdqxx = 0.0, sdqy = 0.0, sdqxy = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double dq = d[i] * q[i];
    sdq += dq;
    sdqx += dq * x[i];
    sdqxx += dq * x[i] * x[i];
    sdqy += dq * y[i];
    sdqxy += dq * x[i] * y[i];
  }
  const double det = sdq * sdqxx - sdqx * sdqx;
  if (denominator_negligible(det, std::abs(sdq * sdqxx) + sdqx * sdqx))
    fail("singular-calibration[residuals]", "weighted x-variance vanishes");
  const double slope = (sdq * sdqxy - sdqy * sdqx) / det;
  const double intercept = (sdqy - slope * sdqx) / sdq;
  return WeightedFit{slope, intercept};
}

// (1/2) sum_{i != j} D_ij (a_i - a_j)^2, folded over unordered pairs.
double pair_difference_form(const DesignSample& sample, std::span<const double> a) {
  const std::size_t n = sample.size();
  const auto& pi = sample.pi_first();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = sample.pi_joint(i, j);
      const double dij = (pi[i] * pi[j] - pij) / pij;
      const double diff = a[i] - a[j];
      total += dij * diff * diff;
    }
  }
  return total;
}

std::vector<double> weighted_residuals(const DesignSample& sample,
                                       const CalibratedWeights& weights,
                                       const ResidualSet& residuals,
                                       const char* site) {
  if (weights.w.size() != sample.size() || residuals.e.size() != sample.size())
    fail(std::string("invalid-sample[") + site + "]",
         "weights or residuals do not match the sample");
  std::vector<double> a(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) a[i] = weights.w[i] * residuals.e[i];
  return a;
}

}  // namespace

ResidualSet residuals_through_origin(const DesignSample& sample,
                                     std::span<const double> q) {
  const std::vector<double> qv = resolve_unit_q(q, sample.size(), "residuals");
  const WeightedFit fit = fit_through_origin(sample, qv);
  ResidualSet out;
  out.kind = ResidualKind::kThroughOrigin;
  out.slope = fit.slope;
  out.e.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    out.e[i] = sample.y()[i] - fit.slope * sample.x()[i];
  return out;
}

ResidualSet residuals_with_intercept(const DesignSample& sample,
                                     std::span<const double> q_star) {
  const std::vector<double> qv = resolve_unit_q(q_star, sample.size(), "residuals");
  const WeightedFit fit = fit_with_intercept(sample, qv);
  ResidualSet out;
  out.kind = ResidualKind::kWithIntercept;
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.e.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    out.e[i] = sample.y()[i] - fit.intercept - fit.slope * sample.x()[i];
  return out;
}

ResidualSet residuals_raw_y(const DesignSample& sample) {
  ResidualSet out;
  out.kind = ResidualKind::kRawY;
  out.e = sample.y();
  return out;
}

CalibratedWeights design_weight_identity(const DesignSample& sample) {
  CalibratedWeights out;
  out.w = sample.weights();
  out.mode = ConstraintMode::kAuxTotalOnly;
  out.weight_sum_satisfied = true;
  return out;
}

double syg_variance_estimate(const DesignSample& sample, std::span<const double> z) {
  if (z.size() != sample.size())
    fail("invalid-sample[syg]", "z length does not match sample");
  std::vector<double> a(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) a[i] = sample.weights()[i] * z[i];
  return pair_difference_form(sample, a);
}

double syg_true_variance(const FinitePopulation& pop, const SrsworDesign& design,
                         std::span<const double> z) {
  if (z.size() != pop.size())
    fail("invalid-population", "z length does not match population");
  const double pi = design.first_order_probability();
  const double pij = design.joint_probability();
  const double d = design.design_weight();
  const double pair_factor = pi * pi - pij;
  double total = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    for (std::size_t j = i + 1; j < pop.size(); ++j) {
      const double diff = d * z[i] - d * z[j];
      total += pair_factor * diff * diff;
    }
  }
  return total;
}

double ds_variance_estimate(const DesignSample& sample, const CalibratedWeights& weights,
                            const ResidualSet& residuals) {
  if (residuals.kind != ResidualKind::kThroughOrigin)
    fail("wrong-residual[ds]", "through-origin residuals required");
  return pair_difference_form(sample, weighted_residuals(sample, weights, residuals, "ds"));
}

double singh_horn_yu_variance(const DesignSample& sample,
                              const CalibratedWeights& weights,
                              const ResidualSet& residuals) {
  if (residuals.kind == ResidualKind::kThroughOrigin)
    fail("wrong-residual[shy]", "intercept (or raw-y) residuals required");
  return pair_difference_form(sample, weighted_residuals(sample, weights, residuals, "shy"));
}

namespace {

struct PairBasis {
  std::vector<double> d;      // D_ij
  std::vector<double> delta;  // (d_i x_i - d_j x_j)^2
};

PairBasis make_pair_basis(const DesignSample& sample) {
  const std::size_t n = sample.size();
  PairBasis basis;
  basis.d.resize(pair_count(n));
  basis.delta.resize(pair_count(n));
  const auto& pi = sample.pi_first();
  const auto& d = sample.weights();
  const auto& x = sample.x();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t p = pair_index(i, j, n);
      const double pij = sample.pi_joint(i, j);
      basis.d[p] = (pi[i] * pi[j] - pij) / pij;
      const double diff = d[i] * x[i] - d[j] * x[j];
      basis.delta[p] = diff * diff;
    }
  }
  return basis;
}

std::vector<double> resolve_pair_q(std::span<const double> qij, std::size_t pairs,
                                   const char* site) {
  if (qij.empty()) return std::vector<double>(pairs, 1.0);
  if (qij.size() == 1) return std::vector<double>(pairs, qij[0]);
  if (qij.size() != pairs)
    fail(std::string("invalid-config[") + site + "]",
         "pair weight length does not match the number of sample pairs");
  return {qij.begin(), qij.end()};
}

// Transformed pair weights preserving the pair-weight sum; every delta must
// be strictly positive.
std::vector<double> weight_sum_preserving_q(const PairBasis& basis,
                                            std::span<const double> q,
                                            const char* site) {
  for (double dl : basis.delta)
    if (dl == 0.0)
      fail(std::string("pair-degeneracy[") + site + "]",
           "a pair has equal expanded auxiliary values (delta = 0)");
  double sdq = 0.0, sdqd = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < basis.d.size(); ++p) {
    sdq += basis.d[p] * q[p];
    const double term = basis.d[p] * q[p] * basis.delta[p];
    sdqd += term;
    scale += std::abs(term);
  }
  if (denominator_negligible(sdqd, scale))
    fail(std::string("singular-pair-calibration[") + site + "]",
         "sum D q delta vanishes");
  std::vector<double> out(basis.d.size());
  for (std::size_t p = 0; p < basis.d.size(); ++p)
    out[p] = q[p] * (sdq / sdqd - 1.0 / basis.delta[p]);
  return out;
}

}  // namespace

PairWeightSet calibrate_pair_weights(const DesignSample& sample,
                                     std::span<const double> qij, double known_v,
                                     PairWeightMode mode) {
  const std::size_t n = sample.size();
  PairBasis basis = make_pair_basis(sample);
  std::vector<double> q = resolve_pair_q(qij, pair_count(n), "pair");

  PairWeightSet out;
  out.n = n;
  out.mode = mode;
  if (mode == PairWeightMode::kWeightSumPreserving)
    q = weight_sum_preserving_q(basis, q, "pair");

  double sdqd2 = 0.0, scale = 0.0, vhat = 0.0;
  for (std::size_t p = 0; p < basis.d.size(); ++p) {
    const double term = basis.d[p] * q[p] * basis.delta[p] * basis.delta[p];
    sdqd2 += term;
    scale += std::abs(term);
    vhat += basis.d[p] * basis.delta[p];
  }
  if (denominator_negligible(sdqd2, scale))
    fail("singular-pair-calibration[pair]", "sum D q delta^2 vanishes");

  out.omega.resize(basis.d.size());
  const double gap = known_v - vhat;
  for (std::size_t p = 0; p < basis.d.size(); ++p)
    out.omega[p] = basis.d[p] + basis.d[p] * q[p] * basis.delta[p] * gap / sdqd2;
  out.d = std::move(basis.d);
  out.delta = std::move(basis.delta);
  out.q = std::move(q);
  return out;
}

CalibratedVariance calibrated_lr_variance(const DesignSample& sample,
                                          const CalibratedWeights& weights,
                                          const ResidualSet& residuals,
                                          std::span<const double> qij, double known_v) {
  if (residuals.kind == ResidualKind::kThroughOrigin)
    fail("wrong-residual[calibrated]", "intercept (or raw-y) residuals required");
  const std::vector<double> a =
      weighted_residuals(sample, weights, residuals, "calibrated");

  const std::size_t n = sample.size();
  const PairBasis basis = make_pair_basis(sample);
  const std::vector<double> q = resolve_pair_q(qij, pair_count(n), "calibrated");
  for (double dl : basis.delta)
    if (dl == 0.0)
      fail("pair-degeneracy[calibrated]",
           "a pair has equal expanded auxiliary values (delta = 0)");

  double sdq = 0.0, sdqd = 0.0, sdqd2 = 0.0, sdqphi = 0.0, sdqdphi = 0.0;
  double vs = 0.0, vhat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t p = pair_index(i, j, n);
      const double diff = a[i] - a[j];
      const double phi = diff * diff;
      const double dq = basis.d[p] * q[p];
      sdq += dq;
      sdqd += dq * basis.delta[p];
      sdqd2 += dq * basis.delta[p] * basis.delta[p];
      sdqphi += dq * phi;
      sdqdphi += dq * basis.delta[p] * phi;
      vs += basis.d[p] * phi;
      vhat += basis.d[p] * basis.delta[p];
    }
  }
  const double det = sdqd2 * sdq - sdqd * sdqd;
  if (denominator_negligible(det, std::abs(sdqd2 * sdq) + sdqd * sdqd))
    fail("singular-pair-calibration[calibrated]",
         "pairwise delta spread vanishes under the given weights");
  const double b2 = (sdqdphi * sdq - sdqd * sdqphi) / det;

  CalibratedVariance out;
  out.b2 = b2;
  out.vs = vs;
  out.vsyg_x = vhat;
  out.estimate = vs + b2 * (known_v - vhat);
  return out;
}

double das_tripathi_variance(const DesignSample& sample, double pop_x_variance) {
  if (!sample.equal_probability())
    fail("invalid-sample[dt]", "equal-probability (SRSWOR) sample required");
  const std::size_t n = sample.size();
  if (n < 3) fail("singular-moment[dt]", "needs at least 3 sample units");

  double ybar = 0.0, xbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ybar += sample.y()[i];
    xbar += sample.x()[i];
  }
  ybar /= static_cast<double>(n);
  xbar /= static_cast<double>(n);

  double m22 = 0.0, m20 = 0.0, m02 = 0.0, m04 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = sample.y()[i] - ybar;
    const double a = sample.x()[i] - xbar;
    m22 += b * b * a * a;
    m20 += b * b;
    m02 += a * a;
    m04 += a * a * a * a;
  }
  const double divisor = static_cast<double>(n - 1);
  m22 /= divisor;
  m20 /= divisor;
  m02 /= divisor;
  m04 /= divisor;

  const double den = m04 - m02 * m02;
  if (den <= 0.0 || denominator_negligible(den, std::abs(m04) + m02 * m02))
    fail("singular-moment[dt]", "fourth-moment denominator not positive");
  const double b2 = (m22 - m20 * m02) / den;
  return m20 + b2 * (pop_x_variance - m02);
}

}  // namespace svycal
