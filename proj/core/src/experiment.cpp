#include "svycal/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>

#include "svycal/calibrate.hpp"
#include "svycal/error.hpp"

namespace svycal {

namespace {

// Both mean-scale estimators on one drawn sample, weighted by q*:
//   regression:     ybar + b_ols (xbar_known - xbar)
//   through-origin: ybar + b_ds  (xbar_known - xbar)
struct MeanEstimates {
  double lr = 0.0;
  double ds = 0.0;
  bool degenerate = false;
};

MeanEstimates mean_scale_estimates(std::span<const double> y, std::span<const double> x,
                                   std::span<const double> q, double xbar_known) {
  double sq = 0.0, sqx = 0.0, sqxx = 0.0, sqy = 0.0, sqxy = 0.0;
  double sy = 0.0, sx = 0.0, xx_scale = 0.0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    sq += q[i];
    sqx += q[i] * x[i];
    const double xxterm = q[i] * x[i] * x[i];
    sqxx += xxterm;
    xx_scale += std::abs(xxterm);
    sqy += q[i] * y[i];
    sqxy += q[i] * x[i] * y[i];
    sy += y[i];
    sx += x[i];
  }
  const double ybar = sy / static_cast<double>(n);
  const double xbar = sx / static_cast<double>(n);

  MeanEstimates out;
  const double det = sq * sqxx - sqx * sqx;
  if (denominator_negligible(det, std::abs(sq * sqxx) + sqx * sqx) ||
      denominator_negligible(sqxx, xx_scale)) {
    out.degenerate = true;
    out.lr = out.ds = ybar;
    return out;
  }
  const double b_ols = (sq * sqxy - sqy * sqx) / det;
  const double b_ds = sqxy / sqxx;
  out.lr = ybar + b_ols * (xbar_known - xbar);
  out.ds = ybar + b_ds * (xbar_known - xbar);
  return out;
}

}  // namespace

Transformation parse_transformation(std::string_view token) {
  const auto colon = token.find(':');
  if (colon == std::string_view::npos)
    fail("invalid-config[transform]",
         "expected map:target, e.g. sqrt:y, got '" + std::string(token) + "'");
  const std::string_view map = token.substr(0, colon);
  const std::string_view target = token.substr(colon + 1);
  Transformation t;
  if (map == "id" || map == "identity")
    t.map = TransformMap::kIdentity;
  else if (map == "sqrt")
    t.map = TransformMap::kSqrt;
  else if (map == "log")
    t.map = TransformMap::kLog;
  else
    fail("invalid-config[transform]", "unknown map '" + std::string(map) + "'");
  if (target == "y")
    t.target = TransformTarget::kY;
  else if (target == "x")
    t.target = TransformTarget::kX;
  else
    fail("invalid-config[transform]", "unknown target '" + std::string(target) + "'");
  return t;
}

std::string to_string(const Transformation& t) {
  std::string out;
  switch (t.map) {
    case TransformMap::kIdentity: out = "id"; break;
    case TransformMap::kSqrt: out = "sqrt"; break;
    case TransformMap::kLog: out = "log"; break;
  }
  out += t.target == TransformTarget::kY ? ":y" : ":x";
  return out;
}

FinitePopulation apply_transformation(const FinitePopulation& pop,
                                      const Transformation& t) {
  std::vector<double> y = pop.y();
  std::vector<double> x = pop.x();
  std::vector<double>& col = t.target == TransformTarget::kY ? y : x;
  for (std::size_t i = 0; i < col.size(); ++i) {
    switch (t.map) {
      case TransformMap::kIdentity:
        break;
      case TransformMap::kSqrt:
        if (col[i] < 0.0)
          fail("domain[transform]",
               "sqrt of negative value at unit " + std::to_string(i));
        col[i] = std::sqrt(col[i]);
        break;
      case TransformMap::kLog:
        if (!(col[i] > 0.0))
          fail("domain[transform]",
               "log of nonpositive value at unit " + std::to_string(i));
        col[i] = std::log(col[i]);
        break;
    }
  }
  return FinitePopulation(std::move(y), std::move(x));
}

ExperimentReport make_re_report(std::string scenario, int n,
                                std::string rho_or_transform, double mse_lr,
                                double mse_ds, double target_scale,
                                std::uint64_t sample_count, std::uint64_t skipped) {
  ExperimentReport report;
  report.scenario = std::move(scenario);
  report.n = n;
  report.rho_or_transform = std::move(rho_or_transform);
  report.mse_lr = mse_lr;
  report.mse_ds = mse_ds;
  report.sample_count = sample_count;
  report.skipped = skipped;

  const double floor = 1e-20 * std::max(1.0, target_scale * target_scale);
  const bool lr_zero = mse_lr <= floor;
  const bool ds_zero = mse_ds <= floor;
  if (lr_zero && ds_zero) {
    report.re_status = ReStatus::kUndefined;
  } else if (lr_zero) {
    report.re_status = ReStatus::kInfinite;
  } else {
    report.re_status = ReStatus::kFinite;
    report.re_percent = 100.0 * mse_ds / mse_lr;
  }
  return report;
}

std::string re_to_string(const ExperimentReport& report) {
  switch (report.re_status) {
    case ReStatus::kInfinite: return "inf";
    case ReStatus::kUndefined: return "undef";
    case ReStatus::kFinite: break;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", report.re_percent);
  return buf;
}

void generate_correlated_pair_sample(const MonteCarloConfig& cfg, CounterRng& rng,
                                     std::span<double> y, std::span<double> x) {
  const double sy = std::sqrt(cfg.sy2);
  const double sx = std::sqrt(cfg.sx2);
  const double resid = std::sqrt(cfg.sy2 * (1.0 - cfg.rho * cfg.rho));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto [g, h] = rng.next_normal_pair();
    y[i] = cfg.mu_y + resid * g + cfg.rho * sy * h;
    x[i] = cfg.mu_x + sx * h;
  }
}

ExperimentReport exact_enumeration_re(const FinitePopulation& pop, std::size_t n,
                                      std::span<const double> q_star,
                                      DegeneratePolicy policy, std::uint64_t cap,
                                      std::string label) {
  std::vector<double> q(n, 1.0);
  if (q_star.size() == 1) q.assign(n, q_star[0]);
  else if (!q_star.empty()) {
    if (q_star.size() != n)
      fail("invalid-config[enumerate]", "q* length does not match sample size");
    q.assign(q_star.begin(), q_star.end());
  }

  const double ybar_pop = pop.mean_y();
  const double xbar_pop = pop.mean_x();
  std::vector<double> ys(n), xs(n);
  double sse_lr = 0.0, sse_ds = 0.0;
  std::uint64_t skipped = 0;

  const EnumerationSummary summary = enumerate_combinations(
      pop.size(), n,
      [&](std::span<const std::size_t> subset) {
        for (std::size_t k = 0; k < n; ++k) {
          ys[k] = pop.y()[subset[k]];
          xs[k] = pop.x()[subset[k]];
        }
        const MeanEstimates est = mean_scale_estimates(ys, xs, q, xbar_pop);
        if (est.degenerate) {
          ++skipped;
          if (policy == DegeneratePolicy::kSkip) return;
        }
        const double err_lr = est.lr - ybar_pop;
        const double err_ds = est.ds - ybar_pop;
        sse_lr += err_lr * err_lr;
        sse_ds += err_ds * err_ds;
      },
      cap);

  const double divisor = static_cast<double>(summary.visited);
  return make_re_report("enumeration", static_cast<int>(n), std::move(label),
                        sse_lr / divisor, sse_ds / divisor, std::abs(ybar_pop),
                        summary.visited, skipped);
}

ExperimentReport monte_carlo_re(const MonteCarloConfig& cfg, DegeneratePolicy policy,
                                unsigned threads) {
  if (cfg.replicates < 1)
    fail("invalid-config[simulate]", "replicate count must be at least 1");
  if (cfg.n < 3) fail("invalid-config[simulate]", "sample size must be at least 3");
  if (!(cfg.rho > -1.0 && cfg.rho < 1.0))
    fail("invalid-config[simulate]", "rho must lie in (-1, 1)");
  if (cfg.sy2 < 0.0 || cfg.sx2 < 0.0)
    fail("invalid-config[simulate]", "variances must be nonnegative");

  const std::size_t R = static_cast<std::size_t>(cfg.replicates);
  const std::size_t n = static_cast<std::size_t>(cfg.n);
  // Per-replicate squared errors; reduced serially afterwards so the result
  // does not depend on the thread count.
  std::vector<double> se_lr(R, 0.0), se_ds(R, 0.0);
  std::vector<unsigned char> skip_flag(R, 0);

  const std::vector<double> q(n, 1.0);
  auto run_range = [&](std::size_t first, std::size_t last) {
    std::vector<double> y(n), x(n);
    for (std::size_t r = first; r < last; ++r) {
      CounterRng rng(cfg.seed, static_cast<std::uint64_t>(r));
      generate_correlated_pair_sample(cfg, rng, y, x);
      const MeanEstimates est = mean_scale_estimates(y, x, q, cfg.mu_x);
      if (est.degenerate) {
        skip_flag[r] = 1;
        if (policy == DegeneratePolicy::kSkip) continue;
      }
      const double err_lr = est.lr - cfg.mu_y;
      const double err_ds = est.ds - cfg.mu_y;
      se_lr[r] = err_lr * err_lr;
      se_ds[r] = err_ds * err_ds;
    }
  };

  unsigned degree = threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (degree == 0) degree = 1;
  degree = static_cast<unsigned>(std::min<std::size_t>(degree, R));
  if (degree <= 1) {
    run_range(0, R);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(degree);
    const std::size_t chunk = (R + degree - 1) / degree;
    for (unsigned t = 0; t < degree; ++t) {
      const std::size_t first = static_cast<std::size_t>(t) * chunk;
      const std::size_t last = std::min(R, first + chunk);
      if (first >= last) break;
      pool.emplace_back(run_range, first, last);
    }
    for (auto& th : pool) th.join();
  }

  double sse_lr = 0.0, sse_ds = 0.0;
  std::uint64_t skipped = 0;
  for (std::size_t r = 0; r < R; ++r) {
    sse_lr += se_lr[r];
    sse_ds += se_ds[r];
    skipped += skip_flag[r];
  }
  const double divisor = static_cast<double>(R);

  char rho_buf[32];
  std::snprintf(rho_buf, sizeof(rho_buf), "%g", cfg.rho);
  return make_re_report("monte-carlo", cfg.n, rho_buf, sse_lr / divisor,
                        sse_ds / divisor, std::abs(cfg.mu_y), R, skipped);
}

std::vector<ExperimentReport> simulation_grid(std::span<const double> rhos,
                                              std::span<const int> ns,
                                              const MonteCarloConfig& base,
                                              DegeneratePolicy policy,
                                              unsigned threads) {
  std::vector<ExperimentReport> reports;
  reports.reserve(rhos.size() * ns.size());
  for (int n : ns) {
    for (double rho : rhos) {
      MonteCarloConfig cfg = base;
      cfg.rho = rho;
      cfg.n = n;
      reports.push_back(monte_carlo_re(cfg, policy, threads));
    }
  }
  return reports;
}

}  // namespace svycal
