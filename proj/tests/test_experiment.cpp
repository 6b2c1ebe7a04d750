#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "oracles.hpp"
#include "svycal/calibrate.hpp"
#include "svycal/design.hpp"
#include "svycal/error.hpp"
#include "svycal/experiment.hpp"
#include "svycal/rng.hpp"

using namespace svycal;

TEST_CASE("transformations map the selected column pointwise") {
  const FinitePopulation pop({4.0, 9.0}, {16.0, 25.0});
  const FinitePopulation same =
      apply_transformation(pop, {TransformTarget::kY, TransformMap::kIdentity});
  CHECK(same.y() == pop.y());
  CHECK(same.x() == pop.x());

  const FinitePopulation rooted =
      apply_transformation(pop, {TransformTarget::kY, TransformMap::kSqrt});
  CHECK(rooted.y()[0] == doctest::Approx(2.0));
  CHECK(rooted.y()[1] == doctest::Approx(3.0));
  CHECK(rooted.x() == pop.x());

  const FinitePopulation with_zero({1.0, 2.0}, {0.0, 3.0});
  try {
    apply_transformation(with_zero, {TransformTarget::kX, TransformMap::kLog});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == "domain[transform]");
    CHECK(std::string(e.what()).find("unit 0") != std::string::npos);
  }
  CHECK_THROWS_AS(
      apply_transformation(FinitePopulation({-1.0, 4.0}, {1.0, 2.0}),
                           {TransformTarget::kY, TransformMap::kSqrt}),
      Error);
}

TEST_CASE("transformation tokens round-trip") {
  for (const char* token : {"id:y", "sqrt:y", "sqrt:x", "log:y", "log:x"}) {
    CHECK(to_string(parse_transformation(token)) == token);
  }
  CHECK_THROWS_AS(parse_transformation("cube:y"), Error);
  CHECK_THROWS_AS(parse_transformation("sqrt"), Error);
}

TEST_CASE("exact affine population drives the regression error to zero") {
  std::vector<double> x{1.0, 2.0, 3.5, 5.0, 6.5, 8.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 4.0 + 2.0 * x[i];
  const ExperimentReport report = exact_enumeration_re(FinitePopulation(y, x), 3);
  CHECK(report.re_status == ReStatus::kInfinite);
  CHECK(re_to_string(report) == "inf");
  CHECK(report.mse_ds > 0.0);
}

TEST_CASE("exact proportional population drives both errors to zero") {
  std::vector<double> x{1.0, 2.0, 3.5, 5.0, 6.5, 8.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i];
  const ExperimentReport report = exact_enumeration_re(FinitePopulation(y, x), 3);
  CHECK(report.re_status == ReStatus::kUndefined);
  CHECK(re_to_string(report) == "undef");
}

TEST_CASE("enumeration study matches a brute-force oracle") {
  const FinitePopulation pop({6.1, 3.2, 8.4, 5.5, 9.0, 2.7, 7.3, 4.8},
                             {2.0, 1.1, 3.0, 1.9, 3.4, 0.9, 2.6, 1.7});
  const std::size_t n = 4;
  const ExperimentReport report = exact_enumeration_re(pop, n);
  CHECK(report.sample_count == testsupport::pascal_binomial(8, 4));

  // Brute force with materialized estimate lists; regression fit written
  // out longhand.
  const double ybar_pop = pop.mean_y();
  const double xbar_pop = pop.mean_x();
  std::vector<double> est_lr, est_ds;
  testsupport::exhaustive_mean(8, n, [&](std::span<const std::size_t> subset) {
    double sy = 0.0, sx = 0.0, sxy = 0.0, sxx = 0.0, rxx = 0.0, rxy = 0.0;
    for (std::size_t id : subset) {
      sy += pop.y()[id];
      sx += pop.x()[id];
      rxx += pop.x()[id] * pop.x()[id];
      rxy += pop.x()[id] * pop.y()[id];
    }
    const double nn = static_cast<double>(n);
    const double ybar = sy / nn, xbar = sx / nn;
    for (std::size_t id : subset) {
      sxy += (pop.x()[id] - xbar) * (pop.y()[id] - ybar);
      sxx += (pop.x()[id] - xbar) * (pop.x()[id] - xbar);
    }
    est_lr.push_back(ybar + sxy / sxx * (xbar_pop - xbar));
    est_ds.push_back(ybar + rxy / rxx * (xbar_pop - xbar));
    return 0.0;
  });
  double mse_lr = 0.0, mse_ds = 0.0;
  for (double v : est_lr) mse_lr += (v - ybar_pop) * (v - ybar_pop);
  for (double v : est_ds) mse_ds += (v - ybar_pop) * (v - ybar_pop);
  mse_lr /= static_cast<double>(est_lr.size());
  mse_ds /= static_cast<double>(est_ds.size());

  CHECK(report.mse_lr == doctest::Approx(mse_lr).epsilon(1e-12));
  CHECK(report.mse_ds == doctest::Approx(mse_ds).epsilon(1e-12));
  CHECK(report.re_percent * report.mse_lr ==
        doctest::Approx(100.0 * report.mse_ds).epsilon(1e-12));
}

TEST_CASE("enumeration studies are bitwise reproducible") {
  const FinitePopulation pop({6.1, 3.2, 8.4, 5.5, 9.0, 2.7}, {2.0, 1.1, 3.0, 1.9, 3.4, 0.9});
  const ExperimentReport a = exact_enumeration_re(pop, 3);
  const ExperimentReport b = exact_enumeration_re(pop, 3);
  CHECK(a.mse_lr == b.mse_lr);
  CHECK(a.mse_ds == b.mse_ds);
  CHECK(a.re_percent == b.re_percent);
}

TEST_CASE("mean-scale study agrees with the total-scale estimators") {
  const FinitePopulation pop({6.1, 3.2, 8.4, 5.5, 9.0}, {2.0, 1.1, 3.0, 1.9, 3.4});
  const std::size_t n = 3;
  const double N = static_cast<double>(pop.size());
  const ExperimentReport report = exact_enumeration_re(pop, n);

  double sse_lr = 0.0, sse_ds = 0.0;
  std::uint64_t count = 0;
  const SrsworDesign design(pop.size(), n);
  enumerate_combinations(pop.size(), n, [&](std::span<const std::size_t> subset) {
    const DesignSample s = make_srswor_sample(
        pop, design, std::vector<std::size_t>(subset.begin(), subset.end()));
    const double lr =
        lr_total(s, CalibrationSpec::with_weight_sum(pop.total_x())).total / N;
    const double ds =
        greg_total(s, CalibrationSpec::aux_only(pop.total_x())).total / N;
    sse_lr += (lr - pop.mean_y()) * (lr - pop.mean_y());
    sse_ds += (ds - pop.mean_y()) * (ds - pop.mean_y());
    ++count;
  });
  CHECK(report.mse_lr ==
        doctest::Approx(sse_lr / static_cast<double>(count)).epsilon(1e-12));
  CHECK(report.mse_ds ==
        doctest::Approx(sse_ds / static_cast<double>(count)).epsilon(1e-12));
}

TEST_CASE("generator hits the configured moments") {
  MonteCarloConfig cfg;
  cfg.seed = 99;

  for (double rho : {0.0, 0.9}) {
    cfg.rho = rho;
    CounterRng rng(cfg.seed, 1);
    const std::size_t draws = 1'000'000;
    std::vector<double> y(draws), x(draws);
    cfg.n = static_cast<int>(draws);
    generate_correlated_pair_sample(cfg, rng, y, x);
    double my = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      my += y[i];
      mx += x[i];
    }
    my /= draws;
    mx /= draws;
    double vy = 0.0, vx = 0.0, cxy = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      vy += (y[i] - my) * (y[i] - my);
      vx += (x[i] - mx) * (x[i] - mx);
      cxy += (y[i] - my) * (x[i] - mx);
    }
    vy /= draws;
    vx /= draws;
    cxy /= draws;
    CHECK(std::abs(my - 100.0) < 0.05);
    CHECK(std::abs(mx - 90.0) < 0.05);
    CHECK(std::abs(vy - 50.0) < 0.5);
    CHECK(std::abs(vx - 50.0) < 0.5);
    CHECK(std::abs(cxy / std::sqrt(vy * vx) - rho) < 0.005);
  }

  // Zero study variance pins y at its mean.
  cfg.rho = 0.0;
  cfg.sy2 = 0.0;
  cfg.n = 8;
  CounterRng rng(cfg.seed, 2);
  std::vector<double> y(8), x(8);
  generate_correlated_pair_sample(cfg, rng, y, x);
  for (double v : y) CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("monte carlo study is seed-deterministic and thread-invariant") {
  MonteCarloConfig cfg;
  cfg.rho = 0.5;
  cfg.n = 12;
  cfg.replicates = 400;
  cfg.seed = 31337;

  const ExperimentReport a = monte_carlo_re(cfg);
  const ExperimentReport b = monte_carlo_re(cfg);
  CHECK(a.mse_lr == b.mse_lr);
  CHECK(a.mse_ds == b.mse_ds);
  CHECK(a.re_percent == b.re_percent);

  const ExperimentReport par = monte_carlo_re(cfg, DegeneratePolicy::kSkip, 4);
  CHECK(par.mse_lr == a.mse_lr);
  CHECK(par.mse_ds == a.mse_ds);

  cfg.seed = 31338;
  const ExperimentReport c = monte_carlo_re(cfg);
  CHECK(c.mse_lr != a.mse_lr);
}

TEST_CASE("single-replicate study still honors the ratio definition") {
  MonteCarloConfig cfg;
  cfg.rho = 0.3;
  cfg.n = 6;
  cfg.replicates = 1;
  cfg.seed = 5;
  const ExperimentReport r = monte_carlo_re(cfg);
  CHECK(r.sample_count == 1);
  CHECK(r.re_percent * r.mse_lr == doctest::Approx(100.0 * r.mse_ds).epsilon(1e-12));
}

TEST_CASE("degenerate replicates follow the chosen policy") {
  MonteCarloConfig cfg;
  cfg.rho = 0.0;
  cfg.n = 5;
  cfg.replicates = 50;
  cfg.seed = 17;
  cfg.sx2 = 0.0;  // constant x in every replicate

  const ExperimentReport skipped = monte_carlo_re(cfg, DegeneratePolicy::kSkip);
  CHECK(skipped.skipped == 50);
  CHECK(skipped.re_status == ReStatus::kUndefined);

  const ExperimentReport fallback = monte_carlo_re(cfg, DegeneratePolicy::kFallback);
  CHECK(fallback.skipped == 50);
  CHECK(fallback.re_status == ReStatus::kFinite);
  CHECK(fallback.mse_lr == fallback.mse_ds);  // both collapse to the sample mean
  CHECK(fallback.re_percent == doctest::Approx(100.0));
}

TEST_CASE("simulation grid lays out one report per cell") {
  MonteCarloConfig base;
  base.replicates = 60;
  base.seed = 2;
  const std::vector<double> rhos{0.1, 0.7};
  const std::vector<int> ns{5, 9};
  const std::vector<ExperimentReport> grid =
      simulation_grid(rhos, ns, base, DegeneratePolicy::kSkip, 2);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0].n == 5);
  CHECK(grid[0].rho_or_transform == "0.1");
  CHECK(grid[3].n == 9);
  CHECK(grid[3].rho_or_transform == "0.7");
  for (const auto& r : grid) CHECK(r.sample_count == 60);
}
