#pragma once

// Deterministic random-instance generators shared by the property and
// acceptance tests. Uses the standard library generator so instance
// construction stays independent of the library's own stream machinery.

#include <cstdint>
#include <random>
#include <vector>

#include "svycal/design.hpp"

namespace testsupport {

struct SrsworInstance {
  svycal::FinitePopulation population;
  svycal::SrsworDesign design;
  svycal::DesignSample sample;
};

// Population with an affine-plus-noise relation, nonzero intercept, positive
// x bounded away from zero (so every transformation and substitution is
// well defined), and a lexicographically random subset drawn from it.
inline SrsworInstance random_srswor_instance(std::mt19937_64& rng,
                                             std::size_t max_population = 50,
                                             std::size_t max_sample = 12) {
  std::uniform_int_distribution<std::size_t> pick_n(3, max_sample);
  const std::size_t n = pick_n(rng);
  std::uniform_int_distribution<std::size_t> pick_N(n + 1, max_population);
  const std::size_t N = pick_N(rng);

  std::uniform_real_distribution<double> x_dist(0.5, 3.0);
  std::normal_distribution<double> noise(0.0, 0.8);
  std::uniform_real_distribution<double> coef(0.5, 2.5);
  const double a = coef(rng), b = coef(rng);
  std::vector<double> y(N), x(N);
  for (std::size_t i = 0; i < N; ++i) {
    x[i] = x_dist(rng);
    y[i] = a + b * x[i] + noise(rng);
  }
  svycal::FinitePopulation pop(std::move(y), std::move(x));

  std::vector<std::size_t> ids(N);
  for (std::size_t i = 0; i < N; ++i) ids[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, N - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(n);

  svycal::SrsworDesign design(N, n);
  svycal::DesignSample sample = svycal::make_srswor_sample(pop, design, ids);
  return SrsworInstance{std::move(pop), design, std::move(sample)};
}

inline std::vector<double> random_positive_weights(std::mt19937_64& rng,
                                                   std::size_t count,
                                                   double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> q(count);
  for (double& v : q) v = dist(rng);
  return q;
}

}  // namespace testsupport
