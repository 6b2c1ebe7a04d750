#pragma once

// Independent oracles the unit and acceptance tests check the library
// against. Everything here is deliberately written from first principles:
// generic KKT solves for the constrained quadratic programs, and
// brute-force exhaustion over all samples.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dense_solver.hpp"

namespace testsupport {

// Minimizes sum_i (w_i - base_i)^2 / denom_i subject to rows_r . w = target_r,
// by solving the stationarity system
//   2 (w_i - base_i) / denom_i = sum_r lambda_r rows_r[i].
// denom_i may be negative (indefinite objective); the solver then returns
// the unique stationary point, which is what the closed forms produce too.
inline std::vector<double> kkt_calibrate(std::span<const double> base,
                                         std::span<const double> denom,
                                         const std::vector<std::vector<double>>& rows,
                                         const std::vector<double>& targets) {
  const std::size_t n = base.size();
  const std::size_t m = rows.size();
  DenseMatrix a(n + m, n + m);
  std::vector<double> b(n + m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (denom[i] == 0.0) throw std::invalid_argument("kkt_calibrate: zero denominator");
    a.at(i, i) = 2.0 / denom[i];
    b[i] = 2.0 * base[i] / denom[i];
    for (std::size_t r = 0; r < m; ++r) a.at(i, n + r) = -rows[r][i];
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < n; ++i) a.at(n + r, i) = rows[r][i];
    b[n + r] = targets[r];
  }
  std::vector<double> solution = solve_dense(std::move(a), std::move(b));
  solution.resize(n);
  return solution;
}

// Exhaustive statistics over all C(N,n) SRSWOR samples of a population:
// feeds every subset to `stat` and returns the running mean of the results.
inline double exhaustive_mean(
    std::size_t population_size, std::size_t subset_size,
    const std::function<double(std::span<const std::size_t>)>& stat) {
  std::vector<std::size_t> subset(subset_size);
  for (std::size_t i = 0; i < subset_size; ++i) subset[i] = i;
  double sum = 0.0;
  std::uint64_t count = 0;
  while (true) {
    sum += stat(std::span<const std::size_t>(subset));
    ++count;
    std::size_t pos = subset_size;
    while (pos > 0 && subset[pos - 1] == population_size - subset_size + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t i = pos; i < subset_size; ++i) subset[i] = subset[i - 1] + 1;
  }
  return sum / static_cast<double>(count);
}

// Exact design variance of the expansion total of z under SRSWOR, computed
// by exhaustion: mean of (HT_k - Z)^2 over all samples, d_i = N/n.
inline double exhaustive_ht_variance(std::span<const double> z,
                                     std::size_t subset_size) {
  const std::size_t N = z.size();
  double total = 0.0;
  for (double v : z) total += v;
  const double d = static_cast<double>(N) / static_cast<double>(subset_size);
  return exhaustive_mean(N, subset_size, [&](std::span<const std::size_t> subset) {
    double ht = 0.0;
    for (std::size_t id : subset) ht += d * z[id];
    const double err = ht - total;
    return err * err;
  });
}

// Binomial coefficient by the textbook Pascal triangle (row by row), kept
// separate from the library's multiplicative implementation.
inline std::uint64_t pascal_binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::vector<std::uint64_t> row(n + 1, 0);
  row[0] = 1;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i < k ? i : k; j > 0; --j) row[j] += row[j - 1];
  return row[k];
}

}  // namespace testsupport
