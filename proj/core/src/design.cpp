#include "svycal/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "svycal/error.hpp"

namespace svycal {

FinitePopulation::FinitePopulation(std::vector<double> y, std::vector<double> x)
    : y_(std::move(y)), x_(std::move(x)) {
  if (y_.size() != x_.size())
    fail("invalid-population", "y and x sequences differ in length");
  if (y_.size() < 2) fail("invalid-population", "population needs at least 2 units");
  for (double v : y_) total_y_ += v;
  for (double v : x_) total_x_ += v;
  if (!std::isfinite(total_y_) || !std::isfinite(total_x_))
    fail("invalid-population", "population totals are not finite");
}

SrsworDesign::SrsworDesign(std::size_t population_size, std::size_t sample_size)
    : population_size_(population_size), sample_size_(sample_size) {
  if (sample_size_ < 2)
    fail("degenerate-design", "sample size must be at least 2, got " +
                                  std::to_string(sample_size_));
  if (sample_size_ > population_size_)
    fail("degenerate-design", "sample size " + std::to_string(sample_size_) +
                                  " exceeds population size " +
                                  std::to_string(population_size_));
}

double SrsworDesign::first_order_probability() const noexcept {
  return static_cast<double>(sample_size_) / static_cast<double>(population_size_);
}

double SrsworDesign::joint_probability() const noexcept {
  return static_cast<double>(sample_size_) * static_cast<double>(sample_size_ - 1) /
         (static_cast<double>(population_size_) *
          static_cast<double>(population_size_ - 1));
}

DesignSample::DesignSample(std::vector<std::size_t> indices, std::vector<double> y,
                           std::vector<double> x, std::vector<double> pi_first,
                           double pi_joint_uniform)
    : DesignSample(std::move(indices), std::move(y), std::move(x), std::move(pi_first),
                   JointState::kUniform, pi_joint_uniform, {}) {}

DesignSample::DesignSample(std::vector<std::size_t> indices, std::vector<double> y,
                           std::vector<double> x, std::vector<double> pi_first,
                           std::vector<double> pi_joint_matrix)
    : DesignSample(std::move(indices), std::move(y), std::move(x), std::move(pi_first),
                   JointState::kMatrix, 0.0, std::move(pi_joint_matrix)) {}

DesignSample DesignSample::without_joint(std::vector<std::size_t> indices,
                                         std::vector<double> y, std::vector<double> x,
                                         std::vector<double> pi_first) {
  return DesignSample(std::move(indices), std::move(y), std::move(x),
                      std::move(pi_first), JointState::kAbsent, 0.0, {});
}

DesignSample::DesignSample(std::vector<std::size_t> indices, std::vector<double> y,
                           std::vector<double> x, std::vector<double> pi_first,
                           JointState state, double pi_joint_uniform,
                           std::vector<double> pi_joint_matrix)
    : indices_(std::move(indices)),
      y_(std::move(y)),
      x_(std::move(x)),
      pi_first_(std::move(pi_first)),
      joint_state_(state),
      pi_joint_uniform_(pi_joint_uniform),
      pi_joint_matrix_(std::move(pi_joint_matrix)) {
  validate();
  d_.resize(pi_first_.size());
  for (std::size_t i = 0; i < pi_first_.size(); ++i) d_[i] = 1.0 / pi_first_[i];
}

void DesignSample::validate() const {
  const std::size_t n = y_.size();
  if (n < 2) fail("degenerate-design", "sample needs at least 2 units");
  if (indices_.size() != n || x_.size() != n || pi_first_.size() != n)
    fail("invalid-sample", "sample sequences differ in length");

  std::unordered_set<std::size_t> seen;
  for (std::size_t id : indices_) {
    if (!seen.insert(id).second)
      fail("invalid-sample", "duplicate unit id " + std::to_string(id));
  }
  for (double pi : pi_first_) {
    if (!(pi > 0.0) || pi > 1.0)
      fail("invalid-sample", "first-order probability outside (0,1]");
  }
  if (joint_state_ == JointState::kMatrix && pi_joint_matrix_.size() != n * n)
    fail("invalid-sample", "joint probability matrix has wrong shape");

  if (joint_state_ == JointState::kAbsent) return;
  const double slack = 1.0 + 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double pij = joint_state_ == JointState::kUniform
                             ? pi_joint_uniform_
                             : pi_joint_matrix_[i * n + j];
      const double pji = joint_state_ == JointState::kUniform
                             ? pi_joint_uniform_
                             : pi_joint_matrix_[j * n + i];
      if (pij != pji) fail("invalid-sample", "joint probabilities not symmetric");
      if (!(pij > 0.0) || pij > slack * std::min(pi_first_[i], pi_first_[j]))
        fail("invalid-sample", "joint probability outside (0, min(pi_i, pi_j)]");
    }
  }
}

double DesignSample::pi_joint(std::size_t i, std::size_t j) const {
  if (joint_state_ == JointState::kAbsent)
    fail("incomplete-design", "sample carries no joint inclusion probabilities");
  if (i == j || i >= size() || j >= size())
    fail("invalid-sample", "joint probability requested for invalid pair");
  return joint_state_ == JointState::kUniform ? pi_joint_uniform_
                                              : pi_joint_matrix_[i * size() + j];
}

bool DesignSample::equal_probability() const noexcept {
  for (std::size_t i = 1; i < pi_first_.size(); ++i)
    if (pi_first_[i] != pi_first_[0]) return false;
  if (joint_state_ == JointState::kMatrix) {
    const std::size_t n = size();
    const double ref = pi_joint_matrix_[1];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && pi_joint_matrix_[i * n + j] != ref) return false;
  }
  return true;
}

DesignSample make_srswor_sample(const FinitePopulation& pop, const SrsworDesign& design,
                                std::vector<std::size_t> indices) {
  if (design.population_size() != pop.size())
    fail("invalid-sample", "design population size does not match population");
  if (indices.size() != design.sample_size())
    fail("invalid-sample", "expected " + std::to_string(design.sample_size()) +
                               " indices, got " + std::to_string(indices.size()));
  std::vector<double> y(indices.size()), x(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= pop.size())
      fail("invalid-sample", "unit id " + std::to_string(indices[k]) +
                                 " outside population of size " +
                                 std::to_string(pop.size()));
    y[k] = pop.y()[indices[k]];
    x[k] = pop.x()[indices[k]];
  }
  std::vector<double> pi(indices.size(), design.first_order_probability());
  return DesignSample(std::move(indices), std::move(y), std::move(x), std::move(pi),
                      design.joint_probability());
}

double ht_total(const DesignSample& sample) { return ht_total(sample, sample.y()); }

double ht_total(const DesignSample& sample, std::span<const double> z) {
  if (z.size() != sample.size())
    fail("invalid-sample", "ht_total: z length does not match sample");
  double total = 0.0;
  const auto& d = sample.weights();
  for (std::size_t i = 0; i < z.size(); ++i) total += d[i] * z[i];
  return total;
}

namespace {

// Pascal's rule row walk; returns max() on overflow when saturate is set.
std::uint64_t binomial_impl(std::size_t n, std::size_t k, bool saturate) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t value = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t numer = static_cast<std::uint64_t>(n - k + i);
    // value * numer / i is exact at every step; guard the multiply.
    if (value > std::numeric_limits<std::uint64_t>::max() / numer) {
      // Fall back to a remainder-free split to postpone overflow.
      const std::uint64_t q = value / i;
      const std::uint64_t r = value % i;
      if ((q != 0 && q > std::numeric_limits<std::uint64_t>::max() / numer) ||
          (r != 0 && r > std::numeric_limits<std::uint64_t>::max() / numer)) {
        if (saturate) return std::numeric_limits<std::uint64_t>::max();
        fail("overflow", "binomial coefficient exceeds 64-bit range");
      }
      const std::uint64_t big = q * numer;
      const std::uint64_t small = r * numer / i;  // r*numer divisible by i here
      if (big > std::numeric_limits<std::uint64_t>::max() - small) {
        if (saturate) return std::numeric_limits<std::uint64_t>::max();
        fail("overflow", "binomial coefficient exceeds 64-bit range");
      }
      value = big + small;
    } else {
      value = value * numer / i;
    }
  }
  return value;
}

}  // namespace

std::uint64_t binomial(std::size_t n, std::size_t k) {
  return binomial_impl(n, k, /*saturate=*/false);
}

EnumerationSummary enumerate_combinations(
    std::size_t population_size, std::size_t subset_size,
    const std::function<void(std::span<const std::size_t>)>& visit,
    std::uint64_t cap) {
  if (subset_size < 2)
    fail("invalid-argument", "subset size must be at least 2");
  if (subset_size > population_size)
    fail("invalid-argument", "subset size " + std::to_string(subset_size) +
                                 " exceeds population size " +
                                 std::to_string(population_size));
  const std::uint64_t count = binomial_impl(population_size, subset_size, true);
  if (count > cap)
    fail("enumeration-too-large",
         "C(" + std::to_string(population_size) + "," + std::to_string(subset_size) +
             ") exceeds the enumeration cap " + std::to_string(cap));

  std::vector<std::size_t> subset(subset_size);
  for (std::size_t i = 0; i < subset_size; ++i) subset[i] = i;
  EnumerationSummary summary;
  while (true) {
    visit(std::span<const std::size_t>(subset));
    ++summary.visited;
    // Advance to the lexicographic successor.
    std::size_t pos = subset_size;
    while (pos > 0 && subset[pos - 1] == population_size - subset_size + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t i = pos; i < subset_size; ++i) subset[i] = subset[i - 1] + 1;
  }
  return summary;
}

std::vector<std::size_t> unrank_combination(std::size_t population_size,
                                            std::size_t subset_size,
                                            std::uint64_t rank) {
  std::vector<std::size_t> subset;
  subset.reserve(subset_size);
  std::size_t next = 0;
  std::size_t remaining = subset_size;
  while (remaining > 0) {
    const std::uint64_t tail =
        binomial_impl(population_size - next - 1, remaining - 1, true);
    if (rank < tail) {
      subset.push_back(next);
      --remaining;
    } else {
      rank -= tail;
    }
    ++next;
    if (next > population_size)
      fail("invalid-argument", "combination rank out of range");
  }
  return subset;
}

EnumerationSummary enumerate_combinations_range(
    std::size_t population_size, std::size_t subset_size, std::uint64_t first_rank,
    std::uint64_t last_rank,
    const std::function<void(std::span<const std::size_t>)>& visit) {
  EnumerationSummary summary;
  if (first_rank >= last_rank) return summary;
  std::vector<std::size_t> subset =
      unrank_combination(population_size, subset_size, first_rank);
  for (std::uint64_t rank = first_rank; rank < last_rank; ++rank) {
    visit(std::span<const std::size_t>(subset));
    ++summary.visited;
    std::size_t pos = subset_size;
    while (pos > 0 && subset[pos - 1] == population_size - subset_size + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t i = pos; i < subset_size; ++i) subset[i] = subset[i - 1] + 1;
  }
  return summary;
}

EnumerationSummary enumerate_srswor(
    const FinitePopulation& pop, std::size_t sample_size,
    const std::function<void(const DesignSample&)>& visit, std::uint64_t cap) {
  const SrsworDesign design(pop.size(), sample_size);
  return enumerate_combinations(
      pop.size(), sample_size,
      [&](std::span<const std::size_t> subset) {
        visit(make_srswor_sample(
            pop, design, std::vector<std::size_t>(subset.begin(), subset.end())));
      },
      cap);
}

}  // namespace svycal
