#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace svycal {

// Finite universe of study/auxiliary value pairs (y_i, x_i), i = 0..N-1.
// Unit ids are 0-based positions into the value sequences.
class FinitePopulation {
 public:
  FinitePopulation(std::vector<double> y, std::vector<double> x);

  std::size_t size() const noexcept { return y_.size(); }
  const std::vector<double>& y() const noexcept { return y_; }
  const std::vector<double>& x() const noexcept { return x_; }
  double total_y() const noexcept { return total_y_; }
  double total_x() const noexcept { return total_x_; }
  double mean_y() const noexcept { return total_y_ / static_cast<double>(size()); }
  double mean_x() const noexcept { return total_x_ / static_cast<double>(size()); }

 private:
  std::vector<double> y_;
  std::vector<double> x_;
  double total_y_ = 0.0;
  double total_x_ = 0.0;
};

// Simple random sampling without replacement: every unit enters with
// probability n/N and every pair with probability n(n-1)/(N(N-1)).
class SrsworDesign {
 public:
  SrsworDesign(std::size_t population_size, std::size_t sample_size);

  std::size_t population_size() const noexcept { return population_size_; }
  std::size_t sample_size() const noexcept { return sample_size_; }
  double first_order_probability() const noexcept;
  double joint_probability() const noexcept;
  double design_weight() const noexcept { return 1.0 / first_order_probability(); }

 private:
  std::size_t population_size_;
  std::size_t sample_size_;
};

// A drawn sample together with its design metadata. Immutable after
// construction; d_i is set to exactly 1/pi_i.
//
// Joint probabilities are either uniform (one value for all pairs, the
// SRSWOR case), a full symmetric matrix, or absent. Pairwise variance
// machinery requires them; pure calibration does not.
class DesignSample {
 public:
  // Uniform joint probability across all pairs.
  DesignSample(std::vector<std::size_t> indices, std::vector<double> y,
               std::vector<double> x, std::vector<double> pi_first,
               double pi_joint_uniform);

  // Full symmetric joint matrix, row-major n*n (diagonal ignored).
  DesignSample(std::vector<std::size_t> indices, std::vector<double> y,
               std::vector<double> x, std::vector<double> pi_first,
               std::vector<double> pi_joint_matrix);

  // No joint information; pairwise operations will refuse the sample.
  static DesignSample without_joint(std::vector<std::size_t> indices,
                                    std::vector<double> y, std::vector<double> x,
                                    std::vector<double> pi_first);

  std::size_t size() const noexcept { return y_.size(); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  const std::vector<double>& y() const noexcept { return y_; }
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& pi_first() const noexcept { return pi_first_; }
  const std::vector<double>& weights() const noexcept { return d_; }

  bool has_joint() const noexcept { return joint_state_ != JointState::kAbsent; }
  double pi_joint(std::size_t i, std::size_t j) const;

  // True when all first-order and all joint probabilities coincide
  // (the shape produced by an SRSWOR draw).
  bool equal_probability() const noexcept;

 private:
  enum class JointState { kAbsent, kUniform, kMatrix };

  DesignSample(std::vector<std::size_t> indices, std::vector<double> y,
               std::vector<double> x, std::vector<double> pi_first,
               JointState state, double pi_joint_uniform,
               std::vector<double> pi_joint_matrix);

  void validate() const;

  std::vector<std::size_t> indices_;
  std::vector<double> y_;
  std::vector<double> x_;
  std::vector<double> pi_first_;
  std::vector<double> d_;
  JointState joint_state_;
  double pi_joint_uniform_ = 0.0;
  std::vector<double> pi_joint_matrix_;
};

DesignSample make_srswor_sample(const FinitePopulation& pop, const SrsworDesign& design,
                                std::vector<std::size_t> indices);

// Horvitz-Thompson expansion estimator of the population total of y
// (or of an arbitrary per-unit sequence z).
double ht_total(const DesignSample& sample);
double ht_total(const DesignSample& sample, std::span<const double> z);

// Binomial coefficient by Pascal's rule; throws Error("overflow") when the
// value does not fit a 64-bit counter.
std::uint64_t binomial(std::size_t n, std::size_t k);

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

struct EnumerationSummary {
  std::uint64_t visited = 0;
};

// Streams every subset_size-combination of {0..population_size-1} in
// lexicographic order through the visitor. Never materializes the subset
// list; the scratch buffer passed to the visitor is reused between calls.
EnumerationSummary enumerate_combinations(
    std::size_t population_size, std::size_t subset_size,
    const std::function<void(std::span<const std::size_t>)>& visit,
    std::uint64_t cap = kDefaultEnumerationCap);

// Combination of the given lexicographic rank (combinadic unranking);
// supports partitioning an enumeration into independent rank ranges.
std::vector<std::size_t> unrank_combination(std::size_t population_size,
                                            std::size_t subset_size,
                                            std::uint64_t rank);

EnumerationSummary enumerate_combinations_range(
    std::size_t population_size, std::size_t subset_size, std::uint64_t first_rank,
    std::uint64_t last_rank,
    const std::function<void(std::span<const std::size_t>)>& visit);

// Visits the SRSWOR sample for every subset, in lexicographic index order.
EnumerationSummary enumerate_srswor(
    const FinitePopulation& pop, std::size_t sample_size,
    const std::function<void(const DesignSample&)>& visit,
    std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace svycal
