#pragma once

// Comparison-count cost model for separate-chaining tables: bucket counts,
// cost, minimal cost, regret, closed-form expectations under the uniform
// hash and the collision-count tests used at rehash time.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "adapthash/hashers.hpp"

namespace adapthash {

/// Per-bucket occupancy. counts.size() == buckets and the entries sum to keys.
struct BucketCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t keys = 0;

  std::uint64_t buckets() const noexcept { return counts.size(); }
};

struct CostReport {
  double cost = 0.0;
  double min_cost = 0.0;
  double regret = 0.0;
};

enum class ThresholdRule {
  HalfN,             // c > n/2, m < 1024
  SevenSixteenthsN,  // c > (n>>1) - (n>>4), 1024 <= m < 4096
  ExpBound,          // u/m > exp(-f)/0.9, m >= 4096
};

enum class ChainPolicy { Identity, String };

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

constexpr bool is_power_of_two(std::uint64_t x) noexcept { return x != 0 && (x & (x - 1)) == 0; }

/// Throws std::invalid_argument unless m is a power of two.
BucketCounts bucket_counts(std::span<const HashValue> hashes, std::uint64_t m);

/// Expected comparisons per successful lookup. Throws on an empty count vector.
double cost(const BucketCounts& bc);

/// Cost of a perfect distribution of n keys over m buckets; 0 for n == 0.
double min_cost(std::uint64_t n, std::uint64_t m);

/// Cost, minimal cost and their difference. Empty input reports all zeros.
/// The difference is formed from integer numerators, so a perfect
/// distribution has regret exactly 0.
CostReport regret(const BucketCounts& bc);
CostReport regret(std::span<const HashValue> hashes, std::uint64_t m);

/// 1 + (n-1)/(2m).
double expected_uniform_cost(std::uint64_t n, std::uint64_t m);

/// The published integer-load-factor constant 0.5 + 1/m. Note that
/// expected_uniform_cost(qm, m) - min_cost(qm, m) evaluates to 0.5 - 1/(2m);
/// use uniform_reference_regret for reference curves.
double expected_uniform_regret(std::uint64_t m);

/// expected_uniform_cost(n, m) - min_cost(n, m), valid for every n.
double uniform_reference_regret(std::uint64_t n, std::uint64_t m);

/// 1 + (n - u*min(1, 2^(page_bits-shift)/m)) / (2m) for n keys spread evenly
/// over pages holding u keys each. Throws if u == 0, u does not divide n,
/// or shift > page_bits.
double expected_pointer_mix_cost(std::uint64_t n, std::uint64_t keys_per_page, std::uint64_t m,
                                 unsigned page_bits, unsigned shift);

/// m (1 - 1/m)^n.
double expected_empty_buckets(std::uint64_t n, std::uint64_t m);

ThresholdRule threshold_rule(std::uint64_t m) noexcept;

/// True when c collisions among n keys in m buckets are significantly more
/// than the uniform hash produces. Strict comparisons throughout.
bool too_many_collisions(std::uint64_t n, std::uint64_t m, std::uint64_t collisions) noexcept;

/// Identity: 14 for every m. String: smallest L with
/// m * P[Binomial(m, 1/m) >= L] < 0.01, memoized per power of two.
unsigned max_chain_threshold(std::uint64_t m, ChainPolicy policy);

/// Mean cost of `trials` independent uniform assignments and the standard
/// error of that mean. Deterministic in seed.
MonteCarloEstimate monte_carlo_uniform_cost(std::uint64_t n, std::uint64_t m, std::uint64_t trials,
                                            std::uint64_t seed);

}  // namespace adapthash
