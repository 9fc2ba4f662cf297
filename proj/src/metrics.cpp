#include "adapthash/metrics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "adapthash/rng.hpp"

namespace adapthash {
namespace {

__extension__ typedef unsigned __int128 wide;

void require_buckets(std::uint64_t m) {
  if (!is_power_of_two(m)) throw std::invalid_argument("bucket count must be a power of two");
}

// Sum of c_b (c_b + 1) over buckets: 2n times the cost.
wide doubled_cost_numerator(const BucketCounts& bc) {
  wide sum = 0;
  for (const std::uint64_t c : bc.counts) sum += static_cast<wide>(c) * (c + 1);
  return sum;
}

wide doubled_min_cost_numerator(std::uint64_t n, std::uint64_t m) {
  const wide q = n / m;
  const wide r = n % m;
  return (m - r) * q * (q + 1) + r * (q + 1) * (q + 2);
}

double ratio(wide numerator, std::uint64_t n) {
  return static_cast<double>(numerator) / (2.0 * static_cast<double>(n));
}

// Smallest L with m * P[Binomial(m, 1/m) >= L] < 0.01. The pmf is built
// by its term ratio, which stays accurate for every m up to 2^63, and
// decays fast enough that 600 terms hold the whole tail.
unsigned string_chain_threshold(std::uint64_t m) {
  const double md = static_cast<double>(m);
  const std::size_t terms = static_cast<std::size_t>(std::min<std::uint64_t>(m, 600)) + 1;
  std::vector<double> pmf(terms);
  double log_pmf = md * std::log1p(-1.0 / md);
  for (std::size_t k = 0; k < terms; ++k) {
    if (k > 0) {
      const double kd = static_cast<double>(k);
      log_pmf += (m == 1 ? 0.0 : std::log1p((2.0 - kd) / (md - 1.0))) - std::log(kd);
    }
    pmf[k] = std::exp(log_pmf);
  }
  if (m == 1) pmf = {0.0, 1.0};
  std::vector<double> tail(pmf.size() + 1, 0.0);
  for (std::size_t k = pmf.size(); k-- > 0;) tail[k] = tail[k + 1] + pmf[k];
  for (std::size_t L = 0; L < tail.size(); ++L)
    if (md * tail[L] < 0.01) return static_cast<unsigned>(L);
  return static_cast<unsigned>(tail.size());
}

}  // namespace

BucketCounts bucket_counts(std::span<const HashValue> hashes, std::uint64_t m) {
  require_buckets(m);
  BucketCounts bc;
  bc.counts.assign(m, 0);
  bc.keys = hashes.size();
  for (const HashValue h : hashes) ++bc.counts[h & (m - 1)];
  return bc;
}

double cost(const BucketCounts& bc) {
  if (bc.keys == 0) throw std::invalid_argument("cost of an empty count vector is undefined");
  return ratio(doubled_cost_numerator(bc), bc.keys);
}

double min_cost(std::uint64_t n, std::uint64_t m) {
  if (n == 0) return 0.0;
  if (m == 0) throw std::invalid_argument("bucket count must be positive");
  return ratio(doubled_min_cost_numerator(n, m), n);
}

CostReport regret(const BucketCounts& bc) {
  if (bc.keys == 0) return {};
  const wide actual = doubled_cost_numerator(bc);
  const wide best = doubled_min_cost_numerator(bc.keys, bc.buckets());
  return {ratio(actual, bc.keys), ratio(best, bc.keys), ratio(actual - best, bc.keys)};
}

CostReport regret(std::span<const HashValue> hashes, std::uint64_t m) {
  return regret(bucket_counts(hashes, m));
}

double expected_uniform_cost(std::uint64_t n, std::uint64_t m) {
  if (n == 0) return 0.0;
  return 1.0 + (static_cast<double>(n) - 1.0) / (2.0 * static_cast<double>(m));
}

double expected_uniform_regret(std::uint64_t m) { return 0.5 + 1.0 / static_cast<double>(m); }

double uniform_reference_regret(std::uint64_t n, std::uint64_t m) {
  if (n == 0) return 0.0;
  return expected_uniform_cost(n, m) - min_cost(n, m);
}

double expected_pointer_mix_cost(std::uint64_t n, std::uint64_t keys_per_page, std::uint64_t m,
                                 unsigned page_bits, unsigned shift) {
  if (keys_per_page == 0 || n % keys_per_page != 0)
    throw std::invalid_argument("keys per page must be positive and divide the key count");
  if (shift > page_bits) throw std::invalid_argument("shift exceeds page bits");
  const double md = static_cast<double>(m);
  const double spread = std::min(1.0, std::ldexp(1.0, static_cast<int>(page_bits - shift)) / md);
  return 1.0 + (static_cast<double>(n) - static_cast<double>(keys_per_page) * spread) / (2.0 * md);
}

double expected_empty_buckets(std::uint64_t n, std::uint64_t m) {
  const double md = static_cast<double>(m);
  return md * std::pow(1.0 - 1.0 / md, static_cast<double>(n));
}

ThresholdRule threshold_rule(std::uint64_t m) noexcept {
  if (m < 1024) return ThresholdRule::HalfN;
  if (m < 4096) return ThresholdRule::SevenSixteenthsN;
  return ThresholdRule::ExpBound;
}

bool too_many_collisions(std::uint64_t n, std::uint64_t m, std::uint64_t collisions) noexcept {
  switch (threshold_rule(m)) {
    case ThresholdRule::HalfN:
      return (n >> 1) < collisions;
    case ThresholdRule::SevenSixteenthsN:
      return (n >> 1) - (n >> 4) < collisions;
    case ThresholdRule::ExpBound: {
      // u = c + m - n unused buckets; signed because callers may pass n > m.
      const double unused = static_cast<double>(collisions) + static_cast<double>(m) -
                            static_cast<double>(n);
      const double md = static_cast<double>(m);
      return std::exp(-static_cast<double>(n) / md) / 0.9 < unused / md;
    }
  }
  return false;
}

unsigned max_chain_threshold(std::uint64_t m, ChainPolicy policy) {
  if (policy == ChainPolicy::Identity) return 14;
  require_buckets(m);
  static const std::array<unsigned, 64> table = [] {
    std::array<unsigned, 64> t{};
    for (unsigned e = 0; e < 64; ++e) t[e] = string_chain_threshold(std::uint64_t{1} << e);
    return t;
  }();
  return table[std::countr_zero(m)];
}

MonteCarloEstimate monte_carlo_uniform_cost(std::uint64_t n, std::uint64_t m, std::uint64_t trials,
                                            std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("at least one trial is required");
  if (m == 0) throw std::invalid_argument("bucket count must be positive");
  SplitMix64 rng(seed);
  BucketCounts bc;
  bc.keys = n;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    bc.counts.assign(m, 0);
    for (std::uint64_t i = 0; i < n; ++i) ++bc.counts[rng.below(m)];
    const double c = n == 0 ? 0.0 : ratio(doubled_cost_numerator(bc), n);
    sum += c;
    sum_sq += c * c;
  }
  const double t = static_cast<double>(trials);
  const double mean = sum / t;
  double se = 0.0;
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - t * mean * mean) / (t - 1.0));
    se = std::sqrt(var / t);
  }
  return {mean, se};
}

}  // namespace adapthash
