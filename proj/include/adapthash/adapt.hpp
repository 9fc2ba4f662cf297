#pragma once

// Hasher adaptation policies. Both policies are table-agnostic: they decide
// on a HasherConfig and call back into the owner to rehash under it.
//
// Identity keys follow the ladder Constant -> Pointer-Shift -> Mid -> Murmur
// (escalation only, Murmur absorbing). String and sequence keys start with a
// truncation limit that only ever doubles.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "adapthash/hashers.hpp"
#include "adapthash/metrics.hpp"

namespace adapthash {

enum class KeyKind { Identity, String, Sequence };

/// What a rehash observed. Collisions are counted only when requested.
struct RehashOutcome {
  std::size_t collisions = 0;
  bool any_truncated = false;
};

enum class IdentityMode {
  Adaptive,         // Co+PS>Pr>Mu
  MurmurOnly,       // Murmur from the first key
  MidOnly,          // Mid from the first key
  ConstantThenMid,  // Co+Pr: linear phase, then Mid with no fallback
};

struct IdentityPolicy {
  static constexpr std::size_t kConstantPhaseMax = 32;
  static constexpr std::size_t kConstantPhaseInitial = 8;
  static constexpr std::size_t kFirstChainedBuckets = 64;
  static constexpr std::size_t kCollisionCountFloor = 2048;
  static constexpr std::size_t kSampleSize = 16;

  IdentityMode mode = IdentityMode::Adaptive;
  HasherConfig hasher{HasherKind::Constant};
  std::optional<std::size_t> last_collisions;
  std::size_t escalations = 0;
  std::size_t ignored_long_chains = 0;

  bool starts_constant() const noexcept {
    return mode == IdentityMode::Adaptive || mode == IdentityMode::ConstantThenMid;
  }
  bool adaptive() const noexcept { return mode == IdentityMode::Adaptive; }
};

IdentityPolicy make_identity_policy(IdentityMode mode = IdentityMode::Adaptive,
                                    unsigned page_bits = kDefaultPageBits);

/// Ladder rank used to check that escalation is monotone.
constexpr int ladder_rank(HasherKind kind) noexcept {
  switch (kind) {
    case HasherKind::Constant:
      return 0;
    case HasherKind::PointerShift:
      return 1;
    case HasherKind::Mid:
      return 2;
    case HasherKind::Murmur:
      return 3;
    default:
      return -1;
  }
}

/// Rehash-time adaptation, called after the bucket count has doubled to m.
/// `sample` supplies the keys for shift detection (only read when leaving
/// the constant phase). `rehash(config, count)` must rebuild the table
/// under `config` and return what it saw.
template <class Rehash>
void on_full_rehash_identity(IdentityPolicy& p, std::size_t n, std::size_t m,
                             std::span<const std::uint64_t> sample, Rehash&& rehash) {
  auto counted = [&](bool count) {
    const RehashOutcome out = rehash(p.hasher, count);
    if (count) p.last_collisions = out.collisions;
    return out.collisions;
  };

  if (p.mode == IdentityMode::MurmurOnly || p.mode == IdentityMode::MidOnly) {
    counted(false);
    return;
  }
  if (p.hasher.kind == HasherKind::Constant) {
    if (m == IdentityPolicy::kFirstChainedBuckets) {
      if (p.mode == IdentityMode::ConstantThenMid) {
        p.hasher.kind = HasherKind::Mid;
        counted(false);
        return;
      }
      const std::size_t take = std::min(sample.size(), IdentityPolicy::kSampleSize);
      p.hasher.shift = take >= 2 ? count_common_low_bits(sample.first(take)) : 0;
      p.hasher.kind = HasherKind::PointerShift;
    } else {
      counted(false);
      return;
    }
  }
  if (!p.adaptive()) {
    counted(false);
    return;
  }
  if (p.hasher.kind == HasherKind::PointerShift) {
    if (too_many_collisions(n, m, counted(true))) {
      p.hasher.kind = HasherKind::Mid;
      ++p.escalations;
    }
  }
  if (p.hasher.kind == HasherKind::Mid) {
    if (m < IdentityPolicy::kCollisionCountFloor) {
      counted(false);
    } else if (too_many_collisions(n, m, counted(true))) {
      p.hasher.kind = HasherKind::Murmur;
      ++p.escalations;
    }
  }
  if (p.hasher.kind == HasherKind::Murmur) counted(false);
}

/// Put-time fallback after a chain of at least 14 keys: moves one rung up
/// the ladder and returns the new config. Murmur stays Murmur. The caller
/// then rehashes through on_full_rehash_identity at the current size.
HasherConfig on_long_chain_identity(IdentityPolicy& p) noexcept;

struct StringPolicy {
  HasherConfig hasher{HasherKind::TruncString, 0, kDefaultPageBits, 16};
  std::size_t initial_limit = 16;
  bool adaptive = true;
  std::size_t doublings = 0;

  std::size_t limit() const noexcept { return hasher.limit; }
};

/// Starting truncation limit: 16 bytes for strings, 4 elements for sequences.
std::size_t initial_limit(KeyKind kind) noexcept;

/// Adaptive (truncating) or full-key policy for string/sequence tables.
StringPolicy make_string_policy(KeyKind kind, bool adaptive = true);

/// Put-time check for a key whose hash was truncated and landed on a chain
/// of `chain_length` keys. Below the per-m threshold nothing happens.
/// Otherwise the limit doubles and the table rehashes, repeating while the
/// collision count is still too many and truncated hashes remain. Returns
/// true when the limit changed.
template <class Rehash>
bool on_truncated_long_chain_string(StringPolicy& p, std::size_t chain_length, std::size_t n,
                                    std::size_t m, Rehash&& rehash) {
  if (!p.adaptive || chain_length < max_chain_threshold(m, ChainPolicy::String)) return false;
  RehashOutcome out;
  do {
    if (p.hasher.limit > kNoLimit / 2) {
      p.hasher.limit = kNoLimit;
    } else {
      p.hasher.limit *= 2;
    }
    ++p.doublings;
    out = rehash(p.hasher, true);
  } while (out.any_truncated && too_many_collisions(n, m, out.collisions));
  return true;
}

}  // namespace adapthash
