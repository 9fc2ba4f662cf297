#pragma once

// The hash family: word hashes ordered from cheapest to safest, truncated
// FNV-1A hashing for strings and sequences, and common-low-bit detection.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adapthash {

/// Word-sized hash. Bucket index is always the low bits (value mod m).
/// For strings and sequences the top bit is the truncation flag.
using HashValue = std::uint64_t;

inline constexpr HashValue kTruncationFlag = HashValue{1} << 63;
inline constexpr std::uint64_t kFnvPrime64 = 1099511628211ull;
inline constexpr unsigned kDefaultPageBits = 15;
inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

constexpr bool is_truncated(HashValue h) noexcept { return (h & kTruncationFlag) != 0; }
constexpr HashValue strip_flag(HashValue h) noexcept { return h & ~kTruncationFlag; }

constexpr std::size_t bucket_index(HashValue h, std::size_t buckets) noexcept {
  return static_cast<std::size_t>(strip_flag(h)) & (buckets - 1);
}

enum class HasherKind : std::uint8_t {
  Constant,
  Arithmetic,
  PointerShift,
  PointerMix,
  Mid,
  Murmur,
  TruncString,
  TruncSequence,
};

std::string_view to_string(HasherKind kind) noexcept;

struct HasherConfig {
  HasherKind kind = HasherKind::Constant;
  unsigned shift = 0;
  unsigned page_bits = kDefaultPageBits;
  std::size_t limit = kNoLimit;

  friend bool operator==(const HasherConfig&, const HasherConfig&) = default;
};

// ---------------------------------------------------------------------------
// Word hashes

constexpr HashValue fnv1a_step(HashValue h, std::uint8_t byte) noexcept {
  return (h ^ byte) * kFnvPrime64;
}

/// Standard Murmur3 fmix64. A bijection on 64-bit words with fmix64(0) == 0.
constexpr HashValue murmur_mix(std::uint64_t k) noexcept {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdull;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ull;
  k ^= k >> 33;
  return k;
}

/// Middle rung between Pointer-Shift and Murmur: a single xorshift. Folds
/// bits 13 and up into the low bits, so keys that agree on bits 0..25 share
/// a bucket for every m up to 2^13 no matter what their high bits hold.
constexpr HashValue mid_hash(std::uint64_t k) noexcept { return k ^ (k >> 13); }

constexpr HashValue arithmetic_hash(std::uint64_t k, unsigned shift) noexcept {
  return k >> shift;
}

/// (k >> s') + (k >> page_bits). When s equals page_bits the first term
/// would double the page term, so s' becomes 63 without a branch.
constexpr HashValue pointer_shift_hash(std::uint64_t k, unsigned shift, unsigned page_bits) noexcept {
  const unsigned eff = shift + static_cast<unsigned>(shift == page_bits) * (63u - shift);
  return (k >> eff) + (k >> page_bits);
}

constexpr HashValue pointer_mix_hash(std::uint64_t k, unsigned shift, unsigned page_bits) noexcept {
  return (k >> shift) ^ murmur_mix(k >> page_bits);
}

/// Dispatches a word hash. String kinds are invalid here and hash to 0.
constexpr HashValue hash_word(const HasherConfig& cfg, std::uint64_t k) noexcept {
  switch (cfg.kind) {
    case HasherKind::Constant:
      return 0;
    case HasherKind::Arithmetic:
      return arithmetic_hash(k, cfg.shift);
    case HasherKind::PointerShift:
      return pointer_shift_hash(k, cfg.shift, cfg.page_bits);
    case HasherKind::PointerMix:
      return pointer_mix_hash(k, cfg.shift, cfg.page_bits);
    case HasherKind::Mid:
      return mid_hash(k);
    case HasherKind::Murmur:
      return murmur_mix(k);
    case HasherKind::TruncString:
    case HasherKind::TruncSequence:
      break;
  }
  return 0;
}

/// Number of low bits shared by every key in the sample: the trailing zeros
/// of OR_i (k_1 ^ k_i). An all-identical sample clamps to 63.
/// Throws std::invalid_argument for fewer than two keys.
unsigned count_common_low_bits(std::span<const std::uint64_t> keys);

// ---------------------------------------------------------------------------
// Strings and sequences

/// FNV-1A over at most `limit` bytes, seeded with the length and taken
/// alternately from the front and the back moving inwards. The top bit is
/// cleared from the mixed value and then set iff limit < s.size().
HashValue hash_string_limited(std::string_view s, std::size_t limit) noexcept;

/// Mixes one word into an FNV-1A state, little-endian byte order.
constexpr HashValue fnv1a_word(HashValue h, std::uint64_t word) noexcept {
  for (int i = 0; i < 8; ++i) h = fnv1a_step(h, static_cast<std::uint8_t>(word >> (8 * i)));
  return h;
}

/// Prefix-only variant for sequences whose elements were already reduced to
/// words. Seeded with the length; the flag is set iff limit < items.size().
HashValue hash_sequence_limited(std::span<const HashValue> items, std::size_t limit) noexcept;

/// List-like key: elements are words, byte strings or nested sequences.
struct SeqItem;
using Sequence = std::vector<SeqItem>;

struct SeqItem {
  std::variant<std::uint64_t, std::string, Sequence> value;

  SeqItem() = default;
  SeqItem(std::uint64_t w) : value(w) {}  // NOLINT(google-explicit-constructor)
  SeqItem(std::string s) : value(std::move(s)) {}  // NOLINT(google-explicit-constructor)
  SeqItem(const char* s) : value(std::string(s)) {}  // NOLINT(google-explicit-constructor)
  SeqItem(Sequence s) : value(std::move(s)) {}  // NOLINT(google-explicit-constructor)

  friend bool operator==(const SeqItem&, const SeqItem&) = default;
};

/// Reduces an element to a word: integers by identity, strings and nested
/// sequences by their own truncated hash at the same limit.
HashValue reduce_item(const SeqItem& item, std::size_t limit) noexcept;

/// hash_sequence_limited over the reduced prefix, without materializing it.
HashValue hash_sequence(const Sequence& seq, std::size_t limit) noexcept;

}  // namespace adapthash
