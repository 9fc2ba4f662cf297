#include "adapthash/hashers.hpp"

#include <algorithm>
#include <stdexcept>

namespace adapthash {
namespace {

constexpr HashValue finish(HashValue mixed, bool truncated) noexcept {
  return strip_flag(mixed) | (truncated ? kTruncationFlag : 0);
}

}  // namespace

std::string_view to_string(HasherKind kind) noexcept {
  switch (kind) {
    case HasherKind::Constant:
      return "constant";
    case HasherKind::Arithmetic:
      return "arithmetic";
    case HasherKind::PointerShift:
      return "pointer-shift";
    case HasherKind::PointerMix:
      return "pointer-mix";
    case HasherKind::Mid:
      return "mid";
    case HasherKind::Murmur:
      return "murmur";
    case HasherKind::TruncString:
      return "string";
    case HasherKind::TruncSequence:
      return "sequence";
  }
  return "unknown";
}

unsigned count_common_low_bits(std::span<const std::uint64_t> keys) {
  if (keys.size() < 2) throw std::invalid_argument("shift detection needs at least two keys");
  std::uint64_t mask = 0;
  const std::uint64_t first = keys.front();
  for (const std::uint64_t k : keys.subspan(1)) mask |= first ^ k;
  if (mask == 0) return 63;
  return static_cast<unsigned>(std::countr_zero(mask));
}

HashValue hash_string_limited(std::string_view s, std::size_t limit) noexcept {
  const std::size_t len = s.size();
  HashValue h = len;
  const std::size_t n = std::min(limit, len);
  std::size_t a = 0;
  std::size_t b = len == 0 ? 0 : len - 1;
  while (a < (n >> 1)) {
    h = fnv1a_step(h, static_cast<std::uint8_t>(s[a]));
    h = fnv1a_step(h, static_cast<std::uint8_t>(s[b]));
    ++a;
    --b;
  }
  if (n % 2 == 1) h = fnv1a_step(h, static_cast<std::uint8_t>(s[a]));
  return finish(h, limit < len);
}

HashValue hash_sequence_limited(std::span<const HashValue> items, std::size_t limit) noexcept {
  HashValue h = items.size();
  const std::size_t n = std::min(limit, items.size());
  for (std::size_t i = 0; i < n; ++i) h = fnv1a_word(h, items[i]);
  return finish(h, limit < items.size());
}

HashValue reduce_item(const SeqItem& item, std::size_t limit) noexcept {
  struct Visitor {
    std::size_t limit;
    HashValue operator()(std::uint64_t w) const noexcept { return w; }
    HashValue operator()(const std::string& s) const noexcept { return hash_string_limited(s, limit); }
    HashValue operator()(const Sequence& q) const noexcept { return hash_sequence(q, limit); }
  };
  return std::visit(Visitor{limit}, item.value);
}

HashValue hash_sequence(const Sequence& seq, std::size_t limit) noexcept {
  HashValue h = seq.size();
  const std::size_t n = std::min(limit, seq.size());
  for (std::size_t i = 0; i < n; ++i) h = fnv1a_word(h, reduce_item(seq[i], limit));
  return finish(h, limit < seq.size());
}

}  // namespace adapthash
