#include "adapthash/keygen.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "adapthash/rng.hpp"

namespace adapthash {
namespace {

__extension__ typedef unsigned __int128 u128;

constexpr u128 kWordSpace = u128{1} << 63;

struct Offsets {
  std::uint64_t keys;
  std::uint64_t misses;
};

// Draws a key offset and a MISS offset past the key range, both leaving
// `span` values of headroom below 2^63. Redraws on overflow.
Offsets pick_offsets(SplitMix64& rng, u128 span) {
  if (span > (u128{1} << 60)) throw std::invalid_argument("progression too long for 63-bit keys");
  for (;;) {
    const std::uint64_t a0 = rng.next() >> 2;
    const std::uint64_t gap = 1 + rng.below(std::uint64_t{1} << 32);
    const u128 end = u128{a0} + span;
    if (end + gap + span <= kWordSpace) {
      return {a0, static_cast<std::uint64_t>(end + gap)};
    }
  }
}

std::string random_lowercase(SplitMix64& rng, std::size_t len) {
  std::string s(len, 'a');
  for (char& c : s) c = static_cast<char>('a' + rng.below(26));
  return s;
}

std::string random_string(SplitMix64& rng) { return random_lowercase(rng, rng.between(4, 44)); }

std::vector<std::string> fresh_random_strings(SplitMix64& rng, std::size_t n,
                                              std::unordered_set<std::string>& taken) {
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    std::string s = random_string(rng);
    if (taken.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

void require_nonempty(std::size_t n) {
  if (n == 0) throw std::invalid_argument("key count must be at least 1");
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("bad " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("bad " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

bool is_word_workload(WorkloadKind kind) noexcept {
  switch (kind) {
    case WorkloadKind::Prog:
    case WorkloadKind::Rnd:
    case WorkloadKind::FloatProg:
    case WorkloadKind::Paged:
    case WorkloadKind::Adversarial:
      return true;
    default:
      return false;
  }
}

bool is_sequence_workload(WorkloadKind kind) noexcept { return kind == WorkloadKind::Sequences; }

WordKeySet gen_prog(std::size_t n, std::uint64_t d, std::uint64_t seed) {
  require_nonempty(n);
  if (d == 0) throw std::invalid_argument("progression difference must be at least 1");
  SplitMix64 rng(seed);
  const Offsets off = pick_offsets(rng, u128{n} * d);
  WordKeySet ks;
  ks.keys.resize(n);
  ks.miss_keys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ks.keys[i] = off.keys + i * d;
    ks.miss_keys[i] = off.misses + i * d;
  }
  return ks;
}

WordKeySet gen_rnd_prog(std::size_t n, std::uint64_t max_skip, std::uint64_t seed) {
  require_nonempty(n);
  if (max_skip == 0) throw std::invalid_argument("max_skip must be at least 1");
  SplitMix64 rng(seed);
  const Offsets off = pick_offsets(rng, u128{n} * max_skip);
  SplitMix64 gaps(derive_seed(seed, 0x524e44));
  WordKeySet ks;
  ks.keys.resize(n);
  ks.miss_keys.resize(n);
  std::uint64_t k = off.keys;
  for (std::size_t i = 0; i < n; ++i) {
    ks.keys[i] = k;
    k += 1 + gaps.below(max_skip);
    ks.miss_keys[i] = off.misses + i;
  }
  return ks;
}

std::vector<std::uint64_t> float_bit_progression(std::uint64_t a0, std::size_t n) {
  constexpr std::uint64_t kExact = std::uint64_t{1} << 24;
  if (a0 == 0 || a0 > kExact || n > kExact - a0)
    throw std::invalid_argument("float progression leaves the exactly representable range");
  std::vector<std::uint64_t> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::bit_cast<std::uint32_t>(static_cast<float>(a0 + i));
  return out;
}

WordKeySet gen_float_bits(std::size_t n, std::uint64_t seed) {
  require_nonempty(n);
  SplitMix64 rng(seed);
  // Three constant low mantissa bits below 2^21, two above, so both the
  // shift estimate and Mid go stale within the first 4096 keys.
  const std::uint64_t back = rng.between(std::uint64_t{1} << 10, std::uint64_t{1} << 12);
  WordKeySet ks;
  ks.keys = float_bit_progression((std::uint64_t{1} << 21) - back, n);
  ks.miss_keys.resize(n);
  for (std::size_t i = 0; i < n; ++i) ks.miss_keys[i] = ks.keys[i] | 0x80000000u;
  return ks;
}

WordKeySet gen_paged(std::size_t n, unsigned page_bits, std::uint64_t object_stride, double occupancy,
                     std::uint64_t seed, std::size_t pages) {
  require_nonempty(n);
  if (object_stride == 0 || object_stride % 16 != 0)
    throw std::invalid_argument("object stride must be a positive multiple of 16");
  if (page_bits < 4 || page_bits > 40) throw std::invalid_argument("page_bits out of range");
  if (!(occupancy > 0.0 && occupancy <= 1.0)) throw std::invalid_argument("occupancy must be in (0, 1]");
  const std::uint64_t slots = (std::uint64_t{1} << page_bits) / object_stride;
  if (slots == 0) throw std::invalid_argument("object stride exceeds the page size");
  const std::uint64_t per_page =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(occupancy * static_cast<double>(slots) + 1e-9));

  std::vector<std::size_t> counts;
  if (pages == 0) {
    pages = static_cast<std::size_t>((n + per_page - 1) / per_page);
    counts.assign(pages, per_page);
    counts.back() = n - (pages - 1) * per_page;
  } else {
    if (u128{pages} * per_page < n) throw std::invalid_argument("keys do not fit on the requested pages");
    counts.assign(pages, n / pages);
    for (std::size_t i = 0; i < n % pages; ++i) ++counts[i];
  }

  SplitMix64 rng(seed);
  const unsigned page_number_bits = std::min(30u, 62u - page_bits);
  std::unordered_set<std::uint64_t> used_pages;
  auto fresh_page = [&] {
    for (;;) {
      const std::uint64_t page = (std::uint64_t{1} << 16) + (rng.next() >> (64 - page_number_bits));
      if (used_pages.insert(page).second) return page << page_bits;
    }
  };
  std::vector<std::uint64_t> slot_ids(slots);
  auto fill = [&](std::vector<std::uint64_t>& out) {
    out.reserve(n);
    for (const std::size_t count : counts) {
      const std::uint64_t base = fresh_page();
      for (std::uint64_t j = 0; j < slots; ++j) slot_ids[j] = j;
      for (std::size_t j = 0; j < count; ++j) {
        std::swap(slot_ids[j], slot_ids[j + rng.below(slots - j)]);
        out.push_back(base + slot_ids[j] * object_stride);
      }
    }
    shuffle(std::span<std::uint64_t>(out), rng);
  };
  WordKeySet ks;
  fill(ks.keys);
  fill(ks.miss_keys);
  return ks;
}

WordKeySet gen_mid_adversarial(std::size_t n, std::uint64_t seed) {
  require_nonempty(n);
  SplitMix64 rng(seed);
  std::unordered_set<std::uint64_t> highs;
  auto draw = [&](std::vector<std::uint64_t>& out) {
    out.reserve(n);
    while (out.size() < n) {
      const std::uint64_t high = rng.next() >> 27;
      if (!highs.insert(high).second) continue;
      out.push_back((high << 27) | (out.size() % 8));
    }
  };
  WordKeySet ks;
  draw(ks.keys);
  draw(ks.miss_keys);
  return ks;
}

StringKeySet gen_strings_file(const std::string& path, std::size_t n, std::uint64_t seed) {
  require_nonempty(n);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open string corpus '" + path + "'");
  std::vector<std::string> distinct;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (seen.insert(line).second) distinct.push_back(line);
  }
  if (distinct.size() < n)
    throw std::invalid_argument("corpus '" + path + "' has " + std::to_string(distinct.size()) +
                                " distinct strings, need " + std::to_string(n));
  SplitMix64 rng(seed);
  StringKeySet ks;
  ks.keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(distinct[i], distinct[i + rng.below(distinct.size() - i)]);
    ks.keys.push_back(distinct[i]);
  }
  ks.miss_keys = fresh_random_strings(rng, n, seen);
  return ks;
}

StringKeySet gen_strings_random(std::size_t n, std::uint64_t seed) {
  require_nonempty(n);
  SplitMix64 rng(seed);
  std::unordered_set<std::string> taken;
  StringKeySet ks;
  ks.keys = fresh_random_strings(rng, n, taken);
  ks.miss_keys = fresh_random_strings(rng, n, taken);
  return ks;
}

StringKeySet gen_shared_affix(std::size_t n, std::uint64_t seed, std::size_t prefix, std::size_t middle,
                              std::size_t suffix) {
  require_nonempty(n);
  if (middle == 0) throw std::invalid_argument("middle section must be non-empty");
  double room = 1.0;
  for (std::size_t i = 0; i < middle && room < 4.0 * static_cast<double>(n); ++i) room *= 26.0;
  if (room < 4.0 * static_cast<double>(n)) throw std::invalid_argument("middle section too short for n keys");
  SplitMix64 rng(seed);
  const std::string head = random_lowercase(rng, prefix);
  const std::string tail = random_lowercase(rng, suffix);
  std::unordered_set<std::string> taken;
  auto draw = [&](std::vector<std::string>& out) {
    out.reserve(n);
    while (out.size() < n) {
      std::string mid = random_lowercase(rng, middle);
      if (taken.insert(mid).second) out.push_back(head + mid + tail);
    }
  };
  StringKeySet ks;
  draw(ks.keys);
  draw(ks.miss_keys);
  return ks;
}

SequenceKeySet gen_sequences(std::size_t n, std::uint64_t seed) {
  require_nonempty(n);
  SplitMix64 rng(seed);
  const Sequence head{rng.next(), random_string(rng), rng.next(), Sequence{rng.next(), rng.next()}};
  std::unordered_set<std::uint64_t> taken;
  auto draw = [&](std::vector<Sequence>& out) {
    out.reserve(n);
    while (out.size() < n) {
      const std::uint64_t fifth = rng.next();
      if (!taken.insert(fifth).second) continue;
      Sequence s = head;
      s.emplace_back(fifth);
      s.emplace_back(rng.next());
      out.push_back(std::move(s));
    }
  };
  SequenceKeySet ks;
  draw(ks.keys);
  draw(ks.miss_keys);
  return ks;
}

WorkloadSpec parse_workload(std::string_view text) {
  const std::vector<std::string_view> parts = split(text, ':');
  const std::string_view head = parts[0];
  WorkloadSpec spec;
  auto expect_at_most = [&](std::size_t count) {
    if (parts.size() > count) throw std::invalid_argument("too many fields in workload '" + std::string(text) + "'");
  };
  if (head == "prog") {
    expect_at_most(2);
    spec.kind = WorkloadKind::Prog;
    spec.param = parts.size() > 1 ? parse_uint(parts[1], "progression difference") : 1;
    if (spec.param == 0) throw std::invalid_argument("progression difference must be at least 1");
  } else if (head == "rnd") {
    expect_at_most(2);
    spec.kind = WorkloadKind::Rnd;
    spec.param = parts.size() > 1 ? parse_uint(parts[1], "max_skip") : 6;
    if (spec.param == 0) throw std::invalid_argument("max_skip must be at least 1");
  } else if (head == "float") {
    expect_at_most(1);
    spec.kind = WorkloadKind::FloatProg;
  } else if (head == "paged") {
    expect_at_most(4);
    spec.kind = WorkloadKind::Paged;
    if (parts.size() > 1) spec.object_stride = parse_uint(parts[1], "object stride");
    if (parts.size() > 2) spec.occupancy = parse_double(parts[2], "occupancy");
    if (parts.size() > 3) spec.page_bits = static_cast<unsigned>(parse_uint(parts[3], "page bits"));
  } else if (head == "adversarial") {
    expect_at_most(1);
    spec.kind = WorkloadKind::Adversarial;
  } else if (head == "sequences") {
    expect_at_most(1);
    spec.kind = WorkloadKind::Sequences;
  } else if (head == "strings") {
    if (parts.size() < 2 || text.size() <= 8) throw std::invalid_argument("strings workload needs a source");
    const std::string_view source = text.substr(8);
    if (source == "random") {
      spec.kind = WorkloadKind::StringsRandom;
    } else if (source == "shared-affix") {
      spec.kind = WorkloadKind::SharedAffix;
    } else {
      spec.kind = WorkloadKind::StringsFile;
      spec.path = std::string(source);
    }
  } else {
    throw std::invalid_argument("unknown workload '" + std::string(text) + "'");
  }
  return spec;
}

std::string describe(const WorkloadSpec& spec) {
  switch (spec.kind) {
    case WorkloadKind::Prog:
      return "prog:" + std::to_string(spec.param);
    case WorkloadKind::Rnd:
      return "rnd:" + std::to_string(spec.param);
    case WorkloadKind::FloatProg:
      return "float";
    case WorkloadKind::Paged: {
      char occ[32];
      const auto res = std::to_chars(occ, occ + sizeof occ, spec.occupancy);
      return "paged:" + std::to_string(spec.object_stride) + ":" + std::string(occ, res.ptr) + ":" +
             std::to_string(spec.page_bits);
    }
    case WorkloadKind::Adversarial:
      return "adversarial";
    case WorkloadKind::StringsFile:
      return "strings:" + spec.path;
    case WorkloadKind::StringsRandom:
      return "strings:random";
    case WorkloadKind::SharedAffix:
      return "strings:shared-affix";
    case WorkloadKind::Sequences:
      return "sequences";
  }
  return "unknown";
}

WordKeySet generate_words(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed) {
  switch (spec.kind) {
    case WorkloadKind::Prog:
      return gen_prog(n, spec.param, seed);
    case WorkloadKind::Rnd:
      return gen_rnd_prog(n, spec.param, seed);
    case WorkloadKind::FloatProg:
      return gen_float_bits(n, seed);
    case WorkloadKind::Paged:
      return gen_paged(n, spec.page_bits, spec.object_stride, spec.occupancy, seed, spec.pages);
    case WorkloadKind::Adversarial:
      return gen_mid_adversarial(n, seed);
    default:
      throw std::invalid_argument("workload '" + describe(spec) + "' does not produce word keys");
  }
}

StringKeySet generate_strings(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed) {
  switch (spec.kind) {
    case WorkloadKind::StringsFile:
      return gen_strings_file(spec.path, n, seed);
    case WorkloadKind::StringsRandom:
      return gen_strings_random(n, seed);
    case WorkloadKind::SharedAffix:
      return gen_shared_affix(n, seed);
    default:
      throw std::invalid_argument("workload '" + describe(spec) + "' does not produce string keys");
  }
}

SequenceKeySet generate_sequences(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.kind != WorkloadKind::Sequences)
    throw std::invalid_argument("workload '" + describe(spec) + "' does not produce sequence keys");
  return gen_sequences(n, seed);
}

}  // namespace adapthash
