#pragma once

// Deterministic key workloads. Every generator is a pure function of its
// arguments and draws only from SplitMix64, so a (spec, seed) pair names a
// byte-identical corpus on every platform.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adapthash/hashers.hpp"

namespace adapthash {

template <class T>
struct KeySet {
  std::vector<T> keys;       // PUT order
  std::vector<T> miss_keys;  // same length, disjoint from keys
};

using WordKeySet = KeySet<std::uint64_t>;
using StringKeySet = KeySet<std::string>;
using SequenceKeySet = KeySet<Sequence>;

enum class WorkloadKind {
  Prog,           // a0 + i*d
  Rnd,            // gaps 1 + U[0, max_skip-1]
  FloatProg,      // IEEE-754 single bit patterns of consecutive integers
  Paged,          // simulated page allocator
  Adversarial,    // defeats Pointer-Shift and Mid at once
  StringsFile,
  StringsRandom,
  SharedAffix,    // strings differing only in the middle
  Sequences,      // list keys sharing a 4-element prefix
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Prog;
  std::uint64_t param = 1;  // d for Prog, max_skip for Rnd
  unsigned page_bits = kDefaultPageBits;
  std::uint64_t object_stride = 16;
  double occupancy = 1.0;
  std::size_t pages = 0;  // Paged: 0 means as few pages as fit n
  std::string path;       // StringsFile
};

bool is_word_workload(WorkloadKind kind) noexcept;
bool is_sequence_workload(WorkloadKind kind) noexcept;

/// Parses prog:<d>, rnd:<max_skip>, float, paged[:stride[:occupancy[:page_bits]]],
/// adversarial, strings:<file>, strings:random, strings:shared-affix,
/// sequences. Throws std::invalid_argument with the offending text.
WorkloadSpec parse_workload(std::string_view text);
std::string describe(const WorkloadSpec& spec);

WordKeySet gen_prog(std::size_t n, std::uint64_t d, std::uint64_t seed);
WordKeySet gen_rnd_prog(std::size_t n, std::uint64_t max_skip, std::uint64_t seed);

/// Bit patterns of (float)(a0 + i). a0 sits 2^10 to 2^12 below 2^21, so the
/// run starts with constant low mantissa bits and then crosses into the
/// next binade. MISS keys are the negated values (sign bit set).
WordKeySet gen_float_bits(std::size_t n, std::uint64_t seed);
/// Same pattern from an explicit start. Throws if a0 + n exceeds 2^24.
std::vector<std::uint64_t> float_bit_progression(std::uint64_t a0, std::size_t n);

/// Addresses base + j*object_stride on random distinct pages of 2^page_bits
/// bytes, each page using an occupancy fraction of its slots, shuffled.
/// MISS keys come from other pages. `pages` == 0 picks the fewest pages
/// that hold n keys; otherwise n must fit and keys are spread evenly.
WordKeySet gen_paged(std::size_t n, unsigned page_bits, std::uint64_t object_stride, double occupancy,
                     std::uint64_t seed, std::size_t pages = 0);

/// (random_high << 27) | j for j cycling through 0..7. The low 27 bits fix
/// the bucket under both Pointer-Shift (s = 0) and Mid for m <= 4096.
WordKeySet gen_mid_adversarial(std::size_t n, std::uint64_t seed);

/// n distinct non-blank lines sampled without replacement. MISS keys are
/// random strings absent from the file.
StringKeySet gen_strings_file(const std::string& path, std::size_t n, std::uint64_t seed);
/// Lengths U[4, 44], lowercase ASCII.
StringKeySet gen_strings_random(std::size_t n, std::uint64_t seed);
StringKeySet gen_shared_affix(std::size_t n, std::uint64_t seed, std::size_t prefix = 32,
                              std::size_t middle = 8, std::size_t suffix = 32);

/// Six-element lists sharing their first four elements: word, string, word,
/// nested list. Elements 5 and 6 are distinct words.
SequenceKeySet gen_sequences(std::size_t n, std::uint64_t seed);

WordKeySet generate_words(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed);
StringKeySet generate_strings(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed);
SequenceKeySet generate_sequences(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace adapthash
