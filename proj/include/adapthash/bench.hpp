#pragma once

// Microbenchmark harness: resize-segment planning, PUT/GET/MISS/DEL timing
// with small-size batching and a repetition floor, regret-only sweeps, the
// empty-bucket bound table and the TSV format they share.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adapthash/adapt.hpp"
#include "adapthash/hashers.hpp"
#include "adapthash/keygen.hpp"

namespace adapthash {

struct BenchRecord {
  std::uint64_t nkeys = 0;
  double putns = 0;
  double getns = 0;
  double missns = 0;
  double delns = 0;
  double regret = 0;
  double rndregret = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// Key-count range with no internal resize.
struct Segment {
  std::size_t min_keys;
  std::size_t max_keys;

  friend bool operator==(const Segment&, const Segment&) = default;
};
using SegmentPlan = std::vector<Segment>;

/// Tiles [1, max_n] by inserting into a scratch adaptive identity table and
/// cutting wherever its capacity changes.
SegmentPlan plan_segments(std::size_t max_n);
/// Both endpoints of every segment, in order (duplicates kept).
std::vector<std::size_t> measurement_points(const SegmentPlan& plan);

enum class HasherMode { Adaptive, MurmurOnly, MidOnly, ConstantThenMid };

HasherMode parse_mode(std::string_view text);
std::string_view to_string(HasherMode mode) noexcept;
IdentityMode identity_mode(HasherMode mode) noexcept;

enum class Phase { Put, Get, Miss, Del };
std::string_view to_string(Phase phase) noexcept;

struct PhaseEvent {
  std::size_t nkeys;
  std::size_t rep;  // 0-based; warm-up passes are not reported
  Phase phase;
  std::size_t replicas;
  std::uint64_t ops;
};

inline constexpr std::uint64_t kDefaultBudgetOps = 5'000'000;

struct BenchOptions {
  std::uint64_t budget_ops = kDefaultBudgetOps;
  std::size_t min_reps = 3;
  std::size_t min_batch_keys = 100;
  bool warmup = true;
  std::function<std::uint64_t()> clock;  // nanoseconds; steady_clock when empty
  std::function<void(const PhaseEvent&)> observer;
};

std::vector<BenchRecord> run_bench(const WorkloadSpec& spec, HasherMode mode, std::size_t max_n,
                                   std::uint64_t seed, const BenchOptions& options = {});
/// One measurement point.
BenchRecord measure_point(const WorkloadSpec& spec, HasherMode mode, std::size_t n, std::uint64_t seed,
                          const BenchOptions& options = {});

struct RegretPoint {
  std::uint64_t nkeys = 0;
  double regret = 0;
  double rndregret = 0;
  HasherKind kind = HasherKind::Constant;
  unsigned shift = 0;
  std::size_t limit = kNoLimit;
  std::size_t buckets = 0;
};

/// Populates a fresh table per size and reports its regret next to the
/// uniform reference for the same bucket count. No timing.
std::vector<RegretPoint> run_regret(const WorkloadSpec& spec, HasherMode mode,
                                    const std::vector<std::size_t>& sizes, std::uint64_t seed);

struct BoundsRow {
  double f = 0;
  std::vector<double> empty_exact;  // (1 - 1/m)^(m f), one per m
  double exp_neg_f = 0;
  double exp_over_09 = 0;
  double seven_sixteenths = 0;  // 1 - 9f/16
  double half = 0;              // 1 - f/2
};

/// Rows for f = i / f_steps, i = 0..f_steps.
std::vector<BoundsRow> bounds_table(const std::vector<std::uint64_t>& m_list, std::size_t f_steps);

struct TsvOptions {
  std::optional<std::uint64_t> budget_ops;  // emitted as a comment when not the default floor
  std::vector<std::string> comments;
};

inline constexpr std::string_view kBenchHeader = "nkeys\tputns\tgetns\tmissns\tdelns\tregret\trndregret";

/// Shortest round-trip decimal form.
std::string format_number(double x);

void emit_tsv(const std::vector<BenchRecord>& records, std::ostream& out, const TsvOptions& options = {});
/// Parses emit_tsv output. Lines starting with '#' are skipped; a missing or
/// different header, a short row or an unparsable cell throws.
std::vector<BenchRecord> parse_tsv(std::istream& in);

void emit_regret_tsv(const std::vector<RegretPoint>& points, std::ostream& out);
void emit_bounds_tsv(const std::vector<BoundsRow>& rows, const std::vector<std::uint64_t>& m_list,
                     std::ostream& out);

/// Smallest observed nonzero step of the default clock.
std::uint64_t clock_resolution_ns();

}  // namespace adapthash
