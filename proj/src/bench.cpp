#include "adapthash/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <type_traits>

#include "adapthash/metrics.hpp"
#include "adapthash/rng.hpp"
#include "adapthash/table.hpp"

namespace adapthash {
namespace {

volatile std::uint64_t g_sink = 0;

std::uint64_t steady_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

template <class Key>
using BenchTable = AdaptiveTable<Key, std::uint64_t>;

template <class Key>
BenchTable<Key> make_table(HasherMode mode) {
  using T = BenchTable<Key>;
  if constexpr (T::kIdentity) {
    return T(make_identity_policy(identity_mode(mode)));
  } else {
    return T(make_string_policy(T::kind, mode == HasherMode::Adaptive));
  }
}

template <class Key>
KeySet<Key> generate(const WorkloadSpec& spec, std::size_t n, std::uint64_t seed) {
  if constexpr (std::is_same_v<Key, std::uint64_t>) {
    return generate_words(spec, n, seed);
  } else if constexpr (std::is_same_v<Key, std::string>) {
    return generate_strings(spec, n, seed);
  } else {
    return generate_sequences(spec, n, seed);
  }
}

// Replica 0 uses the caller's seed so a single-table run matches run_regret.
std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica) {
  return replica == 0 ? seed : derive_seed(seed, replica);
}

std::vector<std::uint32_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  SplitMix64 rng(seed);
  shuffle(std::span<std::uint32_t>(idx), rng);
  return idx;
}

template <class Key>
BenchRecord measure_impl(const WorkloadSpec& spec, HasherMode mode, std::size_t n, std::uint64_t seed,
                         const BenchOptions& opt) {
  if (n == 0) throw std::invalid_argument("measurement needs at least one key");
  const std::size_t batch = std::max<std::size_t>(opt.min_batch_keys, 1);
  const std::size_t replicas = n >= batch ? 1 : (batch + n - 1) / n;
  std::vector<KeySet<Key>> sets;
  std::vector<std::vector<std::uint32_t>> get_order;
  std::vector<std::vector<std::uint32_t>> del_order;
  for (std::size_t r = 0; r < replicas; ++r) {
    const std::uint64_t s = replica_seed(seed, r);
    sets.push_back(generate<Key>(spec, n, s));
    get_order.push_back(shuffled_indices(n, derive_seed(s, 0x474554)));
    del_order.push_back(shuffled_indices(n, derive_seed(s, 0x44454c)));
  }
  const auto clock = opt.clock ? opt.clock : std::function<std::uint64_t()>(steady_ns);
  const std::uint64_t phase_ops = static_cast<std::uint64_t>(n) * replicas;

  double regret_sum = 0;
  double rnd_sum = 0;
  std::uint64_t put_ns = 0, get_ns = 0, miss_ns = 0, del_ns = 0;

  auto one_rep = [&](std::optional<std::size_t> rep) {
    auto report = [&](Phase phase) {
      if (rep && opt.observer) opt.observer(PhaseEvent{n, *rep, phase, replicas, phase_ops});
    };
    std::vector<BenchTable<Key>> tables;
    tables.reserve(replicas);
    for (std::size_t r = 0; r < replicas; ++r) tables.push_back(make_table<Key>(mode));
    std::uint64_t sink = 0;

    std::uint64_t t0 = clock();
    for (std::size_t r = 0; r < replicas; ++r) {
      const auto& keys = sets[r].keys;
      for (std::size_t i = 0; i < n; ++i) tables[r].put(keys[i], i);
    }
    std::uint64_t t1 = clock();
    report(Phase::Put);
    const std::uint64_t put = t1 - t0;

    if (rep && *rep == 0) {
      for (const auto& t : tables) {
        regret_sum += t.regret().regret;
        rnd_sum += uniform_reference_regret(n, t.buckets());
      }
    }

    t0 = clock();
    for (std::size_t r = 0; r < replicas; ++r) {
      const auto& keys = sets[r].keys;
      for (const std::uint32_t i : get_order[r]) {
        const std::uint64_t* v = tables[r].get(keys[i]);
        sink += v ? *v : ~std::uint64_t{0};
      }
    }
    t1 = clock();
    report(Phase::Get);
    const std::uint64_t get = t1 - t0;

    t0 = clock();
    for (std::size_t r = 0; r < replicas; ++r)
      for (const auto& k : sets[r].miss_keys) sink += tables[r].get(k) != nullptr;
    t1 = clock();
    report(Phase::Miss);
    const std::uint64_t miss = t1 - t0;

    t0 = clock();
    for (std::size_t r = 0; r < replicas; ++r) {
      const auto& keys = sets[r].keys;
      for (const std::uint32_t i : del_order[r]) sink += tables[r].erase(keys[i]);
    }
    t1 = clock();
    report(Phase::Del);
    const std::uint64_t del = t1 - t0;

    g_sink = g_sink + sink;
    if (rep) {
      put_ns += put;
      get_ns += get;
      miss_ns += miss;
      del_ns += del;
    }
  };

  if (opt.warmup) one_rep(std::nullopt);
  std::size_t reps = 0;
  std::uint64_t total_ops = 0;
  while (reps < opt.min_reps || total_ops < opt.budget_ops) {
    one_rep(reps);
    total_ops += 4 * phase_ops;
    ++reps;
  }

  const double denom = static_cast<double>(reps) * static_cast<double>(phase_ops);
  BenchRecord rec;
  rec.nkeys = n;
  rec.putns = static_cast<double>(put_ns) / denom;
  rec.getns = static_cast<double>(get_ns) / denom;
  rec.missns = static_cast<double>(miss_ns) / denom;
  rec.delns = static_cast<double>(del_ns) / denom;
  rec.regret = regret_sum / static_cast<double>(replicas);
  rec.rndregret = rnd_sum / static_cast<double>(replicas);
  return rec;
}

template <class Key>
std::vector<RegretPoint> regret_impl(const WorkloadSpec& spec, HasherMode mode,
                                     const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  std::vector<RegretPoint> out;
  out.reserve(sizes.size());
  for (const std::size_t n : sizes) {
    const KeySet<Key> ks = generate<Key>(spec, n, seed);
    auto table = make_table<Key>(mode);
    for (std::size_t i = 0; i < n; ++i) table.put(ks.keys[i], i);
    const TableStats st = table.stats();
    RegretPoint p;
    p.nkeys = n;
    p.regret = table.regret().regret;
    p.rndregret = uniform_reference_regret(n, st.buckets);
    p.kind = st.kind;
    p.shift = st.shift;
    p.limit = st.limit;
    p.buckets = st.buckets;
    out.push_back(p);
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

template <class T>
T parse_cell(std::string_view cell, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + std::string(cell) + "'");
  return v;
}

}  // namespace

SegmentPlan plan_segments(std::size_t max_n) {
  if (max_n == 0) throw std::invalid_argument("max_n must be at least 1");
  IdentityTable<char> scratch;
  SegmentPlan plan;
  std::size_t start = 1;
  std::size_t capacity = scratch.stats().capacity;
  for (std::size_t n = 1; n <= max_n; ++n) {
    scratch.put(n, 0);
    const std::size_t now = scratch.stats().capacity;
    if (now != capacity) {
      plan.push_back({start, n - 1});
      start = n;
      capacity = now;
    }
  }
  plan.push_back({start, max_n});
  return plan;
}

std::vector<std::size_t> measurement_points(const SegmentPlan& plan) {
  std::vector<std::size_t> points;
  points.reserve(2 * plan.size());
  for (const Segment& s : plan) {
    points.push_back(s.min_keys);
    points.push_back(s.max_keys);
  }
  return points;
}

HasherMode parse_mode(std::string_view text) {
  if (text == "adaptive") return HasherMode::Adaptive;
  if (text == "murmur") return HasherMode::MurmurOnly;
  if (text == "mid") return HasherMode::MidOnly;
  if (text == "co-mid") return HasherMode::ConstantThenMid;
  throw std::invalid_argument("unknown hasher mode '" + std::string(text) + "'");
}

std::string_view to_string(HasherMode mode) noexcept {
  switch (mode) {
    case HasherMode::Adaptive:
      return "adaptive";
    case HasherMode::MurmurOnly:
      return "murmur";
    case HasherMode::MidOnly:
      return "mid";
    case HasherMode::ConstantThenMid:
      return "co-mid";
  }
  return "unknown";
}

IdentityMode identity_mode(HasherMode mode) noexcept {
  switch (mode) {
    case HasherMode::Adaptive:
      return IdentityMode::Adaptive;
    case HasherMode::MurmurOnly:
      return IdentityMode::MurmurOnly;
    case HasherMode::MidOnly:
      return IdentityMode::MidOnly;
    case HasherMode::ConstantThenMid:
      return IdentityMode::ConstantThenMid;
  }
  return IdentityMode::Adaptive;
}

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Put:
      return "PUT";
    case Phase::Get:
      return "GET";
    case Phase::Miss:
      return "MISS";
    case Phase::Del:
      return "DEL";
  }
  return "?";
}

BenchRecord measure_point(const WorkloadSpec& spec, HasherMode mode, std::size_t n, std::uint64_t seed,
                          const BenchOptions& options) {
  if (is_word_workload(spec.kind)) return measure_impl<std::uint64_t>(spec, mode, n, seed, options);
  if (is_sequence_workload(spec.kind)) return measure_impl<Sequence>(spec, mode, n, seed, options);
  return measure_impl<std::string>(spec, mode, n, seed, options);
}

std::vector<BenchRecord> run_bench(const WorkloadSpec& spec, HasherMode mode, std::size_t max_n,
                                   std::uint64_t seed, const BenchOptions& options) {
  std::vector<BenchRecord> records;
  for (const std::size_t n : measurement_points(plan_segments(max_n)))
    records.push_back(measure_point(spec, mode, n, seed, options));
  return records;
}

std::vector<RegretPoint> run_regret(const WorkloadSpec& spec, HasherMode mode,
                                    const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  if (is_word_workload(spec.kind)) return regret_impl<std::uint64_t>(spec, mode, sizes, seed);
  if (is_sequence_workload(spec.kind)) return regret_impl<Sequence>(spec, mode, sizes, seed);
  return regret_impl<std::string>(spec, mode, sizes, seed);
}

std::vector<BoundsRow> bounds_table(const std::vector<std::uint64_t>& m_list, std::size_t f_steps) {
  if (f_steps == 0) throw std::invalid_argument("f_steps must be at least 1");
  for (const std::uint64_t m : m_list)
    if (m < 2) throw std::invalid_argument("bucket counts must be at least 2");
  std::vector<BoundsRow> rows;
  rows.reserve(f_steps + 1);
  for (std::size_t i = 0; i <= f_steps; ++i) {
    BoundsRow row;
    row.f = static_cast<double>(i) / static_cast<double>(f_steps);
    for (const std::uint64_t m : m_list) {
      const double md = static_cast<double>(m);
      row.empty_exact.push_back(std::pow(1.0 - 1.0 / md, md * row.f));
    }
    row.exp_neg_f = std::exp(-row.f);
    row.exp_over_09 = row.exp_neg_f / 0.9;
    row.seven_sixteenths = 1.0 - 9.0 * row.f / 16.0;
    row.half = 1.0 - row.f / 2.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void emit_tsv(const std::vector<BenchRecord>& records, std::ostream& out, const TsvOptions& options) {
  for (const std::string& c : options.comments) out << "# " << c << '\n';
  if (options.budget_ops && *options.budget_ops != kDefaultBudgetOps)
    out << "# budget-ops=" << *options.budget_ops << '\n';
  out << kBenchHeader << '\n';
  for (const BenchRecord& r : records) {
    out << r.nkeys << '\t' << format_number(r.putns) << '\t' << format_number(r.getns) << '\t'
        << format_number(r.missns) << '\t' << format_number(r.delns) << '\t' << format_number(r.regret) << '\t'
        << format_number(r.rndregret) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing TSV output");
}

std::vector<BenchRecord> parse_tsv(std::istream& in) {
  std::vector<BenchRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kBenchHeader) throw std::invalid_argument("unexpected TSV header: '" + line + "'");
      header = true;
      continue;
    }
    const auto cells = split_tabs(line);
    if (cells.size() != 7) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 7 columns");
    BenchRecord r;
    r.nkeys = parse_cell<std::uint64_t>(cells[0], line_no);
    r.putns = parse_cell<double>(cells[1], line_no);
    r.getns = parse_cell<double>(cells[2], line_no);
    r.missns = parse_cell<double>(cells[3], line_no);
    r.delns = parse_cell<double>(cells[4], line_no);
    r.regret = parse_cell<double>(cells[5], line_no);
    r.rndregret = parse_cell<double>(cells[6], line_no);
    records.push_back(r);
  }
  if (!header) throw std::invalid_argument("TSV header missing");
  return records;
}

void emit_regret_tsv(const std::vector<RegretPoint>& points, std::ostream& out) {
  out << "nkeys\tregret\trndregret\thasher\tshift\tlimit\tbuckets\n";
  for (const RegretPoint& p : points) {
    out << p.nkeys << '\t' << format_number(p.regret) << '\t' << format_number(p.rndregret) << '\t'
        << to_string(p.kind) << '\t' << p.shift << '\t';
    if (p.limit == kNoLimit) {
      out << "none";
    } else {
      out << p.limit;
    }
    out << '\t' << p.buckets << '\n';
  }
  if (!out) throw std::runtime_error("failed writing TSV output");
}

void emit_bounds_tsv(const std::vector<BoundsRow>& rows, const std::vector<std::uint64_t>& m_list,
                     std::ostream& out) {
  out << 'f';
  for (const std::uint64_t m : m_list) out << "\tempty_m" << m;
  out << "\texp_neg_f\texp_neg_f_over_0.9\tone_minus_9f_16\tone_minus_f_2\n";
  for (const BoundsRow& r : rows) {
    out << format_number(r.f);
    for (const double e : r.empty_exact) out << '\t' << format_number(e);
    out << '\t' << format_number(r.exp_neg_f) << '\t' << format_number(r.exp_over_09) << '\t'
        << format_number(r.seven_sixteenths) << '\t' << format_number(r.half) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing TSV output");
}

std::uint64_t clock_resolution_ns() {
  std::uint64_t best = ~std::uint64_t{0};
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t a = steady_ns();
    std::uint64_t b = steady_ns();
    while (b == a) b = steady_ns();
    best = std::min(best, b - a);
  }
  return best;
}

}  // namespace adapthash
