// Acceptance suite: one PASS/FAIL line per criterion. With no arguments
// every criterion runs; `--criterion N` runs one (ctest registers each).
// Exit status is nonzero when any gating criterion fails.

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "adapthash/bench.hpp"
#include "adapthash/hashers.hpp"
#include "adapthash/keygen.hpp"
#include "adapthash/metrics.hpp"
#include "adapthash/rng.hpp"
#include "adapthash/table.hpp"

using namespace adapthash;

namespace {

// Pinned tolerances and sizes.
constexpr unsigned kExhaustiveMaxKeys = 10;
constexpr std::uint64_t kMonteCarloTrials = 10000;
constexpr double kStandardErrors = 4.0;
constexpr double kLargeCaseAbsTol = 0.01;
constexpr std::uint64_t kTierMaxKeys = 4096;
constexpr int kBoundGridPoints = 1000;
constexpr int kArithmeticConfigs = 200;
constexpr int kPointerMixSeeds = 50;
constexpr double kPointerMixRelTol = 0.05;
constexpr std::size_t kSweepMax = std::size_t{1} << 16;
constexpr double kProgOneMaxRegret = 0.01;
constexpr double kProgTwelveRatio = 0.5;
constexpr std::size_t kProgTwelveFrom = 1024;
constexpr double kFloatMaxRegret = 1.0;
constexpr int kSafetySeeds = 100;
constexpr std::size_t kSafetyOps = 100000;
constexpr std::size_t kSafetyUniverse = 3000;
constexpr std::size_t kChainCeiling = 14;
constexpr std::size_t kChainSlack = 2;
constexpr double kThroughputRatio = 1.1;
const std::vector<std::uint64_t> kSweepSeeds{1, 2, 3, 4, 5};

struct Verdict {
  bool pass = true;
  bool gating = true;
  std::string detail;
};

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

BucketCounts counts_of(const std::vector<std::uint64_t>& c) {
  BucketCounts bc;
  bc.counts = c;
  for (auto x : c) bc.keys += x;
  return bc;
}

double cost_of(const std::vector<HashValue>& hashes, std::uint64_t m) { return cost(bucket_counts(hashes, m)); }

std::vector<std::size_t> chained_points(std::size_t max_n, std::size_t from) {
  std::vector<std::size_t> out;
  for (std::size_t n : measurement_points(plan_segments(max_n)))
    if (n >= from) out.push_back(n);
  return out;
}

// 1 -------------------------------------------------------------------------
Verdict minimal_cost_exhaustive() {
  Verdict v;
  std::size_t checked = 0;
  for (std::uint64_t m : {2u, 4u}) {
    for (unsigned n = 1; n <= kExhaustiveMaxKeys; ++n) {
      std::vector<std::uint64_t> c(m, 0);
      std::function<void(std::size_t, unsigned)> rec = [&](std::size_t b, unsigned left) {
        if (b + 1 == m) {
          c[b] = left;
          const CostReport r = regret(counts_of(c));
          const std::uint64_t q = n / m;
          const bool perfect = std::all_of(c.begin(), c.end(), [&](auto x) { return x == q || x == q + 1; });
          ++checked;
          if (r.cost < r.min_cost || (r.regret == 0.0) != perfect) v.pass = false;
          return;
        }
        for (unsigned k = 0; k <= left; ++k) {
          c[b] = k;
          rec(b + 1, left - k);
        }
      };
      rec(0, n);
    }
  }
  v.detail = std::to_string(checked) + " compositions, zero tolerance";
  return v;
}

// 2 and 3 share the simulations.
struct Simulation {
  std::uint64_t n, m;
  MonteCarloEstimate est;
};

const std::vector<Simulation>& uniform_simulations() {
  static const std::vector<Simulation> sims = [] {
    std::vector<Simulation> out;
    std::uint64_t seed = 1000;
    for (auto [n, m] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{8, 8}, {256, 256}, {1024, 512}, {4096, 4096}})
      out.push_back({n, m, monte_carlo_uniform_cost(n, m, kMonteCarloTrials, seed++)});
    return out;
  }();
  return sims;
}

Verdict uniform_cost() {
  Verdict v;
  for (const Simulation& s : uniform_simulations()) {
    const double expect = expected_uniform_cost(s.n, s.m);
    const double err = std::abs(s.est.mean - expect);
    const bool large = s.n == 4096;
    const double tol = large ? kLargeCaseAbsTol : kStandardErrors * s.est.std_error;
    if (err > tol) v.pass = false;
    v.detail += "(" + std::to_string(s.n) + "," + std::to_string(s.m) + ") mc=" + fmt(s.est.mean) + " formula=" +
                fmt(expect) + " err=" + fmt(err, 3) + (large ? " tol=" : " 4SE=") + fmt(tol, 3) + "; ";
  }
  return v;
}

Verdict uniform_regret() {
  Verdict v;
  for (const Simulation& s : uniform_simulations()) {
    if (s.n % s.m != 0) continue;
    const double mc = s.est.mean - min_cost(s.n, s.m);
    const double published = expected_uniform_regret(s.m);
    const double exact = 0.5 - 1.0 / (2.0 * static_cast<double>(s.m));
    const double tol = kStandardErrors * s.est.std_error;
    if (std::abs(mc - published) > tol) v.pass = false;
    v.detail += "(" + std::to_string(s.n) + "," + std::to_string(s.m) + ") mc=" + fmt(mc) + " 0.5+1/m=" +
                fmt(published) + " 4SE=" + fmt(tol, 3) + " [0.5-1/(2m)=" + fmt(exact) + "]; ";
  }
  return v;
}

// 4 -------------------------------------------------------------------------
Verdict tier_simplifications() {
  Verdict v;
  // Fractional forms in exact integer arithmetic: with u = c + m - n,
  // 1 - f/2 < u/m  <=>  2c > n   and   1 - 9f/16 < u/m  <=>  16c > 7n.
  std::size_t half_bad = 0, seven_bad = 0, checked = 0;
  std::uint64_t first_seven_bad = 0;
  for (std::uint64_t n = 0; n <= kTierMaxKeys; ++n) {
    for (std::uint64_t c = 0; c <= n; ++c) {
      ++checked;
      const bool half_shift = too_many_collisions(n, 512, c);
      const bool seven_shift = too_many_collisions(n, 2048, c);
      if (half_shift != (2 * c > n)) ++half_bad;
      if (seven_shift != (16 * c > 7 * n)) {
        if (seven_bad++ == 0) first_seven_bad = n;
      }
    }
  }
  std::size_t order_bad = 0;
  for (int i = 0; i < kBoundGridPoints; ++i) {
    const double f = static_cast<double>(i) / (kBoundGridPoints - 1);
    if (!(std::exp(-f) <= 1.0 - 9.0 * f / 16.0 && 1.0 - 9.0 * f / 16.0 <= 1.0 - f / 2.0)) ++order_bad;
  }
  // The table only ever tests at n = m/2 with m a power of two.
  std::size_t at_rehash_bad = 0;
  for (std::uint64_t m = 1024; m < 4096; m *= 2)
    for (std::uint64_t c = 0; c <= m / 2; ++c)
      if (too_many_collisions(m / 2, m, c) != (16 * c > 7 * (m / 2))) ++at_rehash_bad;
  v.pass = half_bad == 0 && seven_bad == 0 && order_bad == 0;
  v.detail = std::to_string(checked) + " (n,c) pairs: half-n mismatches=" + std::to_string(half_bad) +
             ", 7/16 mismatches=" + std::to_string(seven_bad) +
             (seven_bad ? " (first at n=" + std::to_string(first_seven_bad) + ")" : std::string()) +
             ", 7/16 mismatches at rehash sizes=" + std::to_string(at_rehash_bad) +
             "; bound-order violations=" + std::to_string(order_bad) + "/" + std::to_string(kBoundGridPoints);
  return v;
}

// 5 -------------------------------------------------------------------------
Verdict arithmetic_perfection() {
  Verdict v;
  SplitMix64 rng(55);
  int bad = 0;
  for (int i = 0; i < kArithmeticConfigs; ++i) {
    const unsigned s = std::vector<unsigned>{0, 2, 4}[rng.below(3)];
    const std::uint64_t m = std::uint64_t{1} << rng.below(9);
    const std::uint64_t n = 1 + rng.below(m);
    const std::uint64_t d = 1 + 2 * rng.below(5000);
    const std::uint64_t a0 = rng.next() >> 2;
    std::vector<HashValue> h;
    for (std::uint64_t j = 0; j < n; ++j) h.push_back(arithmetic_hash(a0 + j * (d << s), s));
    if (regret(h, m).regret != 0.0) ++bad;
  }
  v.pass = bad == 0;
  v.detail = std::to_string(kArithmeticConfigs) + " configurations, nonzero regret in " + std::to_string(bad);
  return v;
}

// 6 -------------------------------------------------------------------------
Verdict pointer_mix() {
  Verdict v;
  constexpr unsigned pb = kDefaultPageBits;
  double worst = 0, worst_alt = 0;
  int failing = 0;
  for (std::size_t pages : {1u, 2u, 8u, 32u}) {
    for (std::uint64_t u : {32u, 256u}) {
      for (double occ : {0.5, 1.0}) {
        const std::uint64_t stride = static_cast<std::uint64_t>(std::ldexp(occ, pb)) / u;
        const unsigned s = static_cast<unsigned>(std::countr_zero(stride));
        const std::size_t n = pages * u;
        const std::uint64_t m = std::bit_ceil(static_cast<std::uint64_t>(n));
        double sum = 0;
        for (int seed = 0; seed < kPointerMixSeeds; ++seed) {
          const WordKeySet ks = gen_paged(n, pb, stride, occ, 7000 + seed, pages);
          std::vector<HashValue> h;
          for (auto k : ks.keys) h.push_back(pointer_mix_hash(k, s, pb));
          sum += cost_of(h, m);
        }
        const double mean = sum / kPointerMixSeeds;
        const double formula = expected_pointer_mix_cost(n, u, m, pb, s);
        const double rel = std::abs(mean - formula) / formula;
        // The reading in which pages narrower than the table never collide
        // internally. Reported only; the gate uses the formula as printed.
        const double slots = std::ldexp(1.0, static_cast<int>(pb - s));
        const double alt = 1.0 + (static_cast<double>(n) - static_cast<double>(u) * std::min(1.0, static_cast<double>(m) / slots)) /
                                     (2.0 * static_cast<double>(m));
        worst_alt = std::max(worst_alt, std::abs(mean - alt) / alt);
        worst = std::max(worst, rel);
        if (rel > kPointerMixRelTol) {
          ++failing;
          v.detail += "[pages=" + std::to_string(pages) + " u=" + std::to_string(u) + " occ=" + fmt(occ, 2) +
                      " m=" + std::to_string(m) + " sim=" + fmt(mean, 5) + " formula=" + fmt(formula, 5) + "] ";
        }
      }
    }
  }
  v.pass = failing == 0;
  v.detail = std::to_string(failing) + "/16 configs outside 5%, worst rel err " + fmt(worst, 3) +
             " (min(1, m/2^(PB-s)) reading: worst " + fmt(worst_alt, 3) + ")" +
             (v.detail.empty() ? "" : ": " + v.detail);
  return v;
}

// 7 -------------------------------------------------------------------------
Verdict prog_one() {
  Verdict v;
  double worst = 0;
  const auto sizes = chained_points(kSweepMax, IdentityPolicy::kConstantPhaseMax + 1);
  for (auto seed : kSweepSeeds) {
    for (const RegretPoint& p : run_regret(parse_workload("prog:1"), HasherMode::Adaptive, sizes, seed)) {
      worst = std::max(worst, p.regret);
      if (p.regret > kProgOneMaxRegret) v.pass = false;
    }
  }
  v.detail = std::to_string(sizes.size()) + " points x " + std::to_string(kSweepSeeds.size()) +
             " seeds, max regret " + fmt(worst);
  return v;
}

// 8 -------------------------------------------------------------------------
Verdict prog_twelve() {
  Verdict v;
  double worst = 0;
  std::size_t worst_n = 0, failing = 0, total = 0;
  const auto sizes = chained_points(kSweepMax, kProgTwelveFrom);
  for (auto seed : kSweepSeeds) {
    const auto adaptive = run_regret(parse_workload("prog:12"), HasherMode::Adaptive, sizes, seed);
    for (const RegretPoint& p : adaptive) {
      ++total;
      const double ratio = p.regret / p.rndregret;
      if (ratio > worst) {
        worst = ratio;
        worst_n = p.nkeys;
      }
      if (p.regret > kProgTwelveRatio * p.rndregret) ++failing;
    }
  }
  v.pass = failing == 0;
  v.detail = std::to_string(failing) + "/" + std::to_string(total) + " points above half of rndregret; worst ratio " +
             fmt(worst, 4) + " at n=" + std::to_string(worst_n);
  return v;
}

// 9 -------------------------------------------------------------------------
Verdict float_fallback() {
  Verdict v;
  const auto sizes = chained_points(kSweepMax, 1);
  for (auto seed : kSweepSeeds) {
    const auto pts = run_regret(parse_workload("float"), HasherMode::Adaptive, sizes, seed);
    const RegretPoint& last = pts.back();
    bool below = false;
    std::size_t below_at = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i].nkeys > IdentityPolicy::kConstantPhaseMax && pts[i].regret < pts[i].rndregret) {
        below = true;
        below_at = pts[i].nkeys;
        break;
      }
    }
    std::size_t murmur_at = 0;
    for (const auto& p : pts) {
      if (p.kind == HasherKind::Murmur) {
        murmur_at = p.nkeys;
        break;
      }
    }
    const bool ok = last.kind == HasherKind::Murmur && last.regret <= kFloatMaxRegret && below;
    if (!ok) v.pass = false;
    v.detail += "seed " + std::to_string(seed) + ": murmur from n=" + std::to_string(murmur_at) + ", final regret " +
                fmt(last.regret, 4) + ", below uniform at n=" + std::to_string(below_at) + "; ";
  }
  return v;
}

// 10 ------------------------------------------------------------------------
Verdict max_chain_safety() {
  Verdict v;
  std::size_t not_murmur = 0, mismatches = 0, worst_walk = 0;
  for (int seed = 1; seed <= kSafetySeeds; ++seed) {
    const WordKeySet ks = gen_mid_adversarial(kSafetyUniverse, 900 + seed);
    IdentityTable<std::uint64_t> t;
    std::map<std::uint64_t, std::uint64_t> model;
    SplitMix64 rng(seed);
    for (std::size_t op = 0; op < kSafetyOps; ++op) {
      const std::uint64_t k = ks.keys[rng.below(ks.keys.size())];
      const std::uint64_t roll = rng.below(10);
      if (roll < 5) {
        const std::uint64_t val = rng.next();
        const auto old = t.put(k, val);
        const auto it = model.find(k);
        if (old.has_value() != (it != model.end()) || (old && *old != it->second)) ++mismatches;
        model[k] = val;
      } else if (roll < 7) {
        if (t.erase(k) != (model.erase(k) == 1)) ++mismatches;
      } else {
        const auto* got = t.get(k);
        const auto it = model.find(k);
        if ((got != nullptr) != (it != model.end()) || (got && *got != it->second)) ++mismatches;
      }
      if (t.size() != model.size()) ++mismatches;
      if (op % 1000 == 999 && t.hasher().kind == HasherKind::Murmur) {
        for (const auto& [key, val] : model) worst_walk = std::max(worst_walk, t.probe_length(key));
      }
    }
    t.check_invariants();
    if (t.hasher().kind != HasherKind::Murmur) ++not_murmur;
    for (const auto& [key, val] : model) worst_walk = std::max(worst_walk, t.probe_length(key));
  }
  v.pass = not_murmur == 0 && mismatches == 0 && worst_walk <= kChainCeiling + kChainSlack;
  v.detail = std::to_string(kSafetySeeds) + " seeds x " + std::to_string(kSafetyOps) +
             " ops: not murmur=" + std::to_string(not_murmur) + ", model mismatches=" + std::to_string(mismatches) +
             ", longest walk after stabilizing=" + std::to_string(worst_walk) + " (ceiling " +
             std::to_string(kChainCeiling + kChainSlack) + ")";
  return v;
}

// 11 ------------------------------------------------------------------------
std::vector<std::string> identifier_tokens(const std::filesystem::path& root) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t i = 0;
    while (i < text.size()) {
      const unsigned char c = static_cast<unsigned char>(text[i]);
      if (std::isalpha(c) || c == '_') {
        std::size_t j = i;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
          ++j;
        std::string tok = text.substr(i, j - i);
        if (seen.insert(tok).second) out.push_back(std::move(tok));
        i = j;
      } else {
        ++i;
      }
    }
  }
  return out;
}

Verdict string_adaptation() {
  Verdict v;
  constexpr std::size_t prefix = 32, middle = 8, suffix = 32;
  std::map<std::size_t, int> final_limits;
  for (std::uint64_t seed : kSweepSeeds) {
    for (std::size_t n : {1000u, 5000u}) {
      const StringKeySet ks = gen_shared_affix(n, seed, prefix, middle, suffix);
      StringTable<std::size_t> t;
      for (std::size_t i = 0; i < n; ++i) t.put(ks.keys[i], i);
      const std::size_t L = t.policy().limit();
      ++final_limits[L];
      // Bytes [prefix, prefix + middle) are reached once either walk passes
      // the shared affix.
      auto covers = [&](std::size_t lim) { return (lim + 1) / 2 > prefix || lim / 2 > suffix; };
      bool ok = covers(L) && !covers(L / 2) && t.stats().limit_doublings >= 1;
      const BucketCounts bc = bucket_counts(t.current_hashes(), t.buckets());
      std::uint64_t used = 0;
      for (auto c : bc.counts) used += c != 0;
      const std::uint64_t collisions = n - used;
      ok &= !too_many_collisions(n, t.buckets(), collisions);
      for (std::size_t i = 0; i < n; ++i) ok &= t.get(ks.keys[i]) && *t.get(ks.keys[i]) == i;
      for (const auto& miss : ks.miss_keys) ok &= !t.contains(miss);
      if (!ok) {
        v.pass = false;
        v.detail += "shared-affix seed " + std::to_string(seed) + " n=" + std::to_string(n) + " limit " +
                    std::to_string(L) + " collisions " + std::to_string(collisions) + " FAILED; ";
      }
    }
  }
  v.detail += "shared-affix final limits:";
  for (const auto& [lim, count] : final_limits) v.detail += " " + std::to_string(lim) + "x" + std::to_string(count);
  v.detail += "; ";

  std::size_t natural_keys = 0, natural_doublings = 0, random_doublings = 0;
#ifdef ADAPTHASH_EXAMPLES_DIR
  {
    const auto tokens = identifier_tokens(ADAPTHASH_EXAMPLES_DIR);
    const auto path = std::filesystem::temp_directory_path() / "adapthash_natural_corpus.txt";
    {
      std::ofstream out(path, std::ios::binary);
      for (const auto& tok : tokens) out << tok << '\n';
    }
    natural_keys = tokens.size();
    const StringKeySet ks = gen_strings_file(path.string(), natural_keys, 1);
    StringTable<int> t;
    for (const auto& k : ks.keys) t.put(k, 0);
    natural_doublings = t.stats().limit_doublings;
    for (const auto& k : ks.keys) v.pass &= t.contains(k);
    std::filesystem::remove(path);
  }
#endif
  for (std::uint64_t seed : kSweepSeeds) {
    const StringKeySet ks = gen_strings_random(20000, seed);
    StringTable<int> t;
    for (const auto& k : ks.keys) t.put(k, 0);
    random_doublings += t.stats().limit_doublings;
  }
  if (natural_doublings != 0 || random_doublings != 0) v.pass = false;
  v.detail += "natural corpus (" + std::to_string(natural_keys) + " identifiers) doublings=" +
              std::to_string(natural_doublings) + ", random short strings doublings=" +
              std::to_string(random_doublings);
#ifndef ADAPTHASH_EXAMPLES_DIR
  v.pass = false;
  v.detail += " (natural corpus unavailable)";
#endif
  return v;
}

// 12 ------------------------------------------------------------------------
Verdict sequence_keys() {
  Verdict v;
  const Sequence head = gen_sequences(1, 12).keys.front();
  auto key = [&](std::uint64_t fifth) {
    Sequence s(head.begin(), head.begin() + 4);
    s.emplace_back(fifth);
    s.emplace_back(std::uint64_t{77});
    return s;
  };
  const Sequence a = key(1), b = key(2);
  const HasherConfig start = make_string_policy(KeyKind::Sequence).hasher;
  const bool collide_at_default = start.limit == 4 && hash_sequence(a, 4) == hash_sequence(b, 4);

  SequenceTable<int> t;
  constexpr int kKeys = 600;
  for (int i = 0; i < kKeys; ++i) t.put(key(static_cast<std::uint64_t>(i) + 1), i);
  const std::size_t L = t.policy().limit();
  const std::size_t ba = bucket_index(hash_sequence(a, L), t.buckets());
  const std::size_t bb = bucket_index(hash_sequence(b, L), t.buckets());
  bool all_found = true;
  for (int i = 0; i < kKeys; ++i) all_found &= t.get(key(static_cast<std::uint64_t>(i) + 1)) != nullptr;
  const double r = t.regret().regret;
  v.pass = collide_at_default && L > 4 && hash_sequence(a, L) != hash_sequence(b, L) && ba != bb && all_found;
  v.detail = "collide at limit 4: " + std::string(collide_at_default ? "yes" : "no") + ", limit after " +
             std::to_string(kKeys) + " puts " + std::to_string(L) + ", buckets " + std::to_string(ba) + " vs " +
             std::to_string(bb) + ", regret " + fmt(r, 4);
  return v;
}

// 13 ------------------------------------------------------------------------
Verdict throughput_smoke() {
  Verdict v;
  v.gating = false;
  BenchOptions o;
  o.budget_ops = 4'000'000;
  const WorkloadSpec spec = parse_workload("prog:1");
  const BenchRecord adaptive = measure_point(spec, HasherMode::Adaptive, kSweepMax, 1, o);
  const BenchRecord murmur = measure_point(spec, HasherMode::MurmurOnly, kSweepMax, 1, o);
  const double ratio = adaptive.putns / murmur.putns;
  v.pass = ratio <= kThroughputRatio;
  v.detail = "PUT adaptive " + fmt(adaptive.putns, 4) + " ns, murmur " + fmt(murmur.putns, 4) + " ns, ratio " +
             fmt(ratio, 3) + " (GET " + fmt(adaptive.getns, 4) + " vs " + fmt(murmur.getns, 4) + ")";
  return v;
}

// 14 ------------------------------------------------------------------------
Verdict harness_contract() {
  Verdict v;
  std::vector<std::string> problems;

  SplitMix64 rng(14);
  std::vector<BenchRecord> records;
  for (int i = 0; i < 50; ++i) {
    records.push_back({rng.below(1u << 20), rng.unit() * 100, rng.unit(), std::ldexp(rng.unit(), -30),
                       rng.unit() * 1e9, rng.unit(), rng.unit()});
  }
  std::stringstream ss;
  TsvOptions topt;
  topt.budget_ops = 1234;
  emit_tsv(records, ss, topt);
  if (parse_tsv(ss) != records) problems.push_back("TSV round-trip");
  std::stringstream empty;
  emit_tsv({}, empty);
  if (empty.str() != std::string(kBenchHeader) + "\n") problems.push_back("header-only output");

  const Phase order[] = {Phase::Put, Phase::Get, Phase::Miss, Phase::Del};
  for (std::size_t n : {1u, 7u, 33u, 99u, 100u, 250u}) {
    std::vector<PhaseEvent> events;
    std::uint64_t ticks = 0;
    BenchOptions o;
    o.budget_ops = 0;
    o.clock = [&ticks] { return ++ticks; };
    o.observer = [&events](const PhaseEvent& e) { events.push_back(e); };
    measure_point(parse_workload("rnd:6"), HasherMode::Adaptive, n, 3, o);
    if (events.size() != 12) problems.push_back("rep floor at n=" + std::to_string(n));
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].phase != order[i % 4]) problems.push_back("op order at n=" + std::to_string(n));
      if (events[i].replicas * n < 100) problems.push_back("batching at n=" + std::to_string(n));
      if (n >= 100 && events[i].replicas != 1) problems.push_back("needless replicas at n=" + std::to_string(n));
    }
  }

  // The full default budget, driven by a mock clock.
  for (std::size_t n : {10u, 1000u}) {
    std::uint64_t ops = 0;
    std::size_t reps = 0;
    std::uint64_t ticks = 0;
    BenchOptions o;
    o.clock = [&ticks] { return ticks += 3; };
    o.observer = [&](const PhaseEvent& e) {
      ops += e.ops;
      reps = std::max(reps, e.rep + 1);
    };
    const BenchRecord r = measure_point(parse_workload("prog:1"), HasherMode::Adaptive, n, 1, o);
    if (reps < 3 || ops < kDefaultBudgetOps) problems.push_back("budget floor at n=" + std::to_string(n));
    const double expect = 3.0 / static_cast<double>(n * std::max<std::size_t>(1, (100 + n - 1) / n));
    if (std::abs(r.putns - expect) > 1e-12) problems.push_back("mean per op at n=" + std::to_string(n));
  }

  v.pass = problems.empty();
  v.detail = problems.empty() ? "round-trip, header-only, order, batching, 3-rep and 5M-op floors verified"
                              : "problems:";
  for (const auto& p : problems) v.detail += " " + p;
  return v;
}

struct Criterion {
  int id;
  const char* name;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {1, "minimal cost, exhaustive", minimal_cost_exhaustive},
    {2, "uniform-hash expected cost (Monte Carlo)", uniform_cost},
    {3, "uniform-hash expected regret 0.5 + 1/m", uniform_regret},
    {4, "collision-test simplifications and bound ordering", tier_simplifications},
    {5, "arithmetic hash is perfect on progressions", arithmetic_perfection},
    {6, "pointer-mix expected cost formula", pointer_mix},
    {7, "adaptive on prog:1 is perfect after the constant phase", prog_one},
    {8, "adaptive on prog:12 within half of uniform regret", prog_twelve},
    {9, "float keys fall back to murmur", float_fallback},
    {10, "max-chain safety on mid-adversarial keys", max_chain_safety},
    {11, "string truncation limit adaptation", string_adaptation},
    {12, "sequence keys separate after the limit rises", sequence_keys},
    {13, "throughput smoke (informational)", throughput_smoke},
    {14, "bench harness contract", harness_contract},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  bool ran = false;
  for (const Criterion& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = v.gating ? (v.pass ? "PASS" : "FAIL") : (v.pass ? "INFO-PASS" : "INFO-FAIL");
    std::printf("[%s] %2d %s (%.2fs): %s\n", tag, c.id, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
    if (v.gating && !v.pass) ++failures;
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
