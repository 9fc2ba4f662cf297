#pragma once

// Separate-chaining hash table over a stable pair store.
//
// Layout: slot 0 is the null index, so live pairs start at slot 1 (index 2
// of an interleaved key/value vector). `index_` maps bucket -> first slot,
// `next_` maps slot -> next slot in the chain (0 terminates) and also
// threads the free list, tagged with kFreeTag. `hash_cache_` stores the
// hash of every slot when the current hasher is expensive.
//
// Identity tables start as a flat array scanned linearly (the Constant
// hash) and switch to chaining with 64 buckets when the 33rd key arrives.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "adapthash/adapt.hpp"
#include "adapthash/hashers.hpp"
#include "adapthash/metrics.hpp"

namespace adapthash {

template <class Key>
struct KeyTraits;

template <>
struct KeyTraits<std::uint64_t> {
  static constexpr KeyKind kind = KeyKind::Identity;
  using View = std::uint64_t;
};

template <>
struct KeyTraits<std::string> {
  static constexpr KeyKind kind = KeyKind::String;
  using View = std::string_view;
};

template <>
struct KeyTraits<Sequence> {
  static constexpr KeyKind kind = KeyKind::Sequence;
  using View = const Sequence&;
};

struct TableStats {
  std::size_t size = 0;
  std::size_t buckets = 0;   // 1 while in the constant phase
  std::size_t capacity = 0;  // pair slots before the next growth
  HasherKind kind = HasherKind::Constant;
  unsigned shift = 0;
  std::size_t limit = kNoLimit;
  std::optional<std::size_t> last_collisions;
  std::size_t max_chain = 0;
  bool constant_phase = false;
  bool hash_cache = false;
  std::size_t escalations = 0;
  std::size_t limit_doublings = 0;
};

template <class Key, class Value>
class AdaptiveTable {
 public:
  using key_type = Key;
  using mapped_type = Value;
  using KeyView = typename KeyTraits<Key>::View;
  static constexpr KeyKind kind = KeyTraits<Key>::kind;
  static constexpr bool kIdentity = kind == KeyKind::Identity;
  using Policy = std::conditional_t<kIdentity, IdentityPolicy, StringPolicy>;

  static constexpr std::size_t kInitialBuckets = 8;

  struct Entry {
    const Key& key;
    const Value& value;
  };

  class const_iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Entry;
    using difference_type = std::ptrdiff_t;
    using reference = Entry;
    using pointer = void;

    const_iterator() = default;

    Entry operator*() const { return {table_->keys_[slot_], table_->values_[slot_]}; }

    const_iterator& operator++() {
      if (table_->epoch_ != epoch_) throw std::logic_error("table modified during iteration");
      slot_ = table_->next_live(slot_ + 1);
      return *this;
    }
    const_iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }

    friend bool operator==(const const_iterator& a, const const_iterator& b) noexcept {
      return a.slot_ == b.slot_;
    }

   private:
    friend class AdaptiveTable;
    const_iterator(const AdaptiveTable* t, std::size_t slot) : table_(t), slot_(slot), epoch_(t->epoch_) {}

    const AdaptiveTable* table_ = nullptr;
    std::size_t slot_ = 0;
    std::uint64_t epoch_ = 0;
  };

  AdaptiveTable() : AdaptiveTable(default_policy()) {}

  explicit AdaptiveTable(Policy policy) : policy_(std::move(policy)) {
    keys_.emplace_back();
    values_.emplace_back();
    next_.push_back(0);
    if constexpr (kIdentity) {
      if (policy_.starts_constant() && policy_.hasher.kind == HasherKind::Constant) {
        constant_ = true;
        capacity_ = IdentityPolicy::kConstantPhaseInitial;
        reserve_slots(capacity_);
        return;
      }
    }
    buckets_ = kInitialBuckets;
    capacity_ = buckets_;
    index_.assign(buckets_, 0);
    reserve_slots(capacity_);
    rebuild(policy_.hasher, false);
  }

  static Policy default_policy() {
    if constexpr (kIdentity) {
      return make_identity_policy(IdentityMode::Adaptive);
    } else {
      return make_string_policy(kind, true);
    }
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool constant_phase() const noexcept { return constant_; }
  /// Buckets seen by the hash function; the constant phase is one bucket.
  std::size_t buckets() const noexcept { return constant_ ? 1 : buckets_; }
  const HasherConfig& hasher() const noexcept { return policy_.hasher; }
  const Policy& policy() const noexcept { return policy_; }

  /// Inserts or replaces. Returns the previous value when the key existed.
  std::optional<Value> put(Key key, Value value) {
    if constexpr (kIdentity) {
      if (constant_) return put_constant(std::move(key), std::move(value));
    }
    HashValue h = hash_of(key, policy_.hasher);
    std::size_t b = bucket_index(h, buckets_);
    std::size_t chain = 0;
    for (std::uint32_t i = index_[b]; i != 0; i = next_[i]) {
      if (matches(i, h, key)) return std::exchange(values_[i], std::move(value));
      ++chain;
    }

    bool changed = false;
    if constexpr (kIdentity) {
      if (chain >= max_chain_threshold(buckets_, ChainPolicy::Identity)) {
        const HasherConfig before = policy_.hasher;
        on_long_chain_identity(policy_);
        if (policy_.hasher != before) {
          rehash_and_maybe_adapt();
          changed = true;
        }
      }
    } else {
      if (is_truncated(h)) {
        changed = on_truncated_long_chain_string(
            policy_, chain, size_, buckets_,
            [this](const HasherConfig& cfg, bool count) { return rebuild(cfg, count); });
      }
    }
    if (size_ == buckets_) {
      grow();
      changed = true;
    }
    if (changed) {
      h = hash_of(key, policy_.hasher);
      b = bucket_index(h, buckets_);
      chain = chain_length(b);
    }
    link(b, h, std::move(key), std::move(value));
    max_chain_ = std::max(max_chain_, chain + 1);
    ++epoch_;
    return std::nullopt;
  }

  const Value* get(KeyView key) const { return const_cast<AdaptiveTable*>(this)->find_slot_value(key); }
  Value* get(KeyView key) { return find_slot_value(key); }
  bool contains(KeyView key) const { return get(key) != nullptr; }

  /// Comparisons a successful lookup of `key` makes (chain position + 1);
  /// 0 when absent.
  std::size_t probe_length(KeyView key) const {
    if (constant_) {
      for (std::size_t i = 1; i <= size_; ++i)
        if (keys_[i] == key) return i;
      return 0;
    }
    const HashValue h = hash_of(key, policy_.hasher);
    std::size_t walked = 0;
    for (std::uint32_t i = index_[bucket_index(h, buckets_)]; i != 0; i = next_[i]) {
      ++walked;
      if (matches(i, h, key)) return walked;
    }
    return 0;
  }

  bool erase(KeyView key) {
    if (constant_) {
      for (std::size_t i = 1; i <= size_; ++i) {
        if (keys_[i] == key) {
          keys_.erase(keys_.begin() + static_cast<std::ptrdiff_t>(i));
          values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(i));
          next_.pop_back();
          --size_;
          ++epoch_;
          return true;
        }
      }
      return false;
    }
    const HashValue h = hash_of(key, policy_.hasher);
    const std::size_t b = bucket_index(h, buckets_);
    std::uint32_t prev = 0;
    for (std::uint32_t i = index_[b]; i != 0; prev = i, i = next_[i]) {
      if (!matches(i, h, key)) continue;
      if (prev != 0) {
        next_[prev] = next_[i];
      } else {
        index_[b] = next_[i];
      }
      next_[i] = free_head_ | kFreeTag;
      free_head_ = i;
      keys_[i] = Key{};
      values_[i] = Value{};
      --size_;
      ++epoch_;
      return true;
    }
    return false;
  }

  /// Rebuilds all chains for `buckets` under `cfg`, leaving the constant
  /// phase if necessary. Returns the collision count when requested.
  std::optional<std::size_t> rehash(std::size_t buckets, const HasherConfig& cfg, bool count_collisions) {
    if (!is_power_of_two(buckets) || buckets < size_)
      throw std::invalid_argument("rehash needs a power-of-two bucket count >= size");
    if (buckets > kMaxBuckets) throw std::length_error("bucket count exceeds index width");
    if constexpr (kIdentity) {
      if (cfg.kind == HasherKind::TruncString || cfg.kind == HasherKind::TruncSequence)
        throw std::invalid_argument("identity tables need a word hasher");
    } else {
      if (cfg.kind != policy_.hasher.kind)
        throw std::invalid_argument("string tables keep their hasher kind");
    }
    constant_ = false;
    buckets_ = buckets;
    capacity_ = buckets;
    index_.assign(buckets_, 0);
    reserve_slots(capacity_);
    policy_.hasher = cfg;
    const RehashOutcome out = rebuild(cfg, count_collisions);
    ++epoch_;
    if (count_collisions) return out.collisions;
    return std::nullopt;
  }

  const_iterator begin() const { return const_iterator(this, next_live(1)); }
  const_iterator end() const { return const_iterator(this, keys_.size()); }

  TableStats stats() const {
    TableStats s;
    s.size = size_;
    s.buckets = buckets();
    s.capacity = capacity_;
    s.kind = policy_.hasher.kind;
    s.shift = policy_.hasher.shift;
    s.limit = policy_.hasher.limit;
    s.last_collisions = last_collisions_;
    s.max_chain = max_chain_;
    s.constant_phase = constant_;
    s.hash_cache = cache_;
    if constexpr (kIdentity) {
      s.escalations = policy_.escalations;
    } else {
      s.limit_doublings = policy_.doublings;
    }
    return s;
  }

  /// Hashes of the live keys in slot order under the current hasher.
  std::vector<HashValue> current_hashes() const {
    std::vector<HashValue> out;
    out.reserve(size_);
    for (std::size_t i = next_live(1); i < keys_.size(); i = next_live(i + 1)) {
      if (constant_) {
        out.push_back(0);
      } else {
        out.push_back(cache_ ? hash_cache_[i] : hash_of(keys_[i], policy_.hasher));
      }
    }
    return out;
  }

  /// Cost model evaluated on the current bucket occupancy.
  CostReport regret() const { return adapthash::regret(current_hashes(), buckets()); }

  /// Throws std::logic_error when any structural invariant is violated.
  void check_invariants() const {
    auto fail = [](const char* what) { throw std::logic_error(what); };
    const std::size_t slots = keys_.size();
    if (values_.size() != slots || next_.size() != slots) fail("store vectors disagree in length");
    if (constant_) {
      if (slots != size_ + 1) fail("constant phase store has holes");
      if (size_ > IdentityPolicy::kConstantPhaseMax) fail("constant phase overflow");
      return;
    }
    if (size_ > buckets_) fail("load factor above one");
    if (cache_ && hash_cache_.size() != slots) fail("hash cache length mismatch");
    std::vector<std::uint8_t> seen(slots, 0);
    std::size_t live = 0;
    for (std::size_t b = 0; b < buckets_; ++b) {
      std::size_t steps = 0;
      for (std::uint32_t i = index_[b]; i != 0; i = next_[i]) {
        if (i >= slots) fail("chain index out of range");
        if ((next_[i] & kFreeTag) != 0) fail("free slot linked into a chain");
        if (seen[i]) fail("slot reachable twice");
        seen[i] = 1;
        if (++steps > slots) fail("cyclic chain");
        const HashValue h = hash_of(keys_[i], policy_.hasher);
        if (bucket_index(h, buckets_) != b) fail("pair in the wrong bucket");
        if (cache_ && hash_cache_[i] != h) fail("stale cached hash");
        ++live;
      }
    }
    if (live != size_) fail("live count mismatch");
    std::size_t free_count = 0;
    for (std::uint32_t i = free_head_; i != 0; i = next_[i] & ~kFreeTag) {
      if (i >= slots) fail("free index out of range");
      if (seen[i]) fail("free slot also live");
      if ((next_[i] & kFreeTag) == 0) fail("untagged free slot");
      seen[i] = 2;
      if (++free_count > slots) fail("cyclic free list");
    }
    if (live + free_count != slots - 1) fail("slots leaked");
  }

 private:
  static constexpr std::uint32_t kFreeTag = 0x80000000u;
  static constexpr std::size_t kMaxBuckets = std::size_t{1} << 30;

  static HashValue hash_of(KeyView key, const HasherConfig& cfg) noexcept {
    if constexpr (kind == KeyKind::Identity) {
      return hash_word(cfg, key);
    } else if constexpr (kind == KeyKind::String) {
      return hash_string_limited(key, cfg.limit);
    } else {
      return hash_sequence(key, cfg.limit);
    }
  }

  static bool wants_cache(const HasherConfig& cfg) noexcept {
    if constexpr (kIdentity) {
      return cfg.kind == HasherKind::Murmur;
    } else {
      return true;
    }
  }

  bool matches(std::uint32_t i, HashValue h, KeyView key) const {
    if (cache_ && hash_cache_[i] != h) return false;
    return keys_[i] == key;
  }

  std::size_t next_live(std::size_t slot) const noexcept {
    while (slot < keys_.size() && (next_[slot] & kFreeTag) != 0) ++slot;
    return slot;
  }

  std::size_t chain_length(std::size_t b) const noexcept {
    std::size_t len = 0;
    for (std::uint32_t i = index_[b]; i != 0; i = next_[i]) ++len;
    return len;
  }

  Value* find_slot_value(KeyView key) {
    if (constant_) {
      for (std::size_t i = 1; i <= size_; ++i)
        if (keys_[i] == key) return &values_[i];
      return nullptr;
    }
    const HashValue h = hash_of(key, policy_.hasher);
    for (std::uint32_t i = index_[bucket_index(h, buckets_)]; i != 0; i = next_[i])
      if (matches(i, h, key)) return &values_[i];
    return nullptr;
  }

  void reserve_slots(std::size_t capacity) {
    keys_.reserve(capacity + 1);
    values_.reserve(capacity + 1);
    next_.reserve(capacity + 1);
    if (cache_) hash_cache_.reserve(capacity + 1);
  }

  std::optional<Value> put_constant(Key key, Value value) {
    for (std::size_t i = 1; i <= size_; ++i)
      if (keys_[i] == key) return std::exchange(values_[i], std::move(value));
    if (size_ == IdentityPolicy::kConstantPhaseMax) {
      leave_constant_phase();
      return put(std::move(key), std::move(value));
    }
    if (size_ == capacity_) {
      capacity_ *= 2;
      reserve_slots(capacity_);
    }
    keys_.push_back(std::move(key));
    values_.push_back(std::move(value));
    next_.push_back(0);
    ++size_;
    max_chain_ = std::max(max_chain_, size_);
    ++epoch_;
    return std::nullopt;
  }

  void leave_constant_phase() {
    constant_ = false;
    buckets_ = IdentityPolicy::kFirstChainedBuckets;
    capacity_ = buckets_;
    index_.assign(buckets_, 0);
    reserve_slots(capacity_);
    rehash_and_maybe_adapt();
  }

  void grow() {
    if (buckets_ * 2 > kMaxBuckets) throw std::length_error("hash table too large");
    buckets_ *= 2;
    capacity_ = buckets_;
    index_.assign(buckets_, 0);
    reserve_slots(capacity_);
    rehash_and_maybe_adapt();
  }

  void rehash_and_maybe_adapt() {
    auto rehash = [this](const HasherConfig& cfg, bool count) { return rebuild(cfg, count); };
    if constexpr (kIdentity) {
      std::array<std::uint64_t, IdentityPolicy::kSampleSize> sample{};
      std::size_t taken = 0;
      for (std::size_t i = next_live(1); i < keys_.size() && taken < sample.size(); i = next_live(i + 1))
        sample[taken++] = keys_[i];
      on_full_rehash_identity(policy_, size_, buckets_, std::span<const std::uint64_t>(sample.data(), taken),
                              rehash);
    } else {
      rebuild(policy_.hasher, false);
    }
  }

  // Rewrites index_ and next_ for every live slot under cfg. Cached hashes
  // are reused only when they were computed under the same config.
  RehashOutcome rebuild(const HasherConfig& cfg, bool count) {
    const bool want_cache = wants_cache(cfg);
    const bool reuse = cache_ && want_cache && cached_cfg_ == cfg;
    if (want_cache) {
      hash_cache_.resize(keys_.size(), 0);
    } else {
      hash_cache_.clear();
    }
    std::fill(index_.begin(), index_.end(), 0);
    RehashOutcome out;
    const std::size_t mask = buckets_ - 1;
    for (std::size_t i = 1; i < keys_.size(); ++i) {
      if ((next_[i] & kFreeTag) != 0) continue;
      const HashValue h = reuse ? hash_cache_[i] : hash_of(keys_[i], cfg);
      if (want_cache) hash_cache_[i] = h;
      out.any_truncated |= is_truncated(h);
      const std::size_t b = static_cast<std::size_t>(strip_flag(h)) & mask;
      if (count && index_[b] != 0) ++out.collisions;
      next_[i] = index_[b];
      index_[b] = static_cast<std::uint32_t>(i);
    }
    cache_ = want_cache;
    cached_cfg_ = cfg;
    if (count) last_collisions_ = out.collisions;
    return out;
  }

  void link(std::size_t b, HashValue h, Key&& key, Value&& value) {
    std::uint32_t i;
    if (free_head_ != 0) {
      i = free_head_;
      free_head_ = next_[i] & ~kFreeTag;
      keys_[i] = std::move(key);
      values_[i] = std::move(value);
    } else {
      i = static_cast<std::uint32_t>(keys_.size());
      keys_.push_back(std::move(key));
      values_.push_back(std::move(value));
      next_.push_back(0);
      if (cache_) hash_cache_.push_back(0);
    }
    if (cache_) hash_cache_[i] = h;
    next_[i] = index_[b];
    index_[b] = i;
    ++size_;
  }

  Policy policy_;
  std::vector<Key> keys_;
  std::vector<Value> values_;
  std::vector<std::uint32_t> next_;
  std::vector<std::uint32_t> index_;
  std::vector<HashValue> hash_cache_;
  HasherConfig cached_cfg_{};
  bool cache_ = false;
  bool constant_ = false;
  std::uint32_t free_head_ = 0;
  std::size_t size_ = 0;
  std::size_t buckets_ = 0;
  std::size_t capacity_ = 0;
  std::size_t max_chain_ = 0;
  std::optional<std::size_t> last_collisions_;
  std::uint64_t epoch_ = 0;
};

template <class Value>
using IdentityTable = AdaptiveTable<std::uint64_t, Value>;
template <class Value>
using StringTable = AdaptiveTable<std::string, Value>;
template <class Value>
using SequenceTable = AdaptiveTable<Sequence, Value>;

}  // namespace adapthash
