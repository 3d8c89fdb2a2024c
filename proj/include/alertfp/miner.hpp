#pragma once

// Level-wise Apriori mining over tidlists. Every candidate and frequent
// itemset carries the sorted list of transactions that contain it; support is
// the tidlist length, and a (k+1)-candidate's tidlist is the intersection of
// its two generating k-itemsets' tidlists. The dataset is scanned once, to
// build the 1-item tidlists.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alertfp/alert_model.hpp"
#include "alertfp/error.hpp"
#include "alertfp/parallel.hpp"

namespace alertfp {

using ItemId = std::uint32_t;
using Tid = std::uint32_t;
/// Item ids in ascending order; ids follow canonical item order.
using Itemset = std::vector<ItemId>;
/// Strictly increasing transaction ids.
using Tidlist = std::vector<Tid>;

/// Dense ids for the distinct items of a dataset, assigned in canonical
/// (field_index, value) order so id order equals item order.
class ItemDictionary {
 public:
  ItemDictionary() = default;

  explicit ItemDictionary(std::vector<Item> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    index_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) index_.emplace(items_[i], static_cast<ItemId>(i));
  }

  std::optional<ItemId> find(const Item& item) const {
    const auto it = index_.find(item);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Item& item(ItemId id) const { return items_.at(id); }
  const std::vector<Item>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }

 private:
  std::vector<Item> items_;
  std::unordered_map<Item, ItemId, ItemHash> index_;
};

/// A dataset reduced to sorted item-id transactions.
struct EncodedDataset {
  std::shared_ptr<const ItemDictionary> dictionary;
  std::vector<Itemset> transactions;

  std::size_t n() const noexcept { return transactions.size(); }
};

inline EncodedDataset encode(const AlertDataset& dataset) {
  std::vector<Transaction> itemized;
  itemized.reserve(dataset.n());
  std::vector<Item> all;
  for (const auto& alert : dataset.alerts()) {
    itemized.push_back(itemize(alert, dataset.schema()));
    all.insert(all.end(), itemized.back().items.begin(), itemized.back().items.end());
  }
  auto dict = std::make_shared<const ItemDictionary>(std::move(all));
  EncodedDataset out{dict, {}};
  out.transactions.reserve(itemized.size());
  for (const auto& t : itemized) {
    Itemset ids;
    ids.reserve(t.items.size());
    for (const auto& item : t.items) ids.push_back(*dict->find(item));
    out.transactions.push_back(std::move(ids));
  }
  return out;
}

/// Minimum support as an absolute count or a ratio of the dataset size.
class Minisupport {
 public:
  static Minisupport absolute(std::size_t count) {
    if (count < 1) throw ConfigError("absolute minisupport must be >= 1");
    Minisupport m;
    m.count_ = count;
    return m;
  }

  static Minisupport ratio(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("minisupport ratio must be in (0, 1]");
    Minisupport m;
    m.ratio_ = r;
    return m;
  }

  /// Accepts "N" (absolute) or "P%" (percentage of the dataset).
  static Minisupport parse(std::string_view text) {
    text = detail::trim(text);
    try {
      if (!text.empty() && text.back() == '%') {
        const std::string number(text.substr(0, text.size() - 1));
        std::size_t used = 0;
        const double pct = std::stod(number, &used);
        if (used != number.size()) throw ConfigError("");
        return ratio(pct / 100.0);
      }
      const std::string number(text);
      std::size_t used = 0;
      const long long v = std::stoll(number, &used);
      if (used != number.size() || v < 1) throw ConfigError("");
      return absolute(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError("invalid minisupport '" + std::string(text) + "'; expected N >= 1 or P% with 0 < P <= 100");
    }
  }

  bool is_ratio() const noexcept { return ratio_.has_value(); }

  /// Absolute threshold for a dataset of n transactions; ratios round up.
  std::size_t resolve(std::size_t n) const {
    if (!ratio_) return count_;
    const double v = *ratio_ * static_cast<double>(n);
    // Absorb representation error such as 0.1 * 28670 = 2867.0000000000005.
    const double c = std::ceil(v - 1e-9 * std::max(1.0, v));
    return std::max<std::size_t>(1, static_cast<std::size_t>(c));
  }

 private:
  Minisupport() = default;
  std::size_t count_ = 1;
  std::optional<double> ratio_;
};

struct MiningConfig {
  Minisupport minisupport = Minisupport::absolute(1);
  std::optional<std::size_t> max_pattern_len;
  bool emit_tidlists = true;
  /// Pattern-count cap; 0 disables the guard.
  std::size_t max_patterns = 5'000'000;
  std::size_t workers = 1;
};

struct FrequentPattern {
  Itemset itemset;
  /// Empty when mined with emit_tidlists off.
  Tidlist tidlist;
  std::size_t support_count = 0;
  double support_ratio = 0.0;

  bool operator==(const FrequentPattern&) const = default;
};

/// Canonical itemset order: shorter first, then lexicographic by item.
inline bool canonical_less(const Itemset& a, const Itemset& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// FPS(D, minisupport): every non-empty frequent itemset of a dataset.
class PatternSet {
 public:
  PatternSet() = default;

  PatternSet(std::shared_ptr<const ItemDictionary> dictionary, std::vector<FrequentPattern> patterns, std::size_t n,
             std::size_t minisupport_abs, bool has_tidlists)
      : dictionary_(std::move(dictionary)),
        patterns_(std::move(patterns)),
        n_(n),
        minisupport_abs_(minisupport_abs),
        has_tidlists_(has_tidlists) {}

  const std::vector<FrequentPattern>& patterns() const noexcept { return patterns_; }
  const FrequentPattern& operator[](std::size_t i) const { return patterns_.at(i); }
  std::size_t count() const noexcept { return patterns_.size(); }
  bool empty() const noexcept { return patterns_.empty(); }
  std::size_t n() const noexcept { return n_; }
  std::size_t minisupport() const noexcept { return minisupport_abs_; }
  bool has_tidlists() const noexcept { return has_tidlists_; }
  const ItemDictionary& dictionary() const { return *dictionary_; }
  const std::shared_ptr<const ItemDictionary>& dictionary_ptr() const noexcept { return dictionary_; }

  std::vector<Item> items_of(const FrequentPattern& p) const {
    std::vector<Item> out;
    out.reserve(p.itemset.size());
    for (ItemId id : p.itemset) out.push_back(dictionary_->item(id));
    return out;
  }

  /// Looks up a pattern by its items (any order).
  const FrequentPattern* find(std::vector<Item> items) const {
    Itemset ids;
    for (const auto& item : items) {
      const auto id = dictionary_->find(item);
      if (!id) return nullptr;
      ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    const auto it = std::lower_bound(patterns_.begin(), patterns_.end(), ids,
                                     [](const FrequentPattern& p, const Itemset& key) {
                                       return canonical_less(p.itemset, key);
                                     });
    if (it != patterns_.end() && it->itemset == ids) return &*it;
    return nullptr;
  }

 private:
  std::shared_ptr<const ItemDictionary> dictionary_ = std::make_shared<const ItemDictionary>();
  std::vector<FrequentPattern> patterns_;
  std::size_t n_ = 0;
  std::size_t minisupport_abs_ = 1;
  bool has_tidlists_ = false;
};

/// One Apriori level: itemsets of equal size, lexicographically sorted, each
/// with its tidlist.
struct LevelEntry {
  Itemset itemset;
  Tidlist tidlist;

  bool operator==(const LevelEntry&) const = default;
};
using Level = std::vector<LevelEntry>;

/// Candidate 1-itemsets of an encoded dataset, in one pass.
inline Level build_candidates_1(const EncodedDataset& data) {
  std::vector<Tidlist> lists(data.dictionary->size());
  for (std::size_t tid = 0; tid < data.transactions.size(); ++tid) {
    for (ItemId id : data.transactions[tid]) lists[id].push_back(static_cast<Tid>(tid));
  }
  Level level;
  level.reserve(lists.size());
  for (std::size_t id = 0; id < lists.size(); ++id) {
    if (!lists[id].empty()) level.push_back({{static_cast<ItemId>(id)}, std::move(lists[id])});
  }
  return level;
}

/// Candidate 1-itemsets as (item, tidlist) pairs, in canonical item order.
inline std::vector<std::pair<Item, Tidlist>> build_candidates_1(const AlertDataset& dataset) {
  if (dataset.empty()) throw EmptyDatasetError();
  const EncodedDataset data = encode(dataset);
  std::vector<std::pair<Item, Tidlist>> out;
  for (auto& entry : build_candidates_1(data)) {
    out.emplace_back(data.dictionary->item(entry.itemset.front()), std::move(entry.tidlist));
  }
  return out;
}

/// Keeps the entries whose support reaches the threshold.
inline Level prune(Level candidates, std::size_t minisupport_abs) {
  std::erase_if(candidates, [&](const LevelEntry& e) { return e.tidlist.size() < minisupport_abs; });
  return candidates;
}

namespace detail {

struct Cancelled {};

// Joins level[i] with every later member of its prefix group. Candidates with
// an infrequent k-subset, or with support below `min_support`, are dropped.
inline void join_from(const Level& level, std::size_t i, std::size_t min_support, Level& out, Itemset& probe) {
  const Itemset& a = level[i].itemset;
  const std::size_t k = a.size();
  for (std::size_t j = i + 1; j < level.size(); ++j) {
    const Itemset& b = level[j].itemset;
    if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;

    Itemset candidate = a;
    candidate.push_back(b.back());

    bool closed = true;
    // Subsets dropping the last or second-to-last item are the generators.
    for (std::size_t skip = 0; skip + 2 <= k && closed; ++skip) {
      probe.clear();
      for (std::size_t p = 0; p < candidate.size(); ++p) {
        if (p != skip) probe.push_back(candidate[p]);
      }
      const auto it = std::lower_bound(level.begin(), level.end(), probe,
                                       [](const LevelEntry& e, const Itemset& key) { return e.itemset < key; });
      closed = it != level.end() && it->itemset == probe;
    }
    if (!closed) continue;

    const Tidlist& ta = level[i].tidlist;
    const Tidlist& tb = level[j].tidlist;
    if (std::min(ta.size(), tb.size()) < min_support) continue;
    Tidlist tids;
    tids.reserve(std::min(ta.size(), tb.size()));
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(tids));
    if (tids.size() < min_support) continue;
    out.push_back({std::move(candidate), std::move(tids)});
  }
}

// Runs the join over all of `level` across workers; output order is the
// sequential order. `budget` is decremented per emitted entry and the join
// aborts with PatternExplosionError once it goes negative.
inline Level join_level(const Level& level, std::size_t min_support, std::size_t workers,
                        std::atomic<long long>* budget, std::size_t level_number, std::size_t cap) {
  const std::size_t chunks = chunk_count(level.size(), workers);
  std::vector<Level> parts(chunks);
  std::atomic<bool> exploded{false};
  parallel_chunks(level.size(), workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Itemset probe;
    for (std::size_t i = begin; i < end; ++i) {
      if (exploded.load(std::memory_order_relaxed)) return;
      const std::size_t before = parts[chunk].size();
      join_from(level, i, min_support, parts[chunk], probe);
      if (budget) {
        const auto added = static_cast<long long>(parts[chunk].size() - before);
        if (budget->fetch_sub(added, std::memory_order_relaxed) - added < 0) {
          exploded.store(true, std::memory_order_relaxed);
          return;
        }
      }
    }
  });
  if (exploded.load()) throw PatternExplosionError(level_number, cap + 1, cap);
  Level out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// Apriori join of a lexicographically sorted level k into candidate level
/// k+1. Candidates with any infrequent k-subset are removed; each surviving
/// candidate's tidlist is the intersection of its generators' tidlists.
inline Level candidate_gen(const Level& frequent, std::size_t workers = 1) {
  return detail::join_level(frequent, 0, workers, nullptr, 0, 0);
}

namespace detail {

inline FrequentPattern to_pattern(LevelEntry&& e, std::size_t n, bool keep_tidlist) {
  FrequentPattern p;
  p.support_count = e.tidlist.size();
  p.support_ratio = static_cast<double>(p.support_count) / static_cast<double>(n);
  p.itemset = std::move(e.itemset);
  if (keep_tidlist) p.tidlist = std::move(e.tidlist);
  return p;
}

}  // namespace detail

/// Mines every non-empty frequent itemset with its tidlist and support.
/// A threshold above n yields an empty set.
inline PatternSet mine(const EncodedDataset& data, const MiningConfig& config) {
  if (data.n() == 0) throw EmptyDatasetError();
  const std::size_t n = data.n();
  const std::size_t min_abs = config.minisupport.resolve(n);
  const std::size_t cap = config.max_patterns;
  const std::size_t max_len = config.max_pattern_len.value_or(static_cast<std::size_t>(-1));

  std::vector<FrequentPattern> patterns;
  Level current = max_len == 0 ? Level{} : prune(build_candidates_1(data), min_abs);
  std::size_t level_number = 1;

  while (!current.empty()) {
    if (cap != 0 && patterns.size() + current.size() > cap) {
      throw PatternExplosionError(level_number, patterns.size() + current.size(), cap);
    }
    Level next;
    if (level_number < max_len) {
      std::atomic<long long> budget(cap == 0 ? 0
                                             : static_cast<long long>(cap) -
                                                   static_cast<long long>(patterns.size() + current.size()));
      next = detail::join_level(current, min_abs, config.workers, cap == 0 ? nullptr : &budget, level_number + 1,
                                cap);
    }
    patterns.reserve(patterns.size() + current.size());
    for (auto& e : current) patterns.push_back(detail::to_pattern(std::move(e), n, config.emit_tidlists));
    current = std::move(next);
    ++level_number;
  }
  return PatternSet(data.dictionary, std::move(patterns), n, min_abs, config.emit_tidlists);
}

inline PatternSet mine(const AlertDataset& dataset, const MiningConfig& config) {
  if (dataset.empty()) throw EmptyDatasetError();
  return mine(encode(dataset), config);
}

/// Largest item count brute_force_mine enumerates over.
inline constexpr std::size_t kBruteForceItemLimit = 20;

/// Test oracle: enumerates every non-empty itemset over the observed items and
/// keeps those meeting the threshold. Items below the threshold on their own
/// are left out of the enumeration, since no superset of one can qualify.
/// Refuses more than 20 remaining items.
inline PatternSet brute_force_mine(const EncodedDataset& data, const MiningConfig& config) {
  if (data.n() == 0) throw EmptyDatasetError();
  const std::size_t n = data.n();
  const std::size_t min_abs = config.minisupport.resolve(n);

  std::vector<std::size_t> item_support(data.dictionary->size(), 0);
  for (const auto& t : data.transactions) {
    for (ItemId id : t) ++item_support[id];
  }
  std::vector<ItemId> universe;
  for (std::size_t id = 0; id < item_support.size(); ++id) {
    if (item_support[id] >= min_abs) universe.push_back(static_cast<ItemId>(id));
  }
  const std::size_t m = universe.size();
  if (m > kBruteForceItemLimit) {
    throw OracleGuardError("brute-force oracle refuses " + std::to_string(m) + " candidate items (limit " +
                           std::to_string(kBruteForceItemLimit) + ")");
  }
  const std::size_t max_len = config.max_pattern_len.value_or(m);

  std::vector<std::uint32_t> masks;
  masks.reserve(n);
  for (const auto& t : data.transactions) {
    std::uint32_t mask = 0;
    for (std::size_t bit = 0; bit < m; ++bit) {
      if (std::binary_search(t.begin(), t.end(), universe[bit])) mask |= 1u << bit;
    }
    masks.push_back(mask);
  }

  std::vector<FrequentPattern> patterns;
  const std::uint64_t limit = std::uint64_t{1} << m;
  for (std::uint64_t wide = 1; wide < limit; ++wide) {
    const auto set = static_cast<std::uint32_t>(wide);
    if (static_cast<std::size_t>(std::popcount(set)) > max_len) continue;
    FrequentPattern p;
    for (std::size_t tid = 0; tid < n; ++tid) {
      if ((masks[tid] & set) == set) p.tidlist.push_back(static_cast<Tid>(tid));
    }
    if (p.tidlist.size() < min_abs) continue;
    for (std::size_t bit = 0; bit < m; ++bit) {
      if (set & (1u << bit)) p.itemset.push_back(universe[bit]);
    }
    p.support_count = p.tidlist.size();
    p.support_ratio = static_cast<double>(p.support_count) / static_cast<double>(n);
    if (!config.emit_tidlists) p.tidlist.clear();
    patterns.push_back(std::move(p));
  }
  std::sort(patterns.begin(), patterns.end(),
            [](const FrequentPattern& a, const FrequentPattern& b) { return canonical_less(a.itemset, b.itemset); });
  return PatternSet(data.dictionary, std::move(patterns), n, min_abs, config.emit_tidlists);
}

inline PatternSet brute_force_mine(const AlertDataset& dataset, const MiningConfig& config) {
  if (dataset.empty()) throw EmptyDatasetError();
  return brute_force_mine(encode(dataset), config);
}

}  // namespace alertfp
