#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "alertfp/alert_model.hpp"
#include "alertfp/error.hpp"
#include "alertfp/ingest.hpp"
#include "alertfp/miner.hpp"
#include "alertfp/parallel.hpp"

namespace alertfp {

enum class Metric { simple, fpof };

inline std::string_view to_string(Metric m) { return m == Metric::simple ? "simple" : "fpof"; }

inline Metric parse_metric(std::string_view text) {
  if (text == "simple") return Metric::simple;
  if (text == "fpof") return Metric::fpof;
  throw ConfigError("unknown score metric '" + std::string(text) + "'; expected simple or fpof");
}

struct ScoreConfig {
  Metric metric = Metric::simple;
  /// Percentage in (0, 100] used by top_candidates.
  double top_p = 100.0;
  std::size_t workers = 1;
};

/// An alert's weight. fpof = support_sum / (n_train * |FPS|).
struct ScoredAlert {
  std::size_t tid = 0;
  std::uint64_t simple_fpof = 0;
  double fpof = 0.0;
  /// 1-based position after sorting.
  std::size_t rank = 0;
  /// Sum of absolute support counts of the contained patterns.
  std::uint64_t support_sum = 0;

  bool operator==(const ScoredAlert&) const = default;
};

/// Prefix trie over canonical itemsets. A transaction's contained patterns are
/// found by walking only the branches labelled with its own items.
class PatternIndex {
 public:
  struct Entry {
    Itemset itemset;
    std::size_t support_count = 0;
  };

  PatternIndex(std::shared_ptr<const ItemDictionary> dictionary, const std::vector<Entry>& entries, std::size_t n_train)
      : dictionary_(std::move(dictionary)), n_train_(n_train), pattern_count_(entries.size()) {
    nodes_.emplace_back();
    for (const auto& e : entries) {
      std::uint32_t node = 0;
      for (ItemId id : e.itemset) node = child_or_insert(node, id);
      nodes_[node].is_pattern = true;
      nodes_[node].support = e.support_count;
    }
  }

  explicit PatternIndex(const PatternSet& fps) : PatternIndex(fps.dictionary_ptr(), entries_of(fps), fps.n()) {}

  std::size_t pattern_count() const noexcept { return pattern_count_; }
  std::size_t n_train() const noexcept { return n_train_; }
  const ItemDictionary& dictionary() const { return *dictionary_; }

  /// Maps a transaction onto this index's item ids; items no pattern uses are dropped.
  Itemset encode(const Transaction& t) const {
    Itemset ids;
    ids.reserve(t.items.size());
    for (const auto& item : t.items) {
      if (const auto id = dictionary_->find(item)) ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  /// (contained pattern count, sum of their support counts).
  std::pair<std::uint64_t, std::uint64_t> contained(const Itemset& ids) const {
    std::uint64_t count = 0;
    std::uint64_t sum = 0;
    walk(0, ids, 0, count, sum);
    return {count, sum};
  }

  ScoredAlert score(std::size_t tid, const Itemset& ids) const {
    const auto [count, sum] = contained(ids);
    ScoredAlert s;
    s.tid = tid;
    s.simple_fpof = count;
    s.support_sum = sum;
    s.fpof = fpof_of(sum);
    return s;
  }

  double fpof_of(std::uint64_t support_sum) const {
    if (pattern_count_ == 0) throw EmptyPatternSetError();
    return static_cast<double>(support_sum) / (static_cast<double>(n_train_) * static_cast<double>(pattern_count_));
  }

 private:
  struct Node {
    std::vector<std::pair<ItemId, std::uint32_t>> children;  // sorted by item
    bool is_pattern = false;
    std::size_t support = 0;
  };

  static std::vector<Entry> entries_of(const PatternSet& fps) {
    std::vector<Entry> out;
    out.reserve(fps.count());
    for (const auto& p : fps.patterns()) out.push_back({p.itemset, p.support_count});
    return out;
  }

  std::uint32_t child_or_insert(std::uint32_t node, ItemId id) {
    auto& kids = nodes_[node].children;
    auto it = std::lower_bound(kids.begin(), kids.end(), id, [](const auto& c, ItemId v) { return c.first < v; });
    if (it != kids.end() && it->first == id) return it->second;
    const auto fresh = static_cast<std::uint32_t>(nodes_.size());
    kids.insert(it, {id, fresh});
    nodes_.emplace_back();
    return fresh;
  }

  void walk(std::uint32_t node, const Itemset& ids, std::size_t start, std::uint64_t& count,
            std::uint64_t& sum) const {
    const auto& kids = nodes_[node].children;
    if (kids.empty()) return;
    auto lo = kids.begin();
    for (std::size_t p = start; p < ids.size() && lo != kids.end(); ++p) {
      lo = std::lower_bound(lo, kids.end(), ids[p], [](const auto& c, ItemId v) { return c.first < v; });
      if (lo == kids.end()) break;
      if (lo->first != ids[p]) continue;
      const Node& child = nodes_[lo->second];
      if (child.is_pattern) {
        ++count;
        sum += child.support;
      }
      walk(lo->second, ids, p + 1, count, sum);
      ++lo;
    }
  }

  std::shared_ptr<const ItemDictionary> dictionary_;
  std::vector<Node> nodes_;
  std::size_t n_train_ = 0;
  std::size_t pattern_count_ = 0;
};

/// Number of frequent patterns contained in t.
inline std::uint64_t simple_fpof(const Transaction& t, const PatternSet& fps) {
  const PatternIndex index(fps);
  return index.contained(index.encode(t)).first;
}

/// Sum of the support ratios of the frequent patterns contained in t, divided by |FPS|.
inline double fpof(const Transaction& t, const PatternSet& fps) {
  if (fps.empty()) throw EmptyPatternSetError();
  const PatternIndex index(fps);
  return index.fpof_of(index.contained(index.encode(t)).second);
}

/// Scores every alert and sorts ascending by the configured metric, ties by tid.
inline std::vector<ScoredAlert> rank(const AlertDataset& dataset, const PatternIndex& index,
                                     const ScoreConfig& config) {
  if (dataset.empty()) throw EmptyDatasetError();
  if (index.pattern_count() == 0) throw EmptyPatternSetError();
  std::vector<ScoredAlert> scored(dataset.n());
  parallel_chunks(dataset.n(), config.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t tid = begin; tid < end; ++tid) {
      scored[tid] = index.score(tid, index.encode(itemize(dataset[tid], dataset.schema())));
    }
  });
  // fpof shares one denominator, so ordering by support_sum is exact.
  const auto key = [&](const ScoredAlert& s) { return config.metric == Metric::simple ? s.simple_fpof : s.support_sum; };
  std::sort(scored.begin(), scored.end(), [&](const ScoredAlert& a, const ScoredAlert& b) {
    const auto ka = key(a);
    const auto kb = key(b);
    return ka != kb ? ka < kb : a.tid < b.tid;
  });
  for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = i + 1;
  return scored;
}

inline std::vector<ScoredAlert> rank(const AlertDataset& dataset, const PatternSet& fps, const ScoreConfig& config) {
  if (fps.empty()) throw EmptyPatternSetError();
  return rank(dataset, PatternIndex(fps), config);
}

/// Number of alerts in the top p% of n, rounded up.
inline std::size_t top_count(std::size_t n, double top_p) {
  if (!(top_p > 0.0 && top_p <= 100.0)) throw ConfigError("top-p must be in (0, 100]");
  const double v = static_cast<double>(n) * top_p / 100.0;
  const double c = std::ceil(v - 1e-9 * std::max(1.0, v));
  return std::min(n, static_cast<std::size_t>(std::max(0.0, c)));
}

/// Tids of the first ceil(n * top_p / 100) ranked alerts, in rank order.
inline std::vector<std::size_t> top_candidates(const std::vector<ScoredAlert>& ranked, double top_p) {
  const std::size_t k = top_count(ranked.size(), top_p);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].tid);
  return out;
}

inline std::string format_fpof(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

/// Ranked output: `# alertfp-ranked v1 n=<n> metric=<m>` then
/// `rank<TAB>tid<TAB>simple_fpof<TAB>fpof<TAB>original_record` per alert.
inline void write_ranked(std::ostream& out, const std::vector<ScoredAlert>& ranked, const AlertDataset& dataset,
                         Metric metric, char delimiter = '\t') {
  out << "# alertfp-ranked v1 n=" << dataset.n() << " metric=" << to_string(metric) << '\n';
  for (const auto& s : ranked) {
    out << s.rank << '\t' << s.tid << '\t' << s.simple_fpof << '\t' << format_fpof(s.fpof) << '\t';
    const Alert& alert = dataset[s.tid];
    if (!alert.raw.empty()) {
      out << alert.raw;
    } else {
      for (std::size_t i = 0; i < alert.values.size(); ++i) {
        if (i) out << delimiter;
        out << alert.values[i];
      }
    }
    out << '\n';
  }
}

struct RankedRecord {
  std::size_t rank = 0;
  std::size_t tid = 0;
  std::uint64_t simple_fpof = 0;
  double fpof = 0.0;
  std::string record;
};

struct RankedFile {
  std::size_t n = 0;
  Metric metric = Metric::simple;
  std::vector<RankedRecord> records;
};

inline RankedFile read_ranked(std::istream& in) {
  RankedFile file;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("ranked file is empty");
  constexpr std::string_view magic = "# alertfp-ranked v1 n=";
  if (!std::string_view(line).starts_with(magic)) throw ParseError("ranked file: bad header '" + line + "'");
  {
    const auto rest = line.substr(magic.size());
    const auto space = rest.find(" metric=");
    if (space == std::string::npos) throw ParseError("ranked file: header lacks metric");
    try {
      file.n = std::stoull(rest.substr(0, space));
    } catch (const std::exception&) {
      throw ParseError("ranked file: bad n in header");
    }
    file.metric = parse_metric(detail::trim(std::string_view(rest).substr(space + 8)));
  }
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, '\t');
    if (cells.size() < 5) throw ParseError("ranked file line " + std::to_string(line_number) + ": too few columns");
    RankedRecord r;
    try {
      r.rank = std::stoull(std::string(cells[0]));
      r.tid = std::stoull(std::string(cells[1]));
      r.simple_fpof = std::stoull(std::string(cells[2]));
      r.fpof = std::stod(std::string(cells[3]));
    } catch (const std::exception&) {
      throw ParseError("ranked file line " + std::to_string(line_number) + ": bad numeric column");
    }
    const auto offset = cells[4].data() - line.data();
    r.record = line.substr(static_cast<std::size_t>(offset));
    file.records.push_back(std::move(r));
  }
  if (file.records.size() != file.n) {
    throw ParseError("ranked file declares n=" + std::to_string(file.n) + " but has " +
                     std::to_string(file.records.size()) + " records");
  }
  return file;
}

}  // namespace alertfp
