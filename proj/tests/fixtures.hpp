#pragma once

// Shared datasets and independent oracles for the test suites. The oracles
// work on plain Item vectors and never touch ItemDictionary, encode() or the
// pattern index, so they check the library rather than restate it.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "alertfp/alertfp.hpp"

namespace alertfp::testing {

inline AlertDataset parse_text(const std::string& text, const AttributeSchema& schema) {
  std::istringstream in(text);
  return parse_log(in, LogFormat{}, schema).dataset;
}

inline AttributeSchema presence_schema(std::size_t columns) {
  std::vector<FieldSpec> fields;
  for (std::size_t i = 0; i < columns; ++i) fields.push_back({"item" + std::to_string(i + 1), FieldKind::categorical});
  return AttributeSchema(std::move(fields));
}

/// Four alerts over items 1..5, one column per item.
inline AlertDataset basket() {
  return parse_text("1\t\t3\t4\t\n"
                    "\t2\t3\t\t5\n"
                    "1\t2\t3\t\t5\n"
                    "\t2\t\t\t5\n",
                    presence_schema(5));
}

/// Item k of the presence-matrix datasets.
inline Item item(int k) { return Item{static_cast<std::uint32_t>(k - 1), std::to_string(k)}; }

inline std::vector<Item> items(std::initializer_list<int> ks) {
  std::vector<Item> out;
  for (int k : ks) out.push_back(item(k));
  return out;
}

inline const char* kSnortSample =
    "7\t1\t508\tWEB-MISC/doc/access\t25\t2\t6/11/2010 8:57 AM\t1136881320\t2148203530\t6\t46,865\t80\n"
    "7\t2\t508\tWEB-MISC/robots.txt/access\t25\t2\t6/11/2010 8:57 AM\t3632363311\t2148203629\t6\t34,074\t80\n"
    "7\t3\t508\tWEB-MISC/robots.txt/access\t25\t2\t8/11/2010 8:59 AM\t3632363313\t2148203229\t6\t34,075\t80\n";

/// The three-alert Snort sample.
inline AlertDataset snort_sample() { return parse_text(kSnortSample, snort_schema()); }

using ItemVec = std::vector<Item>;
using OraclePatterns = std::map<ItemVec, std::vector<std::size_t>>;

inline std::vector<ItemVec> itemized(const AlertDataset& d) {
  std::vector<ItemVec> out;
  for (const auto& a : d.alerts()) out.push_back(itemize(a, d.schema()).items);
  return out;
}

/// Every non-empty itemset with support >= min_abs, keyed by sorted items,
/// valued by tidlist. Exhaustive over the observed items.
inline OraclePatterns oracle_mine(const AlertDataset& d, std::size_t min_abs) {
  const auto txs = itemized(d);
  std::set<Item> universe;
  for (const auto& t : txs) universe.insert(t.begin(), t.end());
  const std::vector<Item> all(universe.begin(), universe.end());
  OraclePatterns out;
  const std::uint64_t limit = std::uint64_t{1} << all.size();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    ItemVec set;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (mask >> i & 1u) set.push_back(all[i]);
    }
    std::vector<std::size_t> tids;
    for (std::size_t tid = 0; tid < txs.size(); ++tid) {
      if (std::includes(txs[tid].begin(), txs[tid].end(), set.begin(), set.end())) tids.push_back(tid);
    }
    if (tids.size() >= min_abs) out.emplace(std::move(set), std::move(tids));
  }
  return out;
}

/// The library's pattern set in oracle form.
inline OraclePatterns as_oracle(const PatternSet& fps) {
  OraclePatterns out;
  for (const auto& p : fps.patterns()) {
    out.emplace(fps.items_of(p), std::vector<std::size_t>(p.tidlist.begin(), p.tidlist.end()));
  }
  return out;
}

/// (count, fpof) of transaction t by direct subset tests against `patterns`.
inline std::pair<std::uint64_t, double> oracle_score(const ItemVec& t, const OraclePatterns& patterns, std::size_t n) {
  std::uint64_t count = 0;
  double ratio_sum = 0.0;
  for (const auto& [set, tids] : patterns) {
    if (std::includes(t.begin(), t.end(), set.begin(), set.end())) {
      ++count;
      ratio_sum += static_cast<double>(tids.size()) / static_cast<double>(n);
    }
  }
  return {count, patterns.empty() ? 0.0 : ratio_sum / static_cast<double>(patterns.size())};
}

/// Random presence-style dataset: up to 30 alerts over up to 12 distinct
/// items spread across a few columns, with empty cells.
inline AlertDataset random_dataset(std::mt19937_64& rng) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
  };
  const std::size_t columns = pick(1, 6);
  const std::size_t values_per_column = std::max<std::size_t>(1, std::min<std::size_t>(pick(1, 3), 12 / columns));
  const std::size_t n = pick(1, 30);
  const double fill = 0.3 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0;
  std::ostringstream text;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < columns; ++c) {
      if (c) text << '\t';
      if (static_cast<double>(rng() % 1000) / 1000.0 < fill) text << 'v' << pick(0, values_per_column - 1);
    }
    text << '\n';
  }
  std::vector<Alert> alerts;
  std::istringstream in(text.str());
  const AttributeSchema schema = presence_schema(columns);
  // Rows with every cell empty read as blank lines, so build alerts directly.
  std::string line;
  std::size_t tid = 0;
  while (std::getline(in, line)) {
    Alert a;
    a.tid = tid++;
    for (const auto cell : detail::split(line, '\t')) a.values.emplace_back(cell);
    a.raw = line;
    alerts.push_back(std::move(a));
  }
  return AlertDataset(schema, std::move(alerts));
}

}  // namespace alertfp::testing
