#pragma once

// Classifier models: a mined pattern set persisted with enough provenance to
// score later alert logs against it.
//
// File layout (line-oriented text):
//
//   # alertfp-model v1
//   n_train=<int>
//   minisupport=<int>
//   schema_fp=<hex>
//   built_at=<text>            optional
//   patterns=<int>
//   <support><TAB><field>=<value>,<field>=<value>,...[<TAB><tid>,<tid>,...]
//
// Values are %-escaped for ',', '=', '%', tab, CR and newline. Items within a
// pattern and patterns within the file are in canonical order.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "alertfp/alert_model.hpp"
#include "alertfp/error.hpp"
#include "alertfp/ingest.hpp"
#include "alertfp/miner.hpp"
#include "alertfp/scorer.hpp"

namespace alertfp {

inline constexpr int kModelFormatVersion = 1;

/// 64-bit FNV-1a of the schema's canonical text, as 16 hex digits.
inline std::string schema_fingerprint(const AttributeSchema& schema) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : schema_to_string(schema)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct StoredPattern {
  std::vector<Item> itemset;
  std::size_t support_count = 0;
  /// Present only in audit models.
  std::vector<Tid> tidlist;

  bool operator==(const StoredPattern&) const = default;
};

struct ClassifierModel {
  int format_version = kModelFormatVersion;
  std::string schema_fingerprint;
  std::string built_at;
  std::size_t n_train = 0;
  std::size_t minisupport_abs = 1;
  std::vector<StoredPattern> patterns;

  std::size_t pattern_count() const noexcept { return patterns.size(); }
  bool operator==(const ClassifierModel&) const = default;
};

struct SaveOptions {
  bool with_tidlists = false;
  std::string built_at;
};

inline ClassifierModel make_model(const PatternSet& fps, const AttributeSchema& schema, const SaveOptions& options = {}) {
  if (fps.empty()) {
    throw ModelError("refusing to build a model from an empty pattern set; lower the minisupport");
  }
  if (options.with_tidlists && !fps.has_tidlists()) {
    throw ModelError("tidlists requested but the pattern set was mined without them");
  }
  ClassifierModel model;
  model.schema_fingerprint = schema_fingerprint(schema);
  model.built_at = options.built_at;
  model.n_train = fps.n();
  model.minisupport_abs = fps.minisupport();
  model.patterns.reserve(fps.count());
  for (const auto& p : fps.patterns()) {
    StoredPattern s;
    s.itemset = fps.items_of(p);
    s.support_count = p.support_count;
    if (options.with_tidlists) s.tidlist = p.tidlist;
    model.patterns.push_back(std::move(s));
  }
  return model;
}

namespace detail {

inline bool needs_escape(char c) {
  return c == ',' || c == '=' || c == '%' || c == '\t' || c == '\n' || c == '\r';
}

inline std::string escape_value(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (char c : v) {
    if (needs_escape(c)) {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string unescape_value(std::string_view v) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != '%') {
      out += v[i];
      continue;
    }
    if (i + 2 >= v.size()) throw ParseError("truncated %-escape");
    const int hi = hex(v[i + 1]);
    const int lo = hex(v[i + 2]);
    if (hi < 0 || lo < 0) throw ParseError("bad %-escape");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

inline bool itemset_less(const std::vector<Item>& a, const std::vector<Item>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline std::size_t parse_count(std::string_view text, const std::string& what) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("bad " + what + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

inline void write_model(std::ostream& out, const ClassifierModel& model) {
  out << "# alertfp-model v" << model.format_version << '\n';
  out << "n_train=" << model.n_train << '\n';
  out << "minisupport=" << model.minisupport_abs << '\n';
  out << "schema_fp=" << model.schema_fingerprint << '\n';
  if (!model.built_at.empty()) out << "built_at=" << model.built_at << '\n';
  out << "patterns=" << model.patterns.size() << '\n';
  for (const auto& p : model.patterns) {
    out << p.support_count << '\t';
    for (std::size_t i = 0; i < p.itemset.size(); ++i) {
      if (i) out << ',';
      out << p.itemset[i].field_index << '=' << detail::escape_value(p.itemset[i].value);
    }
    if (!p.tidlist.empty()) {
      out << '\t';
      for (std::size_t i = 0; i < p.tidlist.size(); ++i) {
        if (i) out << ',';
        out << p.tidlist[i];
      }
    }
    out << '\n';
  }
}

/// Parses and validates a model; errors name the offending line.
inline ClassifierModel read_model(std::istream& in) {
  ClassifierModel model;
  std::string line;
  std::size_t line_number = 0;
  auto corrupt = [&](const std::string& why) {
    return ModelError("model line " + std::to_string(line_number) + ": " + why);
  };
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next()) throw ModelError("model file is empty");
  constexpr std::string_view magic = "# alertfp-model v";
  if (!std::string_view(line).starts_with(magic)) throw corrupt("missing '# alertfp-model' header");
  const std::string version = line.substr(magic.size());
  if (version != std::to_string(kModelFormatVersion)) {
    throw ModelError("unsupported model format version 'v" + version + "' (expected v" +
                     std::to_string(kModelFormatVersion) + ")");
  }

  auto keyed = [&](std::string_view key) -> std::string {
    if (!next()) throw corrupt("unexpected end of file, expected '" + std::string(key) + "='");
    if (!std::string_view(line).starts_with(key) || line.size() <= key.size() || line[key.size()] != '=') {
      throw corrupt("expected '" + std::string(key) + "='");
    }
    return line.substr(key.size() + 1);
  };

  try {
    model.n_train = detail::parse_count(keyed("n_train"), "n_train");
    model.minisupport_abs = detail::parse_count(keyed("minisupport"), "minisupport");
    model.schema_fingerprint = keyed("schema_fp");
    if (!next()) throw corrupt("unexpected end of file, expected 'patterns='");
    if (std::string_view(line).starts_with("built_at=")) {
      model.built_at = line.substr(9);
      if (!next()) throw corrupt("unexpected end of file, expected 'patterns='");
    }
    if (!std::string_view(line).starts_with("patterns=")) throw corrupt("expected 'patterns='");
    const std::size_t declared = detail::parse_count(std::string_view(line).substr(9), "pattern count");
    if (model.n_train == 0) throw corrupt("n_train must be positive");
    if (model.minisupport_abs == 0) throw corrupt("minisupport must be positive");

    model.patterns.reserve(std::min<std::size_t>(declared, 1u << 20));
    while (next()) {
      if (line.empty()) continue;
      const auto cells = detail::split(line, '\t');
      if (cells.size() != 2 && cells.size() != 3) throw corrupt("expected 'support<TAB>items[<TAB>tids]'");
      StoredPattern p;
      p.support_count = detail::parse_count(cells[0], "support count");
      if (cells[1].empty()) throw corrupt("empty itemset");
      for (const auto item_text : detail::split(cells[1], ',')) {
        const auto eq = item_text.find('=');
        if (eq == std::string_view::npos) throw corrupt("item lacks '='");
        Item item;
        item.field_index = static_cast<std::uint32_t>(detail::parse_count(item_text.substr(0, eq), "field index"));
        item.value = detail::unescape_value(item_text.substr(eq + 1));
        if (!p.itemset.empty() && !(p.itemset.back() < item)) throw corrupt("items not in canonical order");
        p.itemset.push_back(std::move(item));
      }
      if (cells.size() == 3) {
        for (const auto tid_text : detail::split(cells[2], ',')) {
          const auto tid = static_cast<Tid>(detail::parse_count(tid_text, "tid"));
          if (!p.tidlist.empty() && p.tidlist.back() >= tid) throw corrupt("tidlist not strictly increasing");
          if (tid >= model.n_train) throw corrupt("tid " + std::to_string(tid) + " outside 0..n_train-1");
          p.tidlist.push_back(tid);
        }
        if (p.tidlist.size() != p.support_count) throw corrupt("tidlist length differs from support count");
      }
      if (p.support_count > model.n_train) {
        throw corrupt("invariant breach: support " + std::to_string(p.support_count) + " exceeds n_train " +
                      std::to_string(model.n_train));
      }
      if (p.support_count < model.minisupport_abs) {
        throw corrupt("invariant breach: support " + std::to_string(p.support_count) + " below minisupport " +
                      std::to_string(model.minisupport_abs));
      }
      if (!model.patterns.empty() && !detail::itemset_less(model.patterns.back().itemset, p.itemset)) {
        throw corrupt("patterns not in canonical order or duplicated");
      }
      model.patterns.push_back(std::move(p));
    }
    if (model.patterns.size() != declared) {
      throw ModelError("model declares patterns=" + std::to_string(declared) + " but holds " +
                       std::to_string(model.patterns.size()));
    }
  } catch (const ParseError& e) {
    throw corrupt(e.what());
  }
  if (in.bad()) throw IoError("read failure in model file");
  return model;
}

/// Writes through a temporary file and renames it over `path`.
inline void save_model(const ClassifierModel& model, const std::string& path) {
  if (model.patterns.empty()) {
    throw ModelError("refusing to save a model with no patterns; lower the minisupport");
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    write_model(out, model);
    out.flush();
    if (!out) throw IoError("write failure on '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move model into place at '" + path + "'");
  }
}

inline void save_model(const PatternSet& fps, const AttributeSchema& schema, const std::string& path,
                       const SaveOptions& options = {}) {
  save_model(make_model(fps, schema, options), path);
}

inline ClassifierModel load_model(const std::string& path) {
  auto in = detail::open_input(path);
  try {
    return read_model(in);
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

/// Pattern index over a model's itemsets, with supports relative to n_train.
inline PatternIndex make_index(const ClassifierModel& model) {
  std::vector<Item> all;
  for (const auto& p : model.patterns) all.insert(all.end(), p.itemset.begin(), p.itemset.end());
  auto dict = std::make_shared<const ItemDictionary>(std::move(all));
  std::vector<PatternIndex::Entry> entries;
  entries.reserve(model.patterns.size());
  for (const auto& p : model.patterns) {
    PatternIndex::Entry e;
    e.support_count = p.support_count;
    e.itemset.reserve(p.itemset.size());
    for (const auto& item : p.itemset) e.itemset.push_back(*dict->find(item));
    entries.push_back(std::move(e));
  }
  return PatternIndex(std::move(dict), entries, model.n_train);
}

/// Ranks fresh alerts against a stored model. The alerts' schema must match
/// the model's fingerprint unless `force_schema` is set.
inline std::vector<ScoredAlert> score_new(const AlertDataset& alerts, const ClassifierModel& model,
                                          const ScoreConfig& config, bool force_schema = false) {
  const std::string fp = schema_fingerprint(alerts.schema());
  if (fp != model.schema_fingerprint && !force_schema) {
    throw FingerprintMismatchError("schema fingerprint " + fp + " does not match the model's " +
                                   model.schema_fingerprint + " (pass --force-schema to override)");
  }
  return rank(alerts, make_index(model), config);
}

}  // namespace alertfp
