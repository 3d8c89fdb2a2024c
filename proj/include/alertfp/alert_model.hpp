#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "alertfp/error.hpp"

namespace alertfp {

/// How a log column takes part in itemization.
enum class FieldKind { categorical, numeric, timestamp, identifier, ignore };

inline std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::categorical: return "categorical";
    case FieldKind::numeric: return "numeric";
    case FieldKind::timestamp: return "timestamp";
    case FieldKind::identifier: return "identifier";
    case FieldKind::ignore: return "ignore";
  }
  return "ignore";
}

inline std::optional<FieldKind> parse_field_kind(std::string_view text) {
  if (text == "categorical") return FieldKind::categorical;
  if (text == "numeric") return FieldKind::numeric;
  if (text == "timestamp") return FieldKind::timestamp;
  if (text == "identifier") return FieldKind::identifier;
  if (text == "ignore") return FieldKind::ignore;
  return std::nullopt;
}

/// Number of items a fully populated field of this kind contributes.
constexpr std::size_t items_per_field(FieldKind kind) {
  switch (kind) {
    case FieldKind::categorical:
    case FieldKind::numeric: return 1;
    case FieldKind::timestamp: return 2;
    default: return 0;
  }
}

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::categorical;

  bool operator==(const FieldSpec&) const = default;
};

/// Ordered column layout of an alert log.
class AttributeSchema {
 public:
  AttributeSchema() = default;

  explicit AttributeSchema(std::vector<FieldSpec> fields, std::string version = "1")
      : fields_(std::move(fields)), version_(std::move(version)) {
    std::unordered_set<std::string> seen;
    for (const auto& f : fields_) {
      if (f.name.empty()) throw SchemaError("schema field name must not be empty");
      if (!seen.insert(f.name).second) throw SchemaError("duplicate schema field name '" + f.name + "'");
    }
  }

  const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
  const FieldSpec& field(std::size_t i) const { return fields_.at(i); }
  std::size_t size() const noexcept { return fields_.size(); }
  const std::string& version() const noexcept { return version_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (fields_[i].name == name) return i;
    }
    return std::nullopt;
  }

  /// Fields that produce at least one item.
  std::size_t itemizable_count() const {
    return static_cast<std::size_t>(std::count_if(fields_.begin(), fields_.end(), [](const FieldSpec& f) {
      return items_per_field(f.kind) > 0;
    }));
  }

  std::size_t items_per_alert() const {
    std::size_t total = 0;
    for (const auto& f : fields_) total += items_per_field(f.kind);
    return total;
  }

  bool operator==(const AttributeSchema&) const = default;

 private:
  std::vector<FieldSpec> fields_;
  std::string version_ = "1";
};

/// One (column, canonical value) literal.
struct Item {
  std::uint32_t field_index = 0;
  std::string value;

  auto operator<=>(const Item&) const = default;
  bool operator==(const Item&) const = default;
};

struct ItemHash {
  std::size_t operator()(const Item& item) const noexcept {
    return std::hash<std::string>{}(item.value) * 1000003u ^ item.field_index;
  }
};

/// One parsed log record. `raw` keeps the source line for ranked output.
struct Alert {
  std::size_t tid = 0;
  std::vector<std::string> values;
  std::string raw;
};

/// Itemized form of an alert; items sorted in canonical (field_index, value) order.
struct Transaction {
  std::size_t tid = 0;
  std::vector<Item> items;

  bool operator==(const Transaction&) const = default;
};

/// The ordered alert collection. Tids are 0..n-1 in order.
class AlertDataset {
 public:
  AlertDataset() = default;

  AlertDataset(AttributeSchema schema, std::vector<Alert> alerts)
      : schema_(std::move(schema)), alerts_(std::move(alerts)) {
    for (std::size_t i = 0; i < alerts_.size(); ++i) {
      if (alerts_[i].tid != i) {
        throw SchemaError("alert tids must be 0..n-1 in order; found tid " + std::to_string(alerts_[i].tid) +
                          " at position " + std::to_string(i));
      }
      if (alerts_[i].values.size() != schema_.size()) {
        throw SchemaError("alert " + std::to_string(i) + " has " + std::to_string(alerts_[i].values.size()) +
                          " values, schema has " + std::to_string(schema_.size()) + " fields");
      }
    }
  }

  const AttributeSchema& schema() const noexcept { return schema_; }
  const std::vector<Alert>& alerts() const noexcept { return alerts_; }
  const Alert& operator[](std::size_t tid) const { return alerts_.at(tid); }
  std::size_t n() const noexcept { return alerts_.size(); }
  bool empty() const noexcept { return alerts_.empty(); }

 private:
  AttributeSchema schema_;
  std::vector<Alert> alerts_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline bool is_null_token(std::string_view s) { return s == "null" || s == "NULL" || s == "Null"; }

// Reads an unsigned decimal run of 1..max_digits digits starting at pos.
inline std::optional<unsigned> read_number(std::string_view s, std::size_t& pos, std::size_t max_digits) {
  const std::size_t start = pos;
  while (pos < s.size() && pos - start < max_digits && s[pos] >= '0' && s[pos] <= '9') ++pos;
  if (pos == start) return std::nullopt;
  unsigned value = 0;
  std::from_chars(s.data() + start, s.data() + pos, value);
  return value;
}

inline void skip_spaces(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

}  // namespace detail

/// Canonical form of an explicit "null" cell; absence is itself a pattern-able feature.
inline const std::string kNullValue = "null";

/// Normalizes a raw field value for its kind.
///
/// Numeric values lose thousands separators and leading zeros ("46,865" -> "46865",
/// "007" -> "7"); all other kinds are whitespace-trimmed only. A "null" token
/// canonicalizes to "null"; an empty cell stays empty and yields no item.
inline std::string canonicalize_value(std::string_view raw, FieldKind kind) {
  const std::string_view v = detail::trim(raw);
  if (kind == FieldKind::timestamp || kind == FieldKind::identifier || kind == FieldKind::ignore) {
    return std::string(v);
  }
  if (v.empty()) return {};
  if (detail::is_null_token(v)) return kNullValue;
  if (kind == FieldKind::categorical) return std::string(v);

  std::string digits;
  digits.reserve(v.size());
  bool negative = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const char c = v[i];
    if (c == '-' && i == 0) {
      negative = true;
    } else if (c == ',') {
      continue;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
    } else {
      throw ParseError("numeric value '" + std::string(v) + "' has non-numeric residue");
    }
  }
  if (digits.empty()) throw ParseError("numeric value '" + std::string(v) + "' has no digits");
  const auto nz = digits.find_first_not_of('0');
  std::string out = nz == std::string::npos ? std::string("0") : digits.substr(nz);
  if (negative && out != "0") out.insert(out.begin(), '-');
  return out;
}

/// Splits "M/D/YYYY H:MM[:SS] AM|PM" into a date part and a minute-resolution
/// time part, e.g. "6/11/2010 8:57 AM" -> ("6/11/2010", "8:57AM"). Seconds are dropped.
inline std::pair<std::string, std::string> split_timestamp(std::string_view raw) {
  const std::string_view s = detail::trim(raw);
  auto fail = [&]() -> ParseError {
    return ParseError("timestamp '" + std::string(s) + "' does not match M/D/YYYY H:MM AM|PM");
  };
  std::size_t pos = 0;
  const auto month = detail::read_number(s, pos, 2);
  if (!month || pos >= s.size() || s[pos] != '/') throw fail();
  ++pos;
  const auto day = detail::read_number(s, pos, 2);
  if (!day || pos >= s.size() || s[pos] != '/') throw fail();
  ++pos;
  const std::size_t year_start = pos;
  const auto year = detail::read_number(s, pos, 4);
  if (!year || pos - year_start != 4) throw fail();
  if (*month < 1 || *month > 12 || *day < 1 || *day > 31) throw fail();

  const std::size_t before_time = pos;
  detail::skip_spaces(s, pos);
  if (pos == before_time) throw fail();
  const auto hour = detail::read_number(s, pos, 2);
  if (!hour || pos >= s.size() || s[pos] != ':') throw fail();
  ++pos;
  const std::size_t minute_start = pos;
  const auto minute = detail::read_number(s, pos, 2);
  if (!minute || pos - minute_start != 2) throw fail();
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    const std::size_t sec_start = pos;
    const auto second = detail::read_number(s, pos, 2);
    if (!second || pos - sec_start != 2 || *second > 59) throw fail();
  }
  detail::skip_spaces(s, pos);
  if (s.size() - pos != 2) throw fail();
  const char m0 = static_cast<char>(s[pos] & ~0x20);
  const char m1 = static_cast<char>(s[pos + 1] & ~0x20);
  if ((m0 != 'A' && m0 != 'P') || m1 != 'M') throw fail();
  if (*hour < 1 || *hour > 12 || *minute > 59) throw fail();

  std::string date = std::to_string(*month) + "/" + std::to_string(*day) + "/" + std::string(s.substr(year_start, 4));
  std::string time = std::to_string(*hour) + ":" + (*minute < 10 ? "0" : "") + std::to_string(*minute) + m0 + "M";
  return {std::move(date), std::move(time)};
}

/// Converts an alert into its itemized transaction: one item per categorical or
/// numeric field, two per timestamp field (date, time), none for identifier and
/// ignore fields. Empty cells, and "null" timestamps, contribute nothing.
inline Transaction itemize(const Alert& alert, const AttributeSchema& schema) {
  if (alert.values.size() != schema.size()) {
    throw SchemaError("alert " + std::to_string(alert.tid) + " has " + std::to_string(alert.values.size()) +
                      " values, schema has " + std::to_string(schema.size()) + " fields");
  }
  Transaction t;
  t.tid = alert.tid;
  t.items.reserve(schema.items_per_alert());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FieldSpec& field = schema.field(i);
    const auto index = static_cast<std::uint32_t>(i);
    try {
      switch (field.kind) {
        case FieldKind::categorical:
        case FieldKind::numeric: {
          std::string value = canonicalize_value(alert.values[i], field.kind);
          if (!value.empty()) t.items.push_back(Item{index, std::move(value)});
          break;
        }
        case FieldKind::timestamp: {
          const auto raw = detail::trim(alert.values[i]);
          if (raw.empty() || detail::is_null_token(raw)) break;
          auto [date, time] = split_timestamp(alert.values[i]);
          t.items.push_back(Item{index, std::move(date)});
          t.items.push_back(Item{index, std::move(time)});
          break;
        }
        case FieldKind::identifier:
        case FieldKind::ignore: break;
      }
    } catch (const ParseError& e) {
      throw ParseError("field '" + field.name + "' of alert tid " + std::to_string(alert.tid) + ": " + e.what());
    }
  }
  std::sort(t.items.begin(), t.items.end());
  t.items.erase(std::unique(t.items.begin(), t.items.end()), t.items.end());
  return t;
}

}  // namespace alertfp
