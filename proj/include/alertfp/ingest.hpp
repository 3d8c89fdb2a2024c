#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "alertfp/alert_model.hpp"
#include "alertfp/error.hpp"

namespace alertfp {

/// Delimited alert-log syntax.
struct LogFormat {
  char delimiter = '\t';
  std::optional<std::string> comment_prefix = std::string("#");
  bool has_header = false;
};

/// A line skipped during parsing, with its 1-based line number.
struct RejectedLine {
  std::size_t line_number = 0;
  std::string reason;
};

struct ParseResult {
  AlertDataset dataset;
  std::vector<RejectedLine> rejects;
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace detail

/// Reads a schema config: one `name<TAB>kind` entry per line, `#` comments and
/// blank lines ignored. Line order is column order.
inline AttributeSchema parse_schema(std::istream& in) {
  std::vector<FieldSpec> fields;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = detail::trim(detail::strip_cr(line));
    if (text.empty() || text.front() == '#') continue;
    const auto cut = text.find_first_of(" \t");
    if (cut == std::string_view::npos) {
      throw SchemaError("schema line " + std::to_string(line_number) + ": expected 'name<TAB>kind'");
    }
    const std::string_view name = text.substr(0, cut);
    const std::string_view kind_text = detail::trim(text.substr(cut + 1));
    const auto kind = parse_field_kind(kind_text);
    if (!kind) {
      throw SchemaError("schema line " + std::to_string(line_number) + ": unknown field kind '" +
                        std::string(kind_text) + "'");
    }
    fields.push_back(FieldSpec{std::string(name), *kind});
  }
  if (in.bad()) throw IoError("read failure while parsing schema");
  if (fields.empty()) throw SchemaError("schema declares no fields");
  return AttributeSchema(std::move(fields));
}

inline AttributeSchema load_schema(const std::string& path) {
  auto in = detail::open_input(path);
  try {
    return parse_schema(in);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

/// Canonical text form of a schema; the input of its fingerprint.
inline std::string schema_to_string(const AttributeSchema& schema) {
  std::string out;
  for (const auto& f : schema.fields()) {
    out += f.name;
    out += '\t';
    out += to_string(f.kind);
    out += '\n';
  }
  return out;
}

/// Parses a delimited alert log. Lines with the wrong column count or
/// unparseable values go to the rejects report and parsing continues.
inline ParseResult parse_log(std::istream& in, const LogFormat& format, const AttributeSchema& schema) {
  if (schema.itemizable_count() == 0) throw SchemaError("schema has no itemizable field");

  std::vector<Alert> alerts;
  std::vector<RejectedLine> rejects;
  std::string line;
  std::size_t line_number = 0;
  bool header_pending = format.has_header;

  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view text = detail::strip_cr(line);
    if (detail::trim(text).empty()) continue;
    if (format.comment_prefix && !format.comment_prefix->empty() && text.starts_with(*format.comment_prefix)) {
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }

    const auto cells = detail::split(text, format.delimiter);
    if (cells.size() != schema.size()) {
      rejects.push_back({line_number, "expected " + std::to_string(schema.size()) + " fields, found " +
                                          std::to_string(cells.size())});
      continue;
    }

    Alert alert;
    alert.tid = alerts.size();
    alert.raw = std::string(text);
    alert.values.reserve(cells.size());
    try {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        alert.values.push_back(canonicalize_value(cells[i], schema.field(i).kind));
      }
      // Surfaces timestamp errors at parse time rather than at mining time.
      (void)itemize(alert, schema);
    } catch (const ParseError& e) {
      rejects.push_back({line_number, e.what()});
      continue;
    }
    alerts.push_back(std::move(alert));
  }
  if (in.bad()) throw IoError("read failure at line " + std::to_string(line_number + 1));
  if (alerts.empty()) throw EmptyDatasetError();
  return ParseResult{AlertDataset(schema, std::move(alerts)), std::move(rejects)};
}

inline ParseResult load_log(const std::string& path, const LogFormat& format, const AttributeSchema& schema) {
  auto in = detail::open_input(path);
  try {
    return parse_log(in, format, schema);
  } catch (const EmptyDatasetError&) {
    throw EmptyDatasetError("no valid alert records in '" + path + "'");
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

/// Debug writer: one line per alert with canonical values in schema order.
inline void write_log(std::ostream& out, const AlertDataset& dataset, const LogFormat& format = {}) {
  for (const auto& alert : dataset.alerts()) {
    for (std::size_t i = 0; i < alert.values.size(); ++i) {
      if (i) out << format.delimiter;
      out << alert.values[i];
    }
    out << '\n';
  }
}

inline void write_rejects(std::ostream& out, const std::vector<RejectedLine>& rejects) {
  for (const auto& r : rejects) out << r.line_number << '\t' << r.reason << '\n';
}

}  // namespace alertfp
