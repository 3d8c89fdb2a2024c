#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alertfp/alert_model.hpp"
#include "alertfp/error.hpp"
#include "alertfp/ingest.hpp"
#include "alertfp/miner.hpp"
#include "alertfp/scorer.hpp"

namespace alertfp {

/// One line of a minisupport sweep. `error` is set when the row failed.
struct SweepRow {
  std::size_t minisupport_abs = 0;
  std::size_t pattern_count = 0;
  std::size_t last_attack_rank = 0;
  double reduction_pct = 0.0;
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

/// Share of the ranked log an analyst can skip while still seeing every known
/// attack: 100 * (n - last_attack_rank) / n.
inline double reduction(std::size_t n, std::size_t last_attack_rank) {
  if (n == 0 || last_attack_rank < 1 || last_attack_rank > n) {
    throw ConfigError("attack rank " + std::to_string(last_attack_rank) + " outside 1.." + std::to_string(n));
  }
  return 100.0 * static_cast<double>(n - last_attack_rank) / static_cast<double>(n);
}

inline std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

/// 1-based ranks of the attack tids, ascending.
inline std::vector<std::size_t> locate_attacks(const std::vector<ScoredAlert>& ranked,
                                               const std::vector<std::size_t>& attack_tids) {
  if (attack_tids.empty()) throw ConfigError("no attack tids given");
  std::unordered_map<std::size_t, std::size_t> rank_of;
  rank_of.reserve(ranked.size());
  for (const auto& s : ranked) rank_of.emplace(s.tid, s.rank);
  std::vector<std::size_t> ranks;
  ranks.reserve(attack_tids.size());
  for (std::size_t tid : attack_tids) {
    const auto it = rank_of.find(tid);
    if (it == rank_of.end()) throw ConfigError("attack tid " + std::to_string(tid) + " is not in the ranked alerts");
    ranks.push_back(it->second);
  }
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

inline std::vector<std::size_t> locate_attacks(const RankedFile& ranked, const std::vector<std::size_t>& attack_tids) {
  std::vector<ScoredAlert> view;
  view.reserve(ranked.records.size());
  for (const auto& r : ranked.records) {
    ScoredAlert s;
    s.tid = r.tid;
    s.rank = r.rank;
    view.push_back(s);
  }
  return locate_attacks(view, attack_tids);
}

/// Attack-id file: one tid, or a `<field>=<value>` selector such as `cid=1529`,
/// per line. `#` comments and blank lines are ignored.
inline std::vector<std::string> read_attack_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    out.emplace_back(text);
  }
  return out;
}

/// Resolves attack lines to tids. Selectors match a field's canonical value
/// across `records` (field values per tid, schema order).
inline std::vector<std::size_t> resolve_attacks(const std::vector<std::string>& lines,
                                                const std::optional<AttributeSchema>& schema,
                                                const std::vector<std::vector<std::string>>& records) {
  std::vector<std::size_t> tids;
  for (const auto& line : lines) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::size_t tid = 0;
      const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), tid);
      if (ec != std::errc() || ptr != line.data() + line.size()) {
        throw ConfigError("bad attack id '" + line + "'");
      }
      if (tid >= records.size()) throw ConfigError("unknown attack tid " + line);
      tids.push_back(tid);
      continue;
    }
    if (!schema) throw ConfigError("attack selector '" + line + "' needs a schema");
    const auto field = schema->index_of(line.substr(0, eq));
    if (!field) throw ConfigError("attack selector '" + line + "' names an unknown field");
    const std::string want = canonicalize_value(line.substr(eq + 1), schema->field(*field).kind);
    bool found = false;
    for (std::size_t tid = 0; tid < records.size(); ++tid) {
      if (records[tid].size() == schema->size() &&
          canonicalize_value(records[tid][*field], schema->field(*field).kind) == want) {
        tids.push_back(tid);
        found = true;
      }
    }
    if (!found) throw ConfigError("attack selector '" + line + "' matches no alert");
  }
  std::sort(tids.begin(), tids.end());
  tids.erase(std::unique(tids.begin(), tids.end()), tids.end());
  return tids;
}

inline std::vector<std::vector<std::string>> records_of(const AlertDataset& dataset) {
  std::vector<std::vector<std::string>> out;
  out.reserve(dataset.n());
  for (const auto& a : dataset.alerts()) out.push_back(a.values);
  return out;
}

/// Field values of each ranked record indexed by tid, split on `delimiter`.
inline std::vector<std::vector<std::string>> records_of(const RankedFile& ranked, char delimiter) {
  std::vector<std::vector<std::string>> out(ranked.records.size());
  for (const auto& r : ranked.records) {
    if (r.tid >= out.size()) throw ParseError("ranked record tid " + std::to_string(r.tid) + " out of range");
    for (const auto cell : detail::split(r.record, delimiter)) out[r.tid].emplace_back(cell);
  }
  return out;
}

/// Mines, ranks and locates the attacks once per minisupport. A failing row
/// records its error and the sweep moves on.
inline std::vector<SweepRow> sweep(const AlertDataset& dataset, const std::vector<Minisupport>& minisupports,
                                   const std::vector<std::size_t>& attack_tids, const MiningConfig& mining,
                                   const ScoreConfig& scoring) {
  if (minisupports.empty()) throw ConfigError("sweep needs at least one minisupport");
  if (dataset.empty()) throw EmptyDatasetError();
  const EncodedDataset encoded = encode(dataset);
  std::vector<SweepRow> rows;
  rows.reserve(minisupports.size());
  for (const auto& ms : minisupports) {
    SweepRow row;
    row.minisupport_abs = ms.resolve(dataset.n());
    try {
      MiningConfig config = mining;
      config.minisupport = ms;
      config.emit_tidlists = false;
      const PatternSet fps = mine(encoded, config);
      row.pattern_count = fps.count();
      const auto ranked = rank(dataset, fps, scoring);
      const auto ranks = locate_attacks(ranked, attack_tids);
      row.last_attack_rank = ranks.back();
      row.reduction_pct = reduction(dataset.n(), row.last_attack_rank);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// `minisupport<TAB>pattern_count<TAB>last_attack_rank<TAB>reduction_pct`, or
/// `minisupport<TAB>ERROR<TAB><message>` for failed rows.
inline void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  for (const auto& r : rows) {
    if (!r.ok()) {
      out << r.minisupport_abs << "\tERROR\t" << r.error << '\n';
      continue;
    }
    out << r.minisupport_abs << '\t' << r.pattern_count << '\t' << r.last_attack_rank << '\t'
        << format_pct(r.reduction_pct) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Synthetic alert logs

struct SyntheticSpec {
  std::size_t n_records = 28670;
  std::size_t n_attack = 5;
  std::size_t routine_profiles = 7;
  std::uint64_t seed = 20100622;
};

struct SyntheticLog {
  AlertDataset dataset;
  std::vector<std::size_t> attack_tids;
};

/// Column layout of the generated logs: the Snort alert attributes with the
/// two unnamed numeric columns kept as opaque categorical attributes.
inline AttributeSchema snort_schema() {
  return AttributeSchema({{"sid", FieldKind::categorical},
                          {"cid", FieldKind::identifier},
                          {"sig_id", FieldKind::categorical},
                          {"sig_name", FieldKind::categorical},
                          {"attr5", FieldKind::categorical},
                          {"attr6", FieldKind::categorical},
                          {"timestamp", FieldKind::timestamp},
                          {"ip_src", FieldKind::categorical},
                          {"ip_dst", FieldKind::categorical},
                          {"proto", FieldKind::numeric},
                          {"sport", FieldKind::numeric},
                          {"dport", FieldKind::numeric}});
}

namespace detail {

// Unbiased draw in [0, bound) from the raw 64-bit engine output; keeps
// generated logs identical across standard library implementations.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

struct Signature {
  std::string sig_id;
  std::string name;
  std::string attr5;
  std::string attr6;
  std::string proto;
  std::string dport;
};

inline const std::vector<Signature>& routine_catalogue() {
  static const std::vector<Signature> sigs = {
      {"2003", "MS-SQL/Worm/propagation/attempt", "20", "2", "17", "1434"},
      {"2508", "WEB-MISC/robots.txt/access", "21", "2", "6", "80"},
      {"2384", "ICMP/PING/NMAP", "22", "3", "1", "null"},
      {"2466", "NETBIOS/SMB/IPC$/unicode/share/access", "23", "2", "6", "445"},
      {"2648", "DNS/SPOOF/query/response/with/TTL/of/1/min", "24", "3", "17", "53"},
      {"2409", "POLICY/FTP/anonymous/login/attempt", "26", "2", "6", "21"},
      {"2001", "SCAN/SSH/version/map/attempt", "28", "1", "6", "22"},
      {"2520", "WEB-MISC/doc/access", "21", "2", "6", "80"},
      {"2365", "ICMP/Destination/Unreachable/Port/Unreachable", "22", "3", "1", "null"},
      {"2527", "SMTP/expn/root", "26", "2", "6", "25"},
      {"2480", "SHELLCODE/x86/NOOP", "20", "1", "6", "443"},
      {"2553", "WEB-IIS/view/source/via/translate/header", "21", "2", "6", "80"},
  };
  return sigs;
}

struct AttackRecord {
  Signature sig;
  std::string time;
  std::string dst;
  std::string sport;
};

// The five attempted attacks planted in the evaluation log, one attacker.
inline const std::vector<AttackRecord>& attack_catalogue() {
  static const std::vector<AttackRecord> attacks = {
      {{"916", "ARE/BYTE/UNICODE", "0", "3", "6", "null"}, "9:09 AM", "2148203529", "null"},
      {{"748", "FTP/CWD", "38", "2", "6", "21"}, "5:31 PM", "2148203530", "50741"},
      {{"991", "WEB/MISC/Chunked", "31", "1", "6", "80"}, "3:20 PM", "2148203529", "50249"},
      {{"882", "WEB-CGI/cart32.exe/access", "25", "2", "6", "80"}, "3:21 PM", "2148203529", "50708"},
      {{"541", "FTP/CWD~attempt", "34", "2", "6", "21"}, "11:24 AM", "2148203533", "60500"},
  };
  return attacks;
}

inline std::string clock_time(std::uint64_t minute_of_day) {
  const auto h24 = minute_of_day / 60;
  const auto m = minute_of_day % 60;
  const auto h12 = h24 % 12 == 0 ? 12 : h24 % 12;
  return std::to_string(h12) + ":" + (m < 10 ? "0" : "") + std::to_string(m) + (h24 < 12 ? " AM" : " PM");
}

}  // namespace detail

inline constexpr std::string_view kAttackerSource = "1812014676";

/// Generates a one-day alert log dominated by a few routine signatures, with
/// `n_attack` rare alerts from a single source planted at seeded positions.
///
/// Routine profiles fix signature, the two opaque attributes, protocol and
/// destination port; their frequency follows a 1/k law, so the first few
/// profiles produce most alerts. Sources come from a small per-profile pool,
/// destinations from a shared pool of eight internal hosts. Attack values for
/// signature, opaque attributes and destination never occur in routine alerts.
inline SyntheticLog gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n_records == 0) throw ConfigError("synthetic log needs at least one record");
  if (spec.n_attack >= spec.n_records) throw ConfigError("attack count must be below the record count");
  if (spec.routine_profiles == 0) throw ConfigError("synthetic log needs at least one routine profile");

  std::mt19937_64 rng(spec.seed);
  const auto& catalogue = detail::routine_catalogue();

  struct Profile {
    detail::Signature sig;
    std::vector<std::string> sources;
  };
  std::vector<Profile> profiles;
  std::vector<double> cumulative;
  double total_weight = 0.0;
  for (std::size_t p = 0; p < spec.routine_profiles; ++p) {
    Profile prof;
    if (p < catalogue.size()) {
      prof.sig = catalogue[p];
    } else {
      const auto& base = catalogue[p % catalogue.size()];
      prof.sig = {std::to_string(3000 + p), "ROUTINE/SIG/" + std::to_string(p), base.attr5, base.attr6, base.proto,
                  base.dport};
    }
    for (int s = 0; s < 3; ++s) prof.sources.push_back(std::to_string(100000000 + detail::draw(rng, 3000000000ull)));
    profiles.push_back(std::move(prof));
    total_weight += 1.0 / static_cast<double>(p + 1);
    cumulative.push_back(total_weight);
  }

  std::set<std::size_t> attack_positions;
  while (attack_positions.size() < spec.n_attack) attack_positions.insert(detail::draw(rng, spec.n_records));

  const AttributeSchema schema = snort_schema();
  const std::string sensor = "9";
  const std::string date = "6/22/2010";
  std::vector<Alert> alerts;
  alerts.reserve(spec.n_records);
  std::size_t attack_index = 0;

  for (std::size_t tid = 0; tid < spec.n_records; ++tid) {
    std::vector<std::string> v(schema.size());
    v[0] = sensor;
    v[1] = std::to_string(tid + 1);
    if (attack_positions.count(tid)) {
      detail::AttackRecord a;
      if (attack_index < detail::attack_catalogue().size()) {
        a = detail::attack_catalogue()[attack_index];
      } else {
        const auto k = attack_index;
        a.sig = {std::to_string(10000 + k), "ATTACK/PROBE/" + std::to_string(k), std::to_string(40 + k % 50), "1", "6",
                 k % 2 ? "443" : "8080"};
        a.time = detail::clock_time(detail::draw(rng, 1440));
        a.dst = std::to_string(2148203529 + k % 5);
        a.sport = std::to_string(49152 + detail::draw(rng, 16384));
      }
      v[2] = a.sig.sig_id;
      v[3] = a.sig.name;
      v[4] = a.sig.attr5;
      v[5] = a.sig.attr6;
      v[6] = date + " " + a.time;
      v[7] = std::string(kAttackerSource);
      v[8] = a.dst;
      v[9] = a.sig.proto;
      v[10] = a.sport;
      v[11] = a.sig.dport;
      ++attack_index;
    } else {
      const double pick = static_cast<double>(detail::draw(rng, 1u << 30)) / static_cast<double>(1u << 30) * total_weight;
      const std::size_t p = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
      const Profile& prof = profiles[std::min(p, profiles.size() - 1)];
      v[2] = prof.sig.sig_id;
      v[3] = prof.sig.name;
      v[4] = prof.sig.attr5;
      v[5] = prof.sig.attr6;
      v[6] = date + " " + detail::clock_time(detail::draw(rng, 1440));
      v[7] = prof.sources[detail::draw(rng, prof.sources.size())];
      v[8] = std::to_string(2148203600 + detail::draw(rng, 8));
      v[9] = prof.sig.proto;
      v[10] = std::to_string(1024 + detail::draw(rng, 64512));
      v[11] = prof.sig.dport;
    }
    Alert alert;
    alert.tid = tid;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) alert.raw += '\t';
      alert.raw += v[i];
    }
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = canonicalize_value(v[i], schema.field(i).kind);
    alert.values = std::move(v);
    alerts.push_back(std::move(alert));
  }
  return SyntheticLog{AlertDataset(schema, std::move(alerts)),
                      std::vector<std::size_t>(attack_positions.begin(), attack_positions.end())};
}

inline void write_attack_ids(std::ostream& out, const std::vector<std::size_t>& tids) {
  for (std::size_t tid : tids) out << tid << '\n';
}

}  // namespace alertfp
