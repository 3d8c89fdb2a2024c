// alertfp: rank IDS alerts by frequent-pattern outlier factor.
//
// Exit codes: 0 success, 1 usage, 2 I/O or parse failure, 3 mining guard
// tripped, 4 schema fingerprint mismatch.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alertfp/alertfp.hpp"

namespace {

using namespace alertfp;

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kGuard = 3, kFingerprint = 4 };

/// Attack selector failures map to the I/O class.
struct AttackError : Error {
  using Error::Error;
};

struct Options {
  std::string input;
  std::string schema;
  std::string out;
  std::string minisupport;
  std::string metric = "simple";
  std::optional<double> top_p;
  std::string candidates;
  std::size_t workers = default_workers();
  std::uint64_t seed = 20100622;
  std::string delimiter = "\\t";
  bool force_schema = false;
  std::size_t max_patterns = 5'000'000;
  std::optional<std::size_t> max_len;
  bool header = false;
  std::string rejects;
  // mine
  bool tidlists = false;
  std::string built_at;
  // score
  std::string model;
  // eval / sweep
  std::string ranked;
  std::string attacks;
  // gen
  std::size_t records = 28670;
  std::size_t attack_count = 5;
  std::size_t profiles = 7;
  std::string attacks_out;
  std::string schema_out;
};

char parse_delimiter(const std::string& text) {
  if (text == "\\t" || text == "tab" || text == "\t") return '\t';
  if (text.size() == 1) return text[0];
  throw ConfigError("delimiter must be a single character or 'tab'");
}

LogFormat log_format(const Options& o) {
  LogFormat f;
  f.delimiter = parse_delimiter(o.delimiter);
  f.has_header = o.header;
  return f;
}

AlertDataset read_alerts(const Options& o) {
  const AttributeSchema schema = load_schema(o.schema);
  ParseResult result = load_log(o.input, log_format(o), schema);
  if (!result.rejects.empty()) {
    std::cerr << "alertfp: rejected " << result.rejects.size() << " malformed line(s) in " << o.input << '\n';
    if (!o.rejects.empty()) {
      std::ofstream out(o.rejects, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open '" + o.rejects + "' for writing");
      write_rejects(out, result.rejects);
    }
  }
  return std::move(result.dataset);
}

// The sweep overrides minisupport per row, so it skips parsing the flag here.
MiningConfig mining_config(const Options& o, bool parse_minisupport = true) {
  MiningConfig c;
  if (parse_minisupport) c.minisupport = Minisupport::parse(o.minisupport);
  c.max_pattern_len = o.max_len;
  c.max_patterns = o.max_patterns;
  c.workers = o.workers;
  return c;
}

ScoreConfig score_config(const Options& o) {
  ScoreConfig c;
  c.metric = parse_metric(o.metric);
  if (o.top_p) c.top_p = *o.top_p;
  c.workers = o.workers;
  return c;
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

void write_outputs(const Options& o, const std::vector<ScoredAlert>& ranked, const AlertDataset& data,
                   const ScoreConfig& sc) {
  with_output(o.out, [&](std::ostream& out) { write_ranked(out, ranked, data, sc.metric, parse_delimiter(o.delimiter)); });
  if (o.top_p) {
    const std::string path = !o.candidates.empty() ? o.candidates : (o.out.empty() ? std::string() : o.out + ".candidates");
    if (path.empty()) throw ConfigError("--top-p needs --candidates when ranking to stdout");
    with_output(path, [&](std::ostream& out) {
      for (std::size_t tid : top_candidates(ranked, *o.top_p)) out << tid << '\n';
    });
  }
}

std::vector<std::size_t> read_attacks(const std::string& path, const std::optional<AttributeSchema>& schema,
                                      const std::vector<std::vector<std::string>>& records) {
  auto in = detail::open_input(path);
  try {
    return resolve_attacks(read_attack_lines(in), schema, records);
  } catch (const ConfigError& e) {
    throw AttackError(path + ": " + e.what());
  }
}

int cmd_mine(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const AlertDataset data = read_alerts(o);
  MiningConfig mc = mining_config(o);
  mc.emit_tidlists = o.tidlists;
  const PatternSet fps = mine(data, mc);
  SaveOptions so;
  so.with_tidlists = o.tidlists;
  so.built_at = o.built_at;
  save_model(fps, data.schema(), o.out, so);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "alertfp: n=%zu minisupport=%zu patterns=%zu elapsed=%.3fs\n", data.n(), fps.minisupport(),
               fps.count(), elapsed.count());
  return kOk;
}

int cmd_rank(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const AlertDataset data = read_alerts(o);
  MiningConfig mc = mining_config(o);
  mc.emit_tidlists = false;
  const PatternSet fps = mine(data, mc);
  const ScoreConfig sc = score_config(o);
  const auto ranked = rank(data, fps, sc);
  write_outputs(o, ranked, data, sc);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "alertfp: n=%zu minisupport=%zu patterns=%zu elapsed=%.3fs\n", data.n(), fps.minisupport(),
               fps.count(), elapsed.count());
  return kOk;
}

int cmd_score(const Options& o) {
  const ClassifierModel model = load_model(o.model);
  const AlertDataset data = read_alerts(o);
  const ScoreConfig sc = score_config(o);
  const auto ranked = score_new(data, model, sc, o.force_schema);
  write_outputs(o, ranked, data, sc);
  return kOk;
}

int cmd_eval(const Options& o) {
  auto in = detail::open_input(o.ranked);
  const RankedFile ranked = read_ranked(in);
  std::optional<AttributeSchema> schema;
  if (!o.schema.empty()) schema = load_schema(o.schema);
  const auto tids = read_attacks(o.attacks, schema, records_of(ranked, parse_delimiter(o.delimiter)));
  const auto ranks = locate_attacks(ranked, tids);
  std::cout << "ranks:";
  for (std::size_t r : ranks) std::cout << ' ' << r;
  std::cout << "\nlast_rank: " << ranks.back() << "\nn: " << ranked.n
            << "\nreduction: " << format_pct(reduction(ranked.n, ranks.back())) << '\n';
  return kOk;
}

int cmd_sweep(const Options& o) {
  const AlertDataset data = read_alerts(o);
  std::vector<Minisupport> list;
  std::stringstream ss(o.minisupport);
  for (std::string part; std::getline(ss, part, ',');) list.push_back(Minisupport::parse(part));
  const auto tids = read_attacks(o.attacks, data.schema(), records_of(data));
  const auto rows = sweep(data, list, tids, mining_config(o, false), score_config(o));
  with_output(o.out, [&](std::ostream& out) { write_sweep(out, rows); });
  return kOk;
}

int cmd_gen(const Options& o) {
  SyntheticSpec spec;
  spec.n_records = o.records;
  spec.n_attack = o.attack_count;
  spec.routine_profiles = o.profiles;
  spec.seed = o.seed;
  const SyntheticLog log = gen_synthetic(spec);
  with_output(o.out, [&](std::ostream& out) {
    for (const auto& a : log.dataset.alerts()) out << a.raw << '\n';
  });
  if (!o.attacks_out.empty()) with_output(o.attacks_out, [&](std::ostream& out) { write_attack_ids(out, log.attack_tids); });
  if (!o.schema_out.empty()) {
    with_output(o.schema_out, [&](std::ostream& out) { out << schema_to_string(log.dataset.schema()); });
  }
  return kOk;
}

void add_input(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "alert log")->required()->check(CLI::ExistingFile);
  cmd->add_option("--schema", o.schema, "schema config (name<TAB>kind per line)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--delimiter", o.delimiter, "field delimiter (default tab)");
  cmd->add_flag("--header", o.header, "first record line is a header");
  cmd->add_option("--rejects", o.rejects, "write rejected lines here");
}

void add_mining(CLI::App* cmd, Options& o, bool list) {
  cmd->add_option("--minisupport", o.minisupport, list ? "comma-separated N or P% values" : "N (absolute) or P% (ratio)")
      ->required();
  cmd->add_option("--max-patterns", o.max_patterns, "pattern-count guard, 0 disables")->capture_default_str();
  cmd->add_option("--max-len", o.max_len, "longest itemset to mine");
}

void add_scoring(CLI::App* cmd, Options& o) {
  cmd->add_option("--score", o.metric, "simple or fpof")->capture_default_str();
  cmd->add_option("--top-p", o.top_p, "write the top P% tids as candidate true alerts");
  cmd->add_option("--candidates", o.candidates, "candidate file (default <out>.candidates)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank IDS alerts by frequent-pattern outlier factor"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--workers", o.workers, "worker threads (default $ALERTFP_WORKERS or 1)");

  auto* mine_cmd = app.add_subcommand("mine", "mine frequent patterns and save a classifier model");
  add_input(mine_cmd, o);
  add_mining(mine_cmd, o, false);
  mine_cmd->add_option("--out", o.out, "model file")->required();
  mine_cmd->add_flag("--tidlists", o.tidlists, "store tidlists in the model");
  mine_cmd->add_option("--built-at", o.built_at, "provenance stamp recorded in the model");

  auto* rank_cmd = app.add_subcommand("rank", "mine and rank an alert log");
  add_input(rank_cmd, o);
  add_mining(rank_cmd, o, false);
  add_scoring(rank_cmd, o);
  rank_cmd->add_option("--out", o.out, "ranked output (default stdout)");

  auto* score_cmd = app.add_subcommand("score", "rank new alerts against a saved model");
  add_input(score_cmd, o);
  add_scoring(score_cmd, o);
  score_cmd->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--out", o.out, "ranked output (default stdout)");
  score_cmd->add_flag("--force-schema", o.force_schema, "score even if the schema fingerprint differs");

  auto* eval_cmd = app.add_subcommand("eval", "locate known attacks in a ranked file");
  eval_cmd->add_option("--ranked", o.ranked, "ranked file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--attacks", o.attacks, "attack-id file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--schema", o.schema, "schema, needed for field=value selectors")->check(CLI::ExistingFile);
  eval_cmd->add_option("--delimiter", o.delimiter, "field delimiter of the original records");

  auto* sweep_cmd = app.add_subcommand("sweep", "attack placement across minisupport values");
  add_input(sweep_cmd, o);
  add_mining(sweep_cmd, o, true);
  sweep_cmd->add_option("--score", o.metric, "simple or fpof")->capture_default_str();
  sweep_cmd->add_option("--attacks", o.attacks, "attack-id file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", o.out, "sweep report (default stdout)");

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic alert log with planted attacks");
  gen_cmd->add_option("--out", o.out, "log file (default stdout)");
  gen_cmd->add_option("--attacks-out", o.attacks_out, "attack-id file");
  gen_cmd->add_option("--schema-out", o.schema_out, "schema config for the log");
  gen_cmd->add_option("--records", o.records, "record count")->capture_default_str();
  gen_cmd->add_option("--attack-count", o.attack_count, "planted attacks")->capture_default_str();
  gen_cmd->add_option("--profiles", o.profiles, "routine alert profiles")->capture_default_str();
  gen_cmd->add_option("--seed", o.seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (o.workers == 0) throw ConfigError("--workers must be at least 1");
    if (*mine_cmd) return cmd_mine(o);
    if (*rank_cmd) return cmd_rank(o);
    if (*score_cmd) return cmd_score(o);
    if (*eval_cmd) return cmd_eval(o);
    if (*sweep_cmd) return cmd_sweep(o);
    if (*gen_cmd) return cmd_gen(o);
  } catch (const PatternExplosionError& e) {
    std::cerr << "alertfp: " << e.what() << '\n';
    return kGuard;
  } catch (const FingerprintMismatchError& e) {
    std::cerr << "alertfp: " << e.what() << '\n';
    return kFingerprint;
  } catch (const ConfigError& e) {
    std::cerr << "alertfp: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "alertfp: " << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
