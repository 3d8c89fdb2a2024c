// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "fixtures.hpp"

namespace af = alertfp;
namespace t = alertfp::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

af::PatternSet mine_at(const af::AlertDataset& d, af::Minisupport ms, std::size_t workers = 1) {
  af::MiningConfig c;
  c.minisupport = ms;
  c.workers = workers;
  return af::mine(d, c);
}

Outcome basket_reproduction() {
  Outcome o;
  const af::AlertDataset d = t::basket();
  const af::PatternSet fps = mine_at(d, af::Minisupport::parse("50%"));
  o.check(fps.count() == 9, "expected 9 patterns, got " + std::to_string(fps.count()));
  o.check(t::as_oracle(fps) == t::oracle_mine(d, 2), "pattern set differs from the exhaustive oracle");
  o.check(t::as_oracle(fps) == t::as_oracle(af::brute_force_mine(d, [] {
            af::MiningConfig c;
            c.minisupport = af::Minisupport::absolute(2);
            return c;
          }())),
          "pattern set differs from brute_force_mine");
  const std::vector<std::pair<int, af::Tidlist>> f1{{1, {0, 2}}, {2, {1, 2, 3}}, {3, {0, 1, 2}}, {5, {1, 2, 3}}};
  for (const auto& [k, tids] : f1) {
    const af::FrequentPattern* p = fps.find(t::items({k}));
    o.check(p && p->tidlist == tids, "F1 tidlist of item " + std::to_string(k));
  }
  o.check(!fps.find(t::items({4})), "item 4 should be infrequent");
  o.detail = o.ok ? "9 patterns, F1 tidlists match" : o.detail;
  return o;
}

Outcome case_study_order() {
  Outcome o;
  const af::AlertDataset d = t::snort_sample();
  const af::PatternSet fps = mine_at(d, af::Minisupport::absolute(2));
  o.check(fps.count() == 319, "expected 319 patterns, got " + std::to_string(fps.count()));
  af::ScoreConfig c;
  c.metric = af::Metric::simple;
  const auto ranked = af::rank(d, fps, c);
  std::vector<std::size_t> order;
  std::vector<std::uint64_t> scores(3);
  for (const auto& s : ranked) {
    order.push_back(s.tid);
    scores[s.tid] = s.simple_fpof;
  }
  o.check(order == std::vector<std::size_t>{2, 0, 1}, "order is not t3, t1, t2");
  o.check(scores == std::vector<std::uint64_t>{255, 319, 127}, "scores are not 255/319/127");
  if (o.ok) o.detail = "order t3,t1,t2; scores 127/255/319; |FPS|=319";
  return o;
}

Outcome reduction_arithmetic() {
  Outcome o;
  const std::vector<std::pair<std::size_t, double>> rows{
      {7, 99.975}, {11, 99.962}, {24, 99.916}, {28, 99.902}, {34, 99.882}};
  std::ostringstream got;
  for (const auto& [k, printed] : rows) {
    const double r = af::reduction(28670, k);
    got << k << "->" << af::format_pct(r) << ' ';
    o.check(std::abs(r - printed) <= 0.001 + 1e-9, "k=" + std::to_string(k) + " gives " + af::format_pct(r));
  }
  if (o.ok) o.detail = got.str();
  return o;
}

Outcome synthetic_end_to_end() {
  Outcome o;
  af::SyntheticSpec spec;
  const af::SyntheticLog log = af::gen_synthetic(spec);
  o.check(log.dataset.n() == 28670 && log.attack_tids.size() == 5, "generator shape");

  const af::Minisupport ms = af::Minisupport::parse("1%");
  const af::PatternSet fps = mine_at(log.dataset, ms);
  const auto ranked = af::rank(log.dataset, fps, af::ScoreConfig{});
  const auto ranks = af::locate_attacks(ranked, log.attack_tids);
  o.check(ranks.back() <= 50, "last attack at rank " + std::to_string(ranks.back()));
  const double red = af::reduction(log.dataset.n(), ranks.back());
  o.check(red >= 99.8, "reduction " + af::format_pct(red));

  std::vector<af::Minisupport> sweep_ms;
  for (const char* m : {"0.5%", "1%", "2%", "5%", "10%", "20%"}) sweep_ms.push_back(af::Minisupport::parse(m));
  const auto rows = af::sweep(log.dataset, sweep_ms, log.attack_tids, af::MiningConfig{}, af::ScoreConfig{});
  std::ostringstream counts;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    o.check(rows[i].ok(), "sweep row failed: " + rows[i].error);
    if (i) o.check(rows[i].pattern_count <= rows[i - 1].pattern_count, "sweep pattern_count increased");
    counts << rows[i].pattern_count << (i + 1 < rows.size() ? "," : "");
  }
  if (o.ok) {
    o.detail = "patterns=" + std::to_string(fps.count()) + " last_rank=" + std::to_string(ranks.back()) +
               " reduction=" + af::format_pct(red) + " sweep=" + counts.str();
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(0xA1E27F90ull);
  std::size_t patterns_checked = 0;
  for (int round = 0; round < 250 && o.ok; ++round) {
    const af::AlertDataset d = t::random_dataset(rng);
    const std::size_t ms = 1 + rng() % d.n();
    af::MiningConfig c;
    c.minisupport = af::Minisupport::absolute(ms);
    const af::PatternSet fps = af::mine(d, c);
    const af::PatternSet brute = af::brute_force_mine(d, c);
    o.check(fps.patterns() == brute.patterns(), "mine != brute_force_mine in round " + std::to_string(round));
    o.check(t::as_oracle(fps) == t::oracle_mine(d, ms), "mine != oracle in round " + std::to_string(round));
    for (const auto& p : fps.patterns()) {
      ++patterns_checked;
      const auto xs = fps.items_of(p);
      if (xs.size() < 2) continue;
      std::vector<const af::FrequentPattern*> subs;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        auto ys = xs;
        ys.erase(ys.begin() + static_cast<long>(i));
        const af::FrequentPattern* s = fps.find(ys);
        o.check(s && s->support_count >= p.support_count, "anti-monotonicity in round " + std::to_string(round));
        subs.push_back(s);
      }
      const auto* a = subs[xs.size() - 1];
      const auto* b = subs[xs.size() - 2];
      if (!a || !b) continue;
      af::Tidlist both;
      std::set_intersection(a->tidlist.begin(), a->tidlist.end(), b->tidlist.begin(), b->tidlist.end(),
                            std::back_inserter(both));
      o.check(both == p.tidlist, "tidlist intersection in round " + std::to_string(round));
    }
  }
  if (o.ok) o.detail = "250 datasets, " + std::to_string(patterns_checked) + " patterns, 0 violations";
  return o;
}

Outcome scorer_properties() {
  Outcome o;
  std::mt19937_64 rng(0xA1E27F90ull);
  std::size_t scored = 0;
  for (int round = 0; round < 250 && o.ok; ++round) {
    const af::AlertDataset d = t::random_dataset(rng);
    const std::size_t ms = 1 + rng() % d.n();
    const af::PatternSet fps = mine_at(d, af::Minisupport::absolute(ms));
    if (fps.empty()) continue;
    const auto txs = t::itemized(d);
    for (af::Metric metric : {af::Metric::simple, af::Metric::fpof}) {
      af::ScoreConfig c;
      c.metric = metric;
      const auto ranked = af::rank(d, fps, c);
      af::ScoreConfig par = c;
      par.workers = 4;
      o.check(af::rank(d, fps, par) == ranked, "worker count changed the ranking");
      std::vector<af::ScoredAlert> by_tid(d.n());
      for (const auto& s : ranked) by_tid[s.tid] = s;
      for (const auto& s : by_tid) {
        ++scored;
        o.check(s.fpof >= 0.0 && s.fpof <= 1.0, "fpof out of [0,1]");
        o.check(s.simple_fpof <= fps.count(), "simple_fpof above |FPS|");
        o.check((s.simple_fpof == 0) == (s.fpof == 0.0), "simple_fpof = 0 <=> fpof = 0");
      }
      for (std::size_t a = 0; a < d.n(); ++a) {
        for (std::size_t b = 0; b < d.n(); ++b) {
          if (std::includes(txs[b].begin(), txs[b].end(), txs[a].begin(), txs[a].end())) {
            o.check(by_tid[a].simple_fpof <= by_tid[b].simple_fpof && by_tid[a].fpof <= by_tid[b].fpof,
                    "containment monotonicity");
          }
        }
      }
    }
  }
  if (o.ok) o.detail = std::to_string(scored) + " scored alerts, 0 violations";
  return o;
}

Outcome persistence() {
  Outcome o;
  std::mt19937_64 rng(0x5EEDull);
  int done = 0;
  while (done < 20 && o.ok) {
    const af::AlertDataset d = t::random_dataset(rng);
    const af::PatternSet fps = mine_at(d, af::Minisupport::absolute(1 + rng() % d.n()));
    if (fps.empty()) continue;
    af::SaveOptions opts;
    opts.with_tidlists = done % 2 == 1;
    const af::ClassifierModel model = af::make_model(fps, d.schema(), opts);
    std::ostringstream first;
    af::write_model(first, model);
    std::istringstream in(first.str());
    const af::ClassifierModel loaded = af::read_model(in);
    std::ostringstream second;
    af::write_model(second, loaded);
    o.check(first.str() == second.str(), "second save differs");
    for (af::Metric metric : {af::Metric::simple, af::Metric::fpof}) {
      af::ScoreConfig c;
      c.metric = metric;
      o.check(af::score_new(d, loaded, c) == af::rank(d, fps, c), "score_new differs from rank");
    }
    ++done;
  }
  if (o.ok) o.detail = "20 datasets round-tripped, score_new == rank";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::tuple<int, std::string, double, std::function<Outcome()>>> criteria{
      {1, "four-alert basket mining", 1.0, basket_reproduction},
      {2, "case-study ordering", 1.0, case_study_order},
      {3, "reduction arithmetic", 0.0, reduction_arithmetic},
      {4, "synthetic 28670-record log", 60.0, synthetic_end_to_end},
      {5, "oracle equivalence properties", 0.0, oracle_equivalence},
      {6, "scorer properties", 0.0, scorer_properties},
      {7, "persistence", 0.0, persistence},
  };
  int failed = 0;
  for (const auto& [id, name, budget, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget > 0 && secs >= budget && o.ok) {
      o.ok = false;
      o.detail = "over time budget of " + std::to_string(budget) + " s";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << timing << ") "
              << o.detail << std::endl;
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
