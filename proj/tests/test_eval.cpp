#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"

namespace alertfp {
namespace {

TEST(Reduction, KnownValues) {
  EXPECT_NEAR(reduction(28670, 7), 99.97558, 1e-4);
  EXPECT_NEAR(reduction(28670, 34), 99.88141, 1e-4);
  EXPECT_DOUBLE_EQ(reduction(4, 4), 0.0);
  EXPECT_DOUBLE_EQ(reduction(4, 1), 75.0);
  EXPECT_THROW(reduction(4, 0), ConfigError);
  EXPECT_THROW(reduction(4, 5), ConfigError);
  EXPECT_EQ(format_pct(reduction(28670, 7)), "99.976");
}

TEST(LocateAttacks, SortedRanksAndUnknownTid) {
  const AlertDataset d = testing::basket();
  MiningConfig m;
  m.minisupport = Minisupport::absolute(2);
  const auto ranked = rank(d, mine(d, m), ScoreConfig{});
  EXPECT_EQ(locate_attacks(ranked, {2, 0}), (std::vector<std::size_t>{1, 4}));
  EXPECT_THROW(locate_attacks(ranked, {7}), ConfigError);
  EXPECT_THROW(locate_attacks(ranked, {}), ConfigError);
}

TEST(ResolveAttacks, TidsAndSelectors) {
  const AlertDataset d = testing::snort_sample();
  const auto records = records_of(d);
  std::istringstream in("# attacks\n2\n\ncid=1\nsport=34,074\n");
  EXPECT_EQ(resolve_attacks(read_attack_lines(in), d.schema(), records), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(resolve_attacks({"cid=1"}, std::nullopt, records), ConfigError);
  EXPECT_THROW(resolve_attacks({"nosuch=1"}, d.schema(), records), ConfigError);
  EXPECT_THROW(resolve_attacks({"cid=77"}, d.schema(), records), ConfigError);
  EXPECT_THROW(resolve_attacks({"9"}, d.schema(), records), ConfigError);
  EXPECT_THROW(resolve_attacks({"x1"}, d.schema(), records), ConfigError);
}

TEST(Sweep, BasketRows) {
  const AlertDataset d = testing::basket();
  const std::vector<Minisupport> ms{Minisupport::absolute(2), Minisupport::absolute(3), Minisupport::absolute(5)};
  const auto rows = sweep(d, ms, {0}, MiningConfig{}, ScoreConfig{});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_TRUE(rows[0].ok());
  EXPECT_EQ(rows[0].pattern_count, 9u);
  EXPECT_EQ(rows[0].last_attack_rank, 1u);
  EXPECT_DOUBLE_EQ(rows[0].reduction_pct, 75.0);
  // {2}, {3}, {5} and {2,5} all reach support 3.
  EXPECT_EQ(rows[1].pattern_count, 4u);
  EXPECT_EQ(rows[1].pattern_count, testing::oracle_mine(d, 3).size());
  EXPECT_FALSE(rows[2].ok());
  std::ostringstream out;
  write_sweep(out, rows);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "2\t9\t1\t75.000");
  EXPECT_NE(text.find("5\tERROR\t"), std::string::npos);
}

TEST(Sweep, PatternCountNeverGrowsWithMinisupport) {
  const AlertDataset d = testing::snort_sample();
  const auto rows = sweep(d, {Minisupport::absolute(1), Minisupport::absolute(2), Minisupport::absolute(3)}, {0},
                          MiningConfig{}, ScoreConfig{});
  EXPECT_EQ(rows[1].pattern_count, 319u);
  EXPECT_EQ(rows[2].pattern_count, 63u);
  EXPECT_GE(rows[0].pattern_count, rows[1].pattern_count);
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.n_records = 3000;
  s.seed = 7;
  return s;
}

TEST(Synthetic, DeterministicForSeed) {
  const auto a = gen_synthetic(small_spec());
  const auto b = gen_synthetic(small_spec());
  ASSERT_EQ(a.attack_tids, b.attack_tids);
  for (std::size_t i = 0; i < a.dataset.n(); ++i) ASSERT_EQ(a.dataset[i].raw, b.dataset[i].raw);
  SyntheticSpec other = small_spec();
  other.seed = 8;
  EXPECT_NE(gen_synthetic(other).attack_tids, a.attack_tids);
}

TEST(Synthetic, ShapeAndParsability) {
  const auto log = gen_synthetic(small_spec());
  EXPECT_EQ(log.dataset.n(), 3000u);
  EXPECT_EQ(log.attack_tids.size(), 5u);
  std::stringstream buf;
  for (const auto& a : log.dataset.alerts()) buf << a.raw << '\n';
  const ParseResult again = parse_log(buf, LogFormat{}, snort_schema());
  EXPECT_TRUE(again.rejects.empty());
  ASSERT_EQ(again.dataset.n(), 3000u);
  for (std::size_t i = 0; i < 3000; ++i) ASSERT_EQ(again.dataset[i].values, log.dataset[i].values);
}

TEST(Synthetic, AttacksCarryRareValues) {
  const auto log = gen_synthetic(small_spec());
  const auto txs = testing::itemized(log.dataset);
  std::map<Item, std::size_t> freq;
  for (const auto& t : txs) {
    for (const auto& it : t) ++freq[it];
  }
  for (std::size_t tid : log.attack_tids) {
    std::size_t unique = 0;
    for (const auto& it : txs[tid]) unique += freq[it] == 1;
    EXPECT_GE(unique, 2u) << "attack tid " << tid;
  }
}

TEST(Synthetic, AttacksRankAheadOfRoutineAlerts) {
  const auto log = gen_synthetic(small_spec());
  MiningConfig m;
  m.minisupport = Minisupport::parse("1%");
  const auto ranked = rank(log.dataset, mine(log.dataset, m), ScoreConfig{});
  const auto ranks = locate_attacks(ranked, log.attack_tids);
  EXPECT_LE(ranks.back(), 50u);
}

TEST(Synthetic, RejectsBadSpecs) {
  SyntheticSpec s;
  s.n_records = 3;
  s.n_attack = 3;
  EXPECT_THROW(gen_synthetic(s), ConfigError);
  s.n_records = 0;
  EXPECT_THROW(gen_synthetic(s), ConfigError);
}

}  // namespace
}  // namespace alertfp
