#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "lpbound/ingest.hpp"
#include "lpbound/oracle.hpp"
#include "lpbound/queryfmt.hpp"
#include "test_support.hpp"

namespace lpbound {
namespace {

RelationData pairs(const std::string& name, std::vector<std::pair<int, int>> rows) {
  RelationData r{name, {{"A", ColumnType::integer}, {"B", ColumnType::integer}}, {}};
  for (auto [a, b] : rows) r.rows.push_back({Value{std::int64_t{a}}, Value{std::int64_t{b}}});
  return r;
}

TinyDatabase cycle_db() {
  const std::vector<std::pair<int, int>> cycle = {{1, 2}, {2, 3}, {3, 1}};
  return TinyDatabase({pairs("R", cycle), pairs("S", cycle), pairs("T", cycle)});
}

TEST(Join, SmallGoldens) {
  const auto db = cycle_db();
  EXPECT_EQ(true_cardinality(parse_query("C3(*) :- R(X,Y), S(Y,Z), T(Z,X)."), db), 3u);
  EXPECT_EQ(true_cardinality(parse_query("P(X) :- R(X,Y), S(Y,Z)."), db), 3u);

  const TinyDatabase two({pairs("R", {{1, 2}}), pairs("S", {{2, 3}})});
  EXPECT_EQ(true_cardinality(parse_query("J2(*) :- R(X,Y), S(Y,Z)."), two), 1u);

  const TinyDatabase empty({pairs("R", {}), pairs("S", {{2, 3}})});
  EXPECT_EQ(true_cardinality(parse_query("J2(*) :- R(X,Y), S(Y,Z)."), empty), 0u);
}

TEST(Join, RepeatedVariablesAndPredicates) {
  const TinyDatabase db({pairs("R", {{1, 1}, {1, 2}, {2, 2}, {3, 4}})});
  EXPECT_EQ(true_cardinality(parse_query("D(*) :- R(X,X)."), db), 2u);
  EXPECT_EQ(true_cardinality(parse_query("F(*) :- R(X,Y); R.A BETWEEN 2 AND 3."), db), 2u);
  EXPECT_EQ(true_cardinality(parse_query("G(*) :- R(X,Y); R.A = 1 OR R.B = 4."), db), 3u);
}

TEST(Join, NullsNeverJoin) {
  RelationData r = pairs("R", {{1, 2}});
  r.rows.push_back({Value{std::int64_t{5}}, Value{}});
  RelationData s = pairs("S", {{2, 3}});
  s.rows.push_back({Value{}, Value{std::int64_t{9}}});
  const TinyDatabase db({r, s});
  EXPECT_EQ(true_cardinality(parse_query("J2(*) :- R(X,Y), S(Y,Z)."), db), 1u);
}

TEST(Join, GuardRejectsLargeInputs) {
  RelationData r{"R", {{"A", ColumnType::integer}}, {}};
  r.rows.resize(TinyDatabase::kMaxCells + 1, {Value{std::int64_t{0}}});
  EXPECT_THROW(TinyDatabase({r}), OracleError);
}

TEST(Entropy, SingleTupleIsZero) {
  const TinyDatabase db({pairs("R", {{1, 2}})});
  const auto h = empirical_entropies(parse_query("Q(*) :- R(X,Y)."), db);
  EXPECT_EQ(h.h.size(), 4);
  for (Eigen::Index i = 0; i < h.h.size(); ++i) EXPECT_EQ(h.h[i], 0.0);
}

TEST(Entropy, UniformRowsAndMarginals) {
  // X takes 4 values, each with 2 Y values: h(XY) = 3, h(X) = 2, h(Y) = 3.
  std::vector<std::pair<int, int>> rows;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y) rows.push_back({x, 10 * x + y});
  const TinyDatabase db({pairs("R", rows)});
  const auto h = empirical_entropies(parse_query("Q(*) :- R(X,Y)."), db);
  EXPECT_DOUBLE_EQ(h.h[3], 3.0);
  EXPECT_DOUBLE_EQ(h.h[1], 2.0);
  EXPECT_DOUBLE_EQ(h.h[2], 3.0);
  EXPECT_TRUE(shannon_violations(h).empty());
}

TEST(Entropy, SkewedMarginal) {
  const TinyDatabase db({pairs("R", {{1, 1}, {1, 2}, {1, 3}, {2, 4}})});
  const auto h = empirical_entropies(parse_query("Q(*) :- R(X,Y)."), db);
  EXPECT_NEAR(h.h[1], -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25)), 1e-12);
  EXPECT_THROW(empirical_entropies(parse_query("Q(*) :- R(X,Y)."), TinyDatabase({pairs("R", {})})), OracleError);
}

TEST(Entropy, EmpiricalVectorsSatisfyEveryCatalogStatistic) {
  std::mt19937_64 rng(test::test_seed("entropy_statistics", 61));
  const auto q = parse_query("C3(*) :- R(A,B), S(B,C), T(C,A).");
  int checked = 0;
  while (checked < 10) {
    std::vector<RelationData> rels;
    for (const char* n : {"R", "S", "T"}) rels.push_back(test::random_relation(rng, n, 2, 40, 6, false));
    const TinyDatabase db(rels);
    if (true_cardinality(q, db) == 0) continue;
    StatsConfig cfg;
    const auto c = build_statistics(rels, cfg);
    const auto h = empirical_entropies(q, db);
    const auto stats = catalog_statistics(q, c);
    EXPECT_FALSE(stats.empty());
    EXPECT_TRUE(statistic_violations(h, stats).empty());
    EXPECT_TRUE(shannon_violations(h).empty());
    ++checked;
  }
}

TEST(Entropy, ViolationsAreReported) {
  const TinyDatabase db({pairs("R", {{1, 1}, {2, 2}, {3, 3}, {4, 4}})});
  const auto q = parse_query("Q(*) :- R(X,Y).");
  const auto h = empirical_entropies(q, db);
  QueryShape shape = shape_of(q);
  auto too_small = StatConstraint::make(0, VarSet{}, shape.atoms[0], PNorm(1), 2.0);
  EXPECT_EQ(statistic_violations(h, {too_small}).size(), 1u);
}

TEST(Soundness, RandomChainAndCycle) {
  std::mt19937_64 rng(test::test_seed("oracle_soundness", 67));
  for (const char* text : {"J3(*) :- R(X,Y), S(Y,Z), T(Z,U).", "JG(X,U) :- R(X,Y), S(Y,Z), T(Z,U).",
                           "C3(*) :- R(X,Y), S(Y,Z), T(Z,X)."}) {
    const auto q = parse_query(text);
    for (int k = 0; k < 5; ++k) {
      std::vector<RelationData> rels;
      for (const char* n : {"R", "S", "T"}) rels.push_back(test::random_relation(rng, n, 2, 40, 8, false));
      const auto c = build_statistics(rels, StatsConfig{});
      const auto report = check_soundness(q, TinyDatabase(rels), c);
      EXPECT_TRUE(report.ok()) << text << " bound " << report.bound << " truth " << report.truth;
    }
  }
}

}  // namespace
}  // namespace lpbound
