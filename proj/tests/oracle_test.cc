#include <random>

#include <gtest/gtest.h>

#include "placer/oracle.h"
#include "placer/partitioner.h"
#include "support.h"

using namespace placer;

TEST(OraclePlacement, FourQuery) {
  const Workload w = test::four_query_workload();
  const OracleResult r = optimal_placement(w);
  ASSERT_EQ(r.status, OracleStatus::kOptimal);
  EXPECT_EQ(r.cost, ExtendedCost(test::brute_dp_optimum(w).value()));
  EXPECT_EQ(dp_cost(r.placement, w).total_cost, r.cost);
  EXPECT_TRUE(dp_cost(r.placement, w).violations.empty());
}

TEST(OraclePlacement, NoQueries) {
  Workload w;
  w.tables = {{"T1", 2}, {"T2", 1}};
  w.servers = {{"S1", 2, std::nullopt}, {"S2", 2, std::nullopt}};
  const OracleResult r = optimal_placement(w);
  ASSERT_EQ(r.status, OracleStatus::kOptimal);
  EXPECT_EQ(r.cost, ExtendedCost(0));
}

TEST(OraclePlacement, Pigeonhole) {
  Workload w;
  w.tables = {{"T1", 3}, {"T2", 3}, {"T3", 1}};
  w.servers = {{"S1", 3, std::nullopt}, {"S2", 3, std::nullopt}};
  const OracleResult r = optimal_placement(w);
  EXPECT_EQ(r.status, OracleStatus::kInfeasible);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(exhaustive_placement(w).status, OracleStatus::kInfeasible);
}

TEST(OraclePlacement, BudgetExceeded) {
  std::mt19937_64 rng(2);
  test::RandomWorkloadShape shape;
  shape.max_tables = 8;
  shape.max_servers = 3;
  Workload w;
  do {
    w = test::random_workload(rng, shape);
  } while (w.num_tables() < 6 || w.num_servers() < 3 || w.num_queries() < 2);
  const OracleResult r = optimal_placement(w, {5});
  EXPECT_EQ(r.status, OracleStatus::kBudgetExceeded);
  EXPECT_LE(r.visited, 6u);
}

TEST(OraclePlacement, BranchAndBoundMatchesEnumeration) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const Workload w = test::random_workload(rng);
    const OracleResult bb = optimal_placement(w);
    const OracleResult ex = exhaustive_placement(w);
    const auto brute = test::brute_dp_optimum(w);
    ASSERT_EQ(bb.status, ex.status);
    ASSERT_EQ(bb.status == OracleStatus::kOptimal, brute.has_value());
    if (brute) {
      EXPECT_EQ(bb.cost, ExtendedCost(*brute));
      EXPECT_EQ(ex.cost, ExtendedCost(*brute));
      EXPECT_EQ(dp_cost(bb.placement, w).total_cost, bb.cost);
    }
  }
}

TEST(OracleGdp, WorkedExample) {
  const ViewDag dag = test::gdp_example();
  const OracleResult r = optimal_gdp(dag);
  ASSERT_EQ(r.status, OracleStatus::kOptimal);
  EXPECT_FALSE(ExtendedCost(46) < r.cost);
  EXPECT_EQ(r.cost, ExtendedCost(test::brute_gdp_optimum(dag).value()));
  EXPECT_EQ(exhaustive_gdp(dag).cost, r.cost);
  EXPECT_EQ(gdp_cost(r.placement, dag).total_cost, r.cost);
}

TEST(OracleGdp, SingleServer) {
  ViewDag dag = test::gdp_example();
  dag.servers = {{"S1", 100, std::nullopt}};
  const OracleResult r = optimal_gdp(dag);
  ASSERT_EQ(r.status, OracleStatus::kOptimal);
  EXPECT_EQ(r.cost, ExtendedCost(0));
}

TEST(OracleGdp, MatchesEnumeration) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 150; ++trial) {
    const ViewDag dag = test::random_dag(rng);
    const OracleResult bb = optimal_gdp(dag);
    const auto brute = test::brute_gdp_optimum(dag);
    ASSERT_EQ(bb.status == OracleStatus::kOptimal, brute.has_value());
    if (brute) {
      EXPECT_EQ(bb.cost, ExtendedCost(*brute));
      EXPECT_EQ(exhaustive_gdp(dag).cost, bb.cost);
    }
  }
}

TEST(OraclePartition, PathGraph) {
  PartGraph g;
  g.nodes = {{"a", {1}, {}}, {"b", {1}, {}}, {"c", {1}, {}}};
  g.edges = {{0, 1, 1}, {1, 2, 1}};
  g.part_capacities = {{2}, {1}};
  const PartitionOracleResult r = optimal_partition(g);
  ASSERT_EQ(r.status, OracleStatus::kOptimal);
  EXPECT_EQ(r.cut, 1);
  EXPECT_EQ(test::brute_partition_optimum(g), 1);
}

TEST(OraclePartition, SinglePartAndInfeasible) {
  PartGraph g;
  g.nodes = {{"a", {2}, {}}, {"b", {1}, {}}};
  g.edges = {{0, 1, 4}};
  g.part_capacities = {{3}};
  EXPECT_EQ(optimal_partition(g).cut, 0);
  g.nodes = {{"a", {1}, {}}};
  g.edges.clear();
  g.part_capacities = {{0}, {0}};
  EXPECT_EQ(optimal_partition(g).status, OracleStatus::kInfeasible);
}

TEST(OraclePartition, MatchesEnumeration) {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    const PartGraph g = test::random_graph(rng, 10, 3);
    const PartitionOracleResult bb = optimal_partition(g);
    const PartitionOracleResult ex = exhaustive_partition(g);
    const auto brute = test::brute_partition_optimum(g);
    ASSERT_EQ(bb.status == OracleStatus::kOptimal, brute.has_value());
    ASSERT_EQ(ex.status, bb.status);
    if (brute) {
      EXPECT_EQ(bb.cut, *brute);
      EXPECT_EQ(ex.cut, *brute);
      EXPECT_EQ(recompute_cut(g, bb.assignment), ExtendedCost(*brute));
    }
  }
}

TEST(OraclePartition, InfiniteEdgesStayUncut) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    const ViewDag dag = test::random_dag(rng, 4, 2);
    const PartGraph g = build_gdp_graph(dag);
    const PartitionOracleResult r = optimal_partition(g);
    const auto brute = test::brute_partition_optimum(g);
    ASSERT_EQ(r.status == OracleStatus::kOptimal, brute.has_value());
    if (brute) {
      EXPECT_EQ(r.cut, *brute);
    }
  }
}
