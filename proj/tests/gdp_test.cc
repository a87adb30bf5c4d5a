#include <random>

#include <gtest/gtest.h>

#include "placer/gdp.h"
#include "placer/placement.h"
#include "support.h"

using namespace placer;

TEST(Gdp, ParsesWorkedExample) {
  const ViewDag dag = test::gdp_example();
  ASSERT_EQ(dag.num_views(), 7u);
  EXPECT_EQ(dag.arcs.size(), 9u);
  EXPECT_EQ(dag.views[0].cls, ViewClass::kBaseTable);
  EXPECT_TRUE(dag.views[0].transfer_cost.is_infinite());
  EXPECT_TRUE(dag.views[3].transfer_cost.is_infinite());
  EXPECT_EQ(dag.views[4].transfer_cost, ExtendedCost(10));
  EXPECT_EQ(dag.views[5].transfer_cost, ExtendedCost(7));
  EXPECT_EQ(dag.views[6].transfer_cost, ExtendedCost(0));
  EXPECT_EQ(dag.views[6].size, 0);
  EXPECT_EQ(dag.views[6].exec_cost, 25);
  EXPECT_EQ(dag.views[0].exec_cost, 0);
}

TEST(Gdp, SingleBaseTable) {
  const ViewDag dag = parse_gdp(R"({"views":[{"id":"A","class":"base_table","size":2}],
    "servers":[{"id":"S1","storage_capacity":2}]})");
  EXPECT_EQ(dag.num_views(), 1u);
  EXPECT_TRUE(dag.arcs.empty());
}

TEST(Gdp, CycleIsReported) {
  try {
    parse_gdp(R"({"views":[{"id":"V1","class":"materialized_view","size":1},
      {"id":"V2","class":"materialized_view","size":1}],
      "arcs":[{"consumer":"V1","producer":"V2","cost":1},{"consumer":"V2","producer":"V1","cost":1}],
      "servers":[{"id":"S1","storage_capacity":2}]})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("cycle"), std::string::npos);
  }
}

TEST(Gdp, ClassContradictions) {
  const std::string servers = R"("servers":[{"id":"S1","storage_capacity":9}])";
  EXPECT_THROW(
      parse_gdp(R"({"views":[{"id":"I","class":"intermediate","size":3,"transfer_cost":1}],)" + servers + "}"),
      ValidationError
  );
  EXPECT_THROW(parse_gdp(R"({"views":[{"id":"I","class":"intermediate"}],)" + servers + "}"), ValidationError);
  EXPECT_THROW(
      parse_gdp(R"({"views":[{"id":"B","class":"base_table","size":3,"transfer_cost":2}],)" + servers + "}"),
      ValidationError
  );
  EXPECT_THROW(
      parse_gdp(R"({"views":[{"id":"B","class":"base_table","size":3},{"id":"Q","class":"query"},
        {"id":"R","class":"query"}],"arcs":[{"consumer":"R","producer":"Q","cost":1}],)" +
                servers + "}"),
      ValidationError
  );
  EXPECT_THROW(
      parse_gdp(R"({"views":[{"id":"B","class":"base_table","size":3}],
        "arcs":[{"consumer":"B","producer":"Z","cost":1}],)" +
                servers + "}"),
      ValidationError
  );
}

TEST(Gdp, DetectsDocumentKind) {
  EXPECT_TRUE(is_gdp_document(test::gdp_example_document()));
  EXPECT_FALSE(is_gdp_document(test::four_query_document()));
}

TEST(Gdp, LiftFourQuery) {
  const ViewDag dag = lift_workload(test::four_query_workload());
  EXPECT_EQ(dag.num_views(), 10u);
  EXPECT_EQ(dag.arcs.size(), 9u);
  EXPECT_EQ(dag.views[6].cls, ViewClass::kQueryOnly);
  EXPECT_EQ(dag.views[6].size, 0);
}

TEST(Gdp, LiftEmptyQuerySetAndFrequency) {
  Workload w;
  w.tables = {{"T1", 1}};
  w.servers = {{"S1", 1, std::nullopt}};
  EXPECT_TRUE(lift_workload(w).arcs.empty());
  w.queries = {{"Q1", {{0, 5}}, 3, 5}};
  const ViewDag dag = lift_workload(w);
  ASSERT_EQ(dag.arcs.size(), 1u);
  EXPECT_EQ(dag.arcs[0].cost, 15);
}

TEST(Gdp, RoundTripsRandomDocuments) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const ViewDag dag = test::random_dag(rng, 8, 3);
    const std::string text = serialize_gdp(dag);
    EXPECT_EQ(parse_gdp(text), dag);
  }
  EXPECT_EQ(parse_gdp(serialize_gdp(test::gdp_example())), test::gdp_example());
}

// Lifting preserves the cost of every placement when queries are sited alike.
TEST(Gdp, LiftPreservesPlacementCost) {
  std::mt19937_64 rng(21);
  test::RandomWorkloadShape shape;
  shape.max_tables = 4;
  shape.max_queries = 2;
  shape.max_servers = 2;
  for (int trial = 0; trial < 100; ++trial) {
    const Workload w = test::random_workload(rng, shape);
    const ViewDag dag = lift_workload(w);
    const std::size_t n = w.num_tables();
    const std::size_t m = w.num_queries();
    const std::size_t l = w.num_servers();
    std::size_t combos = 1;
    for (std::size_t i = 0; i < n + m; ++i) {
      combos *= l;
    }
    for (std::size_t code = 0; code < combos; ++code) {
      std::size_t rest = code;
      Placement dp;
      Placement gp;
      for (std::size_t j = 0; j < n; ++j) {
        dp.store.push_back({rest % l});
        rest /= l;
      }
      for (std::size_t i = 0; i < m; ++i) {
        dp.compute.push_back(rest % l);
        rest /= l;
      }
      gp.store = dp.store;
      for (std::size_t j = 0; j < n; ++j) {
        gp.compute.push_back(dp.store[j][0]);
      }
      for (std::size_t i = 0; i < m; ++i) {
        gp.store.push_back({dp.compute[i]});
        gp.compute.push_back(dp.compute[i]);
      }
      ASSERT_EQ(gdp_cost(gp, dag).total_cost, dp_cost(dp, w).total_cost);
    }
  }
}

TEST(Gdp, PinMaterializedViews) {
  const ViewDag pinned = pin_materialized_views(test::gdp_example());
  EXPECT_TRUE(pinned.views[4].transfer_cost.is_infinite());
  EXPECT_TRUE(pinned.views[5].transfer_cost.is_infinite());
  EXPECT_EQ(pinned.views[1], test::gdp_example().views[1]);
}
