#include <random>

#include <gtest/gtest.h>

#include "placer/partitioner.h"
#include "placer/placement.h"
#include "support.h"

using namespace placer;

namespace {

// Q1 over T1,T2,T3 with equal costs; T1,T2 on S1 and T3 on S2.
Workload three_table_query() {
  Workload w;
  w.tables = {{"T1", 1}, {"T2", 1}, {"T3", 1}};
  w.queries = {{"Q1", {{0, 4}, {1, 4}, {2, 4}}, 1, 12}};
  w.servers = {{"S1", 3, std::nullopt}, {"S2", 3, std::nullopt}};
  return w;
}

Placement random_dp_placement(std::mt19937_64 &rng, const Workload &w) {
  std::uniform_int_distribution<std::size_t> site(0, w.num_servers() - 1);
  Placement p;
  for (std::size_t j = 0; j < w.num_tables(); ++j) {
    p.store.push_back({site(rng)});
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    p.compute.push_back(site(rng));
  }
  return p;
}

} // namespace

TEST(BestSite, PrefersMoreLocalTables) {
  const Workload w = three_table_query();
  const Placement p{{{0}, {0}, {1}}, {0}};
  EXPECT_EQ(best_site(w.queries[0], p, w), (std::pair<std::size_t, Cost>{0, 4}));
}

TEST(BestSite, AllLocal) {
  const Workload w = three_table_query();
  const Placement p{{{1}, {1}, {1}}, {0}};
  EXPECT_EQ(best_site(w.queries[0], p, w), (std::pair<std::size_t, Cost>{1, 0}));
}

TEST(BestSite, ReplicaOnSiteZeroesTerm) {
  const Workload w = three_table_query();
  const Placement p{{{0}, {0}, {0, 1}}, {0}};
  EXPECT_EQ(best_site(w.queries[0], p, w), (std::pair<std::size_t, Cost>{0, 0}));
}

TEST(BestSite, TiesGoToLowestServer) {
  Workload w = three_table_query();
  w.queries[0].refs = {{0, 4}, {2, 4}};
  const Placement p{{{0}, {0}, {1}}, {0}};
  EXPECT_EQ(best_site(w.queries[0], p, w).first, 0u);
}

TEST(DecodeDp, FourQueryKnownSites) {
  const Workload w = test::four_query_workload();
  const Placement p = decode_dp(test::four_query_partition(), w);
  EXPECT_EQ(p.compute, (std::vector<std::size_t>{1, 2, 0, 1}));
  const std::vector<std::size_t> parts = test::four_query_table_parts();
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_EQ(p.store[j], std::vector<std::size_t>{parts[j]});
  }
}

TEST(DecodeDp, AllInOnePart) {
  const Workload w = test::four_query_workload();
  const Placement p = decode_dp(PartitionAssignment(10, 0), w);
  EXPECT_EQ(p.compute, (std::vector<std::size_t>{0, 0, 0, 0}));
  EXPECT_EQ(dp_cost(p, w).total_cost, ExtendedCost(0));
}

// Decoding re-sites queries, so the cut of the re-encoded placement equals
// its cost and never exceeds the cut that was decoded.
TEST(DecodeDp, ReencodedCutEqualsCost) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const Workload w = test::random_workload(rng);
    const PartGraph g = build_dp_graph(w);
    PartitionAssignment a(g.num_nodes());
    for (auto &part : a) {
      part = std::uniform_int_distribution<std::size_t>(0, w.num_servers() - 1)(rng);
    }
    const Placement p = decode_dp(a, w);
    const CostReport report = dp_cost(p, w);
    EXPECT_EQ(recompute_cut(g, encode_dp(p, w)), report.total_cost);
    EXPECT_FALSE(recompute_cut(g, a) < report.total_cost);
  }
}

TEST(DecodeGdp, WorkedExample) {
  const ViewDag dag = test::gdp_example();
  const Placement p = decode_gdp(test::gdp_example_partition(), dag);
  // V5 computed on S1, stored on S2; V6 computed on S2, stored on S1.
  EXPECT_EQ(p.compute[4], 0u);
  EXPECT_EQ(p.store[4], std::vector<std::size_t>{1});
  EXPECT_EQ(p.compute[5], 1u);
  EXPECT_EQ(p.store[5], std::vector<std::size_t>{0});
  for (const std::size_t j : {1, 2}) {
    EXPECT_EQ(p.compute[j], 0u);
    EXPECT_EQ(p.store[j], std::vector<std::size_t>{0});
  }
  for (const std::size_t j : {0, 3, 6}) {
    EXPECT_EQ(p.compute[j], 1u);
    EXPECT_EQ(p.store[j], std::vector<std::size_t>{1});
  }
  EXPECT_EQ(gdp_cost(p, dag).total_cost, ExtendedCost(46));
}

TEST(DecodeGdp, SingleViewSingleServer) {
  const ViewDag dag = parse_gdp(R"({"views":[{"id":"A","class":"base_table","size":2}],
    "servers":[{"id":"S1","storage_capacity":2}]})");
  const Placement p = decode_gdp({0, 0}, dag);
  EXPECT_EQ(p.compute, std::vector<std::size_t>{0});
  EXPECT_EQ(p.store, std::vector<std::vector<std::size_t>>{{0}});
}

TEST(DecodeGdp, ContractedAssignment) {
  const ViewDag dag = test::gdp_example();
  const ContractedGraph c = contract_infinite_edges(build_gdp_graph(dag));
  PartitionAssignment contracted(c.graph.num_nodes(), 0);
  const PartitionAssignment full = test::gdp_example_partition();
  for (std::size_t v = 0; v < full.size(); ++v) {
    contracted[c.merge_map[v]] = full[v];
  }
  EXPECT_EQ(decode_gdp(contracted, dag, c.merge_map), decode_gdp(full, dag));
}

// Any finite-cut assignment keeps pinned views on one server, and its cut
// equals the cost of the decoded placement.
TEST(DecodeGdp, CutEqualsCost) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const ViewDag dag = test::random_dag(rng);
    const PartGraph g = build_gdp_graph(dag);
    PartitionAssignment a(g.num_nodes());
    for (auto &part : a) {
      part = std::uniform_int_distribution<std::size_t>(0, dag.num_servers() - 1)(rng);
    }
    const ExtendedCost cut = recompute_cut(g, a);
    const Placement p = decode_gdp(a, dag);
    EXPECT_EQ(gdp_cost(p, dag).total_cost, cut);
    if (cut.is_finite()) {
      for (std::size_t j = 0; j < dag.num_views(); ++j) {
        if (dag.views[j].transfer_cost.is_infinite()) {
          EXPECT_EQ(p.store[j][0], p.compute[j]);
        }
      }
    }
    EXPECT_EQ(encode_gdp(p, dag), a);
  }
}

TEST(GdpCost, WorkedExampleVariants) {
  const ViewDag dag = test::gdp_example();
  Placement p = decode_gdp(test::gdp_example_partition(), dag);
  // Moving V6's storage to S2 uncuts {V6,V'6} (7) and {V6,V'7} (7).
  p.store[5] = {1};
  EXPECT_EQ(gdp_cost(p, dag).total_cost, ExtendedCost(46 - 7 - 7));
  const Placement together{std::vector<std::vector<std::size_t>>(7, {0}), std::vector<std::size_t>(7, 0)};
  EXPECT_EQ(gdp_cost(together, dag).total_cost, ExtendedCost(0));
}

TEST(GdpCost, InfiniteSplitIsAViolation) {
  const ViewDag dag = test::gdp_example();
  Placement p{std::vector<std::vector<std::size_t>>(7, {0}), std::vector<std::size_t>(7, 0)};
  p.compute[0] = 1;
  const CostReport r = gdp_cost(p, dag);
  EXPECT_TRUE(r.total_cost.is_infinite());
  ASSERT_FALSE(r.violations.empty());
  EXPECT_EQ(r.violations[0].code, "infinite-split");
}

TEST(DpCost, CapacityViolationsAndTotals) {
  const Workload w = test::four_query_workload();
  Placement p{std::vector<std::vector<std::size_t>>(6, {0}), std::vector<std::size_t>(4, 0)};
  const CostReport r = dp_cost(p, w);
  EXPECT_EQ(r.total_cost, ExtendedCost(0));
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].code, "storage-capacity");
  EXPECT_EQ(r.violations[0].severity, Severity::kError);
  EXPECT_EQ(r.per_server[0].storage_used, 10);
}

TEST(DpCost, TotalIsSumOfQueries) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const Workload w = test::random_workload(rng);
    const Placement p = random_dp_placement(rng, w);
    const CostReport r = dp_cost(p, w);
    ExtendedCost sum;
    for (const ObjectCost &q : r.per_query) {
      sum += q.cost;
    }
    EXPECT_EQ(sum, r.total_cost);
    Cost stored = 0;
    for (const ServerUsage &u : r.per_server) {
      stored += u.storage_used;
    }
    EXPECT_EQ(stored, w.total_table_size());
  }
}

TEST(Replicas, AddingAReplicaNeverHurts) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 300; ++trial) {
    const Workload w = test::random_workload(rng);
    Placement p = random_dp_placement(rng, w);
    std::vector<Cost> before;
    for (const Query &q : w.queries) {
      before.push_back(best_site(q, p, w).second);
    }
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, w.num_tables() - 1)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, w.num_servers() - 1)(rng);
    auto &replicas = p.store[j];
    if (std::find(replicas.begin(), replicas.end(), k) == replicas.end()) {
      replicas.push_back(k);
      std::sort(replicas.begin(), replicas.end());
    }
    for (std::size_t i = 0; i < w.num_queries(); ++i) {
      EXPECT_LE(best_site(w.queries[i], p, w).second, before[i]);
    }
  }
}

TEST(Frequency, ScalesCostNotSite) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 200; ++trial) {
    Workload w = test::random_workload(rng);
    if (w.queries.empty()) {
      continue;
    }
    const Placement p = random_dp_placement(rng, w);
    const auto [site, cost] = best_site(w.queries[0], p, w);
    w.queries[0].frequency *= 5;
    const auto [site5, cost5] = best_site(w.queries[0], p, w);
    EXPECT_EQ(site5, site);
    EXPECT_EQ(cost5, 5 * cost);
  }
}

TEST(LoadReport, Values) {
  Workload w;
  w.tables = {{"T1", 1}};
  w.servers = {{"S1", 5, std::nullopt}, {"S2", 5, std::nullopt}};
  EXPECT_EQ(load_report({{{0}}, {}}, w)[1].load_used, 0);
  w.queries = {{"Q1", {{0, 1}}, 1, 5}};
  auto usage = load_report({{{0}}, {1}}, w);
  EXPECT_EQ(usage[1].load_used, 5);
  EXPECT_EQ(usage[0].load_used, 0);
  w.queries = {{"Q1", {{0, 1}}, 1, 3}, {"Q2", {{0, 1}}, 1, 4}};
  usage = load_report({{{0}}, {1, 1}}, w);
  EXPECT_EQ(usage[1].load_used, 7);
}

TEST(CheckPlacement, RejectsMismatches) {
  const Workload w = test::four_query_workload();
  EXPECT_THROW(check_placement({{{0}}, {}}, w), std::invalid_argument);
  Placement p{std::vector<std::vector<std::size_t>>(6, {0}), std::vector<std::size_t>(4, 0)};
  p.store[2] = {};
  EXPECT_THROW(check_placement(p, w), std::invalid_argument);
  p.store[2] = {3};
  EXPECT_THROW(check_placement(p, w), std::invalid_argument);
}
