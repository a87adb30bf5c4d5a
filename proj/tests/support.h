/*******************************************************************************
 * Test fixtures, random instance generators and brute-force oracles that do
 * not share code with the library's own solvers.
 *
 * @file:   support.h
 ******************************************************************************/
#pragma once

#include <optional>
#include <random>
#include <string>

#include "placer/gdp.h"
#include "placer/ip_model.h"
#include "placer/reduction.h"
#include "placer/workload.h"

namespace placer::test {

/// Six tables sized (2,2,2,2,1,1), queries Q1={T1,T4,T5}, Q2={T1,T3,T6},
/// Q3={T1,T5}, Q4={T4}, C_i^j = t_j, three servers of capacity 4.
std::string four_query_document();
Workload four_query_workload();

/// A table placement for four_query_workload() that sites Q1 on server 2, Q2 on
/// 3, Q3 on 1 and Q4 on 2: S1={T1,T2}, S2={T4,T5}, S3={T3,T6}. Also the node
/// assignment of build_dp_graph with queries on those sites.
std::vector<std::size_t> four_query_table_parts();
PartitionAssignment four_query_partition();

/// Seven views, two servers of capacity 18.
std::string gdp_example_document();
ViewDag gdp_example();

/// P1 = {V2,V3,V6,V'2,V'3,V'5}, everything else in P2, over build_gdp_graph.
PartitionAssignment gdp_example_partition();

struct RandomWorkloadShape {
  std::size_t max_tables = 8;
  std::size_t max_queries = 6;
  std::size_t max_servers = 3;
  Cost max_value = 10;
};

/// Capacities are drawn around Σt/l so both tight and loose instances occur.
Workload random_workload(std::mt19937_64 &rng, const RandomWorkloadShape &shape = {});

/// At least one base table; non-base views read one to three earlier views.
ViewDag random_dag(std::mt19937_64 &rng, std::size_t max_views = 6, std::size_t max_servers = 2);

/// ncon = 1, integer node weights in [0, 3], edge density about one half.
PartGraph random_graph(std::mt19937_64 &rng, std::size_t max_nodes = 12, std::size_t max_parts = 3);

/// Minimum Definition 2 cost over every table placement within storage
/// capacities; nullopt when none fits. Enumerates l^n placements.
std::optional<Cost> brute_dp_optimum(const Workload &w);

/// Minimum Definition 3 cost over every (ss, cs) within storage capacities.
/// Enumerates l^(2n) combinations.
std::optional<Cost> brute_gdp_optimum(const ViewDag &dag);

/// Minimum cut over every assignment within the part capacities, with cut
/// infinite edges illegal. Enumerates l^N assignments.
std::optional<Cost> brute_partition_optimum(const PartGraph &g);

/// Enumerates every binary assignment of the model. Each constraint may hold
/// at most one bounded real; reals take the value the objective prefers
/// within the bounds their constraints imply. Returns the objective optimum,
/// or nullopt when no assignment is feasible.
std::optional<Cost> brute_ip_optimum(const IpModel &m);

} // namespace placer::test
