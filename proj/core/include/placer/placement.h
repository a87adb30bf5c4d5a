/*******************************************************************************
 * Placements (storage replica sets plus computation sites), decoding of
 * partitions into placements, and exact communication cost evaluation.
 *
 * @file:   placement.h
 ******************************************************************************/
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "placer/common.h"
#include "placer/gdp.h"
#include "placer/reduction.h"
#include "placer/workload.h"

namespace placer {

/// For a workload: store is indexed by table, compute by query. For a view
/// DAG both are indexed by view.
struct Placement {
  /// Sorted, duplicate-free server indices; one entry when unreplicated.
  std::vector<std::vector<std::size_t>> store;
  std::vector<std::size_t> compute;

  friend bool operator==(const Placement &, const Placement &) = default;
};

struct ObjectCost {
  std::string id;
  std::size_t site = 0;
  ExtendedCost cost;
};

struct ServerUsage {
  Cost storage_used = 0;
  Cost load_used = 0;

  friend bool operator==(const ServerUsage &, const ServerUsage &) = default;
};

struct CostReport {
  /// One entry per query (workload) or per view (view DAG), frequency weighted.
  std::vector<ObjectCost> per_query;
  ExtendedCost total_cost;
  std::vector<ServerUsage> per_server;
  /// Capacity overruns ("storage-capacity", "load-capacity") and split views
  /// with infinite transfer cost ("infinite-split").
  std::vector<Diagnostic> violations;
};

/// Throws std::invalid_argument when the placement does not match the
/// instance (sizes, empty replica sets, server indices).
void check_placement(const Placement &p, const Workload &w);
void check_placement(const Placement &p, const ViewDag &dag);

/// Site minimizing ν·Σ C over refs with no replica on the site, and that cost.
/// Ties go to the lowest server index.
std::pair<std::size_t, Cost> best_site(const Query &q, const Placement &p, const Workload &w);

/// Frequency-weighted cost of running q on `site`.
Cost query_cost_at(const Query &q, const Placement &p, std::size_t site);

/// Copy of p with every query moved to its best site.
Placement resite(Placement p, const Workload &w);

/// Tables go where their nodes landed; queries are re-sited. An empty
/// merge_map means the assignment is over the uncontracted graph.
Placement decode_dp(const PartitionAssignment &a, const Workload &w, const std::vector<std::size_t> &merge_map = {});

/// Storage sites from V_j, computation sites from V'_j.
Placement decode_gdp(const PartitionAssignment &a, const ViewDag &dag, const std::vector<std::size_t> &merge_map = {});

/// Communication cost with every query evaluated at its compute site.
CostReport dp_cost(const Placement &p, const Workload &w);

/// Cost of a view placement. Per-view entries carry the in-arc costs the view
/// pays plus its transfer cost when computed away from its storage.
CostReport gdp_cost(const Placement &p, const ViewDag &dag);

/// Per server: stored bytes over all replicas, and Σ exec_cost·ν of queries
/// computed there.
std::vector<ServerUsage> load_report(const Placement &p, const Workload &w);
std::vector<ServerUsage> load_report(const Placement &p, const ViewDag &dag);

/// Assignment of build_dp_graph(w) nodes matching p (first replica, query
/// sites). Only meaningful for unreplicated placements.
PartitionAssignment encode_dp(const Placement &p, const Workload &w);

/// Assignment of build_gdp_graph(dag) nodes matching p.
PartitionAssignment encode_gdp(const Placement &p, const ViewDag &dag);

} // namespace placer
