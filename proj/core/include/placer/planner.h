/*******************************************************************************
 * End-to-end planning: reduce an instance to a partitioning graph, partition
 * it, decode the result and evaluate it.
 *
 * @file:   planner.h
 ******************************************************************************/
#pragma once

#include <optional>
#include <vector>

#include "placer/gdp.h"
#include "placer/partitioner.h"
#include "placer/placement.h"
#include "placer/workload.h"

namespace placer {

struct PlanConfig {
  PartitionConfig partition;
  /// Second weight dimension: query (or view) execution load.
  bool with_load = false;
  /// Target min/max server load ratio in [0, 1); needs with_load. A ratio ρ
  /// caps every server's load at ceil(2·avg / (1 + ρ)). With two servers
  /// that cap is exactly the ratio condition; with more it is a proxy.
  std::optional<Rational> min_max_ratio;
  /// Forces materialized views to be computed where they are stored.
  bool pin_views = false;

  /// Throws std::invalid_argument on contradictory settings.
  void validate() const;
};

struct PlanResult {
  Placement placement;
  CostReport report;
  /// Partition of the (possibly contracted) graph that was decoded.
  PartitionResult partition;
  /// Per-server load bound the plan aimed for; empty without load balancing.
  std::vector<Cost> load_targets;
  /// min/max ratio of server storage use and, with load, of server load.
  std::vector<std::optional<Rational>> balance;
  std::vector<Diagnostic> warnings;

  /// No storage or load capacity overrun and, with a ratio target, every
  /// server within its load target.
  [[nodiscard]] bool feasible() const;
};

/// Per-server load cap for a min/max ratio target: floor(2·total / (l·(1 + ρ))), never below ceil(total / l).
Cost load_cap_for_ratio(Cost total_load, std::size_t servers, const Rational &ratio);

PlanResult plan_dp(const Workload &w, const PlanConfig &cfg = {});
PlanResult plan_gdp(const ViewDag &dag, const PlanConfig &cfg = {});

/// Moves each query to its cheapest site among those whose load stays within
/// `load_caps` (an empty vector means unbounded). Never increases any query's
/// cost; queries with no better admissible site stay put.
Placement resite_within_load(Placement p, const Workload &w, const std::vector<Cost> &load_caps = {});

/// Same for view computation sites, given fixed storage sites.
Placement resite_views(Placement p, const ViewDag &dag, const std::vector<Cost> &load_caps = {});

struct SweepLevel {
  /// nullopt is the unconstrained (storage only) level.
  std::optional<Rational> ratio;
  PlanResult plan;
  /// True when `plan` was found at a tighter level and kept because it also
  /// satisfies this level's targets at lower cost.
  bool carried = false;
};

/// Plans at each ratio (ascending strictness after the unconstrained level)
/// and returns levels in the given order. A plan that meets a tighter level's
/// targets also meets every looser level's, so the best one seen is carried
/// over whenever it beats a looser level's own result.
std::vector<SweepLevel>
load_sweep(const Workload &w, const std::vector<std::optional<Rational>> &ratios, const PlanConfig &base = {});

/// Unconstrained, 1/5, 2/5, 3/5 and 4/5.
std::vector<std::optional<Rational>> default_load_ratios();

} // namespace placer
