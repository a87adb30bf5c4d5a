/*******************************************************************************
 * Exact solvers for small instances. The branch-and-bound variants and the
 * plain enumerators share result types so tests can cross-check them.
 *
 * Storage capacities are the only constraint the placement oracles enforce;
 * multi-constraint instances go through optimal_partition.
 *
 * @file:   oracle.h
 ******************************************************************************/
#pragma once

#include <cstdint>

#include "placer/gdp.h"
#include "placer/placement.h"
#include "placer/reduction.h"
#include "placer/workload.h"

namespace placer {

struct OracleLimit {
  /// Search nodes (partial or complete assignments) visited before giving up.
  std::uint64_t max_assignments = 100'000'000;
};

enum class OracleStatus { kOptimal, kInfeasible, kBudgetExceeded };

std::string_view to_string(OracleStatus status);

struct OracleResult {
  OracleStatus status = OracleStatus::kInfeasible;
  /// Best placement found; meaningful when `found`.
  bool found = false;
  Placement placement;
  ExtendedCost cost;
  std::uint64_t visited = 0;
};

struct PartitionOracleResult {
  OracleStatus status = OracleStatus::kInfeasible;
  bool found = false;
  PartitionAssignment assignment;
  Cost cut = 0;
  std::uint64_t visited = 0;
};

/// Minimum total cost over table placements obeying storage capacities, with
/// every query at its best site.
OracleResult optimal_placement(const Workload &w, const OracleLimit &lim = {});
OracleResult exhaustive_placement(const Workload &w, const OracleLimit &lim = {});

/// Minimum view placement cost over all (cs, ss) obeying storage capacities.
OracleResult optimal_gdp(const ViewDag &dag, const OracleLimit &lim = {});
/// Enumerates storage and computation sites of every view independently.
OracleResult exhaustive_gdp(const ViewDag &dag, const OracleLimit &lim = {});

/// Minimum cut over assignments within the part capacities (no slack).
/// Cutting an infinite edge is treated as illegal.
PartitionOracleResult optimal_partition(const PartGraph &g, const OracleLimit &lim = {});
PartitionOracleResult exhaustive_partition(const PartGraph &g, const OracleLimit &lim = {});

} // namespace placer
