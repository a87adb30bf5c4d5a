/*******************************************************************************
 * Replicated placement heuristics built on repeated unreplicated planning.
 *
 * Heuristic 1 plans once under capacity floor(s_k / r), then copies the
 * placement under r server permutations (the first one is the identity).
 * Heuristic 2 splits the servers into r blocks and plans every table once per
 * block, dropping the cheapest queries after each round.
 *
 * @file:   replication.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <vector>

#include "placer/placement.h"
#include "placer/planner.h"
#include "placer/workload.h"

namespace placer {

struct ReplicationConfig {
  std::size_t r = 1;
  std::uint64_t rng_seed = 1;
  PlanConfig plan;
};

struct ReplicationResult {
  /// Queries sited replica-aware over all copies.
  Placement placement;
  CostReport report;
  std::vector<Diagnostic> warnings;
  /// Heuristic 1: the server permutation of each round.
  std::vector<std::vector<std::size_t>> permutations;
  /// Heuristic 2: the server block and the queries planned in each round.
  std::vector<std::vector<std::size_t>> round_servers;
  std::vector<std::vector<std::size_t>> round_queries;
};

/// Throws std::invalid_argument when r < 1, or r > 1 and r >= l.
ReplicationResult heuristic1(const Workload &w, const ReplicationConfig &cfg);

/// Throws std::invalid_argument when r < 1, or r > 1 and r >= l.
ReplicationResult heuristic2(const Workload &w, const ReplicationConfig &cfg);

struct StorageOverhead {
  Cost max_used = 0;
  /// r·Σ t_j / l
  Rational desired;
};

StorageOverhead max_part_size(const Placement &p, const Workload &w, std::size_t r);

} // namespace placer
