/*******************************************************************************
 * Balanced k-way partitioning with per-part capacity vectors (1 or 2
 * constraints), plus the external partitioner graph/partition file formats.
 *
 * The engine is multilevel: heavy-edge matching down to a small graph, greedy
 * capacity-ordered region growing there, then boundary FM refinement on every
 * level on the way back up. It runs once per (slack, seed) pair and keeps the
 * best candidate: feasible candidates first, then lowest cut.
 *
 * @file:   partitioner.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placer/common.h"
#include "placer/reduction.h"

namespace placer {

/// Ten capacity multipliers from 0 to 1/2.
std::vector<Rational> default_slack_factors();

struct PartitionConfig {
  /// During a candidate run part k may hold at most capacity_k·(1 + slack).
  std::vector<Rational> slack_factors = default_slack_factors();
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  std::size_t refinement_passes = 10;
  std::size_t coarsen_floor = 64;
  /// Worker threads for the sweep; 0 reads PLACER_THREADS, else hardware.
  std::size_t threads = 0;

  /// Throws std::invalid_argument on an empty or unsorted slack list, a
  /// negative slack, no seeds, or zero passes/floor.
  void validate() const;
};

struct CapacityViolation {
  std::size_t part = 0;
  std::size_t constraint = 0;
  Cost excess = 0;

  friend bool operator==(const CapacityViolation &, const CapacityViolation &) = default;
};

struct PartitionResult {
  PartitionAssignment assignment;
  Cost cut_weight = 0;
  /// per_part_loads[part][constraint]
  std::vector<std::vector<Cost>> per_part_loads;
  /// Overruns of the true part capacities (no slack).
  std::vector<CapacityViolation> violations;
  Rational slack;
  std::uint64_t seed = 0;

  [[nodiscard]] bool feasible() const { return violations.empty(); }
  [[nodiscard]] Cost total_excess() const;
};

/// Deterministic for a given (g, cfg), independent of thread count.
/// Throws std::invalid_argument when g has no parts, has infinite edges, or
/// its node weight vectors do not match the capacity vectors.
PartitionResult partition(const PartGraph &g, const PartitionConfig &cfg = {});

/// Cut weight of a total assignment; infinite when an infinite edge is cut.
/// Throws std::invalid_argument for a short assignment or a bad part index.
ExtendedCost recompute_cut(const PartGraph &g, const PartitionAssignment &a);

std::vector<std::vector<Cost>> compute_part_loads(const PartGraph &g, const PartitionAssignment &a);

/// Overruns of part_capacities·(1 + slack).
std::vector<CapacityViolation> find_violations(
    const PartGraph &g, const std::vector<std::vector<Cost>> &loads, const Rational &slack = {}
);

/// Packs assignment, cut, loads and violations for an arbitrary assignment.
PartitionResult evaluate_assignment(const PartGraph &g, PartitionAssignment a);

/// min load / max load over parts with positive capacity on `constraint`;
/// nullopt when every such part is empty.
std::optional<Rational> balance_ratio(
    const std::vector<std::vector<Cost>> &loads,
    const std::vector<std::vector<Cost>> &capacities,
    std::size_t constraint
);
std::optional<Rational> balance_ratio(const PartitionResult &r, const PartGraph &g, std::size_t constraint);

struct RefinementTrace {
  Cost initial_cut = 0;
  std::vector<Cost> cut_after_pass;
};

/// Runs FM passes on an existing assignment under capacity·(1 + slack).
/// Never increases the cut and never increases any part's overload.
RefinementTrace refine_assignment(
    const PartGraph &g, PartitionAssignment &a, const Rational &slack, std::size_t passes
);

/// Partitioner graph file: header "n m 011 ncon", then per node its ncon
/// weights followed by 1-based (neighbor, edge weight) pairs.
/// Throws std::invalid_argument on infinite edges; use encode_big_m first.
std::string export_graph(const PartGraph &g);

/// Reads the graph file format back. Node ids become "1".."n"; capacities
/// are not part of the format and are left empty.
PartGraph import_graph(std::string_view text);

/// Target part weights for the external tool: one "part = fraction" line per
/// part (or "part:constraint = fraction" with two constraints), where the
/// fraction is capacity_k / Σ capacities. The external tool balances against
/// fractions of the total, so heterogeneous capacities are only approximated.
std::string export_target_fractions(const PartGraph &g);

/// One 0-based part index per line, in node order.
/// Throws ParseError on a line-count mismatch or an out-of-range part.
PartitionAssignment import_partition(std::string_view text, const PartGraph &g);

} // namespace placer
