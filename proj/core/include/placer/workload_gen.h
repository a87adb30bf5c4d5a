/*******************************************************************************
 * Seeded synthetic workloads: a random shape for scalability runs and a
 * decision-support shape with 7 large fact tables, 17 small dimension tables
 * and 99 queries.
 *
 * All randomness comes from std::mt19937_64 with hand-written sampling
 * (Box-Muller normals, modulo-reduced integers), so a seed yields the same
 * workload with any standard library.
 *
 * @file:   workload_gen.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "placer/workload.h"

namespace placer {

enum class GenShape { kRandom, kTpcDsLike };

std::string_view to_string(GenShape shape);
GenShape parse_gen_shape(std::string_view text);

struct NormalDist {
  double mean = 0.0;
  double stddev = 1.0;
};

struct GenSpec {
  GenShape shape = GenShape::kRandom;
  /// Random shape only; the decision-support shape has fixed counts.
  std::size_t n_tables = 100;
  std::size_t n_queries = 100;
  NormalDist size_dist{10.0, 15.0};
  NormalDist refs_dist{5.0, 3.0};
  std::uint64_t seed = 1;
  std::size_t n_servers = 4;
  /// Per-server storage capacity; by default max(largest table,
  /// ceil(1.05 · total size / n_servers)).
  std::optional<Cost> capacity;

  /// Throws std::invalid_argument on zero counts or a nonpositive stddev.
  void validate() const;
};

/// Random: sizes are floor(x) of normal draws redrawn until x >= 1; refs per
/// query likewise, clamped to n_tables; referenced tables uniform without
/// replacement; C_i^j = t_j.
/// TpcDsLike: fact sizes uniform in [50, 100], dimension sizes in [1, 10];
/// every query reads one fact table plus 0..12 further tables, the first
/// query reading one table and the second reading thirteen.
Workload generate(const GenSpec &spec);

/// The sampling primitives the generators use.
class GenRng {
public:
  explicit GenRng(std::uint64_t seed) : _engine(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double normal(const NormalDist &d);
  /// floor(x) for a normal draw x redrawn until x >= 1.
  Cost floor_truncated(const NormalDist &d);
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);
  /// Uniform integer in [lo, hi].
  Cost between(Cost lo, Cost hi);

private:
  std::mt19937_64 _engine;
  std::optional<double> _spare;
};

} // namespace placer
