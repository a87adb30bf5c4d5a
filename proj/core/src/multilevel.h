// Internal data structures of the multilevel partitioner.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "placer/partitioner.h"

namespace placer::ml {

using Rng = std::mt19937_64;

/// Compressed adjacency with finite positive edge weights.
struct Csr {
  std::size_t n = 0;
  std::size_t ncon = 1;
  std::vector<std::size_t> xadj{0};
  std::vector<std::size_t> adj;
  std::vector<Cost> adjw;
  std::vector<Cost> vw; // n * ncon

  [[nodiscard]] Cost weight(std::size_t v, std::size_t c) const { return vw[v * ncon + c]; }
  [[nodiscard]] std::size_t begin(std::size_t v) const { return xadj[v]; }
  [[nodiscard]] std::size_t end(std::size_t v) const { return xadj[v + 1]; }
};

Csr to_csr(const PartGraph &g);

/// Per-part upper bounds, max_load[part * ncon + c].
struct Bounds {
  std::size_t k = 0;
  std::size_t ncon = 1;
  std::vector<Cost> max_load;

  [[nodiscard]] Cost at(std::size_t p, std::size_t c) const { return max_load[p * ncon + c]; }
};

Bounds make_bounds(const PartGraph &g, const Rational &slack);

/// Assignment plus incrementally maintained loads and cut.
class PartitionState {
public:
  PartitionState(const Csr &g, std::size_t k, PartitionAssignment assignment);

  [[nodiscard]] std::size_t part(std::size_t v) const { return _part[v]; }
  [[nodiscard]] Cost load(std::size_t p, std::size_t c) const { return _load[p * _g->ncon + c]; }
  [[nodiscard]] Cost cut() const { return _cut; }
  [[nodiscard]] std::size_t k() const { return _k; }
  [[nodiscard]] const Csr &graph() const { return *_g; }
  [[nodiscard]] const PartitionAssignment &assignment() const { return _part; }
  PartitionAssignment take_assignment() && { return std::move(_part); }

  /// Fills conn[p] with the edge weight from v into part p (conn sized k).
  void connectivity(std::size_t v, std::vector<Cost> &conn) const;

  /// Moves v; conn must be the current connectivity of v.
  void move(std::size_t v, std::size_t to, const std::vector<Cost> &conn);

  [[nodiscard]] bool fits(std::size_t v, std::size_t to, const Bounds &b) const;
  [[nodiscard]] Cost part_excess(std::size_t p, const Bounds &b) const;
  [[nodiscard]] Cost total_excess(const Bounds &b) const;

private:
  const Csr *_g;
  std::size_t _k;
  PartitionAssignment _part;
  std::vector<Cost> _load;
  Cost _cut = 0;
};

struct Level {
  Csr graph;
  std::vector<std::size_t> fine_to_coarse; // maps the previous (finer) level
};

/// Heavy-edge matching until the graph has at most `floor` nodes or stops
/// shrinking. Returns the coarse levels, finest first.
std::vector<Level> coarsen(const Csr &g, const Bounds &b, std::size_t floor, Rng &rng);

/// Greedy region growing over parts in descending capacity order; the last
/// part takes the remainder.
PartitionAssignment grow_initial_partition(const Csr &g, const Bounds &b, Rng &rng);

/// Moves nodes out of overloaded parts until no part exceeds its bound or no
/// move reduces the total excess.
void rebalance(PartitionState &state, const Bounds &b);

/// One FM pass with rollback to the best prefix; returns the cut afterwards.
Cost fm_pass(PartitionState &state, const Bounds &b);

/// Up to `passes` FM passes, stopping early once a pass does not improve.
RefinementTrace fm_refine(PartitionState &state, const Bounds &b, std::size_t passes);

} // namespace placer::ml
