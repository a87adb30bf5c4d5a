/*******************************************************************************
 * Exact constructions of balanced graph partitioning instances from data
 * placement and generalized data placement instances.
 *
 * Data placement: one node per table (weight t_j), one node per query
 * (weight 0) and an edge {Q_i, T_j} of weight ν_i·C_i^j per reference. The
 * minimum legal cut equals the minimum placement cost.
 *
 * GDP: a storage node V_j (weight t_j) and a computation node V'_j (weight 0)
 * per view, an edge {V_j, V'_i} of weight C_i^j per arc (V_i, V_j), and an
 * edge {V_i, V'_i} of weight m_i per view.
 *
 * @file:   reduction.h
 ******************************************************************************/
#pragma once

#include <string>
#include <vector>

#include "placer/common.h"
#include "placer/gdp.h"
#include "placer/workload.h"

namespace placer {

enum class ObjectKind { kTable, kQuery, kView, kNone };

/// Storage nodes hold data; computation nodes are where work executes.
enum class NodeSide { kStorage, kCompute };

struct NodeOrigin {
  ObjectKind kind = ObjectKind::kNone;
  std::size_t index = 0;
  NodeSide side = NodeSide::kStorage;

  friend bool operator==(const NodeOrigin &, const NodeOrigin &) = default;
};

struct PartNode {
  std::string id;
  std::vector<Cost> weights; // length ncon
  NodeOrigin origin;
};

struct PartEdge {
  std::size_t u = 0; // u < v
  std::size_t v = 0;
  ExtendedCost weight;
};

/// Node- and edge-weighted undirected graph with one capacity vector per part.
/// No self-loops, no parallel edges, no zero-weight edges.
struct PartGraph {
  std::size_t ncon = 1;
  std::vector<PartNode> nodes;
  std::vector<PartEdge> edges;
  std::vector<std::vector<Cost>> part_capacities;

  [[nodiscard]] std::size_t num_nodes() const { return nodes.size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges.size(); }
  [[nodiscard]] std::size_t num_parts() const { return part_capacities.size(); }
  [[nodiscard]] bool has_infinite_edges() const;

  /// Σ node weights for constraint c.
  [[nodiscard]] Cost total_weight(std::size_t c) const;
};

/// Ordered partition: part index per node.
using PartitionAssignment = std::vector<std::size_t>;

/// Accumulates edges, merging parallel edges by summation and dropping
/// self-loops and zero weights. Edges come out sorted by (u, v).
class EdgeAccumulator {
public:
  void add(std::size_t a, std::size_t b, ExtendedCost weight);
  std::vector<PartEdge> finish() &&;

private:
  std::vector<PartEdge> _edges;
};

/// Bipartite table/query graph. Node order: tables (in workload order), then
/// queries. with_load adds a second constraint: tables (t_j, 0), queries
/// (0, exec_cost·ν_i); unbounded load capacities become the total load.
PartGraph build_dp_graph(const Workload &w, bool with_load = false);

/// Doubled view graph. Node order: V_1..V_n, then V'_1..V'_n. with_load puts
/// each view's exec_cost on its computation node's second component.
PartGraph build_gdp_graph(const ViewDag &dag, bool with_load = false);

struct ContractedGraph {
  PartGraph graph;
  /// original node index -> contracted node index
  std::vector<std::size_t> merge_map;
  std::vector<Diagnostic> warnings;
};

/// Merges every connected component of infinite edges into one node (weights
/// summed, finite edges coalesced). A super-node that fits in no part raises a
/// warning, not an error.
ContractedGraph contract_infinite_edges(const PartGraph &g);

/// Lifts an assignment of the contracted graph back to the original nodes.
PartitionAssignment expand_assignment(const PartitionAssignment &contracted, const std::vector<std::size_t> &merge_map);

/// Replaces infinite edges by 1 + Σ finite edge weights, for file export.
PartGraph encode_big_m(const PartGraph &g);

} // namespace placer
