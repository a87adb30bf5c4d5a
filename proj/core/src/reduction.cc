#include "placer/reduction.h"

#include <algorithm>
#include <numeric>

namespace placer {

bool PartGraph::has_infinite_edges() const {
  return std::any_of(edges.begin(), edges.end(), [](const PartEdge &e) {
    return e.weight.is_infinite();
  });
}

Cost PartGraph::total_weight(std::size_t c) const {
  Cost total = 0;
  for (const PartNode &node : nodes) {
    total = checked_add(total, node.weights.at(c));
  }
  return total;
}

void EdgeAccumulator::add(std::size_t a, std::size_t b, ExtendedCost weight) {
  if (a == b || weight == ExtendedCost(0)) {
    return;
  }
  _edges.push_back({std::min(a, b), std::max(a, b), weight});
}

std::vector<PartEdge> EdgeAccumulator::finish() && {
  std::stable_sort(_edges.begin(), _edges.end(), [](const PartEdge &x, const PartEdge &y) {
    return std::tie(x.u, x.v) < std::tie(y.u, y.v);
  });
  std::vector<PartEdge> merged;
  for (const PartEdge &e : _edges) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

namespace {

std::vector<std::vector<Cost>> server_capacities(const std::vector<Server> &servers, bool with_load, Cost total_load) {
  std::vector<std::vector<Cost>> caps;
  caps.reserve(servers.size());
  for (const Server &s : servers) {
    if (with_load) {
      caps.push_back({s.storage_capacity, s.load_capacity.value_or(total_load)});
    } else {
      caps.push_back({s.storage_capacity});
    }
  }
  return caps;
}

} // namespace

PartGraph build_dp_graph(const Workload &w, bool with_load) {
  PartGraph g;
  g.ncon = with_load ? 2 : 1;
  const std::size_t n = w.tables.size();

  for (std::size_t j = 0; j < n; ++j) {
    const Table &t = w.tables[j];
    std::vector<Cost> weights{t.size};
    if (with_load) {
      weights.push_back(0);
    }
    g.nodes.push_back({t.id, std::move(weights), {ObjectKind::kTable, j, NodeSide::kStorage}});
  }

  Cost total_load = 0;
  EdgeAccumulator edges;
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const Query &q = w.queries[i];
    std::vector<Cost> weights{0};
    if (with_load) {
      const Cost load = checked_mul(q.exec_cost, q.frequency);
      weights.push_back(load);
      total_load = checked_add(total_load, load);
    }
    g.nodes.push_back({q.id, std::move(weights), {ObjectKind::kQuery, i, NodeSide::kCompute}});
    for (const QueryRef &ref : q.refs) {
      edges.add(n + i, ref.table, checked_mul(q.frequency, ref.cost));
    }
  }
  g.edges = std::move(edges).finish();
  g.part_capacities = server_capacities(w.servers, with_load, total_load);
  return g;
}

PartGraph build_gdp_graph(const ViewDag &dag, bool with_load) {
  PartGraph g;
  g.ncon = with_load ? 2 : 1;
  const std::size_t n = dag.views.size();

  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Cost> weights{dag.views[j].size};
    if (with_load) {
      weights.push_back(0);
    }
    g.nodes.push_back({dag.views[j].id, std::move(weights), {ObjectKind::kView, j, NodeSide::kStorage}});
  }
  Cost total_load = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Cost> weights{0};
    if (with_load) {
      weights.push_back(dag.views[j].exec_cost);
      total_load = checked_add(total_load, dag.views[j].exec_cost);
    }
    g.nodes.push_back({dag.views[j].id + "'", std::move(weights), {ObjectKind::kView, j, NodeSide::kCompute}});
  }

  EdgeAccumulator edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.add(i, n + i, dag.views[i].transfer_cost);
  }
  for (const Arc &a : dag.arcs) {
    edges.add(a.producer, n + a.consumer, a.cost);
  }
  g.edges = std::move(edges).finish();
  g.part_capacities = server_capacities(dag.servers, with_load, total_load);
  return g;
}

namespace {

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : _parent(n) {
    std::iota(_parent.begin(), _parent.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (_parent[x] != x) {
      _parent[x] = _parent[_parent[x]];
      x = _parent[x];
    }
    return x;
  }

  // The smaller index always becomes the root.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      _parent[std::max(a, b)] = std::min(a, b);
    }
  }

private:
  std::vector<std::size_t> _parent;
};

} // namespace

ContractedGraph contract_infinite_edges(const PartGraph &g) {
  const std::size_t n = g.nodes.size();
  UnionFind uf(n);
  for (const PartEdge &e : g.edges) {
    if (e.weight.is_infinite()) {
      uf.unite(e.u, e.v);
    }
  }

  ContractedGraph out;
  out.graph.ncon = g.ncon;
  out.graph.part_capacities = g.part_capacities;
  out.merge_map.assign(n, 0);

  std::vector<std::size_t> root_to_new(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t root = uf.find(v);
    if (root_to_new[root] == n) {
      root_to_new[root] = out.graph.nodes.size();
      PartNode node = g.nodes[v];
      out.graph.nodes.push_back(std::move(node));
    } else {
      PartNode &super = out.graph.nodes[root_to_new[root]];
      super.id += "+" + g.nodes[v].id;
      for (std::size_t c = 0; c < g.ncon; ++c) {
        super.weights[c] = checked_add(super.weights[c], g.nodes[v].weights[c]);
      }
    }
    out.merge_map[v] = root_to_new[root];
  }

  EdgeAccumulator edges;
  for (const PartEdge &e : g.edges) {
    if (e.weight.is_infinite()) {
      continue;
    }
    edges.add(out.merge_map[e.u], out.merge_map[e.v], e.weight);
  }
  out.graph.edges = std::move(edges).finish();

  for (const PartNode &node : out.graph.nodes) {
    const bool fits_somewhere = std::any_of(
        g.part_capacities.begin(),
        g.part_capacities.end(),
        [&](const std::vector<Cost> &cap) {
          for (std::size_t c = 0; c < g.ncon; ++c) {
            if (node.weights[c] > cap[c]) {
              return false;
            }
          }
          return true;
        }
    );
    if (!fits_somewhere) {
      out.warnings.push_back(
          {Severity::kWarning, "oversized-node", "merged node '" + node.id + "' exceeds every part capacity"}
      );
    }
  }
  return out;
}

PartitionAssignment
expand_assignment(const PartitionAssignment &contracted, const std::vector<std::size_t> &merge_map) {
  PartitionAssignment out(merge_map.size());
  for (std::size_t v = 0; v < merge_map.size(); ++v) {
    out[v] = contracted.at(merge_map[v]);
  }
  return out;
}

PartGraph encode_big_m(const PartGraph &g) {
  Cost big_m = 1;
  for (const PartEdge &e : g.edges) {
    if (e.weight.is_finite()) {
      big_m = checked_add(big_m, e.weight.value());
    }
  }
  PartGraph out = g;
  for (PartEdge &e : out.edges) {
    if (e.weight.is_infinite()) {
      e.weight = big_m;
    }
  }
  return out;
}

} // namespace placer
