#include "placer/placement.h"

#include <algorithm>
#include <stdexcept>

namespace placer {

namespace {

void check_common(const Placement &p, std::size_t n_store, std::size_t n_compute, std::size_t n_servers) {
  if (p.store.size() != n_store) {
    throw std::invalid_argument(
        "placement stores " + std::to_string(p.store.size()) + " objects, expected " + std::to_string(n_store)
    );
  }
  if (p.compute.size() != n_compute) {
    throw std::invalid_argument(
        "placement sites " + std::to_string(p.compute.size()) + " objects, expected " + std::to_string(n_compute)
    );
  }
  for (const auto &replicas : p.store) {
    if (replicas.empty()) {
      throw std::invalid_argument("every stored object needs at least one server");
    }
    if (!std::is_sorted(replicas.begin(), replicas.end()) ||
        std::adjacent_find(replicas.begin(), replicas.end()) != replicas.end()) {
      throw std::invalid_argument("replica sets must be sorted and duplicate free");
    }
    if (replicas.back() >= n_servers) {
      throw std::invalid_argument("server index " + std::to_string(replicas.back()) + " out of range");
    }
  }
  for (const std::size_t site : p.compute) {
    if (site >= n_servers) {
      throw std::invalid_argument("server index " + std::to_string(site) + " out of range");
    }
  }
}

bool stored_on(const Placement &p, std::size_t object, std::size_t server) {
  const auto &replicas = p.store[object];
  return std::binary_search(replicas.begin(), replicas.end(), server);
}

std::size_t node_part(const PartitionAssignment &a, const std::vector<std::size_t> &merge_map, std::size_t node) {
  return a.at(merge_map.empty() ? node : merge_map.at(node));
}

void capacity_violations(
    const std::vector<ServerUsage> &usage, const std::vector<Server> &servers, std::vector<Diagnostic> &out
) {
  for (std::size_t k = 0; k < servers.size(); ++k) {
    if (usage[k].storage_used > servers[k].storage_capacity) {
      out.push_back({Severity::kError,
                     "storage-capacity",
                     "server " + servers[k].id + " stores " + std::to_string(usage[k].storage_used) +
                         " of capacity " + std::to_string(servers[k].storage_capacity)});
    }
    if (servers[k].load_capacity && usage[k].load_used > *servers[k].load_capacity) {
      out.push_back({Severity::kError,
                     "load-capacity",
                     "server " + servers[k].id + " carries load " + std::to_string(usage[k].load_used) +
                         " of capacity " + std::to_string(*servers[k].load_capacity)});
    }
  }
}

} // namespace

void check_placement(const Placement &p, const Workload &w) {
  check_common(p, w.num_tables(), w.num_queries(), w.num_servers());
}

void check_placement(const Placement &p, const ViewDag &dag) {
  check_common(p, dag.num_views(), dag.num_views(), dag.num_servers());
}

Cost query_cost_at(const Query &q, const Placement &p, std::size_t site) {
  Cost remote = 0;
  for (const QueryRef &ref : q.refs) {
    if (!stored_on(p, ref.table, site)) {
      remote = checked_add(remote, ref.cost);
    }
  }
  return checked_mul(remote, q.frequency);
}

std::pair<std::size_t, Cost> best_site(const Query &q, const Placement &p, const Workload &w) {
  std::pair<std::size_t, Cost> best{0, query_cost_at(q, p, 0)};
  for (std::size_t k = 1; k < w.num_servers(); ++k) {
    const Cost cost = query_cost_at(q, p, k);
    if (cost < best.second) {
      best = {k, cost};
    }
  }
  return best;
}

Placement resite(Placement p, const Workload &w) {
  p.compute.resize(w.num_queries());
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    p.compute[i] = best_site(w.queries[i], p, w).first;
  }
  return p;
}

Placement decode_dp(const PartitionAssignment &a, const Workload &w, const std::vector<std::size_t> &merge_map) {
  Placement p;
  p.store.resize(w.num_tables());
  for (std::size_t j = 0; j < w.num_tables(); ++j) {
    p.store[j] = {node_part(a, merge_map, j)};
  }
  return resite(std::move(p), w);
}

Placement decode_gdp(const PartitionAssignment &a, const ViewDag &dag, const std::vector<std::size_t> &merge_map) {
  const std::size_t n = dag.num_views();
  Placement p;
  p.store.resize(n);
  p.compute.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    p.store[j] = {node_part(a, merge_map, j)};
    p.compute[j] = node_part(a, merge_map, n + j);
  }
  return p;
}

std::vector<ServerUsage> load_report(const Placement &p, const Workload &w) {
  check_placement(p, w);
  std::vector<ServerUsage> usage(w.num_servers());
  for (std::size_t j = 0; j < w.num_tables(); ++j) {
    for (const std::size_t k : p.store[j]) {
      usage[k].storage_used = checked_add(usage[k].storage_used, w.tables[j].size);
    }
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    const Query &q = w.queries[i];
    usage[p.compute[i]].load_used =
        checked_add(usage[p.compute[i]].load_used, checked_mul(q.exec_cost, q.frequency));
  }
  return usage;
}

std::vector<ServerUsage> load_report(const Placement &p, const ViewDag &dag) {
  check_placement(p, dag);
  std::vector<ServerUsage> usage(dag.num_servers());
  for (std::size_t j = 0; j < dag.num_views(); ++j) {
    for (const std::size_t k : p.store[j]) {
      usage[k].storage_used = checked_add(usage[k].storage_used, dag.views[j].size);
    }
    usage[p.compute[j]].load_used = checked_add(usage[p.compute[j]].load_used, dag.views[j].exec_cost);
  }
  return usage;
}

CostReport dp_cost(const Placement &p, const Workload &w) {
  check_placement(p, w);
  CostReport r;
  r.total_cost = 0;
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    const Query &q = w.queries[i];
    const Cost cost = query_cost_at(q, p, p.compute[i]);
    r.per_query.push_back({q.id, p.compute[i], cost});
    r.total_cost += cost;
  }
  r.per_server = load_report(p, w);
  capacity_violations(r.per_server, w.servers, r.violations);
  return r;
}

CostReport gdp_cost(const Placement &p, const ViewDag &dag) {
  check_placement(p, dag);
  const std::size_t n = dag.num_views();
  std::vector<ExtendedCost> view_cost(n, ExtendedCost(0));
  std::vector<Diagnostic> split;
  for (std::size_t i = 0; i < n; ++i) {
    if (!stored_on(p, i, p.compute[i])) {
      view_cost[i] += dag.views[i].transfer_cost;
      if (dag.views[i].transfer_cost.is_infinite()) {
        split.push_back({Severity::kError,
                         "infinite-split",
                         "view " + dag.views[i].id + " is computed away from its storage but cannot be shipped"});
      }
    }
  }
  for (const Arc &arc : dag.arcs) {
    if (!stored_on(p, arc.producer, p.compute[arc.consumer])) {
      view_cost[arc.consumer] += arc.cost;
    }
  }

  CostReport r;
  r.total_cost = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r.per_query.push_back({dag.views[i].id, p.compute[i], view_cost[i]});
    r.total_cost += view_cost[i];
  }
  r.per_server = load_report(p, dag);
  r.violations = std::move(split);
  capacity_violations(r.per_server, dag.servers, r.violations);
  return r;
}

PartitionAssignment encode_dp(const Placement &p, const Workload &w) {
  check_placement(p, w);
  PartitionAssignment a;
  a.reserve(w.num_tables() + w.num_queries());
  for (const auto &replicas : p.store) {
    a.push_back(replicas.front());
  }
  a.insert(a.end(), p.compute.begin(), p.compute.end());
  return a;
}

PartitionAssignment encode_gdp(const Placement &p, const ViewDag &dag) {
  check_placement(p, dag);
  PartitionAssignment a;
  a.reserve(2 * dag.num_views());
  for (const auto &replicas : p.store) {
    a.push_back(replicas.front());
  }
  a.insert(a.end(), p.compute.begin(), p.compute.end());
  return a;
}

} // namespace placer
