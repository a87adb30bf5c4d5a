#include "support.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace placer::test {

std::string four_query_document() {
  return R"({
  "tables": [
    {"id": "T1", "size": 2}, {"id": "T2", "size": 2}, {"id": "T3", "size": 2},
    {"id": "T4", "size": 2}, {"id": "T5", "size": 1}, {"id": "T6", "size": 1}
  ],
  "queries": [
    {"id": "Q1", "refs": [{"table": "T1", "cost": 2}, {"table": "T4", "cost": 2}, {"table": "T5", "cost": 1}]},
    {"id": "Q2", "refs": [{"table": "T1", "cost": 2}, {"table": "T3", "cost": 2}, {"table": "T6", "cost": 1}]},
    {"id": "Q3", "refs": [{"table": "T1", "cost": 2}, {"table": "T5", "cost": 1}]},
    {"id": "Q4", "refs": [{"table": "T4", "cost": 2}]}
  ],
  "servers": [
    {"id": "S1", "storage_capacity": 4},
    {"id": "S2", "storage_capacity": 4},
    {"id": "S3", "storage_capacity": 4}
  ]
})";
}

Workload four_query_workload() {
  return parse_workload(four_query_document());
}

std::vector<std::size_t> four_query_table_parts() {
  return {0, 0, 2, 1, 1, 2};
}

PartitionAssignment four_query_partition() {
  PartitionAssignment a = four_query_table_parts();
  a.insert(a.end(), {1, 2, 0, 1});
  return a;
}

std::string gdp_example_document() {
  return R"({
  "views": [
    {"id": "V1", "class": "base_table", "size": 8},
    {"id": "V2", "class": "base_table", "size": 5},
    {"id": "V3", "class": "base_table", "size": 4},
    {"id": "V4", "class": "intermediate", "transfer_cost": "inf"},
    {"id": "V5", "class": "materialized_view", "size": 10},
    {"id": "V6", "class": "materialized_view", "size": 7},
    {"id": "V7", "class": "query", "transfer_cost": 0}
  ],
  "arcs": [
    {"consumer": "V4", "producer": "V1", "cost": 8},
    {"consumer": "V4", "producer": "V2", "cost": 5},
    {"consumer": "V5", "producer": "V1", "cost": 8},
    {"consumer": "V5", "producer": "V3", "cost": 4},
    {"consumer": "V6", "producer": "V2", "cost": 5},
    {"consumer": "V6", "producer": "V3", "cost": 4},
    {"consumer": "V7", "producer": "V4", "cost": 8},
    {"consumer": "V7", "producer": "V5", "cost": 10},
    {"consumer": "V7", "producer": "V6", "cost": 7}
  ],
  "servers": [
    {"id": "S1", "storage_capacity": 18},
    {"id": "S2", "storage_capacity": 18}
  ]
})";
}

ViewDag gdp_example() {
  return parse_gdp(gdp_example_document());
}

PartitionAssignment gdp_example_partition() {
  PartitionAssignment a(14, 1);
  for (const std::size_t node : {1, 2, 5, 7 + 1, 7 + 2, 7 + 4}) {
    a[node] = 0;
  }
  return a;
}

namespace {

Cost draw(std::mt19937_64 &rng, Cost lo, Cost hi) {
  return std::uniform_int_distribution<Cost>(lo, hi)(rng);
}

std::size_t draw_size(std::mt19937_64 &rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<Server> random_servers(std::mt19937_64 &rng, std::size_t l, Cost total, Cost max_item) {
  std::vector<Server> servers;
  const Cost base = (total + static_cast<Cost>(l) - 1) / static_cast<Cost>(l);
  for (std::size_t k = 0; k < l; ++k) {
    servers.push_back({"S" + std::to_string(k + 1), base + draw(rng, 0, max_item), std::nullopt});
  }
  return servers;
}

} // namespace

Workload random_workload(std::mt19937_64 &rng, const RandomWorkloadShape &shape) {
  Workload w;
  const std::size_t n = draw_size(rng, 1, shape.max_tables);
  const std::size_t m = draw_size(rng, 0, shape.max_queries);
  const std::size_t l = draw_size(rng, 1, shape.max_servers);
  Cost total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    w.tables.push_back({"T" + std::to_string(j + 1), draw(rng, 1, shape.max_value)});
    total += w.tables.back().size;
  }
  for (std::size_t i = 0; i < m; ++i) {
    Query q;
    q.id = "Q" + std::to_string(i + 1);
    std::vector<std::size_t> pool(n);
    for (std::size_t j = 0; j < n; ++j) {
      pool[j] = j;
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(draw_size(rng, 1, std::min<std::size_t>(n, 4)));
    std::sort(pool.begin(), pool.end());
    for (const std::size_t j : pool) {
      q.refs.push_back({j, draw(rng, 0, shape.max_value)});
    }
    q.frequency = draw(rng, 1, 3);
    q.exec_cost = q.total_ref_cost();
    w.queries.push_back(q);
  }
  w.servers = random_servers(rng, l, total, shape.max_value);
  validate(w);
  return w;
}

ViewDag random_dag(std::mt19937_64 &rng, std::size_t max_views, std::size_t max_servers) {
  ViewDag dag;
  const std::size_t n = draw_size(rng, 1, max_views);
  const std::size_t bases = draw_size(rng, 1, n);
  Cost total = 0;
  Cost largest = 1;
  std::vector<std::size_t> producers;
  for (std::size_t j = 0; j < n; ++j) {
    View v;
    v.id = "V" + std::to_string(j + 1);
    if (j < bases) {
      v.cls = ViewClass::kBaseTable;
      v.size = draw(rng, 1, 10);
      v.transfer_cost = ExtendedCost::infinite();
    } else {
      v.cls = static_cast<ViewClass>(draw(rng, 1, 3));
      switch (v.cls) {
      case ViewClass::kQueryOnly:
        v.transfer_cost = ExtendedCost::infinite();
        break;
      case ViewClass::kMaterializedView:
        v.size = draw(rng, 1, 10);
        v.transfer_cost = draw(rng, 0, 2) == 0 ? ExtendedCost::infinite() : ExtendedCost(draw(rng, 0, 10));
        break;
      default:
        v.transfer_cost = draw(rng, 0, 3) == 0 ? ExtendedCost::infinite() : ExtendedCost(draw(rng, 0, 10));
        break;
      }
      v.exec_cost = draw(rng, 0, 10);
      std::vector<std::size_t> pool = producers;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(std::min<std::size_t>(pool.size(), draw_size(rng, 1, 3)));
      std::sort(pool.begin(), pool.end());
      for (const std::size_t p : pool) {
        dag.arcs.push_back({j, p, draw(rng, 0, 10)});
      }
    }
    if (v.cls != ViewClass::kQueryOnly) {
      producers.push_back(j);
    }
    total += v.size;
    largest = std::max(largest, v.size);
    dag.views.push_back(v);
  }
  dag.servers = random_servers(rng, draw_size(rng, 1, max_servers), total, largest);
  validate(dag);
  return dag;
}

PartGraph random_graph(std::mt19937_64 &rng, std::size_t max_nodes, std::size_t max_parts) {
  PartGraph g;
  const std::size_t n = draw_size(rng, 1, max_nodes);
  Cost total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    g.nodes.push_back({"n" + std::to_string(v + 1), {draw(rng, 0, 3)}, {}});
    total += g.nodes.back().weights[0];
  }
  EdgeAccumulator edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (draw(rng, 0, 1) == 1) {
        edges.add(u, v, draw(rng, 1, 9));
      }
    }
  }
  g.edges = std::move(edges).finish();
  const std::size_t l = draw_size(rng, 1, max_parts);
  const Cost base = (total + static_cast<Cost>(l) - 1) / static_cast<Cost>(l);
  for (std::size_t k = 0; k < l; ++k) {
    g.part_capacities.push_back({base + draw(rng, 0, 2)});
  }
  return g;
}

namespace {

// Calls visit(choice) for every vector in {0..l-1}^n.
template <typename Visit> void for_each_assignment(std::size_t n, std::size_t l, Visit &&visit) {
  std::vector<std::size_t> choice(n, 0);
  while (true) {
    visit(choice);
    std::size_t i = 0;
    while (i < n && ++choice[i] == l) {
      choice[i] = 0;
      ++i;
    }
    if (i == n) {
      return;
    }
  }
}

} // namespace

std::optional<Cost> brute_dp_optimum(const Workload &w) {
  const std::size_t l = w.servers.size();
  std::optional<Cost> best;
  for_each_assignment(w.tables.size(), l, [&](const std::vector<std::size_t> &site) {
    std::vector<Cost> used(l, 0);
    for (std::size_t j = 0; j < site.size(); ++j) {
      used[site[j]] += w.tables[j].size;
    }
    for (std::size_t k = 0; k < l; ++k) {
      if (used[k] > w.servers[k].storage_capacity) {
        return;
      }
    }
    Cost total = 0;
    for (const Query &q : w.queries) {
      Cost cheapest = -1;
      for (std::size_t k = 0; k < l; ++k) {
        Cost c = 0;
        for (const QueryRef &ref : q.refs) {
          if (site[ref.table] != k) {
            c += q.frequency * ref.cost;
          }
        }
        if (cheapest < 0 || c < cheapest) {
          cheapest = c;
        }
      }
      total += cheapest;
    }
    if (!best || total < *best) {
      best = total;
    }
  });
  return best;
}

std::optional<Cost> brute_gdp_optimum(const ViewDag &dag) {
  const std::size_t n = dag.views.size();
  const std::size_t l = dag.servers.size();
  std::optional<Cost> best;
  for_each_assignment(2 * n, l, [&](const std::vector<std::size_t> &choice) {
    // choice[0..n) storage sites, choice[n..2n) computation sites
    std::vector<Cost> used(l, 0);
    for (std::size_t j = 0; j < n; ++j) {
      used[choice[j]] += dag.views[j].size;
    }
    for (std::size_t k = 0; k < l; ++k) {
      if (used[k] > dag.servers[k].storage_capacity) {
        return;
      }
    }
    Cost total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (choice[j] != choice[n + j]) {
        if (dag.views[j].transfer_cost.is_infinite()) {
          return;
        }
        total += dag.views[j].transfer_cost.value();
      }
    }
    for (const Arc &arc : dag.arcs) {
      if (choice[arc.producer] != choice[n + arc.consumer]) {
        total += arc.cost;
      }
    }
    if (!best || total < *best) {
      best = total;
    }
  });
  return best;
}

std::optional<Cost> brute_partition_optimum(const PartGraph &g) {
  const std::size_t l = g.part_capacities.size();
  std::optional<Cost> best;
  for_each_assignment(g.nodes.size(), l, [&](const std::vector<std::size_t> &part) {
    std::vector<std::vector<Cost>> used(l, std::vector<Cost>(g.ncon, 0));
    for (std::size_t v = 0; v < part.size(); ++v) {
      for (std::size_t c = 0; c < g.ncon; ++c) {
        used[part[v]][c] += g.nodes[v].weights[c];
      }
    }
    for (std::size_t k = 0; k < l; ++k) {
      for (std::size_t c = 0; c < g.ncon; ++c) {
        if (used[k][c] > g.part_capacities[k][c]) {
          return;
        }
      }
    }
    Cost cut = 0;
    for (const PartEdge &e : g.edges) {
      if (part[e.u] != part[e.v]) {
        if (e.weight.is_infinite()) {
          return;
        }
        cut += e.weight.value();
      }
    }
    if (!best || cut < *best) {
      best = cut;
    }
  });
  return best;
}

std::optional<Cost> brute_ip_optimum(const IpModel &m) {
  std::map<std::string, std::size_t> binary_index;
  for (std::size_t b = 0; b < m.binaries.size(); ++b) {
    binary_index.emplace(m.binaries[b], b);
  }
  std::map<std::string, std::size_t> real_index;
  for (std::size_t r = 0; r < m.bounded_reals.size(); ++r) {
    real_index.emplace(m.bounded_reals[r], r);
  }

  struct Row {
    std::vector<std::pair<Cost, std::size_t>> binary_terms;
    std::optional<std::pair<Cost, std::size_t>> real_term;
    Relation relation;
    Cost rhs;
  };
  auto to_row = [&](const std::vector<Term> &terms, Relation relation, Cost rhs) {
    Row row{{}, std::nullopt, relation, rhs};
    for (const Term &t : terms) {
      if (const auto it = binary_index.find(t.var); it != binary_index.end()) {
        row.binary_terms.emplace_back(t.coef, it->second);
      } else if (const auto rt = real_index.find(t.var); rt != real_index.end()) {
        if (row.real_term || (t.coef != 1 && t.coef != -1)) {
          throw std::invalid_argument("brute_ip_optimum: unsupported real term in a constraint");
        }
        row.real_term.emplace(t.coef, rt->second);
      } else {
        throw std::invalid_argument("brute_ip_optimum: undeclared variable " + t.var);
      }
    }
    return row;
  };
  std::vector<Row> rows;
  for (const Constraint &c : m.constraints) {
    rows.push_back(to_row(c.terms, c.relation, c.rhs));
  }
  std::vector<Cost> binary_obj(m.binaries.size(), 0);
  std::vector<Cost> real_obj(m.bounded_reals.size(), 0);
  for (const Term &t : m.objective) {
    if (const auto it = binary_index.find(t.var); it != binary_index.end()) {
      binary_obj[it->second] += t.coef;
    } else if (const auto rt = real_index.find(t.var); rt != real_index.end()) {
      real_obj[rt->second] += t.coef;
    } else {
      throw std::invalid_argument("brute_ip_optimum: undeclared objective variable " + t.var);
    }
  }
  const bool maximize = m.sense == Sense::kMaximize;

  std::optional<Cost> best;
  for_each_assignment(m.binaries.size(), 2, [&](const std::vector<std::size_t> &x) {
    std::vector<Cost> lo(m.bounded_reals.size(), 0);
    std::vector<Cost> hi(m.bounded_reals.size(), 1);
    for (const Row &row : rows) {
      Cost lhs = 0;
      for (const auto &[coef, b] : row.binary_terms) {
        lhs += coef * static_cast<Cost>(x[b]);
      }
      if (!row.real_term) {
        const bool ok = row.relation == Relation::kLessEqual ? lhs <= row.rhs
                        : row.relation == Relation::kEqual   ? lhs == row.rhs
                                                             : lhs >= row.rhs;
        if (!ok) {
          return;
        }
        continue;
      }
      // a·r + lhs REL rhs with a = ±1: bound r by a·(rhs - lhs).
      const auto [a, r] = *row.real_term;
      const Cost bound = a * (row.rhs - lhs);
      const bool upper = (row.relation == Relation::kLessEqual) == (a == 1);
      if (row.relation == Relation::kEqual) {
        lo[r] = std::max(lo[r], bound);
        hi[r] = std::min(hi[r], bound);
      } else if (upper) {
        hi[r] = std::min(hi[r], bound);
      } else {
        lo[r] = std::max(lo[r], bound);
      }
    }
    Cost value = 0;
    for (std::size_t b = 0; b < x.size(); ++b) {
      value += binary_obj[b] * static_cast<Cost>(x[b]);
    }
    for (std::size_t r = 0; r < lo.size(); ++r) {
      if (lo[r] > hi[r]) {
        return;
      }
      const bool prefer_high = maximize ? real_obj[r] > 0 : real_obj[r] < 0;
      value += real_obj[r] * (prefer_high ? hi[r] : lo[r]);
    }
    if (!best || (maximize ? value > *best : value < *best)) {
      best = value;
    }
  });
  return best;
}

} // namespace placer::test
