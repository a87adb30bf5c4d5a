#include <algorithm>
#include <numeric>

#include "multilevel.h"

namespace placer::ml {

Csr to_csr(const PartGraph &g) {
  Csr csr;
  csr.n = g.nodes.size();
  csr.ncon = g.ncon;
  csr.vw.reserve(csr.n * csr.ncon);
  for (const PartNode &node : g.nodes) {
    csr.vw.insert(csr.vw.end(), node.weights.begin(), node.weights.end());
  }

  std::vector<std::size_t> degree(csr.n, 0);
  for (const PartEdge &e : g.edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  csr.xadj.assign(csr.n + 1, 0);
  for (std::size_t v = 0; v < csr.n; ++v) {
    csr.xadj[v + 1] = csr.xadj[v] + degree[v];
  }
  csr.adj.resize(csr.xadj.back());
  csr.adjw.resize(csr.xadj.back());
  std::vector<std::size_t> fill(csr.xadj.begin(), csr.xadj.end() - 1);
  // Edges are sorted by (u, v), so every adjacency list comes out sorted.
  for (const PartEdge &e : g.edges) {
    csr.adj[fill[e.u]] = e.v;
    csr.adjw[fill[e.u]++] = e.weight.value();
  }
  for (const PartEdge &e : g.edges) {
    csr.adj[fill[e.v]] = e.u;
    csr.adjw[fill[e.v]++] = e.weight.value();
  }
  return csr;
}

Bounds make_bounds(const PartGraph &g, const Rational &slack) {
  Bounds b;
  b.k = g.part_capacities.size();
  b.ncon = g.ncon;
  b.max_load.reserve(b.k * b.ncon);
  for (const auto &cap : g.part_capacities) {
    for (std::size_t c = 0; c < b.ncon; ++c) {
      b.max_load.push_back(scale_by_slack(cap[c], slack));
    }
  }
  return b;
}

PartitionState::PartitionState(const Csr &g, std::size_t k, PartitionAssignment assignment)
    : _g(&g),
      _k(k),
      _part(std::move(assignment)),
      _load(k * g.ncon, 0) {
  for (std::size_t v = 0; v < g.n; ++v) {
    for (std::size_t c = 0; c < g.ncon; ++c) {
      _load[_part[v] * g.ncon + c] += g.weight(v, c);
    }
    for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
      if (g.adj[e] > v && _part[g.adj[e]] != _part[v]) {
        _cut += g.adjw[e];
      }
    }
  }
}

void PartitionState::connectivity(std::size_t v, std::vector<Cost> &conn) const {
  std::fill(conn.begin(), conn.end(), 0);
  for (std::size_t e = _g->begin(v); e < _g->end(v); ++e) {
    conn[_part[_g->adj[e]]] += _g->adjw[e];
  }
}

void PartitionState::move(std::size_t v, std::size_t to, const std::vector<Cost> &conn) {
  const std::size_t from = _part[v];
  if (from == to) {
    return;
  }
  _cut += conn[from] - conn[to];
  for (std::size_t c = 0; c < _g->ncon; ++c) {
    _load[from * _g->ncon + c] -= _g->weight(v, c);
    _load[to * _g->ncon + c] += _g->weight(v, c);
  }
  _part[v] = to;
}

bool PartitionState::fits(std::size_t v, std::size_t to, const Bounds &b) const {
  for (std::size_t c = 0; c < _g->ncon; ++c) {
    const Cost w = _g->weight(v, c);
    if (w > 0 && load(to, c) + w > b.at(to, c)) {
      return false;
    }
  }
  return true;
}

Cost PartitionState::part_excess(std::size_t p, const Bounds &b) const {
  Cost excess = 0;
  for (std::size_t c = 0; c < _g->ncon; ++c) {
    excess += std::max<Cost>(0, load(p, c) - b.at(p, c));
  }
  return excess;
}

Cost PartitionState::total_excess(const Bounds &b) const {
  Cost excess = 0;
  for (std::size_t p = 0; p < _k; ++p) {
    excess += part_excess(p, b);
  }
  return excess;
}

namespace {

// Cluster weight limit per constraint: a third of the smallest positive part
// bound. Zero-weight endpoints never count against the limit.
std::vector<Cost> cluster_limits(const Bounds &b) {
  std::vector<Cost> limits(b.ncon, 1);
  for (std::size_t c = 0; c < b.ncon; ++c) {
    Cost smallest = 0;
    for (std::size_t p = 0; p < b.k; ++p) {
      const Cost bound = b.at(p, c);
      if (bound > 0 && (smallest == 0 || bound < smallest)) {
        smallest = bound;
      }
    }
    limits[c] = std::max<Cost>(1, smallest / 3);
  }
  return limits;
}

bool can_merge(const Csr &g, std::size_t u, std::size_t v, const std::vector<Cost> &limits) {
  for (std::size_t c = 0; c < g.ncon; ++c) {
    const Cost wu = g.weight(u, c);
    const Cost wv = g.weight(v, c);
    if (wu > 0 && wv > 0 && wu + wv > limits[c]) {
      return false;
    }
  }
  return true;
}

Level contract(const Csr &fine, const std::vector<std::size_t> &match) {
  Level level;
  std::vector<std::size_t> &map = level.fine_to_coarse;
  map.assign(fine.n, fine.n);
  std::size_t coarse_n = 0;
  for (std::size_t v = 0; v < fine.n; ++v) {
    if (map[v] == fine.n) {
      map[v] = coarse_n;
      map[match[v]] = coarse_n;
      ++coarse_n;
    }
  }

  Csr &coarse = level.graph;
  coarse.n = coarse_n;
  coarse.ncon = fine.ncon;
  coarse.vw.assign(coarse_n * fine.ncon, 0);
  for (std::size_t v = 0; v < fine.n; ++v) {
    for (std::size_t c = 0; c < fine.ncon; ++c) {
      coarse.vw[map[v] * fine.ncon + c] += fine.weight(v, c);
    }
  }

  // Members of each coarse node, then one sweep per coarse node with a dense
  // scratch array to merge parallel edges.
  std::vector<std::size_t> first(coarse_n + 1, 0);
  for (std::size_t v = 0; v < fine.n; ++v) {
    ++first[map[v] + 1];
  }
  std::partial_sum(first.begin(), first.end(), first.begin());
  std::vector<std::size_t> members(fine.n);
  std::vector<std::size_t> fill(first.begin(), first.end() - 1);
  for (std::size_t v = 0; v < fine.n; ++v) {
    members[fill[map[v]]++] = v;
  }

  std::vector<Cost> scratch(coarse_n, 0);
  std::vector<std::size_t> touched;
  coarse.xadj.assign(1, 0);
  for (std::size_t cv = 0; cv < coarse_n; ++cv) {
    touched.clear();
    for (std::size_t i = first[cv]; i < first[cv + 1]; ++i) {
      const std::size_t v = members[i];
      for (std::size_t e = fine.begin(v); e < fine.end(v); ++e) {
        const std::size_t cu = map[fine.adj[e]];
        if (cu == cv) {
          continue;
        }
        if (scratch[cu] == 0) {
          touched.push_back(cu);
        }
        scratch[cu] += fine.adjw[e];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const std::size_t cu : touched) {
      coarse.adj.push_back(cu);
      coarse.adjw.push_back(scratch[cu]);
      scratch[cu] = 0;
    }
    coarse.xadj.push_back(coarse.adj.size());
  }
  return level;
}

} // namespace

std::vector<Level> coarsen(const Csr &g, const Bounds &b, std::size_t floor, Rng &rng) {
  std::vector<Level> levels;
  const std::vector<Cost> limits = cluster_limits(b);
  const Csr *current = &g;

  while (current->n > floor) {
    const Csr &fine = *current;
    std::vector<std::size_t> order(fine.n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::size_t> match(fine.n, fine.n);
    for (const std::size_t u : order) {
      if (match[u] != fine.n) {
        continue;
      }
      std::size_t best = u;
      Cost best_weight = 0;
      for (std::size_t e = fine.begin(u); e < fine.end(u); ++e) {
        const std::size_t v = fine.adj[e];
        if (match[v] != fine.n || !can_merge(fine, u, v, limits)) {
          continue;
        }
        if (fine.adjw[e] > best_weight || (fine.adjw[e] == best_weight && v < best)) {
          best = v;
          best_weight = fine.adjw[e];
        }
      }
      match[u] = best;
      match[best] = u;
    }

    Level level = contract(fine, match);
    // Less than 5% shrinkage: further levels would only cost time.
    if (level.graph.n * 20 > fine.n * 19) {
      break;
    }
    levels.push_back(std::move(level));
    current = &levels.back().graph;
  }
  return levels;
}

} // namespace placer::ml
