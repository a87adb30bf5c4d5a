#include <algorithm>
#include <numeric>
#include <queue>

#include "multilevel.h"

namespace placer::ml {

namespace {

bool has_weight(const Csr &g, std::size_t v) {
  for (std::size_t c = 0; c < g.ncon; ++c) {
    if (g.weight(v, c) > 0) {
      return true;
    }
  }
  return false;
}

} // namespace

PartitionAssignment grow_initial_partition(const Csr &g, const Bounds &b, Rng &rng) {
  const std::size_t none = b.k;
  PartitionAssignment part(g.n, none);
  std::vector<Cost> load(b.k * g.ncon, 0);

  auto fits = [&](std::size_t v, std::size_t p) {
    for (std::size_t c = 0; c < g.ncon; ++c) {
      const Cost w = g.weight(v, c);
      if (w > 0 && load[p * g.ncon + c] + w > b.at(p, c)) {
        return false;
      }
    }
    return true;
  };
  auto assign = [&](std::size_t v, std::size_t p) {
    part[v] = p;
    for (std::size_t c = 0; c < g.ncon; ++c) {
      load[p * g.ncon + c] += g.weight(v, c);
    }
  };

  std::vector<std::size_t> part_order(b.k);
  std::iota(part_order.begin(), part_order.end(), 0);
  std::stable_sort(part_order.begin(), part_order.end(), [&](std::size_t x, std::size_t y) {
    return b.at(x, 0) > b.at(y, 0);
  });

  std::vector<std::size_t> seed_order(g.n);
  std::iota(seed_order.begin(), seed_order.end(), 0);
  std::shuffle(seed_order.begin(), seed_order.end(), rng);

  // Heap entries: (connectivity, -node) so ties resolve to the lowest id.
  using Entry = std::pair<Cost, std::int64_t>;
  std::vector<Cost> conn(g.n, 0);

  for (const std::size_t p : part_order) {
    std::fill(conn.begin(), conn.end(), 0);
    std::priority_queue<Entry> heap;
    std::size_t cursor = 0;

    while (true) {
      std::size_t chosen = none;
      while (!heap.empty()) {
        const auto [c, neg_v] = heap.top();
        heap.pop();
        const auto v = static_cast<std::size_t>(-neg_v);
        if (part[v] != none || c != conn[v] || !fits(v, p)) {
          continue;
        }
        chosen = v;
        break;
      }
      if (chosen == none) {
        // New region: next positive-weight node that still fits.
        while (cursor < seed_order.size()) {
          const std::size_t v = seed_order[cursor++];
          if (part[v] == none && has_weight(g, v) && fits(v, p)) {
            chosen = v;
            break;
          }
        }
      }
      if (chosen == none) {
        break;
      }

      assign(chosen, p);
      for (std::size_t e = g.begin(chosen); e < g.end(chosen); ++e) {
        const std::size_t u = g.adj[e];
        if (part[u] == none) {
          conn[u] += g.adjw[e];
          heap.emplace(conn[u], -static_cast<std::int64_t>(u));
        }
      }
    }
  }

  // Leftovers: best-connected part that fits, else least additional excess.
  std::vector<Cost> part_conn(b.k, 0);
  for (std::size_t v = 0; v < g.n; ++v) {
    if (part[v] != none) {
      continue;
    }
    std::fill(part_conn.begin(), part_conn.end(), 0);
    for (std::size_t e = g.begin(v); e < g.end(v); ++e) {
      if (part[g.adj[e]] != none) {
        part_conn[part[g.adj[e]]] += g.adjw[e];
      }
    }
    std::size_t best = none;
    for (const std::size_t p : part_order) {
      if (fits(v, p) && (best == none || part_conn[p] > part_conn[best])) {
        best = p;
      }
    }
    if (best == none) {
      Cost best_increase = 0;
      for (const std::size_t p : part_order) {
        Cost increase = 0;
        for (std::size_t c = 0; c < g.ncon; ++c) {
          const Cost before = std::max<Cost>(0, load[p * g.ncon + c] - b.at(p, c));
          const Cost after = std::max<Cost>(0, load[p * g.ncon + c] + g.weight(v, c) - b.at(p, c));
          increase += after - before;
        }
        if (best == none || increase < best_increase) {
          best = p;
          best_increase = increase;
        }
      }
    }
    assign(v, best);
  }
  return part;
}

} // namespace placer::ml
