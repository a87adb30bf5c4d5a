#include <algorithm>
#include <optional>
#include <queue>

#include "multilevel.h"

namespace placer::ml {

void rebalance(PartitionState &state, const Bounds &b) {
  const Csr &g = state.graph();
  const std::size_t k = state.k();
  std::vector<Cost> conn(k, 0);

  // Excess of part p after adding delta·w(v) to it.
  auto excess_with = [&](std::size_t p, std::size_t v, Cost sign) {
    Cost excess = 0;
    for (std::size_t c = 0; c < g.ncon; ++c) {
      excess += std::max<Cost>(0, state.load(p, c) + sign * g.weight(v, c) - b.at(p, c));
    }
    return excess;
  };

  for (std::size_t guard = 0; guard <= g.n; ++guard) {
    if (state.total_excess(b) == 0) {
      return;
    }

    struct Candidate {
      bool fits = false;
      Cost gain = 0;
      Cost reduction = 0;
      std::size_t v = 0;
      std::size_t to = 0;
    };
    std::optional<Candidate> best;
    auto better = [](const Candidate &x, const Candidate &y) {
      if (x.fits != y.fits) {
        return x.fits;
      }
      if (x.gain != y.gain) {
        return x.gain > y.gain;
      }
      if (x.reduction != y.reduction) {
        return x.reduction > y.reduction;
      }
      return std::tie(x.v, x.to) < std::tie(y.v, y.to);
    };

    for (std::size_t v = 0; v < g.n; ++v) {
      const std::size_t from = state.part(v);
      const Cost from_before = state.part_excess(from, b);
      if (from_before == 0) {
        continue;
      }
      const Cost from_after = excess_with(from, v, -1);
      if (from_after == from_before) {
        continue;
      }
      state.connectivity(v, conn);
      for (std::size_t to = 0; to < k; ++to) {
        if (to == from) {
          continue;
        }
        const Cost to_before = state.part_excess(to, b);
        const Cost to_after = excess_with(to, v, +1);
        const Cost reduction = (from_before - from_after) - (to_after - to_before);
        if (reduction <= 0) {
          continue;
        }
        Candidate cand{to_after == to_before, conn[to] - conn[from], reduction, v, to};
        if (!best || better(cand, *best)) {
          best = cand;
        }
      }
    }
    if (!best) {
      return;
    }
    state.connectivity(best->v, conn);
    state.move(best->v, best->to, conn);
  }
}

namespace {

struct Move {
  Cost gain = 0;
  std::size_t v = 0;
  std::size_t to = 0;
};

// Max-heap order: larger gain, then lower node, then lower part.
struct MoveOrder {
  bool operator()(const Move &x, const Move &y) const {
    if (x.gain != y.gain) {
      return x.gain < y.gain;
    }
    if (x.v != y.v) {
      return x.v > y.v;
    }
    return x.to > y.to;
  }
};

// Best feasible move of a boundary node, if any.
std::optional<Move>
best_move(const PartitionState &state, const Bounds &b, std::size_t v, std::vector<Cost> &conn) {
  state.connectivity(v, conn);
  const std::size_t from = state.part(v);
  bool boundary = false;
  std::optional<Move> best;
  for (std::size_t to = 0; to < state.k(); ++to) {
    if (to == from) {
      continue;
    }
    boundary |= conn[to] > 0;
    if (!state.fits(v, to, b)) {
      continue;
    }
    const Cost gain = conn[to] - conn[from];
    if (!best || gain > best->gain) {
      best = Move{gain, v, to};
    }
  }
  return boundary ? best : std::nullopt;
}

} // namespace

Cost fm_pass(PartitionState &state, const Bounds &b) {
  const Csr &g = state.graph();
  std::vector<Cost> conn(state.k(), 0);
  std::vector<char> locked(g.n, 0);
  std::priority_queue<Move, std::vector<Move>, MoveOrder> heap;

  for (std::size_t v = 0; v < g.n; ++v) {
    if (auto m = best_move(state, b, v, conn)) {
      heap.push(*m);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> log; // (node, previous part)
  const Cost start_cut = state.cut();
  Cost best_cut = start_cut;
  std::size_t best_len = 0;
  std::size_t since_improvement = 0;
  const std::size_t patience = std::max<std::size_t>(64, g.n / 16);

  while (!heap.empty()) {
    const Move top = heap.top();
    heap.pop();
    if (locked[top.v]) {
      continue;
    }
    const auto fresh = best_move(state, b, top.v, conn);
    if (!fresh) {
      continue;
    }
    if (fresh->gain != top.gain || fresh->to != top.to) {
      heap.push(*fresh);
      continue;
    }

    log.emplace_back(top.v, state.part(top.v));
    state.move(top.v, top.to, conn);
    locked[top.v] = 1;

    if (state.cut() < best_cut) {
      best_cut = state.cut();
      best_len = log.size();
      since_improvement = 0;
    } else if (++since_improvement > patience) {
      break;
    }

    for (std::size_t e = g.begin(top.v); e < g.end(top.v); ++e) {
      const std::size_t u = g.adj[e];
      if (!locked[u]) {
        if (auto m = best_move(state, b, u, conn)) {
          heap.push(*m);
        }
      }
    }
  }

  while (log.size() > best_len) {
    const auto [v, previous] = log.back();
    log.pop_back();
    state.connectivity(v, conn);
    state.move(v, previous, conn);
  }
  return state.cut();
}

RefinementTrace fm_refine(PartitionState &state, const Bounds &b, std::size_t passes) {
  RefinementTrace trace;
  trace.initial_cut = state.cut();
  for (std::size_t pass = 0; pass < passes; ++pass) {
    const Cost before = state.cut();
    trace.cut_after_pass.push_back(fm_pass(state, b));
    if (state.cut() >= before) {
      break;
    }
  }
  return trace;
}

} // namespace placer::ml
