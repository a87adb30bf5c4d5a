#include "placer/oracle.h"

#include <algorithm>
#include <numeric>
#include <optional>

#include "placer/partitioner.h"

namespace placer {

std::string_view to_string(OracleStatus status) {
  switch (status) {
  case OracleStatus::kOptimal:
    return "optimal";
  case OracleStatus::kInfeasible:
    return "infeasible";
  case OracleStatus::kBudgetExceeded:
    return "budget-exceeded";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

OracleStatus finish_status(bool exhausted, bool found) {
  if (exhausted) {
    return OracleStatus::kBudgetExceeded;
  }
  return found ? OracleStatus::kOptimal : OracleStatus::kInfeasible;
}

/// Advances a base-`base` counter; false after the last combination.
bool next_combination(std::vector<std::size_t> &digits, std::size_t base) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < base) {
      return true;
    }
    digits[i] = 0;
  }
  return false;
}

/// Skips bin k when an earlier bin with the same capacity is still unused;
/// such bins are interchangeable for every objective here.
bool symmetric_duplicate(
    std::size_t k, const std::vector<std::size_t> &used, const std::vector<std::vector<Cost>> &capacity
) {
  if (used[k] != 0) {
    return false;
  }
  for (std::size_t q = 0; q < k; ++q) {
    if (used[q] == 0 && capacity[q] == capacity[k]) {
      return true;
    }
  }
  return false;
}

std::vector<std::vector<Cost>> storage_capacities(const std::vector<Server> &servers) {
  std::vector<std::vector<Cost>> out;
  for (const Server &s : servers) {
    out.push_back({s.storage_capacity});
  }
  return out;
}

// Tables/views by descending size, ties by index.
template <typename SizeOf> std::vector<std::size_t> size_order(std::size_t n, SizeOf size_of) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return size_of(a) > size_of(b);
  });
  return order;
}

// ---------------------------------------------------------------------------
// Data placement

class PlacementSearch {
public:
  PlacementSearch(const Workload &w, const OracleLimit &lim)
      : _w(w),
        _lim(lim),
        _capacity(storage_capacities(w.servers)),
        _site(w.num_tables(), kUnset),
        _free(w.num_servers()),
        _used(w.num_servers(), 0) {
    _order = size_order(w.num_tables(), [&](std::size_t j) { return w.tables[j].size; });
    for (std::size_t k = 0; k < w.num_servers(); ++k) {
      _free[k] = w.servers[k].storage_capacity;
    }
    _suffix.assign(_order.size() + 1, 0);
    for (std::size_t d = _order.size(); d-- > 0;) {
      _suffix[d] = _suffix[d + 1] + w.tables[_order[d]].size;
    }
  }

  OracleResult run() {
    OracleResult r;
    if (_w.num_servers() > 0) {
      dfs(0);
    }
    r.found = _best.has_value();
    r.status = finish_status(_exhausted, r.found);
    r.visited = _visited;
    if (r.found) {
      Placement p;
      for (const std::size_t k : _best_site) {
        p.store.push_back({k});
      }
      r.placement = resite(std::move(p), _w);
      r.cost = *_best;
    }
    return r;
  }

private:
  // Each query pays at least its cost against the already placed tables.
  Cost lower_bound() const {
    Cost total = 0;
    for (const Query &q : _w.queries) {
      Cost best = -1;
      for (std::size_t k = 0; k < _w.num_servers(); ++k) {
        Cost remote = 0;
        for (const QueryRef &ref : q.refs) {
          if (_site[ref.table] != kUnset && _site[ref.table] != k) {
            remote += ref.cost;
          }
        }
        if (best < 0 || remote < best) {
          best = remote;
        }
      }
      total += best * q.frequency;
    }
    return total;
  }

  void dfs(std::size_t depth) {
    if (_exhausted) {
      return;
    }
    if (++_visited > _lim.max_assignments) {
      _exhausted = true;
      return;
    }
    const Cost bound = lower_bound();
    if (_best && bound >= *_best) {
      return;
    }
    if (depth == _order.size()) {
      // All tables placed: the bound is the exact cost.
      _best = bound;
      _best_site = _site;
      return;
    }
    Cost free_total = 0;
    for (const Cost f : _free) {
      free_total += f;
    }
    if (_suffix[depth] > free_total) {
      return;
    }

    const std::size_t j = _order[depth];
    const Cost size = _w.tables[j].size;
    for (std::size_t k = 0; k < _w.num_servers(); ++k) {
      if (_free[k] < size || symmetric_duplicate(k, _used, _capacity)) {
        continue;
      }
      _site[j] = k;
      _free[k] -= size;
      ++_used[k];
      dfs(depth + 1);
      --_used[k];
      _free[k] += size;
      _site[j] = kUnset;
    }
  }

  const Workload &_w;
  const OracleLimit &_lim;
  std::vector<std::vector<Cost>> _capacity;
  std::vector<std::size_t> _order;
  std::vector<Cost> _suffix;
  std::vector<std::size_t> _site;
  std::vector<Cost> _free;
  std::vector<std::size_t> _used;
  std::uint64_t _visited = 0;
  bool _exhausted = false;
  std::optional<Cost> _best;
  std::vector<std::size_t> _best_site;
};

// ---------------------------------------------------------------------------
// GDP

// For fixed storage sites every computation site is chosen independently:
// view i at k pays Σ C over producers not stored on k, plus m_i if k ≠ ss(i).
// Undecided storage sites contribute nothing, which makes this a lower bound
// on partial assignments and the exact optimum on complete ones.
ExtendedCost gdp_sited_cost(
    const ViewDag &dag,
    const std::vector<std::vector<const Arc *>> &in_arcs,
    const std::vector<std::size_t> &ss,
    std::vector<std::size_t> *cs
) {
  ExtendedCost total = 0;
  for (std::size_t i = 0; i < dag.num_views(); ++i) {
    std::optional<ExtendedCost> best;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < dag.num_servers(); ++k) {
      ExtendedCost cost = 0;
      if (ss[i] != kUnset && ss[i] != k) {
        cost += dag.views[i].transfer_cost;
      }
      for (const Arc *arc : in_arcs[i]) {
        if (ss[arc->producer] != kUnset && ss[arc->producer] != k) {
          cost += arc->cost;
        }
      }
      if (!best || cost < *best) {
        best = cost;
        best_k = k;
      }
    }
    total += *best;
    if (cs != nullptr) {
      (*cs)[i] = best_k;
    }
  }
  return total;
}

class GdpSearch {
public:
  GdpSearch(const ViewDag &dag, const OracleLimit &lim)
      : _dag(dag),
        _lim(lim),
        _capacity(storage_capacities(dag.servers)),
        _in_arcs(dag.num_views()),
        _ss(dag.num_views(), kUnset),
        _free(dag.num_servers()),
        _used(dag.num_servers(), 0) {
    for (const Arc &arc : dag.arcs) {
      _in_arcs[arc.consumer].push_back(&arc);
    }
    _order = size_order(dag.num_views(), [&](std::size_t j) { return dag.views[j].size; });
    for (std::size_t k = 0; k < dag.num_servers(); ++k) {
      _free[k] = dag.servers[k].storage_capacity;
    }
    _suffix.assign(_order.size() + 1, 0);
    for (std::size_t d = _order.size(); d-- > 0;) {
      _suffix[d] = _suffix[d + 1] + dag.views[_order[d]].size;
    }
  }

  OracleResult run() {
    OracleResult r;
    if (_dag.num_servers() > 0) {
      dfs(0);
    }
    r.found = _best.has_value();
    r.status = finish_status(_exhausted, r.found);
    r.visited = _visited;
    if (r.found) {
      Placement p;
      p.compute.resize(_dag.num_views());
      gdp_sited_cost(_dag, _in_arcs, _best_ss, &p.compute);
      for (const std::size_t k : _best_ss) {
        p.store.push_back({k});
      }
      r.placement = std::move(p);
      r.cost = *_best;
    }
    return r;
  }

private:
  void dfs(std::size_t depth) {
    if (_exhausted) {
      return;
    }
    if (++_visited > _lim.max_assignments) {
      _exhausted = true;
      return;
    }
    const ExtendedCost bound = gdp_sited_cost(_dag, _in_arcs, _ss, nullptr);
    if (_best && !(bound < *_best)) {
      return;
    }
    if (depth == _order.size()) {
      _best = bound;
      _best_ss = _ss;
      return;
    }
    Cost free_total = 0;
    for (const Cost f : _free) {
      free_total += f;
    }
    if (_suffix[depth] > free_total) {
      return;
    }

    const std::size_t j = _order[depth];
    const Cost size = _dag.views[j].size;
    for (std::size_t k = 0; k < _dag.num_servers(); ++k) {
      if (_free[k] < size || symmetric_duplicate(k, _used, _capacity)) {
        continue;
      }
      _ss[j] = k;
      _free[k] -= size;
      ++_used[k];
      dfs(depth + 1);
      --_used[k];
      _free[k] += size;
      _ss[j] = kUnset;
    }
  }

  const ViewDag &_dag;
  const OracleLimit &_lim;
  std::vector<std::vector<Cost>> _capacity;
  std::vector<std::vector<const Arc *>> _in_arcs;
  std::vector<std::size_t> _order;
  std::vector<Cost> _suffix;
  std::vector<std::size_t> _ss;
  std::vector<Cost> _free;
  std::vector<std::size_t> _used;
  std::uint64_t _visited = 0;
  bool _exhausted = false;
  std::optional<ExtendedCost> _best;
  std::vector<std::size_t> _best_ss;
};

// ---------------------------------------------------------------------------
// Partitioning

struct Neighbor {
  std::size_t node;
  ExtendedCost weight;
};

std::vector<std::vector<Neighbor>> adjacency(const PartGraph &g) {
  std::vector<std::vector<Neighbor>> adj(g.num_nodes());
  for (const PartEdge &e : g.edges) {
    adj[e.u].push_back({e.v, e.weight});
    adj[e.v].push_back({e.u, e.weight});
  }
  return adj;
}

class PartitionSearch {
public:
  PartitionSearch(const PartGraph &g, const OracleLimit &lim)
      : _g(g),
        _lim(lim),
        _adj(adjacency(g)),
        _part(g.num_nodes(), kUnset),
        _load(g.num_parts(), std::vector<Cost>(g.ncon, 0)),
        _used(g.num_parts(), 0) {
    // Heavy nodes first; weightless nodes last so the tail can be finished in
    // closed form.
    _order = size_order(g.num_nodes(), [&](std::size_t v) {
      Cost total = 0;
      for (const Cost w : g.nodes[v].weights) {
        total += w;
      }
      return total;
    });
    _weightless_tail.assign(_order.size() + 1, true);
    for (std::size_t d = _order.size(); d-- > 0;) {
      const std::size_t v = _order[d];
      const bool weightless =
          std::all_of(g.nodes[v].weights.begin(), g.nodes[v].weights.end(), [](Cost w) { return w == 0; });
      _weightless_tail[d] = _weightless_tail[d + 1] && weightless;
    }
    _position.resize(g.num_nodes());
    for (std::size_t d = 0; d < _order.size(); ++d) {
      _position[_order[d]] = d;
    }
    // The tail is independent when no two of its nodes are adjacent.
    _independent_tail.assign(_order.size() + 1, true);
    for (std::size_t d = _order.size(); d-- > 0;) {
      const std::size_t v = _order[d];
      bool ok = _independent_tail[d + 1];
      for (const Neighbor &nb : _adj[v]) {
        ok = ok && _position[nb.node] < d;
      }
      _independent_tail[d] = ok;
    }
  }

  PartitionOracleResult run() {
    PartitionOracleResult r;
    if (_g.num_parts() > 0) {
      dfs(0);
    }
    r.found = _best.has_value();
    r.status = finish_status(_exhausted, r.found);
    r.visited = _visited;
    if (r.found) {
      r.assignment = _best_part;
      r.cut = *_best;
    }
    return r;
  }

private:
  // Cut among placed nodes plus, for each unplaced node, its cheapest part
  // against placed neighbours. Infinite when a placed pair cuts an infinite
  // edge or some unplaced node cannot avoid one.
  ExtendedCost lower_bound(std::vector<std::size_t> *best_parts) const {
    ExtendedCost total = 0;
    for (const PartEdge &e : _g.edges) {
      if (_part[e.u] != kUnset && _part[e.v] != kUnset && _part[e.u] != _part[e.v]) {
        total += e.weight;
      }
    }
    for (std::size_t v = 0; v < _g.num_nodes(); ++v) {
      if (_part[v] != kUnset) {
        continue;
      }
      std::optional<ExtendedCost> best;
      std::size_t best_p = 0;
      for (std::size_t p = 0; p < _g.num_parts(); ++p) {
        if (best_parts != nullptr && !fits(v, p)) {
          continue;
        }
        ExtendedCost cost = 0;
        for (const Neighbor &nb : _adj[v]) {
          if (_part[nb.node] != kUnset && _part[nb.node] != p) {
            cost += nb.weight;
          }
        }
        if (!best || cost < *best) {
          best = cost;
          best_p = p;
        }
      }
      if (!best) {
        return ExtendedCost::infinite();
      }
      total += *best;
      if (best_parts != nullptr) {
        (*best_parts)[v] = best_p;
      }
    }
    return total;
  }

  bool fits(std::size_t v, std::size_t p) const {
    for (std::size_t c = 0; c < _g.ncon; ++c) {
      if (_load[p][c] + _g.nodes[v].weights[c] > _g.part_capacities[p][c]) {
        return false;
      }
    }
    return true;
  }

  void record(const ExtendedCost &cut, const PartitionAssignment &a) {
    if (cut.is_infinite() || (_best && cut.value() >= *_best)) {
      return;
    }
    _best = cut.value();
    _best_part = a;
  }

  void dfs(std::size_t depth) {
    if (_exhausted) {
      return;
    }
    if (++_visited > _lim.max_assignments) {
      _exhausted = true;
      return;
    }
    const ExtendedCost bound = lower_bound(nullptr);
    if (bound.is_infinite() || (_best && bound.value() >= *_best)) {
      return;
    }
    if (depth == _order.size()) {
      record(bound, _part);
      return;
    }
    if (_weightless_tail[depth] && _independent_tail[depth]) {
      // Weightless, pairwise non-adjacent nodes fit anywhere and interact only
      // with placed nodes, so each independently takes its cheapest part.
      PartitionAssignment a = _part;
      record(lower_bound(&a), a);
      return;
    }

    const std::size_t v = _order[depth];
    for (std::size_t p = 0; p < _g.num_parts(); ++p) {
      if (!fits(v, p) || symmetric_duplicate(p, _used, _g.part_capacities)) {
        continue;
      }
      _part[v] = p;
      for (std::size_t c = 0; c < _g.ncon; ++c) {
        _load[p][c] += _g.nodes[v].weights[c];
      }
      ++_used[p];
      dfs(depth + 1);
      --_used[p];
      for (std::size_t c = 0; c < _g.ncon; ++c) {
        _load[p][c] -= _g.nodes[v].weights[c];
      }
      _part[v] = kUnset;
    }
  }

  const PartGraph &_g;
  const OracleLimit &_lim;
  std::vector<std::vector<Neighbor>> _adj;
  std::vector<std::size_t> _order;
  std::vector<std::size_t> _position;
  std::vector<bool> _weightless_tail;
  std::vector<bool> _independent_tail;
  PartitionAssignment _part;
  std::vector<std::vector<Cost>> _load;
  std::vector<std::size_t> _used;
  std::uint64_t _visited = 0;
  bool _exhausted = false;
  std::optional<Cost> _best;
  PartitionAssignment _best_part;
};

} // namespace

OracleResult optimal_placement(const Workload &w, const OracleLimit &lim) {
  return PlacementSearch(w, lim).run();
}

OracleResult exhaustive_placement(const Workload &w, const OracleLimit &lim) {
  OracleResult r;
  const std::size_t l = w.num_servers();
  if (l == 0) {
    return r;
  }
  std::vector<std::size_t> sites(w.num_tables(), 0);
  std::optional<Cost> best;
  bool exhausted = false;
  do {
    if (++r.visited > lim.max_assignments) {
      exhausted = true;
      break;
    }
    std::vector<Cost> used(l, 0);
    for (std::size_t j = 0; j < sites.size(); ++j) {
      used[sites[j]] += w.tables[j].size;
    }
    bool legal = true;
    for (std::size_t k = 0; k < l; ++k) {
      legal = legal && used[k] <= w.servers[k].storage_capacity;
    }
    if (!legal) {
      continue;
    }
    Placement p;
    for (const std::size_t k : sites) {
      p.store.push_back({k});
    }
    Cost cost = 0;
    for (const Query &q : w.queries) {
      cost += best_site(q, p, w).second;
    }
    if (!best || cost < *best) {
      best = cost;
      r.placement = resite(std::move(p), w);
    }
  } while (next_combination(sites, l));
  r.found = best.has_value();
  r.status = finish_status(exhausted, r.found);
  if (best) {
    r.cost = *best;
  }
  return r;
}

OracleResult optimal_gdp(const ViewDag &dag, const OracleLimit &lim) {
  return GdpSearch(dag, lim).run();
}

OracleResult exhaustive_gdp(const ViewDag &dag, const OracleLimit &lim) {
  OracleResult r;
  const std::size_t l = dag.num_servers();
  const std::size_t n = dag.num_views();
  if (l == 0) {
    return r;
  }
  // digits[0..n) are storage sites, digits[n..2n) computation sites.
  std::vector<std::size_t> digits(2 * n, 0);
  std::optional<ExtendedCost> best;
  bool exhausted = false;
  do {
    if (++r.visited > lim.max_assignments) {
      exhausted = true;
      break;
    }
    std::vector<Cost> used(l, 0);
    for (std::size_t j = 0; j < n; ++j) {
      used[digits[j]] += dag.views[j].size;
    }
    bool legal = true;
    for (std::size_t k = 0; k < l; ++k) {
      legal = legal && used[k] <= dag.servers[k].storage_capacity;
    }
    if (!legal) {
      continue;
    }
    Placement p;
    for (std::size_t j = 0; j < n; ++j) {
      p.store.push_back({digits[j]});
      p.compute.push_back(digits[n + j]);
    }
    const ExtendedCost cost = gdp_cost(p, dag).total_cost;
    if (cost.is_finite() && (!best || cost < *best)) {
      best = cost;
      r.placement = std::move(p);
    }
  } while (next_combination(digits, l));
  r.found = best.has_value();
  r.status = finish_status(exhausted, r.found);
  if (best) {
    r.cost = *best;
  }
  return r;
}

PartitionOracleResult optimal_partition(const PartGraph &g, const OracleLimit &lim) {
  return PartitionSearch(g, lim).run();
}

PartitionOracleResult exhaustive_partition(const PartGraph &g, const OracleLimit &lim) {
  PartitionOracleResult r;
  const std::size_t k = g.num_parts();
  if (k == 0) {
    return r;
  }
  PartitionAssignment a(g.num_nodes(), 0);
  std::optional<Cost> best;
  bool exhausted = false;
  do {
    if (++r.visited > lim.max_assignments) {
      exhausted = true;
      break;
    }
    const auto loads = compute_part_loads(g, a);
    if (!find_violations(g, loads).empty()) {
      continue;
    }
    const ExtendedCost cut = recompute_cut(g, a);
    if (cut.is_finite() && (!best || cut.value() < *best)) {
      best = cut.value();
      r.assignment = a;
    }
  } while (next_combination(a, k));
  r.found = best.has_value();
  r.status = finish_status(exhausted, r.found);
  if (best) {
    r.cut = *best;
  }
  return r;
}

} // namespace placer
