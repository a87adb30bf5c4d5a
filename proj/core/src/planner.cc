#include "placer/planner.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace placer {

void PlanConfig::validate() const {
  partition.validate();
  if (min_max_ratio) {
    if (!with_load) {
      throw std::invalid_argument("a min/max load ratio needs load balancing enabled");
    }
    const Rational r = min_max_ratio->normalized();
    if (r.num < 0 || r.num >= r.den) {
      throw std::invalid_argument("min/max load ratio must be in [0, 1)");
    }
  }
}

bool PlanResult::feasible() const {
  for (const Diagnostic &d : report.violations) {
    if (d.severity == Severity::kError) {
      return false;
    }
  }
  for (std::size_t k = 0; k < load_targets.size(); ++k) {
    if (report.per_server[k].load_used > load_targets[k]) {
      return false;
    }
  }
  return true;
}

Cost load_cap_for_ratio(Cost total_load, std::size_t servers, const Rational &ratio) {
  const Rational r = ratio.normalized();
  const __int128 num = static_cast<__int128>(2) * total_load * r.den;
  const __int128 den = static_cast<__int128>(servers) * (r.den + r.num);
  const __int128 even = (static_cast<__int128>(total_load) + servers - 1) / servers;
  return static_cast<Cost>(std::max(even, num / den));
}

namespace {

void check_servers(std::size_t servers) {
  if (servers == 0) {
    throw std::invalid_argument("planning needs at least one server");
  }
}

// Applies the ratio cap to the load dimension and returns the load targets.
std::vector<Cost> apply_load_targets(PartGraph &g, const PlanConfig &cfg) {
  std::vector<Cost> targets;
  if (!cfg.with_load) {
    return targets;
  }
  std::optional<Cost> cap;
  if (cfg.min_max_ratio) {
    cap = load_cap_for_ratio(g.total_weight(1), g.num_parts(), *cfg.min_max_ratio);
  }
  for (auto &capacity : g.part_capacities) {
    if (cap) {
      capacity[1] = std::min(capacity[1], *cap);
    }
    targets.push_back(capacity[1]);
  }
  return targets;
}

void add_target_warnings(PlanResult &r, const std::vector<Server> &servers) {
  for (std::size_t k = 0; k < r.load_targets.size(); ++k) {
    if (r.report.per_server[k].load_used > r.load_targets[k]) {
      r.report.violations.push_back(
          {Severity::kWarning,
           "load-target",
           "server " + servers[k].id + " carries load " + std::to_string(r.report.per_server[k].load_used) +
               " above its balance target " + std::to_string(r.load_targets[k])}
      );
    }
  }
}

void fill_balance(PlanResult &r, const std::vector<Server> &servers, bool with_load) {
  std::vector<std::vector<Cost>> loads;
  std::vector<std::vector<Cost>> caps;
  for (std::size_t k = 0; k < servers.size(); ++k) {
    loads.push_back({r.report.per_server[k].storage_used, r.report.per_server[k].load_used});
    caps.push_back({servers[k].storage_capacity, 1});
  }
  r.balance.push_back(balance_ratio(loads, caps, 0));
  if (with_load) {
    r.balance.push_back(balance_ratio(loads, caps, 1));
  }
}

template <typename CostAt>
std::size_t
cheapest_admissible(std::size_t current, std::size_t servers, Cost units, const std::vector<Cost> &load,
                    const std::vector<Cost> &caps, CostAt cost_at) {
  ExtendedCost best = cost_at(current);
  std::size_t site = current;
  for (std::size_t k = 0; k < servers; ++k) {
    if (k == current || (!caps.empty() && load[k] + units > caps[k])) {
      continue;
    }
    const ExtendedCost cost = cost_at(k);
    if (cost < best) {
      best = cost;
      site = k;
    }
  }
  return site;
}

} // namespace

Placement resite_within_load(Placement p, const Workload &w, const std::vector<Cost> &load_caps) {
  std::vector<Cost> load(w.num_servers(), 0);
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    load[p.compute[i]] += w.queries[i].exec_cost * w.queries[i].frequency;
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    const Query &q = w.queries[i];
    const Cost units = q.exec_cost * q.frequency;
    const std::size_t from = p.compute[i];
    const std::size_t to = cheapest_admissible(from, w.num_servers(), units, load, load_caps, [&](std::size_t k) {
      return ExtendedCost(query_cost_at(q, p, k));
    });
    load[from] -= units;
    load[to] += units;
    p.compute[i] = to;
  }
  return p;
}

Placement resite_views(Placement p, const ViewDag &dag, const std::vector<Cost> &load_caps) {
  const std::size_t n = dag.num_views();
  std::vector<std::vector<const Arc *>> in_arcs(n);
  for (const Arc &arc : dag.arcs) {
    in_arcs[arc.consumer].push_back(&arc);
  }
  auto stored_on = [&](std::size_t view, std::size_t k) {
    return std::binary_search(p.store[view].begin(), p.store[view].end(), k);
  };
  std::vector<Cost> load(dag.num_servers(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    load[p.compute[i]] += dag.views[i].exec_cost;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Cost units = dag.views[i].exec_cost;
    const std::size_t from = p.compute[i];
    const std::size_t to = cheapest_admissible(from, dag.num_servers(), units, load, load_caps, [&](std::size_t k) {
      ExtendedCost cost = 0;
      if (!stored_on(i, k)) {
        cost += dag.views[i].transfer_cost;
      }
      for (const Arc *arc : in_arcs[i]) {
        if (!stored_on(arc->producer, k)) {
          cost += arc->cost;
        }
      }
      return cost;
    });
    load[from] -= units;
    load[to] += units;
    p.compute[i] = to;
  }
  return p;
}

PlanResult plan_dp(const Workload &w, const PlanConfig &cfg) {
  cfg.validate();
  validate(w);
  check_servers(w.num_servers());

  PartGraph g = build_dp_graph(w, cfg.with_load);
  PlanResult r;
  r.load_targets = apply_load_targets(g, cfg);
  r.warnings = validate_capacity_lower_bounds(w);
  r.partition = partition(g, cfg.partition);

  Placement p;
  const std::size_t n = w.num_tables();
  for (std::size_t j = 0; j < n; ++j) {
    p.store.push_back({r.partition.assignment[j]});
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    p.compute.push_back(r.partition.assignment[n + i]);
  }
  r.placement = cfg.with_load ? resite_within_load(std::move(p), w, r.load_targets) : resite(std::move(p), w);
  r.report = dp_cost(r.placement, w);
  add_target_warnings(r, w.servers);
  fill_balance(r, w.servers, cfg.with_load);
  return r;
}

PlanResult plan_gdp(const ViewDag &input, const PlanConfig &cfg) {
  cfg.validate();
  const ViewDag dag = cfg.pin_views ? pin_materialized_views(input) : input;
  validate(dag);
  check_servers(dag.num_servers());

  PartGraph g = build_gdp_graph(dag, cfg.with_load);
  PlanResult r;
  r.load_targets = apply_load_targets(g, cfg);
  ContractedGraph contracted = contract_infinite_edges(g);
  r.warnings = std::move(contracted.warnings);
  r.partition = partition(contracted.graph, cfg.partition);

  const PartitionAssignment full = expand_assignment(r.partition.assignment, contracted.merge_map);
  r.placement = resite_views(decode_gdp(full, dag), dag, r.load_targets);
  r.report = gdp_cost(r.placement, dag);
  add_target_warnings(r, dag.servers);
  fill_balance(r, dag.servers, cfg.with_load);
  return r;
}

std::vector<std::optional<Rational>> default_load_ratios() {
  return {std::nullopt, Rational{1, 5}, Rational{2, 5}, Rational{3, 5}, Rational{4, 5}};
}

std::vector<SweepLevel>
load_sweep(const Workload &w, const std::vector<std::optional<Rational>> &ratios, const PlanConfig &base) {
  std::vector<SweepLevel> levels;
  for (const auto &ratio : ratios) {
    PlanConfig cfg = base;
    cfg.with_load = ratio.has_value();
    cfg.min_max_ratio = ratio;
    levels.push_back({ratio, plan_dp(w, cfg), false});
  }

  // Strictest first: unconstrained is the loosest level.
  std::vector<std::size_t> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &ra = levels[a].ratio;
    const auto &rb = levels[b].ratio;
    if (!ra || !rb) {
      return ra.has_value() && !rb.has_value();
    }
    return *rb < *ra;
  });

  std::optional<std::size_t> carry;
  for (const std::size_t idx : order) {
    SweepLevel &level = levels[idx];
    const bool own_ok = level.plan.feasible();
    if (carry) {
      const PlanResult &c = levels[*carry].plan;
      if (!own_ok || c.report.total_cost < level.plan.report.total_cost) {
        PlanResult carried = c;
        carried.load_targets = level.plan.load_targets;
        level.plan = std::move(carried);
        level.carried = true;
        continue;
      }
    }
    if (own_ok) {
      carry = idx;
    }
  }
  return levels;
}

} // namespace placer
