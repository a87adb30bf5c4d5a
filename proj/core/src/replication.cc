#include "placer/replication.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace placer {

namespace {

void check_factor(std::size_t r, std::size_t l) {
  if (r < 1) {
    throw std::invalid_argument("replication factor must be at least 1");
  }
  if (r > 1 && r >= l) {
    throw std::invalid_argument(
        "replication factor " + std::to_string(r) + " needs more than " + std::to_string(r) + " servers, have " +
        std::to_string(l)
    );
  }
}

// Portable Fisher-Yates so permutations do not depend on the standard library.
std::vector<std::size_t> permutation(std::size_t n, std::mt19937_64 &rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n; i-- > 1;) {
    std::swap(perm[i], perm[rng() % (i + 1)]);
  }
  return perm;
}

void add_replica(std::vector<std::size_t> &replicas, std::size_t server) {
  const auto it = std::lower_bound(replicas.begin(), replicas.end(), server);
  if (it == replicas.end() || *it != server) {
    replicas.insert(it, server);
  }
}

ReplicationResult finish(Placement p, const Workload &w) {
  ReplicationResult r;
  p.compute.assign(w.num_queries(), 0);
  r.placement = resite(std::move(p), w);
  r.report = dp_cost(r.placement, w);
  return r;
}

} // namespace

ReplicationResult heuristic1(const Workload &w, const ReplicationConfig &cfg) {
  validate(w);
  const std::size_t l = w.num_servers();
  check_factor(cfg.r, l);

  std::vector<Diagnostic> warnings;
  for (std::size_t k = 1; k < l; ++k) {
    if (w.servers[k].storage_capacity != w.servers[0].storage_capacity) {
      warnings.push_back({Severity::kWarning,
                          "unequal-capacity",
                          "servers have different storage capacities; each server keeps capacity/r per round"});
      break;
    }
  }

  Workload reduced = w;
  for (Server &s : reduced.servers) {
    s.storage_capacity /= static_cast<Cost>(cfg.r);
  }
  for (Diagnostic &d : validate_capacity_lower_bounds(reduced)) {
    warnings.push_back(std::move(d));
  }
  const PlanResult base = plan_dp(reduced, cfg.plan);

  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<std::vector<std::size_t>> perms;
  Placement p;
  p.store.resize(w.num_tables());
  for (std::size_t h = 0; h < cfg.r; ++h) {
    std::vector<std::size_t> perm(l);
    if (h == 0) {
      std::iota(perm.begin(), perm.end(), 0);
    } else {
      perm = permutation(l, rng);
    }
    for (std::size_t j = 0; j < w.num_tables(); ++j) {
      add_replica(p.store[j], perm[base.placement.store[j].front()]);
    }
    perms.push_back(std::move(perm));
  }

  ReplicationResult r = finish(std::move(p), w);
  r.warnings = std::move(warnings);
  r.permutations = std::move(perms);
  return r;
}

ReplicationResult heuristic2(const Workload &w, const ReplicationConfig &cfg) {
  validate(w);
  const std::size_t l = w.num_servers();
  check_factor(cfg.r, l);
  const std::size_t a = l / cfg.r;
  if (a == 0) {
    throw std::invalid_argument("fewer servers than rounds");
  }
  const std::size_t drop = w.num_queries() / cfg.r;

  std::vector<Diagnostic> warnings;
  std::vector<std::size_t> remaining(w.num_queries());
  std::iota(remaining.begin(), remaining.end(), 0);
  Placement p;
  p.store.resize(w.num_tables());
  ReplicationResult out;

  for (std::size_t round = 0; round < cfg.r; ++round) {
    const std::size_t first = round * a;
    const std::size_t last = round + 1 == cfg.r ? l : first + a;

    Workload sub;
    sub.tables = w.tables;
    sub.servers.assign(w.servers.begin() + static_cast<std::ptrdiff_t>(first),
                       w.servers.begin() + static_cast<std::ptrdiff_t>(last));
    for (const std::size_t i : remaining) {
      sub.queries.push_back(w.queries[i]);
    }
    for (Diagnostic &d : validate_capacity_lower_bounds(sub)) {
      d.message = "round " + std::to_string(round + 1) + ": " + d.message;
      warnings.push_back(std::move(d));
    }
    const PlanResult plan = plan_dp(sub, cfg.plan);
    for (std::size_t j = 0; j < w.num_tables(); ++j) {
      add_replica(p.store[j], first + plan.placement.store[j].front());
    }

    std::vector<std::size_t> servers(last - first);
    std::iota(servers.begin(), servers.end(), first);
    out.round_servers.push_back(std::move(servers));
    out.round_queries.push_back(remaining);

    if (round + 1 < cfg.r) {
      std::vector<std::size_t> by_cost(remaining.size());
      std::iota(by_cost.begin(), by_cost.end(), 0);
      std::stable_sort(by_cost.begin(), by_cost.end(), [&](std::size_t x, std::size_t y) {
        const ExtendedCost cx = plan.report.per_query[x].cost;
        const ExtendedCost cy = plan.report.per_query[y].cost;
        if (!(cx == cy)) {
          return cx < cy;
        }
        return w.queries[remaining[x]].id < w.queries[remaining[y]].id;
      });
      std::vector<char> removed(remaining.size(), 0);
      for (std::size_t t = 0; t < std::min(drop, by_cost.size()); ++t) {
        removed[by_cost[t]] = 1;
      }
      std::vector<std::size_t> next;
      for (std::size_t x = 0; x < remaining.size(); ++x) {
        if (!removed[x]) {
          next.push_back(remaining[x]);
        }
      }
      remaining = std::move(next);
    }
  }

  ReplicationResult r = finish(std::move(p), w);
  r.warnings = std::move(warnings);
  r.round_servers = std::move(out.round_servers);
  r.round_queries = std::move(out.round_queries);
  return r;
}

StorageOverhead max_part_size(const Placement &p, const Workload &w, std::size_t r) {
  StorageOverhead s;
  for (const ServerUsage &u : load_report(p, w)) {
    s.max_used = std::max(s.max_used, u.storage_used);
  }
  s.desired = Rational{checked_mul(static_cast<Cost>(r), w.total_table_size()),
                       static_cast<Cost>(std::max<std::size_t>(w.num_servers(), 1))}
                  .normalized();
  return s;
}

} // namespace placer
