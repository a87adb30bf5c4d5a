#include "placer/partitioner.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "multilevel.h"

namespace placer {

std::vector<Rational> default_slack_factors() {
  return {{0, 1}, {1, 50}, {1, 20}, {2, 25}, {1, 10}, {3, 20}, {1, 5}, {3, 10}, {2, 5}, {1, 2}};
}

void PartitionConfig::validate() const {
  if (slack_factors.empty()) {
    throw std::invalid_argument("at least one slack factor is required");
  }
  for (std::size_t i = 0; i < slack_factors.size(); ++i) {
    if (slack_factors[i].den <= 0 || slack_factors[i].num < 0) {
      throw std::invalid_argument("slack factors must be nonnegative");
    }
    if (i > 0 && slack_factors[i] < slack_factors[i - 1]) {
      throw std::invalid_argument("slack factors must be sorted ascending");
    }
  }
  if (seeds.empty()) {
    throw std::invalid_argument("at least one seed is required");
  }
  if (refinement_passes == 0 || coarsen_floor == 0) {
    throw std::invalid_argument("refinement_passes and coarsen_floor must be positive");
  }
}

Cost PartitionResult::total_excess() const {
  Cost total = 0;
  for (const CapacityViolation &v : violations) {
    total += v.excess;
  }
  return total;
}

ExtendedCost recompute_cut(const PartGraph &g, const PartitionAssignment &a) {
  if (a.size() != g.nodes.size()) {
    throw std::invalid_argument(
        "assignment covers " + std::to_string(a.size()) + " of " + std::to_string(g.nodes.size()) + " nodes"
    );
  }
  for (const std::size_t p : a) {
    if (p >= g.num_parts()) {
      throw std::invalid_argument("part index " + std::to_string(p) + " out of range");
    }
  }
  ExtendedCost cut = 0;
  for (const PartEdge &e : g.edges) {
    if (a[e.u] != a[e.v]) {
      cut += e.weight;
    }
  }
  return cut;
}

std::vector<std::vector<Cost>> compute_part_loads(const PartGraph &g, const PartitionAssignment &a) {
  std::vector<std::vector<Cost>> loads(g.num_parts(), std::vector<Cost>(g.ncon, 0));
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    for (std::size_t c = 0; c < g.ncon; ++c) {
      loads.at(a.at(v))[c] = checked_add(loads[a[v]][c], g.nodes[v].weights[c]);
    }
  }
  return loads;
}

std::vector<CapacityViolation>
find_violations(const PartGraph &g, const std::vector<std::vector<Cost>> &loads, const Rational &slack) {
  std::vector<CapacityViolation> out;
  for (std::size_t p = 0; p < loads.size(); ++p) {
    for (std::size_t c = 0; c < g.ncon; ++c) {
      const Cost bound = scale_by_slack(g.part_capacities[p][c], slack);
      if (loads[p][c] > bound) {
        out.push_back({p, c, loads[p][c] - bound});
      }
    }
  }
  return out;
}

PartitionResult evaluate_assignment(const PartGraph &g, PartitionAssignment a) {
  PartitionResult r;
  const ExtendedCost cut = recompute_cut(g, a);
  if (cut.is_infinite()) {
    throw std::invalid_argument("assignment cuts an infinite edge");
  }
  r.cut_weight = cut.value();
  r.per_part_loads = compute_part_loads(g, a);
  r.violations = find_violations(g, r.per_part_loads);
  r.assignment = std::move(a);
  return r;
}

std::optional<Rational> balance_ratio(
    const std::vector<std::vector<Cost>> &loads,
    const std::vector<std::vector<Cost>> &capacities,
    std::size_t constraint
) {
  std::optional<Cost> lo;
  std::optional<Cost> hi;
  for (std::size_t p = 0; p < loads.size(); ++p) {
    if (capacities.at(p).at(constraint) <= 0) {
      continue;
    }
    const Cost load = loads[p].at(constraint);
    lo = lo ? std::min(*lo, load) : load;
    hi = hi ? std::max(*hi, load) : load;
  }
  if (!hi || *hi == 0) {
    return std::nullopt;
  }
  return Rational{*lo, *hi}.normalized();
}

std::optional<Rational> balance_ratio(const PartitionResult &r, const PartGraph &g, std::size_t constraint) {
  return balance_ratio(r.per_part_loads, g.part_capacities, constraint);
}

namespace {

void check_graph(const PartGraph &g) {
  if (g.num_parts() == 0) {
    throw std::invalid_argument("partitioning needs at least one part");
  }
  if (g.ncon == 0) {
    throw std::invalid_argument("graph has no constraints");
  }
  for (const auto &cap : g.part_capacities) {
    if (cap.size() != g.ncon) {
      throw std::invalid_argument("capacity vector length does not match ncon");
    }
  }
  for (const PartNode &node : g.nodes) {
    if (node.weights.size() != g.ncon) {
      throw std::invalid_argument("node '" + node.id + "' weight vector length does not match ncon");
    }
  }
  if (g.has_infinite_edges()) {
    throw std::invalid_argument("graph has infinite edges; contract them first");
  }
}

std::size_t thread_count(const PartitionConfig &cfg, std::size_t jobs) {
  std::size_t threads = cfg.threads;
  if (threads == 0) {
    if (const char *env = std::getenv("PLACER_THREADS"); env != nullptr && *env != '\0') {
      threads = static_cast<std::size_t>(std::max(1L, std::strtol(env, nullptr, 10)));
    } else {
      threads = std::max(1U, std::thread::hardware_concurrency());
    }
  }
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs, 1));
}

// Candidates are compared by (excess over true capacity, cut, #violations);
// equal keys keep the earlier candidate.
bool better_candidate(const PartitionResult &x, const PartitionResult &y) {
  const Cost ex = x.total_excess();
  const Cost ey = y.total_excess();
  if (ex != ey) {
    return ex < ey;
  }
  if (x.cut_weight != y.cut_weight) {
    return x.cut_weight < y.cut_weight;
  }
  return x.violations.size() < y.violations.size();
}

constexpr std::size_t kInitialTries = 4;

PartitionResult run_candidate(
    const PartGraph &g,
    const ml::Csr &csr,
    const PartitionConfig &cfg,
    std::size_t slack_index,
    std::size_t seed_index
) {
  const Rational &slack = cfg.slack_factors[slack_index];
  const ml::Bounds bounds = ml::make_bounds(g, slack);
  std::seed_seq seq{
      static_cast<std::uint32_t>(cfg.seeds[seed_index]),
      static_cast<std::uint32_t>(cfg.seeds[seed_index] >> 32),
      static_cast<std::uint32_t>(slack_index)
  };
  ml::Rng rng(seq);

  // Stop coarsening while every part still has a few nodes to work with.
  const std::size_t floor = std::max(cfg.coarsen_floor, 8 * g.num_parts());
  std::vector<ml::Level> levels = ml::coarsen(csr, bounds, floor, rng);
  const ml::Csr &coarsest = levels.empty() ? csr : levels.back().graph;

  std::optional<ml::PartitionState> best;
  for (std::size_t attempt = 0; attempt < kInitialTries; ++attempt) {
    ml::PartitionState state(coarsest, bounds.k, ml::grow_initial_partition(coarsest, bounds, rng));
    ml::rebalance(state, bounds);
    ml::fm_refine(state, bounds, cfg.refinement_passes);
    if (!best) {
      best.emplace(std::move(state));
      continue;
    }
    const Cost ex = state.total_excess(bounds);
    const Cost best_ex = best->total_excess(bounds);
    if (ex < best_ex || (ex == best_ex && state.cut() < best->cut())) {
      best.emplace(std::move(state));
    }
  }

  PartitionAssignment assignment = std::move(*best).take_assignment();
  for (std::size_t i = levels.size(); i-- > 0;) {
    const ml::Csr &fine = i == 0 ? csr : levels[i - 1].graph;
    PartitionAssignment projected(fine.n);
    for (std::size_t v = 0; v < fine.n; ++v) {
      projected[v] = assignment[levels[i].fine_to_coarse[v]];
    }
    ml::PartitionState state(fine, bounds.k, std::move(projected));
    ml::rebalance(state, bounds);
    ml::fm_refine(state, bounds, cfg.refinement_passes);
    assignment = std::move(state).take_assignment();
  }

  PartitionResult result = evaluate_assignment(g, std::move(assignment));
  result.slack = slack;
  result.seed = cfg.seeds[seed_index];
  return result;
}

} // namespace

PartitionResult partition(const PartGraph &g, const PartitionConfig &cfg) {
  cfg.validate();
  check_graph(g);

  const ml::Csr csr = ml::to_csr(g);
  const std::size_t jobs = cfg.slack_factors.size() * cfg.seeds.size();
  std::vector<std::optional<PartitionResult>> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      try {
        results[job] = run_candidate(g, csr, cfg, job / cfg.seeds.size(), job % cfg.seeds.size());
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };

  const std::size_t threads = thread_count(cfg, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }

  for (const auto &error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }

  std::size_t best = 0;
  for (std::size_t job = 1; job < jobs; ++job) {
    if (better_candidate(*results[job], *results[best])) {
      best = job;
    }
  }
  return std::move(*results[best]);
}

RefinementTrace
refine_assignment(const PartGraph &g, PartitionAssignment &a, const Rational &slack, std::size_t passes) {
  check_graph(g);
  (void)recompute_cut(g, a); // validates the assignment
  const ml::Csr csr = ml::to_csr(g);
  const ml::Bounds bounds = ml::make_bounds(g, slack);
  ml::PartitionState state(csr, bounds.k, a);
  RefinementTrace trace = ml::fm_refine(state, bounds, passes);
  a = std::move(state).take_assignment();
  return trace;
}

} // namespace placer
