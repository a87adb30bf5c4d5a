/*******************************************************************************
 * Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
 *
 * @file:   acceptance.cc
 ******************************************************************************/
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "placer/ip_model.h"
#include "placer/oracle.h"
#include "placer/partitioner.h"
#include "placer/planner.h"
#include "placer/replication.h"
#include "placer/report.h"
#include "placer/workload_gen.h"
#include "support.h"

using namespace placer;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string &why) {
    if (pass) {
      detail << "first failure: " << why << "; ";
    }
    pass = false;
  }
};

std::vector<Workload> suite1() {
  std::mt19937_64 rng(20240601);
  std::vector<Workload> out;
  for (int i = 0; i < 300; ++i) {
    out.push_back(test::random_workload(rng));
  }
  return out;
}

void criterion1(Outcome &o) {
  const auto start = Clock::now();
  int optimal = 0;
  int infeasible = 0;
  const auto instances = suite1();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Workload &w = instances[i];
    const OracleResult place = optimal_placement(w);
    const PartitionOracleResult cut = optimal_partition(build_dp_graph(w));
    const auto brute = test::brute_dp_optimum(w);
    if (place.status == OracleStatus::kBudgetExceeded || cut.status == OracleStatus::kBudgetExceeded) {
      o.fail("budget exceeded on instance " + std::to_string(i));
      continue;
    }
    if (place.status != cut.status || (place.status == OracleStatus::kOptimal) != brute.has_value()) {
      o.fail("feasibility disagrees on instance " + std::to_string(i));
      continue;
    }
    if (place.status == OracleStatus::kInfeasible) {
      ++infeasible;
      continue;
    }
    ++optimal;
    if (!(place.cost == ExtendedCost(cut.cut)) || !(place.cost == ExtendedCost(*brute))) {
      o.fail(
          "instance " + std::to_string(i) + ": placement " + place.cost.to_string() + " vs cut " +
          std::to_string(cut.cut)
      );
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 60.0) {
    o.fail("took " + std::to_string(secs) + " s");
  }
  o.detail << optimal << " equal optima, " << infeasible << " infeasible on both sides, " << std::fixed
           << std::setprecision(2) << secs << " s";
}

void criterion2(Outcome &o) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240602);
  int optimal = 0;
  int infeasible = 0;
  for (int i = 0; i < 200; ++i) {
    const ViewDag dag = test::random_dag(rng, 6, 2);
    const OracleResult views = optimal_gdp(dag);
    const ContractedGraph c = contract_infinite_edges(build_gdp_graph(dag));
    const PartitionOracleResult cut = optimal_partition(c.graph);
    const auto brute = test::brute_gdp_optimum(dag);
    if (views.status != cut.status || (views.status == OracleStatus::kOptimal) != brute.has_value()) {
      o.fail("status disagrees on instance " + std::to_string(i));
      continue;
    }
    if (views.status != OracleStatus::kOptimal) {
      ++infeasible;
      continue;
    }
    ++optimal;
    if (!(views.cost == ExtendedCost(cut.cut)) || !(views.cost == ExtendedCost(*brute))) {
      o.fail(
          "instance " + std::to_string(i) + ": views " + views.cost.to_string() + " vs cut " + std::to_string(cut.cut)
      );
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 120.0) {
    o.fail("took " + std::to_string(secs) + " s");
  }
  o.detail << optimal << " equal optima, " << infeasible << " infeasible, " << std::fixed << std::setprecision(2)
           << secs << " s";
}

void criterion3(Outcome &o) {
  const ViewDag dag = test::gdp_example();
  const PartGraph g = build_gdp_graph(dag);
  const PartitionAssignment a = test::gdp_example_partition();
  const ExtendedCost cut = recompute_cut(g, a);
  const Placement p = decode_gdp(a, dag);
  const ExtendedCost cost = gdp_cost(p, dag).total_cost;
  if (!(cut == ExtendedCost(46)) || !(cost == ExtendedCost(46))) {
    o.fail("cut " + cut.to_string() + ", cost " + cost.to_string());
  }
  if (p.compute[4] != 0 || p.store[4] != std::vector<std::size_t>{1}) {
    o.fail("V5 sites differ");
  }
  o.detail << "cut " << cut.to_string() << ", cost " << cost.to_string() << ", V5 computed on "
           << dag.servers[p.compute[4]].id << " and stored on " << dag.servers[p.store[4][0]].id;
}

void criterion4(Outcome &o) {
  const Workload w = test::four_query_workload();
  const ExtendedCost best = optimal_placement(w).cost;
  const PlanResult plan = plan_dp(w);
  if (!(plan.report.total_cost == best) || !plan.feasible()) {
    o.fail("planner " + plan.report.total_cost.to_string() + " vs optimum " + best.to_string());
  }
  const Placement p = decode_dp(test::four_query_partition(), w);
  if (p.compute != std::vector<std::size_t>{1, 2, 0, 1}) {
    o.fail("decoded query sites differ");
  }
  o.detail << "planner " << plan.report.total_cost.to_string() << " = optimum " << best.to_string()
           << "; sites Q1..Q4 ->";
  for (const std::size_t k : p.compute) {
    o.detail << ' ' << w.servers[k].id;
  }
}

void criterion5(Outcome &o) {
  int within = 0;
  int counted = 0;
  int inconsistent = 0;
  for (const Workload &w : suite1()) {
    const OracleResult best = optimal_placement(w);
    const PlanResult plan = plan_dp(w);
    const Placement back = read_placement(write_placement(plan.placement, w), w);
    if (!(dp_cost(back, w).total_cost == plan.report.total_cost)) {
      ++inconsistent;
    }
    if (best.status != OracleStatus::kOptimal) {
      continue;
    }
    ++counted;
    if (plan.feasible() && plan.report.total_cost.value() * 4 <= best.cost.value() * 5) {
      ++within;
    }
  }
  if (inconsistent > 0) {
    o.fail(std::to_string(inconsistent) + " inconsistent reports");
  }
  if (within * 100 < counted * 95) {
    o.fail("quality below 95%");
  }
  o.detail << within << " of " << counted << " feasible instances within 1.25x of optimum ("
           << std::fixed << std::setprecision(2) << 100.0 * within / std::max(counted, 1) << "%), "
           << inconsistent << " inconsistent reports";
}

void criterion6(Outcome &o) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240606);
  test::RandomWorkloadShape shape;
  shape.max_tables = 4;
  shape.max_queries = 3;
  shape.max_servers = 2;
  int matched = 0;
  for (int i = 0; i < 50; ++i) {
    const Workload w = test::random_workload(rng, shape);
    const OracleResult oracle = optimal_placement(w);
    const auto dp = test::brute_ip_optimum(build_dp_ip(w));
    const auto rep = test::brute_ip_optimum(build_replication_ip(w, 1));
    const bool feasible = oracle.status == OracleStatus::kOptimal;
    if (dp.has_value() != feasible || rep.has_value() != feasible) {
      o.fail("feasibility disagrees on instance " + std::to_string(i));
      continue;
    }
    if (!feasible) {
      continue;
    }
    if (!(ExtendedCost(*dp) == oracle.cost) || !(ExtendedCost(w.total_weighted_ref_cost() - *rep) == oracle.cost)) {
      o.fail("instance " + std::to_string(i) + " optimum differs");
      continue;
    }
    ++matched;
  }
  const double secs = seconds_since(start);
  if (secs >= 120.0) {
    o.fail("took " + std::to_string(secs) + " s");
  }
  o.detail << matched << " of 50 instances matched (both IPs), " << std::fixed << std::setprecision(2) << secs
           << " s";
}

Workload tpcds(std::size_t servers) {
  GenSpec spec;
  spec.shape = GenShape::kTpcDsLike;
  spec.n_servers = servers;
  return generate(spec);
}

void criterion7(Outcome &o) {
  const Workload base = tpcds(8);
  // Storage grows with the replication factor: r times the unreplicated capacity.
  const Cost unit = base.servers[0].storage_capacity;
  std::vector<Cost> h2_costs;
  std::ostringstream h1_text;
  for (const std::size_t r : {1u, 2u, 4u}) {
    Workload w = base;
    for (Server &s : w.servers) {
      s.storage_capacity = unit * static_cast<Cost>(r);
    }
    ReplicationConfig cfg;
    cfg.r = r;
    const ReplicationResult h1 = heuristic1(w, cfg);
    const ReplicationResult h2 = heuristic2(w, cfg);
    for (const auto &replicas : h1.placement.store) {
      if (replicas.empty() || replicas.size() > r) {
        o.fail("H1 replica count out of range at r=" + std::to_string(r));
        break;
      }
    }
    for (const auto &replicas : h2.placement.store) {
      if (replicas.size() != r) {
        o.fail("H2 replica count differs from r=" + std::to_string(r));
        break;
      }
    }
    h2_costs.push_back(h2.report.total_cost.value());
    h1_text << " r=" << r << ": H1 " << h1.report.total_cost.to_string() << " H2 " << h2.report.total_cost.to_string()
            << (h2.report.total_cost < h1.report.total_cost || h2.report.total_cost == h1.report.total_cost
                    ? " (H2<=H1)"
                    : " (H2>H1)")
            << ", violations H1 " << h1.report.violations.size() << " H2 " << h2.report.violations.size() << ';';
  }
  for (std::size_t i = 1; i < h2_costs.size(); ++i) {
    if (h2_costs[i] > h2_costs[i - 1]) {
      o.fail("H2 cost rises with r");
    }
  }
  o.detail << "l=8, capacity r*" << unit << ";" << h1_text.str() << " H2 non-increasing asserted, H2<=H1 reported only";
}

void criterion8(Outcome &o) {
  for (const std::size_t servers : {4u, 8u}) {
    const Workload w = tpcds(servers);
    PlanConfig cfg;
    const auto levels = load_sweep(w, default_load_ratios(), cfg);
    if (levels.size() < 4) {
      o.fail("fewer than four levels");
    }
    o.detail << "l=" << servers << ":";
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const SweepLevel &level = levels[i];
      o.detail << ' ' << (level.ratio ? level.ratio->to_string() : "none") << "->"
               << level.plan.report.total_cost.to_string() << (level.plan.feasible() ? "" : "(infeasible)");
      if (i > 0 && level.plan.report.total_cost < levels[i - 1].plan.report.total_cost) {
        o.fail("cost dropped when tightening at l=" + std::to_string(servers));
      }
    }
    o.detail << "; ";
  }
}

void criterion9(Outcome &o) {
  for (const auto &[size, limit] : {std::pair<std::size_t, double>{1000, 60.0}, {4000, 600.0}}) {
    GenSpec spec;
    spec.n_tables = size;
    spec.n_queries = size;
    spec.n_servers = 16;
    const Workload w = generate(spec);
    const auto start = Clock::now();
    const PlanResult plan = plan_dp(w);
    const double secs = seconds_since(start);
    if (secs >= limit) {
      o.fail(std::to_string(size) + " took " + std::to_string(secs) + " s");
    }
    if (!(dp_cost(plan.placement, w).total_cost == plan.report.total_cost)) {
      o.fail("inconsistent report at " + std::to_string(size));
    }
    o.detail << size << "x" << size << ": " << std::fixed << std::setprecision(2) << secs << " s (limit " << limit
             << "), cost " << plan.report.total_cost.to_string() << (plan.feasible() ? "" : " infeasible") << "; ";
  }
}

void criterion10(Outcome &o) {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240610);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    Workload w = test::random_workload(rng);
    if (i % 2 == 0) {
      w.servers[0].load_capacity = 40;
    }
    const ViewDag dag = test::random_dag(rng, 8, 3);
    const PartGraph g = build_dp_graph(w, i % 2 == 0);
    const PartGraph back = import_graph(export_graph(g));
    bool same = back.ncon == g.ncon && back.num_nodes() == g.num_nodes() && back.num_edges() == g.num_edges();
    for (std::size_t v = 0; same && v < g.num_nodes(); ++v) {
      same = back.nodes[v].weights == g.nodes[v].weights;
    }
    for (std::size_t e = 0; same && e < g.num_edges(); ++e) {
      same = back.edges[e].u == g.edges[e].u && back.edges[e].v == g.edges[e].v &&
             back.edges[e].weight == g.edges[e].weight;
    }
    const PartGraph big_m = encode_big_m(build_gdp_graph(dag));
    same = same && import_graph(export_graph(big_m)).num_edges() == big_m.num_edges();
    if (!same) {
      o.fail("graph round trip " + std::to_string(i));
    }
    for (const IpModel &m : {build_dp_ip(w), build_replication_ip(w, 1), build_gdp_ip(dag)}) {
      if (!(read_lp(write_lp(m)) == m)) {
        o.fail("LP round trip " + std::to_string(i));
      }
    }
    if (!(parse_workload(serialize_workload(w)) == w) || !(parse_gdp(serialize_gdp(dag)) == dag)) {
      o.fail("document round trip " + std::to_string(i));
    }
    ++checked;
  }
  const double secs = seconds_since(start);
  if (secs >= 5.0) {
    o.fail("took " + std::to_string(secs) + " s");
  }
  o.detail << checked << " workloads and view DAGs through graph, LP and document formats, " << std::fixed
           << std::setprecision(2) << secs << " s";
}

} // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Outcome &)>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
  };
  int failures = 0;
  for (const auto &[id, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception &e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
