/*******************************************************************************
 * Command line front end.
 *
 * Exit codes: 0 clean, 2 capacity violations in the result, 1 error.
 *
 * @file:   placer.cc
 ******************************************************************************/
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "placer/gdp.h"
#include "placer/ip_model.h"
#include "placer/oracle.h"
#include "placer/partitioner.h"
#include "placer/placement.h"
#include "placer/planner.h"
#include "placer/reduction.h"
#include "placer/replication.h"
#include "placer/report.h"
#include "placer/workload.h"
#include "placer/workload_gen.h"

using namespace placer;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitError = 1;
constexpr int kExitViolations = 2;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content) || !out.flush()) {
    throw std::runtime_error("cannot write '" + path + "'");
  }
  std::cerr << "wrote " << path << '\n';
}

class Stopwatch {
public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - _last).count();
    _last = now;
    return ms;
  }

private:
  std::chrono::steady_clock::time_point _last = std::chrono::steady_clock::now();
};

/// A workload or view DAG read from one input file.
struct Instance {
  std::string text;
  bool is_gdp = false;
  Workload workload;
  ViewDag dag;

  [[nodiscard]] const std::vector<Server> &servers() const { return is_gdp ? dag.servers : workload.servers; }
};

Instance load_instance(const std::string &path) {
  Instance inst;
  inst.text = read_file(path);
  inst.is_gdp = is_gdp_document(inst.text);
  if (inst.is_gdp) {
    inst.dag = parse_gdp(inst.text);
  } else {
    inst.workload = parse_workload(inst.text);
  }
  return inst;
}

std::vector<std::string> server_ids(const std::vector<Server> &servers) {
  std::vector<std::string> ids;
  for (const Server &s : servers) {
    ids.push_back(s.id);
  }
  return ids;
}

std::vector<Rational> parse_slack_list(const std::string &text) {
  std::vector<Rational> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    out.push_back(Rational::parse(item).normalized());
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string &text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    out.push_back(std::stoull(item));
  }
  return out;
}

bool has_errors(const CostReport &r) {
  for (const Diagnostic &d : r.violations) {
    if (d.severity == Severity::kError) {
      return true;
    }
  }
  return false;
}

CostReport evaluate(const Instance &inst, const Placement &p) {
  return inst.is_gdp ? gdp_cost(p, inst.dag) : dp_cost(p, inst.workload);
}

std::string placement_text(const Instance &inst, const Placement &p) {
  return inst.is_gdp ? write_placement(p, inst.dag) : write_placement(p, inst.workload);
}

// Writes the placement, reads it back and checks the stated cost.
void write_and_verify(const Instance &inst, const Placement &p, const CostReport &stated, const std::string &path) {
  write_file(path, placement_text(inst, p));
  const std::string text = read_file(path);
  const Placement back = inst.is_gdp ? read_placement(text, inst.dag) : read_placement(text, inst.workload);
  const CostReport recomputed = evaluate(inst, back);
  if (!(recomputed.total_cost == stated.total_cost)) {
    throw std::runtime_error(
        "self-consistency check failed: reported cost " + stated.total_cost.to_string() + ", placement file costs " +
        recomputed.total_cost.to_string()
    );
  }
}

void emit_report(const RunReport &report, const std::string &format, const std::string &path) {
  const std::string text = format_report(report, parse_report_format(format));
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

std::string default_output(const std::string &input, const std::string &suffix) {
  return input + suffix;
}

struct CommonOptions {
  std::string input;
  std::string out;
  std::string format = "text";
  std::string report_path;
};

void add_common(CLI::App *cmd, CommonOptions &opt, bool with_out) {
  cmd->add_option("input", opt.input, "Workload or GDP document")->required()->check(CLI::ExistingFile);
  if (with_out) {
    cmd->add_option("-o,--out", opt.out, "Placement file (default: <input>.placement)");
  }
  cmd->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("--report", opt.report_path, "Write the report here instead of stdout");
}

struct PartitionOptions {
  std::string slack;
  std::string seeds;
  std::size_t threads = 0;
  std::size_t passes = 10;
};

void add_partition_options(CLI::App *cmd, PartitionOptions &opt) {
  cmd->add_option("--slack", opt.slack, "Comma separated slack factors, e.g. 0,1/10,0.25");
  cmd->add_option("--seeds", opt.seeds, "Comma separated partitioner seeds");
  cmd->add_option("--threads", opt.threads, "Sweep threads (0: PLACER_THREADS or hardware)");
  cmd->add_option("--passes", opt.passes, "Refinement passes per level")->check(CLI::PositiveNumber);
}

PartitionConfig partition_config(const PartitionOptions &opt) {
  PartitionConfig cfg;
  if (!opt.slack.empty()) {
    cfg.slack_factors = parse_slack_list(opt.slack);
    std::sort(cfg.slack_factors.begin(), cfg.slack_factors.end());
  }
  if (!opt.seeds.empty()) {
    cfg.seeds = parse_seed_list(opt.seeds);
  }
  cfg.threads = opt.threads;
  cfg.refinement_passes = opt.passes;
  cfg.validate();
  return cfg;
}

void echo_partition(RunReport &r, const PartitionConfig &cfg) {
  std::string slack;
  for (const Rational &s : cfg.slack_factors) {
    slack += (slack.empty() ? "" : ",") + s.to_string();
  }
  std::string seeds;
  for (const auto s : cfg.seeds) {
    seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  }
  r.config.emplace_back("slack_factors", slack);
  r.config.emplace_back("seeds", seeds);
  r.config.emplace_back("refinement_passes", std::to_string(cfg.refinement_passes));
}

RunReport base_report(const std::string &command, const Instance &inst) {
  RunReport r;
  r.command = command;
  r.input_digest = fnv1a_hex(inst.text);
  r.server_ids = server_ids(inst.servers());
  r.config.emplace_back("instance", inst.is_gdp ? "gdp" : "workload");
  return r;
}

// ---------------------------------------------------------------------------

struct PlanOptions {
  CommonOptions common;
  PartitionOptions partition;
  bool load = false;
  std::string ratio;
  bool pin_views = false;
  bool sweep = false;
};

int cmd_plan(const PlanOptions &opt) {
  Stopwatch clock;
  RunReport report;
  const Instance inst = load_instance(opt.common.input);
  const double parse_ms = clock.lap_ms();

  PlanConfig cfg;
  cfg.partition = partition_config(opt.partition);
  cfg.with_load = opt.load || !opt.ratio.empty();
  if (!opt.ratio.empty()) {
    cfg.min_max_ratio = Rational::parse(opt.ratio).normalized();
  }
  cfg.pin_views = opt.pin_views;

  if (opt.sweep) {
    if (inst.is_gdp) {
      throw std::invalid_argument("--sweep needs a workload document");
    }
    const auto levels = load_sweep(inst.workload, default_load_ratios(), cfg);
    std::cout << "ratio cost feasible carried storage_balance load_balance\n";
    bool all_ok = true;
    for (const SweepLevel &level : levels) {
      const auto &b = level.plan.balance;
      std::cout << (level.ratio ? level.ratio->to_string() : "none") << ' '
                << level.plan.report.total_cost.to_string() << ' ' << (level.plan.feasible() ? "yes" : "no") << ' '
                << (level.carried ? "yes" : "no") << ' ' << (b.size() > 0 && b[0] ? b[0]->to_string() : "n/a")
                << ' ' << (b.size() > 1 && b[1] ? b[1]->to_string() : "n/a") << '\n';
      all_ok = all_ok && level.plan.feasible();
    }
    return all_ok ? kExitClean : kExitViolations;
  }

  const PlanResult plan = inst.is_gdp ? plan_gdp(inst.dag, cfg) : plan_dp(inst.workload, cfg);
  const double plan_ms = clock.lap_ms();

  report = base_report("plan", inst);
  echo_partition(report, cfg.partition);
  report.config.emplace_back("load_balancing", cfg.with_load ? "on" : "off");
  report.config.emplace_back("min_max_ratio", cfg.min_max_ratio ? cfg.min_max_ratio->to_string() : "none");
  report.config.emplace_back("pin_views", cfg.pin_views ? "on" : "off");
  if (inst.is_gdp) {
    report.config.emplace_back("intermediate_storage", "not modeled; servers assumed to hold intermediates");
  }
  report.cost = plan.report;
  report.balance = plan.balance;
  report.slack = plan.partition.slack;
  report.warnings = plan.warnings;

  const std::string out = opt.common.out.empty() ? default_output(opt.common.input, ".placement") : opt.common.out;
  write_and_verify(inst, plan.placement, plan.report, out);
  const double write_ms = clock.lap_ms();

  report.timings_ms = {{"parse", parse_ms}, {"plan", plan_ms}, {"write_and_verify", write_ms}};
  emit_report(report, opt.common.format, opt.common.report_path);
  return has_errors(plan.report) ? kExitViolations : kExitClean;
}

struct OracleOptions {
  CommonOptions common;
  std::uint64_t budget = OracleLimit{}.max_assignments;
};

int cmd_oracle(const OracleOptions &opt) {
  Stopwatch clock;
  const Instance inst = load_instance(opt.common.input);
  const double parse_ms = clock.lap_ms();
  const OracleLimit lim{opt.budget};
  const OracleResult result = inst.is_gdp ? optimal_gdp(inst.dag, lim) : optimal_placement(inst.workload, lim);
  const double solve_ms = clock.lap_ms();

  RunReport report = base_report("oracle", inst);
  report.config.emplace_back("budget", std::to_string(opt.budget));
  report.config.emplace_back("status", std::string(to_string(result.status)));
  report.config.emplace_back("visited", std::to_string(result.visited));
  if (!result.found) {
    std::cerr << "oracle: " << to_string(result.status) << ", no placement found\n";
    return kExitError;
  }
  report.cost = evaluate(inst, result.placement);
  const std::string out = opt.common.out.empty() ? default_output(opt.common.input, ".optimal") : opt.common.out;
  write_and_verify(inst, result.placement, report.cost, out);
  report.timings_ms = {{"parse", parse_ms}, {"solve", solve_ms}};
  emit_report(report, opt.common.format, opt.common.report_path);
  if (result.status == OracleStatus::kBudgetExceeded) {
    std::cerr << "oracle: budget exceeded, best placement found is not proven optimal\n";
  }
  return has_errors(report.cost) ? kExitViolations : kExitClean;
}

struct ReplicateOptions {
  CommonOptions common;
  PartitionOptions partition;
  std::size_t r = 2;
  int heuristic = 2;
  std::uint64_t seed = 1;
};

int cmd_replicate(const ReplicateOptions &opt) {
  Stopwatch clock;
  const Instance inst = load_instance(opt.common.input);
  if (inst.is_gdp) {
    throw std::invalid_argument("replication works on workload documents only");
  }
  const double parse_ms = clock.lap_ms();
  ReplicationConfig cfg;
  cfg.r = opt.r;
  cfg.rng_seed = opt.seed;
  cfg.plan.partition = partition_config(opt.partition);
  const ReplicationResult result =
      opt.heuristic == 1 ? heuristic1(inst.workload, cfg) : heuristic2(inst.workload, cfg);
  const double plan_ms = clock.lap_ms();

  RunReport report = base_report("replicate", inst);
  echo_partition(report, cfg.plan.partition);
  report.config.emplace_back("heuristic", std::to_string(opt.heuristic));
  report.config.emplace_back("replication", std::to_string(opt.r));
  report.config.emplace_back("seed", std::to_string(opt.seed));
  const StorageOverhead overhead = max_part_size(result.placement, inst.workload, opt.r);
  report.config.emplace_back("max_server_storage", std::to_string(overhead.max_used));
  report.config.emplace_back("desired_server_storage", overhead.desired.to_string());
  report.cost = result.report;
  report.warnings = result.warnings;

  const std::string out = opt.common.out.empty() ? default_output(opt.common.input, ".placement") : opt.common.out;
  write_and_verify(inst, result.placement, result.report, out);
  report.timings_ms = {{"parse", parse_ms}, {"replicate", plan_ms}};
  emit_report(report, opt.common.format, opt.common.report_path);
  return has_errors(result.report) ? kExitViolations : kExitClean;
}

struct GenOptions {
  std::string shape = "random";
  GenSpec spec;
  Cost capacity = -1;
  std::string out;
};

int cmd_gen(GenOptions opt) {
  opt.spec.shape = parse_gen_shape(opt.shape);
  if (opt.capacity >= 0) {
    opt.spec.capacity = opt.capacity;
  }
  const std::string text = serialize_workload(generate(opt.spec));
  if (opt.out.empty()) {
    std::cout << text;
  } else {
    write_file(opt.out, text);
  }
  return kExitClean;
}

struct ExportGraphOptions {
  std::string input;
  std::string out;
  std::string targets;
  bool load = false;
};

int cmd_export_graph(const ExportGraphOptions &opt) {
  const Instance inst = load_instance(opt.input);
  const PartGraph g = inst.is_gdp ? encode_big_m(build_gdp_graph(inst.dag, opt.load))
                                  : build_dp_graph(inst.workload, opt.load);
  write_file(opt.out.empty() ? default_output(opt.input, ".graph") : opt.out, export_graph(g));
  write_file(opt.targets.empty() ? default_output(opt.input, ".tpwgts") : opt.targets, export_target_fractions(g));
  return kExitClean;
}

struct ImportPartitionOptions {
  CommonOptions common;
  std::string partition;
  bool load = false;
};

int cmd_import_partition(const ImportPartitionOptions &opt) {
  Stopwatch clock;
  const Instance inst = load_instance(opt.common.input);
  const PartGraph g = inst.is_gdp ? build_gdp_graph(inst.dag, opt.load) : build_dp_graph(inst.workload, opt.load);
  const PartitionAssignment a = import_partition(read_file(opt.partition), g);
  const Placement p = inst.is_gdp ? decode_gdp(a, inst.dag) : decode_dp(a, inst.workload);
  const double decode_ms = clock.lap_ms();

  RunReport report = base_report("import-partition", inst);
  report.config.emplace_back("partition_file", opt.partition);
  report.cost = evaluate(inst, p);
  const std::string out = opt.common.out.empty() ? default_output(opt.common.input, ".placement") : opt.common.out;
  write_and_verify(inst, p, report.cost, out);
  report.timings_ms = {{"decode", decode_ms}};
  emit_report(report, opt.common.format, opt.common.report_path);
  return has_errors(report.cost) ? kExitViolations : kExitClean;
}

struct ExportIpOptions {
  std::string input;
  std::string out;
  std::string model = "auto";
  std::size_t r = 1;
};

int cmd_export_ip(const ExportIpOptions &opt) {
  const Instance inst = load_instance(opt.input);
  std::string model = opt.model;
  if (model == "auto") {
    model = inst.is_gdp ? "gdp" : (opt.r > 1 ? "replication" : "dp");
  }
  IpModel m;
  if (model == "gdp") {
    if (!inst.is_gdp) {
      throw std::invalid_argument("the gdp model needs a GDP document");
    }
    m = build_gdp_ip(inst.dag);
  } else {
    if (inst.is_gdp) {
      throw std::invalid_argument("model '" + model + "' needs a workload document");
    }
    m = model == "dp" ? build_dp_ip(inst.workload) : build_replication_ip(inst.workload, opt.r);
  }
  write_file(opt.out.empty() ? default_output(opt.input, ".lp") : opt.out, write_lp(m));
  return kExitClean;
}

struct CostOptions {
  CommonOptions common;
  std::string placement;
};

int cmd_cost(const CostOptions &opt) {
  Stopwatch clock;
  const Instance inst = load_instance(opt.common.input);
  const std::string text = read_file(opt.placement);
  const Placement p = inst.is_gdp ? read_placement(text, inst.dag) : read_placement(text, inst.workload);
  RunReport report = base_report("cost", inst);
  report.config.emplace_back("placement_file", opt.placement);
  report.cost = evaluate(inst, p);
  report.timings_ms = {{"evaluate", clock.lap_ms()}};
  emit_report(report, opt.common.format, opt.common.report_path);
  return has_errors(report.cost) ? kExitViolations : kExitClean;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Capacity-aware placement of tables, views and query sites"};
  app.require_subcommand(1);

  PlanOptions plan;
  auto *plan_cmd = app.add_subcommand("plan", "Plan a placement through graph partitioning");
  add_common(plan_cmd, plan.common, true);
  add_partition_options(plan_cmd, plan.partition);
  plan_cmd->add_flag("--load", plan.load, "Balance execution load as a second constraint");
  plan_cmd->add_option("--min-max-ratio", plan.ratio, "Target min/max server load ratio (implies --load)");
  plan_cmd->add_flag("--pin-views", plan.pin_views, "Compute materialized views where they are stored");
  plan_cmd->add_flag("--sweep", plan.sweep, "Plan at several load-ratio targets and print a summary");

  OracleOptions oracle;
  auto *oracle_cmd = app.add_subcommand("oracle", "Exact optimum of a small instance");
  add_common(oracle_cmd, oracle.common, true);
  oracle_cmd->add_option("--budget", oracle.budget, "Search nodes before giving up");

  ReplicateOptions rep;
  auto *rep_cmd = app.add_subcommand("replicate", "Replicated placement heuristics");
  add_common(rep_cmd, rep.common, true);
  add_partition_options(rep_cmd, rep.partition);
  rep_cmd->add_option("-r,--replication", rep.r, "Replication factor")->check(CLI::PositiveNumber);
  rep_cmd->add_option("--heuristic", rep.heuristic, "1 or 2")->check(CLI::IsMember({1, 2}));
  rep_cmd->add_option("--seed", rep.seed, "Seed for server permutations");

  GenOptions gen;
  auto *gen_cmd = app.add_subcommand("gen", "Generate a synthetic workload");
  gen_cmd->add_option("--shape", gen.shape, "random or tpcds")->check(CLI::IsMember({"random", "tpcds"}));
  gen_cmd->add_option("--tables", gen.spec.n_tables, "Tables (random shape)");
  gen_cmd->add_option("--queries", gen.spec.n_queries, "Queries (random shape)");
  gen_cmd->add_option("--servers", gen.spec.n_servers, "Servers");
  gen_cmd->add_option("--capacity", gen.capacity, "Per-server storage capacity");
  gen_cmd->add_option("--seed", gen.spec.seed, "Seed");
  gen_cmd->add_option("--size-mean", gen.spec.size_dist.mean, "Mean table size");
  gen_cmd->add_option("--size-stddev", gen.spec.size_dist.stddev, "Table size standard deviation");
  gen_cmd->add_option("--refs-mean", gen.spec.refs_dist.mean, "Mean tables per query");
  gen_cmd->add_option("--refs-stddev", gen.spec.refs_dist.stddev, "Tables per query standard deviation");
  gen_cmd->add_option("-o,--out", gen.out, "Output file (default: stdout)");

  ExportGraphOptions eg;
  auto *eg_cmd = app.add_subcommand("export-graph", "Write the partitioning graph and target part weights");
  eg_cmd->add_option("input", eg.input, "Workload or GDP document")->required()->check(CLI::ExistingFile);
  eg_cmd->add_option("-o,--out", eg.out, "Graph file (default: <input>.graph)");
  eg_cmd->add_option("--targets", eg.targets, "Target weights file (default: <input>.tpwgts)");
  eg_cmd->add_flag("--load", eg.load, "Add the execution-load constraint");

  ImportPartitionOptions ip;
  auto *ip_cmd = app.add_subcommand("import-partition", "Decode an external partition into a placement");
  add_common(ip_cmd, ip.common, true);
  ip_cmd->add_option("partition", ip.partition, "One part index per line")->required()->check(CLI::ExistingFile);
  ip_cmd->add_flag("--load", ip.load, "The graph was exported with --load");

  ExportIpOptions ei;
  auto *ei_cmd = app.add_subcommand("export-ip", "Write an integer program in LP format");
  ei_cmd->add_option("input", ei.input, "Workload or GDP document")->required()->check(CLI::ExistingFile);
  ei_cmd->add_option("-o,--out", ei.out, "LP file (default: <input>.lp)");
  ei_cmd->add_option("--model", ei.model, "auto, dp, replication or gdp")
      ->check(CLI::IsMember({"auto", "dp", "replication", "gdp"}));
  ei_cmd->add_option("-r,--replication", ei.r, "Replication factor")->check(CLI::PositiveNumber);

  CostOptions cost;
  auto *cost_cmd = app.add_subcommand("cost", "Evaluate a placement file");
  add_common(cost_cmd, cost.common, false);
  cost_cmd->add_option("placement", cost.placement, "Placement file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (plan_cmd->parsed()) {
      return cmd_plan(plan);
    }
    if (oracle_cmd->parsed()) {
      return cmd_oracle(oracle);
    }
    if (rep_cmd->parsed()) {
      return cmd_replicate(rep);
    }
    if (gen_cmd->parsed()) {
      return cmd_gen(gen);
    }
    if (eg_cmd->parsed()) {
      return cmd_export_graph(eg);
    }
    if (ip_cmd->parsed()) {
      return cmd_import_partition(ip);
    }
    if (ei_cmd->parsed()) {
      return cmd_export_ip(ei);
    }
    if (cost_cmd->parsed()) {
      return cmd_cost(cost);
    }
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) {
      std::cerr << " (line " << e.line() << ", column " << e.column() << ")";
    }
    std::cerr << '\n';
    return kExitError;
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what();
    if (!e.subject().empty()) {
      std::cerr << " [" << e.subject() << "]";
    }
    std::cerr << '\n';
    return kExitError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
