#include "placer/report.h"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace placer {

namespace {

std::string write_placement_impl(
    const Placement &p,
    const std::vector<std::string> &stored,
    const std::vector<std::string> &computed,
    const std::vector<Server> &servers
) {
  std::ostringstream out;
  for (std::size_t j = 0; j < stored.size(); ++j) {
    out << "store " << stored[j];
    for (const std::size_t k : p.store.at(j)) {
      out << ' ' << servers.at(k).id;
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < computed.size(); ++i) {
    out << "compute " << computed[i] << ' ' << servers.at(p.compute.at(i)).id << '\n';
  }
  return out.str();
}

std::unordered_map<std::string, std::size_t> index_of(const std::vector<std::string> &ids) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.emplace(ids[i], i);
  }
  return out;
}

Placement read_placement_impl(
    std::string_view text,
    const std::vector<std::string> &stored,
    const std::vector<std::string> &computed,
    const std::vector<Server> &servers
) {
  const auto store_index = index_of(stored);
  const auto compute_index = index_of(computed);
  std::unordered_map<std::string, std::size_t> server_index;
  for (std::size_t k = 0; k < servers.size(); ++k) {
    server_index.emplace(servers[k].id, k);
  }
  auto server = [&](const std::string &id, std::size_t line) {
    const auto it = server_index.find(id);
    if (it == server_index.end()) {
      throw ParseError("unknown server '" + id + "'", line, 1);
    }
    return it->second;
  };

  Placement p;
  p.store.resize(stored.size());
  std::vector<std::optional<std::size_t>> sites(computed.size());

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.resize(hash);
    }
    std::istringstream fields(raw);
    std::string directive;
    std::string id;
    if (!(fields >> directive)) {
      continue;
    }
    if (!(fields >> id)) {
      throw ParseError("'" + directive + "' needs an object id", line, 1);
    }
    std::vector<std::string> rest;
    for (std::string s; fields >> s;) {
      rest.push_back(s);
    }
    if (directive == "store") {
      const auto it = store_index.find(id);
      if (it == store_index.end()) {
        throw ParseError("unknown stored object '" + id + "'", line, 1);
      }
      if (!p.store[it->second].empty()) {
        throw ParseError("object '" + id + "' stored twice", line, 1);
      }
      if (rest.empty()) {
        throw ParseError("object '" + id + "' has no server", line, 1);
      }
      auto &replicas = p.store[it->second];
      for (const std::string &s : rest) {
        replicas.push_back(server(s, line));
      }
      std::sort(replicas.begin(), replicas.end());
      if (std::adjacent_find(replicas.begin(), replicas.end()) != replicas.end()) {
        throw ParseError("object '" + id + "' lists a server twice", line, 1);
      }
    } else if (directive == "compute") {
      const auto it = compute_index.find(id);
      if (it == compute_index.end()) {
        throw ParseError("unknown computed object '" + id + "'", line, 1);
      }
      if (sites[it->second]) {
        throw ParseError("object '" + id + "' sited twice", line, 1);
      }
      if (rest.size() != 1) {
        throw ParseError("'compute' takes exactly one server", line, 1);
      }
      sites[it->second] = server(rest[0], line);
    } else {
      throw ParseError("unknown directive '" + directive + "'", line, 1);
    }
  }
  for (std::size_t j = 0; j < stored.size(); ++j) {
    if (p.store[j].empty()) {
      throw ParseError("object '" + stored[j] + "' is not stored", line, 1);
    }
  }
  for (std::size_t i = 0; i < computed.size(); ++i) {
    if (!sites[i]) {
      throw ParseError("object '" + computed[i] + "' has no compute site", line, 1);
    }
    p.compute.push_back(*sites[i]);
  }
  return p;
}

template <typename T> std::vector<std::string> ids_of(const std::vector<T> &items) {
  std::vector<std::string> out;
  for (const T &item : items) {
    out.push_back(item.id);
  }
  return out;
}

} // namespace

std::string write_placement(const Placement &p, const Workload &w) {
  check_placement(p, w);
  return write_placement_impl(p, ids_of(w.tables), ids_of(w.queries), w.servers);
}

std::string write_placement(const Placement &p, const ViewDag &dag) {
  check_placement(p, dag);
  const auto views = ids_of(dag.views);
  return write_placement_impl(p, views, views, dag.servers);
}

Placement read_placement(std::string_view text, const Workload &w) {
  return read_placement_impl(text, ids_of(w.tables), ids_of(w.queries), w.servers);
}

Placement read_placement(std::string_view text, const ViewDag &dag) {
  const auto views = ids_of(dag.views);
  return read_placement_impl(text, views, views, dag.servers);
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") {
    return ReportFormat::kText;
  }
  if (text == "json") {
    return ReportFormat::kJson;
  }
  if (text == "csv") {
    return ReportFormat::kCsv;
  }
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

namespace {

std::string ratio_text(const std::optional<Rational> &r) {
  if (!r) {
    return "n/a";
  }
  std::ostringstream out;
  out << r->to_string() << " (" << std::fixed << std::setprecision(3) << r->to_double() << ")";
  return out.str();
}

std::string_view severity_text(Severity s) {
  return s == Severity::kError ? "error" : "warning";
}

std::string format_text(const RunReport &r) {
  std::ostringstream out;
  out << "command: " << r.command << '\n';
  out << "input_digest: fnv1a64:" << r.input_digest << '\n';
  out << "config:\n";
  for (const auto &[key, value] : r.config) {
    out << "  " << key << ": " << value << '\n';
  }
  out << "total_cost: " << r.cost.total_cost.to_string() << '\n';
  if (r.slack) {
    out << "slack: " << r.slack->to_string() << '\n';
  }
  out << "per_query:\n";
  for (const ObjectCost &q : r.cost.per_query) {
    out << "  " << q.id << ' ' << r.server_ids.at(q.site) << ' ' << q.cost.to_string() << '\n';
  }
  out << "servers:\n";
  for (std::size_t k = 0; k < r.cost.per_server.size(); ++k) {
    out << "  " << r.server_ids.at(k) << " storage " << r.cost.per_server[k].storage_used << " load "
        << r.cost.per_server[k].load_used << '\n';
  }
  out << "balance:\n";
  static constexpr std::string_view kNames[] = {"storage", "load"};
  for (std::size_t c = 0; c < r.balance.size() && c < 2; ++c) {
    out << "  " << kNames[c] << ": " << ratio_text(r.balance[c]) << '\n';
  }
  out << "violations:" << (r.cost.violations.empty() ? " none" : "") << '\n';
  for (const Diagnostic &d : r.cost.violations) {
    out << "  " << severity_text(d.severity) << ' ' << d.code << ": " << d.message << '\n';
  }
  out << "warnings:" << (r.warnings.empty() ? " none" : "") << '\n';
  for (const Diagnostic &d : r.warnings) {
    out << "  " << d.code << ": " << d.message << '\n';
  }
  out << "timing_ms:\n";
  for (const auto &[stage, ms] : r.timings_ms) {
    out << "  " << stage << ' ' << std::fixed << std::setprecision(3) << ms << '\n';
  }
  return out.str();
}

nlohmann::ordered_json cost_json(const ExtendedCost &c) {
  if (c.is_infinite()) {
    return "inf";
  }
  return c.value();
}

std::string format_json(const RunReport &r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["command"] = r.command;
  j["input_digest"] = "fnv1a64:" + r.input_digest;
  ordered_json config = ordered_json::object();
  for (const auto &[key, value] : r.config) {
    config[key] = value;
  }
  j["config"] = config;
  j["total_cost"] = cost_json(r.cost.total_cost);
  j["slack"] = r.slack ? ordered_json(r.slack->to_string()) : ordered_json(nullptr);
  ordered_json per_query = ordered_json::array();
  for (const ObjectCost &q : r.cost.per_query) {
    per_query.push_back({{"id", q.id}, {"site", r.server_ids.at(q.site)}, {"cost", cost_json(q.cost)}});
  }
  j["per_query"] = per_query;
  ordered_json servers = ordered_json::array();
  for (std::size_t k = 0; k < r.cost.per_server.size(); ++k) {
    servers.push_back({{"id", r.server_ids.at(k)},
                       {"storage_used", r.cost.per_server[k].storage_used},
                       {"load_used", r.cost.per_server[k].load_used}});
  }
  j["servers"] = servers;
  ordered_json balance = ordered_json::array();
  for (const auto &b : r.balance) {
    balance.push_back(b ? ordered_json(b->to_string()) : ordered_json(nullptr));
  }
  j["balance"] = balance;
  auto diagnostics = [](const std::vector<Diagnostic> &list) {
    ordered_json out = ordered_json::array();
    for (const Diagnostic &d : list) {
      out.push_back({{"severity", severity_text(d.severity)}, {"code", d.code}, {"message", d.message}});
    }
    return out;
  };
  j["violations"] = diagnostics(r.cost.violations);
  j["warnings"] = diagnostics(r.warnings);
  ordered_json timing = ordered_json::object();
  for (const auto &[stage, ms] : r.timings_ms) {
    timing[stage] = ms;
  }
  j["timing_ms"] = timing;
  return j.dump(2) + "\n";
}

std::string format_csv(const RunReport &r) {
  std::ostringstream out;
  out << "id,site,cost\n";
  for (const ObjectCost &q : r.cost.per_query) {
    out << q.id << ',' << r.server_ids.at(q.site) << ',' << q.cost.to_string() << '\n';
  }
  return out.str();
}

} // namespace

std::string format_report(const RunReport &r, ReportFormat format) {
  switch (format) {
  case ReportFormat::kText:
    return format_text(r);
  case ReportFormat::kJson:
    return format_json(r);
  case ReportFormat::kCsv:
    return format_csv(r);
  }
  return {};
}

} // namespace placer
