#include "placer/gdp.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "json_util.h"

namespace placer {

using json_util::json;

std::string_view to_string(ViewClass cls) {
  switch (cls) {
  case ViewClass::kBaseTable:
    return "base_table";
  case ViewClass::kQueryOnly:
    return "query";
  case ViewClass::kMaterializedView:
    return "materialized_view";
  case ViewClass::kIntermediate:
    return "intermediate";
  }
  return "?";
}

ViewClass parse_view_class(std::string_view text) {
  if (text == "base_table") {
    return ViewClass::kBaseTable;
  }
  if (text == "query") {
    return ViewClass::kQueryOnly;
  }
  if (text == "materialized_view") {
    return ViewClass::kMaterializedView;
  }
  if (text == "intermediate") {
    return ViewClass::kIntermediate;
  }
  throw ParseError("unknown view class '" + std::string(text) + "'");
}

namespace {

// Iterative three-color DFS; returns one cycle as a list of view indices, or
// an empty vector for a DAG.
std::vector<std::size_t> find_cycle(const ViewDag &dag) {
  const std::size_t n = dag.views.size();
  std::vector<std::vector<std::size_t>> out(n);
  for (const Arc &a : dag.arcs) {
    out[a.consumer].push_back(a.producer);
  }
  for (auto &succ : out) {
    std::sort(succ.begin(), succ.end());
  }

  enum : std::uint8_t { kWhite, kGray, kBlack };
  std::vector<std::uint8_t> color(n, kWhite);
  std::vector<std::size_t> parent(n, n);

  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != kWhite) {
      continue;
    }
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    color[root] = kGray;
    while (!stack.empty()) {
      auto &[u, next] = stack.back();
      if (next == out[u].size()) {
        color[u] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t v = out[u][next++];
      if (color[v] == kGray) {
        std::vector<std::size_t> cycle{v};
        for (std::size_t x = u; x != v; x = parent[x]) {
          cycle.push_back(x);
        }
        std::reverse(cycle.begin() + 1, cycle.end());
        return cycle;
      }
      if (color[v] == kWhite) {
        color[v] = kGray;
        parent[v] = u;
        stack.emplace_back(v, 0);
      }
    }
  }
  return {};
}

} // namespace

void validate(const ViewDag &dag) {
  std::unordered_set<std::string> ids;
  for (const View &v : dag.views) {
    if (!is_valid_id(v.id)) {
      throw ValidationError("malformed view id '" + v.id + "'", v.id);
    }
    if (!ids.insert(v.id).second) {
      throw ValidationError("duplicate id '" + v.id + "'", v.id);
    }
    if (v.size < 0 || v.exec_cost < 0 || (v.transfer_cost.is_finite() && v.transfer_cost.value() < 0)) {
      throw ValidationError("view '" + v.id + "' has a negative quantity", v.id);
    }
    switch (v.cls) {
    case ViewClass::kBaseTable:
      if (v.transfer_cost.is_finite()) {
        throw ValidationError("base table '" + v.id + "' must have infinite transfer_cost", v.id);
      }
      break;
    case ViewClass::kQueryOnly:
    case ViewClass::kIntermediate:
      if (v.size != 0) {
        throw ValidationError(
            std::string(to_string(v.cls)) + " view '" + v.id + "' must have size 0", v.id
        );
      }
      break;
    case ViewClass::kMaterializedView:
      break;
    }
  }

  std::unordered_set<std::uint64_t> arc_keys;
  for (const Arc &a : dag.arcs) {
    if (a.consumer >= dag.views.size() || a.producer >= dag.views.size()) {
      throw ValidationError("arc references an undefined view", "");
    }
    const View &consumer = dag.views[a.consumer];
    const View &producer = dag.views[a.producer];
    if (a.cost < 0) {
      throw ValidationError("arc " + consumer.id + "->" + producer.id + " has negative cost", consumer.id);
    }
    if (consumer.cls == ViewClass::kBaseTable) {
      throw ValidationError("base table '" + consumer.id + "' cannot depend on other views", consumer.id);
    }
    if (producer.cls == ViewClass::kQueryOnly) {
      throw ValidationError("query view '" + producer.id + "' cannot have consumers", producer.id);
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(a.consumer) << 32) | a.producer;
    if (!arc_keys.insert(key).second) {
      throw ValidationError("duplicate arc " + consumer.id + "->" + producer.id, consumer.id);
    }
  }

  if (const auto cycle = find_cycle(dag); !cycle.empty()) {
    std::string text;
    for (const std::size_t v : cycle) {
      text += dag.views[v].id + " -> ";
    }
    text += dag.views[cycle.front()].id;
    throw ValidationError("dependency cycle: " + text, dag.views[cycle.front()].id);
  }

  Workload servers_only;
  servers_only.servers = dag.servers;
  validate(servers_only);

  try {
    Cost total = 0;
    for (const View &v : dag.views) {
      total = checked_add(total, v.size);
      total = checked_add(total, v.transfer_cost.value());
      total = checked_add(total, v.exec_cost);
    }
    for (const Arc &a : dag.arcs) {
      total = checked_add(total, a.cost);
    }
  } catch (const std::overflow_error &) {
    throw ValidationError("view DAG totals overflow a 64-bit integer", "");
  }
}

namespace {

std::vector<Server> parse_servers(const json &doc) {
  std::vector<Server> servers;
  for (const json &js : json_util::require_array(doc, "servers", "document")) {
    json_util::expect_keys(js, {"id", "storage_capacity", "load_capacity"}, "server");
    Server s;
    s.id = json_util::get_string(js, "id", "server");
    s.storage_capacity = json_util::get_int(js, "storage_capacity", "server '" + s.id + "'");
    if (js.contains("load_capacity")) {
      s.load_capacity = json_util::get_int(js, "load_capacity", "server '" + s.id + "'");
    }
    servers.push_back(std::move(s));
  }
  return servers;
}

ExtendedCost parse_transfer_cost(const json &value, const std::string &ctx) {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") {
      return ExtendedCost::infinite();
    }
    throw ParseError(ctx + ": transfer_cost must be an integer or \"inf\"");
  }
  return json_util::as_int(value, ctx + ".transfer_cost");
}

} // namespace

ViewDag parse_gdp(std::string_view text) {
  const json doc = json_util::parse(text);
  json_util::expect_keys(doc, {"views", "arcs", "servers"}, "GDP document");

  ViewDag dag;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<bool> explicit_exec;

  for (const json &jv : json_util::require_array(doc, "views", "GDP document")) {
    json_util::expect_keys(jv, {"id", "class", "size", "transfer_cost", "exec_cost"}, "view");
    View v;
    v.id = json_util::get_string(jv, "id", "view");
    const std::string ctx = "view '" + v.id + "'";
    v.cls = parse_view_class(json_util::get_string(jv, "class", ctx));
    if (jv.contains("size")) {
      v.size = json_util::get_int(jv, "size", ctx);
    }

    if (jv.contains("transfer_cost")) {
      v.transfer_cost = parse_transfer_cost(jv["transfer_cost"], ctx);
    } else {
      switch (v.cls) {
      case ViewClass::kBaseTable:
      case ViewClass::kQueryOnly:
        v.transfer_cost = ExtendedCost::infinite();
        break;
      case ViewClass::kMaterializedView:
        v.transfer_cost = v.size;
        break;
      case ViewClass::kIntermediate:
        throw ValidationError(
            ctx + ": intermediate views must declare transfer_cost (result size or \"inf\")", v.id
        );
      }
    }
    explicit_exec.push_back(jv.contains("exec_cost"));
    if (explicit_exec.back()) {
      v.exec_cost = json_util::get_int(jv, "exec_cost", ctx);
    }
    index.emplace(v.id, dag.views.size());
    dag.views.push_back(std::move(v));
  }

  if (doc.contains("arcs")) {
    for (const json &ja : json_util::require_array(doc, "arcs", "GDP document")) {
      json_util::expect_keys(ja, {"consumer", "producer", "cost"}, "arc");
      const std::string consumer = json_util::get_string(ja, "consumer", "arc");
      const std::string producer = json_util::get_string(ja, "producer", "arc");
      const std::string ctx = "arc " + consumer + "->" + producer;
      const auto c = index.find(consumer);
      if (c == index.end()) {
        throw ValidationError(ctx + " references undefined view '" + consumer + "'", consumer);
      }
      const auto p = index.find(producer);
      if (p == index.end()) {
        throw ValidationError(ctx + " references undefined view '" + producer + "'", producer);
      }
      dag.arcs.push_back({c->second, p->second, json_util::get_int(ja, "cost", ctx)});
    }
  }

  dag.servers = parse_servers(doc);

  for (std::size_t i = 0; i < dag.views.size(); ++i) {
    if (explicit_exec[i] || dag.views[i].cls == ViewClass::kBaseTable) {
      continue;
    }
    Cost in_cost = 0;
    for (const Arc &a : dag.arcs) {
      if (a.consumer == i) {
        in_cost = checked_add(in_cost, std::max<Cost>(a.cost, 0));
      }
    }
    dag.views[i].exec_cost = in_cost;
  }

  validate(dag);
  return dag;
}

std::string serialize_gdp(const ViewDag &dag) {
  json doc;
  doc["views"] = json::array();
  for (const View &v : dag.views) {
    json jv = {{"id", v.id}, {"class", std::string(to_string(v.cls))}, {"size", v.size}};
    if (v.transfer_cost.is_infinite()) {
      jv["transfer_cost"] = "inf";
    } else {
      jv["transfer_cost"] = v.transfer_cost.value();
    }
    jv["exec_cost"] = v.exec_cost;
    doc["views"].push_back(std::move(jv));
  }
  doc["arcs"] = json::array();
  for (const Arc &a : dag.arcs) {
    doc["arcs"].push_back(
        {{"consumer", dag.views.at(a.consumer).id}, {"producer", dag.views.at(a.producer).id}, {"cost", a.cost}}
    );
  }
  doc["servers"] = json::array();
  for (const Server &s : dag.servers) {
    json js = {{"id", s.id}, {"storage_capacity", s.storage_capacity}};
    if (s.load_capacity) {
      js["load_capacity"] = *s.load_capacity;
    }
    doc["servers"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

ViewDag lift_workload(const Workload &w) {
  ViewDag dag;
  dag.servers = w.servers;
  dag.views.reserve(w.tables.size() + w.queries.size());
  for (const Table &t : w.tables) {
    dag.views.push_back({t.id, ViewClass::kBaseTable, t.size, ExtendedCost::infinite(), 0});
  }
  const std::size_t first_query = dag.views.size();
  for (std::size_t i = 0; i < w.queries.size(); ++i) {
    const Query &q = w.queries[i];
    dag.views.push_back(
        {q.id, ViewClass::kQueryOnly, 0, ExtendedCost::infinite(), checked_mul(q.exec_cost, q.frequency)}
    );
    for (const QueryRef &ref : q.refs) {
      dag.arcs.push_back({first_query + i, ref.table, checked_mul(q.frequency, ref.cost)});
    }
  }
  return dag;
}

ViewDag pin_materialized_views(ViewDag dag) {
  for (View &v : dag.views) {
    if (v.cls == ViewClass::kMaterializedView) {
      v.transfer_cost = ExtendedCost::infinite();
    }
  }
  return dag;
}

bool is_gdp_document(std::string_view text) {
  try {
    const json doc = json_util::parse(text);
    return doc.is_object() && doc.contains("views");
  } catch (const ParseError &) {
    return false;
  }
}

} // namespace placer
