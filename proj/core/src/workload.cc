#include "placer/workload.h"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "json_util.h"

namespace placer {

using json_util::json;

Cost Query::total_ref_cost() const {
  Cost total = 0;
  for (const QueryRef &ref : refs) {
    total = checked_add(total, ref.cost);
  }
  return total;
}

Cost Workload::total_table_size() const {
  Cost total = 0;
  for (const Table &t : tables) {
    total = checked_add(total, t.size);
  }
  return total;
}

Cost Workload::total_storage_capacity() const {
  Cost total = 0;
  for (const Server &s : servers) {
    total = checked_add(total, s.storage_capacity);
  }
  return total;
}

Cost Workload::total_weighted_ref_cost() const {
  Cost total = 0;
  for (const Query &q : queries) {
    total = checked_add(total, checked_mul(q.frequency, q.total_ref_cost()));
  }
  return total;
}

void validate(const Workload &w) {
  std::unordered_set<std::string> object_ids;
  for (const Table &t : w.tables) {
    if (!is_valid_id(t.id)) {
      throw ValidationError("malformed table id '" + t.id + "'", t.id);
    }
    if (!object_ids.insert(t.id).second) {
      throw ValidationError("duplicate id '" + t.id + "'", t.id);
    }
    if (t.size < 0) {
      throw ValidationError("table '" + t.id + "' has negative size", t.id);
    }
  }

  for (const Query &q : w.queries) {
    if (!is_valid_id(q.id)) {
      throw ValidationError("malformed query id '" + q.id + "'", q.id);
    }
    if (!object_ids.insert(q.id).second) {
      throw ValidationError("duplicate id '" + q.id + "'", q.id);
    }
    if (q.refs.empty()) {
      throw ValidationError("query '" + q.id + "' references no tables", q.id);
    }
    if (q.frequency < 1) {
      throw ValidationError("query '" + q.id + "' has frequency < 1", q.id);
    }
    if (q.exec_cost < 0) {
      throw ValidationError("query '" + q.id + "' has negative exec_cost", q.id);
    }
    std::unordered_set<std::size_t> seen;
    for (const QueryRef &ref : q.refs) {
      if (ref.table >= w.tables.size()) {
        throw ValidationError("query '" + q.id + "' references an undefined table", q.id);
      }
      const std::string &tid = w.tables[ref.table].id;
      if (!seen.insert(ref.table).second) {
        throw ValidationError("query '" + q.id + "' references table '" + tid + "' twice", tid);
      }
      if (ref.cost < 0) {
        throw ValidationError(
            "query '" + q.id + "' has negative cost for table '" + tid + "'", q.id
        );
      }
    }
  }

  std::unordered_set<std::string> server_ids;
  for (const Server &s : w.servers) {
    if (!is_valid_id(s.id)) {
      throw ValidationError("malformed server id '" + s.id + "'", s.id);
    }
    if (!server_ids.insert(s.id).second) {
      throw ValidationError("duplicate id '" + s.id + "'", s.id);
    }
    if (s.storage_capacity < 0) {
      throw ValidationError("server '" + s.id + "' has negative storage_capacity", s.id);
    }
    if (s.load_capacity && *s.load_capacity < 0) {
      throw ValidationError("server '" + s.id + "' has negative load_capacity", s.id);
    }
  }

  // Every downstream sum must be representable.
  try {
    (void)w.total_table_size();
    (void)w.total_storage_capacity();
    (void)w.total_weighted_ref_cost();
    Cost load = 0;
    for (const Query &q : w.queries) {
      load = checked_add(load, checked_mul(q.exec_cost, q.frequency));
    }
    Cost load_capacity = 0;
    for (const Server &s : w.servers) {
      load_capacity = checked_add(load_capacity, s.load_capacity.value_or(0));
    }
  } catch (const std::overflow_error &) {
    throw ValidationError("workload totals overflow a 64-bit integer", "");
  }
}

Workload parse_workload(std::string_view text) {
  const json doc = json_util::parse(text);
  json_util::expect_keys(doc, {"tables", "queries", "servers"}, "workload");

  Workload w;
  std::unordered_map<std::string, std::size_t> table_index;

  for (const json &jt : json_util::require_array(doc, "tables", "workload")) {
    json_util::expect_keys(jt, {"id", "size"}, "table");
    Table t;
    t.id = json_util::get_string(jt, "id", "table");
    t.size = json_util::get_int(jt, "size", "table '" + t.id + "'");
    table_index.emplace(t.id, w.tables.size());
    w.tables.push_back(std::move(t));
  }

  if (doc.contains("queries")) {
    for (const json &jq : json_util::require_array(doc, "queries", "workload")) {
      json_util::expect_keys(jq, {"id", "refs", "frequency", "exec_cost"}, "query");
      Query q;
      q.id = json_util::get_string(jq, "id", "query");
      const std::string ctx = "query '" + q.id + "'";
      for (const json &jr : json_util::require_array(jq, "refs", ctx)) {
        json_util::expect_keys(jr, {"table", "cost"}, ctx + " ref");
        const std::string tid = json_util::get_string(jr, "table", ctx + " ref");
        const auto it = table_index.find(tid);
        if (it == table_index.end()) {
          throw ValidationError(ctx + " references undefined table '" + tid + "'", tid);
        }
        q.refs.push_back({it->second, json_util::get_int(jr, "cost", ctx + " ref")});
      }
      if (jq.contains("frequency")) {
        q.frequency = json_util::get_int(jq, "frequency", ctx);
      }
      if (jq.contains("exec_cost")) {
        q.exec_cost = json_util::get_int(jq, "exec_cost", ctx);
      } else {
        try {
          q.exec_cost = q.total_ref_cost();
        } catch (const std::overflow_error &) {
          throw ValidationError(ctx + " ref costs overflow", q.id);
        }
      }
      w.queries.push_back(std::move(q));
    }
  }

  for (const json &js : json_util::require_array(doc, "servers", "workload")) {
    json_util::expect_keys(js, {"id", "storage_capacity", "load_capacity"}, "server");
    Server s;
    s.id = json_util::get_string(js, "id", "server");
    const std::string ctx = "server '" + s.id + "'";
    s.storage_capacity = json_util::get_int(js, "storage_capacity", ctx);
    if (js.contains("load_capacity")) {
      s.load_capacity = json_util::get_int(js, "load_capacity", ctx);
    }
    w.servers.push_back(std::move(s));
  }

  validate(w);
  return w;
}

std::string serialize_workload(const Workload &w) {
  json doc;
  doc["tables"] = json::array();
  for (const Table &t : w.tables) {
    doc["tables"].push_back({{"id", t.id}, {"size", t.size}});
  }
  doc["queries"] = json::array();
  for (const Query &q : w.queries) {
    json refs = json::array();
    for (const QueryRef &ref : q.refs) {
      refs.push_back({{"table", w.tables.at(ref.table).id}, {"cost", ref.cost}});
    }
    doc["queries"].push_back(
        {{"id", q.id}, {"refs", std::move(refs)}, {"frequency", q.frequency}, {"exec_cost", q.exec_cost}}
    );
  }
  doc["servers"] = json::array();
  for (const Server &s : w.servers) {
    json js = {{"id", s.id}, {"storage_capacity", s.storage_capacity}};
    if (s.load_capacity) {
      js["load_capacity"] = *s.load_capacity;
    }
    doc["servers"].push_back(std::move(js));
  }
  return doc.dump(2) + "\n";
}

std::vector<Diagnostic> validate_capacity_lower_bounds(const Workload &w) {
  std::vector<Diagnostic> out;
  Cost largest_table = 0;
  std::string largest_id;
  for (const Table &t : w.tables) {
    if (t.size > largest_table) {
      largest_table = t.size;
      largest_id = t.id;
    }
  }
  Cost largest_server = 0;
  for (const Server &s : w.servers) {
    largest_server = std::max(largest_server, s.storage_capacity);
  }

  if (largest_server < largest_table) {
    out.push_back(
        {Severity::kWarning,
         "largest-table",
         "no server can hold table '" + largest_id + "' (size " + std::to_string(largest_table) +
             ", largest capacity " + std::to_string(largest_server) + ")"}
    );
  }
  const Cost total_size = w.total_table_size();
  const Cost total_capacity = w.total_storage_capacity();
  if (total_capacity < total_size) {
    out.push_back(
        {Severity::kWarning,
         "aggregate-capacity",
         "total capacity " + std::to_string(total_capacity) + " is below total table size " +
             std::to_string(total_size)}
    );
  }
  return out;
}

namespace {
template <typename Items>
std::optional<std::size_t> find_by_id(const Items &items, std::string_view id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) {
      return i;
    }
  }
  return std::nullopt;
}
} // namespace

std::optional<std::size_t> find_table(const Workload &w, std::string_view id) {
  return find_by_id(w.tables, id);
}

std::optional<std::size_t> find_query(const Workload &w, std::string_view id) {
  return find_by_id(w.queries, id);
}

std::optional<std::size_t> find_server(const Workload &w, std::string_view id) {
  return find_by_id(w.servers, id);
}

} // namespace placer
