/*******************************************************************************
 * Tables, queries and servers of a simple data placement instance, plus the
 * JSON workload document reader/writer.
 *
 * @file:   workload.h
 ******************************************************************************/
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "placer/common.h"

namespace placer {

struct Table {
  std::string id;
  Cost size = 0;

  friend bool operator==(const Table &, const Table &) = default;
};

/// One table a query reads, with the transfer cost paid when the table is not
/// local to the query's execution site.
struct QueryRef {
  std::size_t table = 0; // index into Workload::tables
  Cost cost = 0;

  friend bool operator==(const QueryRef &, const QueryRef &) = default;
};

struct Query {
  std::string id;
  std::vector<QueryRef> refs;
  Cost frequency = 1;
  /// Load units per execution. Defaults to the sum of ref costs.
  Cost exec_cost = 0;

  /// Σ ref costs, not frequency weighted.
  [[nodiscard]] Cost total_ref_cost() const;

  friend bool operator==(const Query &, const Query &) = default;
};

struct Server {
  std::string id;
  Cost storage_capacity = 0;
  /// Execution capacity; nullopt means unbounded.
  std::optional<Cost> load_capacity;

  friend bool operator==(const Server &, const Server &) = default;
};

struct Workload {
  std::vector<Table> tables;
  std::vector<Query> queries;
  std::vector<Server> servers;

  [[nodiscard]] std::size_t num_tables() const { return tables.size(); }
  [[nodiscard]] std::size_t num_queries() const { return queries.size(); }
  [[nodiscard]] std::size_t num_servers() const { return servers.size(); }

  [[nodiscard]] Cost total_table_size() const;
  [[nodiscard]] Cost total_storage_capacity() const;

  /// Σ_i ν_i Σ_j C_i^j: the cost of placing every referenced table away from
  /// every query.
  [[nodiscard]] Cost total_weighted_ref_cost() const;

  friend bool operator==(const Workload &, const Workload &) = default;
};

/// Throws ValidationError on any invariant violation: duplicate or malformed
/// ids (tables and queries share one namespace), dangling refs, duplicate refs,
/// empty ref lists, negative quantities, zero frequency, or totals that do not
/// fit a signed 64-bit integer.
void validate(const Workload &w);

/// Parses a workload document. Defaults are materialized: frequency = 1,
/// exec_cost = Σ ref costs, load_capacity = unbounded.
Workload parse_workload(std::string_view text);

/// Inverse of parse_workload. Unbounded load capacities are omitted.
std::string serialize_workload(const Workload &w);

/// Cheap necessary conditions for a legal placement. Exact feasibility is
/// NP-hard, so these only ever warn.
std::vector<Diagnostic> validate_capacity_lower_bounds(const Workload &w);

/// Id-keyed lookups; -1 style misses are returned as nullopt.
std::optional<std::size_t> find_table(const Workload &w, std::string_view id);
std::optional<std::size_t> find_query(const Workload &w, std::string_view id);
std::optional<std::size_t> find_server(const Workload &w, std::string_view id);

} // namespace placer
