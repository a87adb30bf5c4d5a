/*******************************************************************************
 * Generalized data placement: views connected by a dependency DAG, each with a
 * computation site and a storage site.
 *
 * @file:   gdp.h
 ******************************************************************************/
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "placer/common.h"
#include "placer/workload.h"

namespace placer {

enum class ViewClass { kBaseTable, kQueryOnly, kMaterializedView, kIntermediate };

std::string_view to_string(ViewClass cls);
ViewClass parse_view_class(std::string_view text);

struct View {
  std::string id;
  ViewClass cls = ViewClass::kBaseTable;
  /// Storage footprint; zero for query-only and intermediate views.
  Cost size = 0;
  /// Cost of shipping the view from its computation to its storage site.
  ExtendedCost transfer_cost = ExtendedCost::infinite();
  Cost exec_cost = 0;

  friend bool operator==(const View &, const View &) = default;
};

/// `consumer` needs `producer`; `cost` is paid when the producer's storage
/// site differs from the consumer's computation site.
struct Arc {
  std::size_t consumer = 0;
  std::size_t producer = 0;
  Cost cost = 0;

  friend bool operator==(const Arc &, const Arc &) = default;
};

struct ViewDag {
  std::vector<View> views;
  std::vector<Arc> arcs;
  std::vector<Server> servers;

  [[nodiscard]] std::size_t num_views() const { return views.size(); }
  [[nodiscard]] std::size_t num_servers() const { return servers.size(); }

  friend bool operator==(const ViewDag &, const ViewDag &) = default;
};

/// Throws ValidationError on cycles (the message lists one cycle), class/field
/// contradictions, dangling or duplicate arcs, and malformed servers.
void validate(const ViewDag &dag);

/// Reads a GDP document. Class defaults:
///   BaseTable         transfer_cost = inf, exec_cost = 0
///   QueryOnly         size = 0, transfer_cost = inf
///   MaterializedView  transfer_cost = size
///   Intermediate      size = 0, transfer_cost must be declared
/// Non-base views default exec_cost to the sum of their in-arc costs.
ViewDag parse_gdp(std::string_view text);

std::string serialize_gdp(const ViewDag &dag);

/// Tables become base-table views, queries become query-only views, and each
/// ref becomes an arc weighted by frequency times cost. View order is tables
/// first, then queries.
ViewDag lift_workload(const Workload &w);

/// Copy of `dag` with every materialized view's transfer cost forced to
/// infinity, so it is computed and stored on the same server.
ViewDag pin_materialized_views(ViewDag dag);

/// True when `text` looks like a GDP document rather than a workload.
bool is_gdp_document(std::string_view text);

} // namespace placer
