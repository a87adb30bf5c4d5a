/*******************************************************************************
 * Placement files and run reports.
 *
 * A placement file has one directive per line, '#' starts a comment:
 *   store   <object id> <server id> [<server id> ...]
 *   compute <object id> <server id>
 *
 * @file:   report.h
 ******************************************************************************/
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "placer/gdp.h"
#include "placer/placement.h"
#include "placer/workload.h"

namespace placer {

std::string write_placement(const Placement &p, const Workload &w);
std::string write_placement(const Placement &p, const ViewDag &dag);

/// Throws ParseError on unknown directives, ids or servers, and on objects
/// stored or sited twice or not at all.
Placement read_placement(std::string_view text, const Workload &w);
Placement read_placement(std::string_view text, const ViewDag &dag);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

enum class ReportFormat { kText, kJson, kCsv };

ReportFormat parse_report_format(std::string_view text);

struct RunReport {
  std::string command;
  std::string input_digest;
  /// Echo of the effective configuration, in insertion order.
  std::vector<std::pair<std::string, std::string>> config;
  CostReport cost;
  std::vector<std::string> server_ids;
  /// min/max ratio per constraint (storage, then load when balanced).
  std::vector<std::optional<Rational>> balance;
  std::optional<Rational> slack;
  std::vector<Diagnostic> warnings;
  /// Stage name and wall time in milliseconds; always printed last.
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// CSV has one "id,site,cost" row per query or view and no other sections.
std::string format_report(const RunReport &r, ReportFormat format);

} // namespace placer
