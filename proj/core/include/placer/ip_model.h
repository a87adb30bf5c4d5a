/*******************************************************************************
 * Integer programs for data placement, replicated data placement and view
 * placement, and an LP-format writer/reader for them.
 *
 * Variable names use 1-based indices:
 *   x_T{j}_S{k}, x_Q{i}_S{k}, lam_Q{i}_T{j}          data placement
 *   xr{h}_T{j}_S{k}, y_Q{i}_S{k}, z{h}_Q{i}_T{j}_S{k}  replication
 *   ss_V{j}_S{k}, cs_V{j}_S{k}, lam_V{i}_V{j}, mv_V{j}  view placement
 *
 * @file:   ip_model.h
 ******************************************************************************/
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "placer/gdp.h"
#include "placer/workload.h"

namespace placer {

enum class Sense { kMinimize, kMaximize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  Cost coef = 0;
  std::string var;

  friend bool operator==(const Term &, const Term &) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  Cost rhs = 0;

  friend bool operator==(const Constraint &, const Constraint &) = default;
};

struct IpModel {
  Sense sense = Sense::kMinimize;
  std::vector<Term> objective;
  std::vector<Constraint> constraints;
  std::vector<std::string> binaries;
  /// Continuous variables bounded to [0, 1].
  std::vector<std::string> bounded_reals;

  /// Throws std::invalid_argument on malformed or duplicate names, undeclared
  /// variables, and empty constraints.
  void validate() const;

  friend bool operator==(const IpModel &, const IpModel &) = default;
};

/// Minimizes Σ ν_i·C_i^j·λ_i^j with λ ≥ |x_Q − x_T| per server. Servers with a
/// bounded load capacity also get Σ exec_cost·ν·x_Q ≤ load capacity.
IpModel build_dp_ip(const Workload &w);

/// Maximizes the frequency-weighted ref cost served locally with r replicas.
/// Throws std::invalid_argument when r < 1 or r > number of servers.
IpModel build_replication_ip(const Workload &w, std::size_t r);

/// Minimizes the view placement objective. Views with infinite transfer cost
/// have no cs variables; their ss variables stand in for them.
IpModel build_gdp_ip(const ViewDag &dag);

/// LP text: objective, "Subject To", "Bounds", "Binary", "End". An empty
/// objective is written as "obj: 0 dummy0" with dummy0 fixed to 0.
std::string write_lp(const IpModel &m);

/// Reads the subset of the LP format that write_lp emits.
/// Throws ParseError with a line number on malformed input.
IpModel read_lp(std::string_view text);

} // namespace placer
