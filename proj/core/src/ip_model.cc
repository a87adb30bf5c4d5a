#include "placer/ip_model.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace placer {

namespace {

constexpr std::string_view kDummy = "dummy0";
constexpr std::size_t kMaxNameLength = 255;
constexpr std::size_t kWrapColumn = 200;

bool valid_name(std::string_view name) {
  if (name.empty() || name.size() > kMaxNameLength || std::isdigit(static_cast<unsigned char>(name.front()))) {
    return false;
  }
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string idx(std::size_t i) {
  return std::to_string(i + 1);
}

std::string x_table(std::size_t j, std::size_t k) {
  return "x_T" + idx(j) + "_S" + idx(k);
}
std::string x_query(std::size_t i, std::size_t k) {
  return "x_Q" + idx(i) + "_S" + idx(k);
}

} // namespace

void IpModel::validate() const {
  std::unordered_set<std::string> declared;
  for (const auto *list : {&binaries, &bounded_reals}) {
    for (const std::string &name : *list) {
      if (!valid_name(name)) {
        throw std::invalid_argument("invalid variable name '" + name + "'");
      }
      if (!declared.insert(name).second) {
        throw std::invalid_argument("variable '" + name + "' declared twice");
      }
    }
  }
  auto check_terms = [&](const std::vector<Term> &terms, const std::string &where) {
    for (const Term &t : terms) {
      if (!declared.count(t.var)) {
        throw std::invalid_argument("undeclared variable '" + t.var + "' in " + where);
      }
    }
  };
  check_terms(objective, "objective");
  std::unordered_set<std::string> names;
  for (const Constraint &c : constraints) {
    if (!valid_name(c.name)) {
      throw std::invalid_argument("invalid constraint name '" + c.name + "'");
    }
    if (!names.insert(c.name).second) {
      throw std::invalid_argument("constraint '" + c.name + "' declared twice");
    }
    if (c.terms.empty()) {
      throw std::invalid_argument("constraint '" + c.name + "' has no terms");
    }
    check_terms(c.terms, "constraint " + c.name);
  }
}

IpModel build_dp_ip(const Workload &w) {
  validate(w);
  const std::size_t l = w.num_servers();
  IpModel m;
  m.sense = Sense::kMinimize;

  for (std::size_t j = 0; j < w.num_tables(); ++j) {
    Constraint assign{"assign_T" + idx(j), {}, Relation::kEqual, 1};
    for (std::size_t k = 0; k < l; ++k) {
      m.binaries.push_back(x_table(j, k));
      assign.terms.push_back({1, x_table(j, k)});
    }
    m.constraints.push_back(std::move(assign));
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    Constraint assign{"assign_Q" + idx(i), {}, Relation::kEqual, 1};
    for (std::size_t k = 0; k < l; ++k) {
      m.binaries.push_back(x_query(i, k));
      assign.terms.push_back({1, x_query(i, k)});
    }
    m.constraints.push_back(std::move(assign));
  }

  for (std::size_t k = 0; k < l; ++k) {
    Constraint cap{"cap_S" + idx(k), {}, Relation::kLessEqual, w.servers[k].storage_capacity};
    for (std::size_t j = 0; j < w.num_tables(); ++j) {
      if (w.tables[j].size > 0) {
        cap.terms.push_back({w.tables[j].size, x_table(j, k)});
      }
    }
    if (!cap.terms.empty()) {
      m.constraints.push_back(std::move(cap));
    }
    if (w.servers[k].load_capacity) {
      Constraint load{"load_S" + idx(k), {}, Relation::kLessEqual, *w.servers[k].load_capacity};
      for (std::size_t i = 0; i < w.num_queries(); ++i) {
        const Cost units = checked_mul(w.queries[i].exec_cost, w.queries[i].frequency);
        if (units > 0) {
          load.terms.push_back({units, x_query(i, k)});
        }
      }
      if (!load.terms.empty()) {
        m.constraints.push_back(std::move(load));
      }
    }
  }

  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    const Query &q = w.queries[i];
    for (const QueryRef &ref : q.refs) {
      const std::size_t j = ref.table;
      const std::string lam = "lam_Q" + idx(i) + "_T" + idx(j);
      m.bounded_reals.push_back(lam);
      m.objective.push_back({checked_mul(q.frequency, ref.cost), lam});
      for (std::size_t k = 0; k < l; ++k) {
        const std::string base = lam + "_S" + idx(k);
        m.constraints.push_back(
            {base + "_a", {{1, lam}, {-1, x_query(i, k)}, {1, x_table(j, k)}}, Relation::kGreaterEqual, 0}
        );
        m.constraints.push_back(
            {base + "_b", {{1, lam}, {1, x_query(i, k)}, {-1, x_table(j, k)}}, Relation::kGreaterEqual, 0}
        );
      }
    }
  }
  return m;
}

IpModel build_replication_ip(const Workload &w, std::size_t r) {
  validate(w);
  const std::size_t l = w.num_servers();
  if (r < 1 || r > l) {
    throw std::invalid_argument(
        "replication factor " + std::to_string(r) + " must be between 1 and the number of servers (" +
        std::to_string(l) + ")"
    );
  }
  auto xr = [](std::size_t h, std::size_t j, std::size_t k) {
    return "xr" + idx(h) + "_T" + idx(j) + "_S" + idx(k);
  };
  auto y = [](std::size_t i, std::size_t k) { return "y_Q" + idx(i) + "_S" + idx(k); };

  IpModel m;
  m.sense = Sense::kMaximize;
  for (std::size_t h = 0; h < r; ++h) {
    for (std::size_t j = 0; j < w.num_tables(); ++j) {
      Constraint once{"replica" + idx(h) + "_T" + idx(j), {}, Relation::kEqual, 1};
      for (std::size_t k = 0; k < l; ++k) {
        m.binaries.push_back(xr(h, j, k));
        once.terms.push_back({1, xr(h, j, k)});
      }
      m.constraints.push_back(std::move(once));
    }
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    Constraint site{"site_Q" + idx(i), {}, Relation::kEqual, 1};
    for (std::size_t k = 0; k < l; ++k) {
      m.binaries.push_back(y(i, k));
      site.terms.push_back({1, y(i, k)});
    }
    m.constraints.push_back(std::move(site));
  }
  for (std::size_t j = 0; j < w.num_tables(); ++j) {
    for (std::size_t k = 0; k < l; ++k) {
      Constraint distinct{"distinct_T" + idx(j) + "_S" + idx(k), {}, Relation::kLessEqual, 1};
      for (std::size_t h = 0; h < r; ++h) {
        distinct.terms.push_back({1, xr(h, j, k)});
      }
      m.constraints.push_back(std::move(distinct));
    }
  }
  for (std::size_t k = 0; k < l; ++k) {
    Constraint cap{"cap_S" + idx(k), {}, Relation::kLessEqual, w.servers[k].storage_capacity};
    for (std::size_t j = 0; j < w.num_tables(); ++j) {
      for (std::size_t h = 0; h < r; ++h) {
        if (w.tables[j].size > 0) {
          cap.terms.push_back({w.tables[j].size, xr(h, j, k)});
        }
      }
    }
    if (!cap.terms.empty()) {
      m.constraints.push_back(std::move(cap));
    }
  }
  for (std::size_t i = 0; i < w.num_queries(); ++i) {
    const Query &q = w.queries[i];
    for (const QueryRef &ref : q.refs) {
      const std::size_t j = ref.table;
      for (std::size_t k = 0; k < l; ++k) {
        for (std::size_t h = 0; h < r; ++h) {
          const std::string z = "z" + idx(h) + "_Q" + idx(i) + "_T" + idx(j) + "_S" + idx(k);
          m.bounded_reals.push_back(z);
          m.objective.push_back({checked_mul(q.frequency, ref.cost), z});
          m.constraints.push_back({z + "_y", {{1, z}, {-1, y(i, k)}}, Relation::kLessEqual, 0});
          m.constraints.push_back({z + "_x", {{1, z}, {-1, xr(h, j, k)}}, Relation::kLessEqual, 0});
        }
      }
    }
  }
  return m;
}

IpModel build_gdp_ip(const ViewDag &dag) {
  validate(dag);
  const std::size_t l = dag.num_servers();
  const std::size_t n = dag.num_views();
  auto ss = [](std::size_t j, std::size_t k) { return "ss_V" + idx(j) + "_S" + idx(k); };
  auto pinned = [&](std::size_t j) { return dag.views[j].transfer_cost.is_infinite(); };
  auto cs = [&](std::size_t j, std::size_t k) {
    return pinned(j) ? ss(j, k) : "cs_V" + idx(j) + "_S" + idx(k);
  };

  IpModel m;
  m.sense = Sense::kMinimize;
  for (std::size_t j = 0; j < n; ++j) {
    Constraint store{"store_V" + idx(j), {}, Relation::kEqual, 1};
    for (std::size_t k = 0; k < l; ++k) {
      m.binaries.push_back(ss(j, k));
      store.terms.push_back({1, ss(j, k)});
    }
    m.constraints.push_back(std::move(store));
    if (pinned(j)) {
      continue;
    }
    Constraint compute{"compute_V" + idx(j), {}, Relation::kEqual, 1};
    for (std::size_t k = 0; k < l; ++k) {
      m.binaries.push_back(cs(j, k));
      compute.terms.push_back({1, cs(j, k)});
    }
    m.constraints.push_back(std::move(compute));
  }
  for (std::size_t k = 0; k < l; ++k) {
    Constraint cap{"cap_S" + idx(k), {}, Relation::kLessEqual, dag.servers[k].storage_capacity};
    for (std::size_t j = 0; j < n; ++j) {
      if (dag.views[j].size > 0) {
        cap.terms.push_back({dag.views[j].size, ss(j, k)});
      }
    }
    if (!cap.terms.empty()) {
      m.constraints.push_back(std::move(cap));
    }
    if (dag.servers[k].load_capacity) {
      Constraint load{"load_S" + idx(k), {}, Relation::kLessEqual, *dag.servers[k].load_capacity};
      for (std::size_t j = 0; j < n; ++j) {
        if (dag.views[j].exec_cost > 0) {
          load.terms.push_back({dag.views[j].exec_cost, cs(j, k)});
        }
      }
      if (!load.terms.empty()) {
        m.constraints.push_back(std::move(load));
      }
    }
  }

  // |a_k - b_k| ≤ v for every server.
  auto absolute = [&](const std::string &v, auto a, auto b) {
    for (std::size_t k = 0; k < l; ++k) {
      const std::string base = v + "_S" + idx(k);
      m.constraints.push_back({base + "_a", {{1, v}, {-1, a(k)}, {1, b(k)}}, Relation::kGreaterEqual, 0});
      m.constraints.push_back({base + "_b", {{1, v}, {1, a(k)}, {-1, b(k)}}, Relation::kGreaterEqual, 0});
    }
  };

  for (std::size_t j = 0; j < n; ++j) {
    if (pinned(j)) {
      continue;
    }
    const std::string mv = "mv_V" + idx(j);
    m.bounded_reals.push_back(mv);
    m.objective.push_back({dag.views[j].transfer_cost.value(), mv});
    absolute(mv, [&](std::size_t k) { return cs(j, k); }, [&](std::size_t k) { return ss(j, k); });
  }
  for (const Arc &arc : dag.arcs) {
    const std::string lam = "lam_V" + idx(arc.consumer) + "_V" + idx(arc.producer);
    m.bounded_reals.push_back(lam);
    m.objective.push_back({arc.cost, lam});
    absolute(
        lam,
        [&](std::size_t k) { return cs(arc.consumer, k); },
        [&](std::size_t k) { return ss(arc.producer, k); }
    );
  }
  return m;
}

// ---------------------------------------------------------------------------
// LP format

namespace {

std::string_view relation_text(Relation r) {
  switch (r) {
  case Relation::kLessEqual:
    return "<=";
  case Relation::kEqual:
    return "=";
  case Relation::kGreaterEqual:
    return ">=";
  }
  return "=";
}

void write_expression(std::ostringstream &out, const std::string &label, const std::vector<Term> &terms) {
  std::string line = " " + label + ":";
  bool first = true;
  for (const Term &t : terms) {
    std::string piece;
    if (first) {
      piece = (t.coef < 0 ? "-" : "") + std::to_string(t.coef < 0 ? -t.coef : t.coef) + " " + t.var;
    } else {
      piece = std::string(t.coef < 0 ? "- " : "+ ") + std::to_string(t.coef < 0 ? -t.coef : t.coef) + " " + t.var;
    }
    if (line.size() + piece.size() + 1 > kWrapColumn) {
      out << line << '\n';
      line = "   ";
    }
    line += " " + piece;
    first = false;
  }
  out << line;
}

} // namespace

std::string write_lp(const IpModel &m) {
  m.validate();
  std::ostringstream out;
  out << (m.sense == Sense::kMinimize ? "Minimize" : "Maximize") << '\n';
  const bool dummy = m.objective.empty();
  if (dummy) {
    write_expression(out, "obj", {{0, std::string(kDummy)}});
  } else {
    write_expression(out, "obj", m.objective);
  }
  out << "\nSubject To\n";
  for (const Constraint &c : m.constraints) {
    write_expression(out, c.name, c.terms);
    out << ' ' << relation_text(c.relation) << ' ' << c.rhs << '\n';
  }
  out << "Bounds\n";
  for (const std::string &v : m.bounded_reals) {
    out << " 0 <= " << v << " <= 1\n";
  }
  if (dummy) {
    out << ' ' << kDummy << " = 0\n";
  }
  out << "Binary\n";
  for (const std::string &v : m.binaries) {
    out << ' ' << v << '\n';
  }
  out << "End\n";
  return out.str();
}

namespace {

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinary, kEnd };

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> tokens_of(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) {
    out.push_back(tok);
  }
  return out;
}

bool parse_int(std::string_view s, Cost &value) {
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

struct Statement {
  std::size_t line = 0;
  std::string label;
  std::vector<std::string> tokens;
};

struct ParsedExpression {
  std::vector<Term> terms;
  std::optional<Relation> relation;
  Cost rhs = 0;
};

ParsedExpression parse_statement(const Statement &st, bool allow_relation) {
  ParsedExpression e;
  Cost sign = 1;
  Cost coef = 0;
  bool has_coef = false;
  for (std::size_t t = 0; t < st.tokens.size(); ++t) {
    const std::string &tok = st.tokens[t];
    if (tok == "+") {
      continue;
    }
    if (tok == "-") {
      sign = -sign;
      continue;
    }
    if (tok == "<=" || tok == "=<" || tok == "=" || tok == ">=" || tok == "=>") {
      if (!allow_relation || has_coef || t + 2 != st.tokens.size()) {
        throw ParseError("misplaced relation in '" + st.label + "'", st.line, 1);
      }
      e.relation = tok == "=" ? Relation::kEqual : (tok[0] == '<' || tok[1] == '<') ? Relation::kLessEqual
                                                                                   : Relation::kGreaterEqual;
      if (!parse_int(st.tokens[t + 1], e.rhs)) {
        throw ParseError("bad right-hand side '" + st.tokens[t + 1] + "'", st.line, 1);
      }
      break;
    }
    Cost value = 0;
    if (parse_int(tok, value)) {
      if (has_coef) {
        throw ParseError("two coefficients in a row in '" + st.label + "'", st.line, 1);
      }
      coef = sign * value;
      has_coef = true;
      sign = 1;
      continue;
    }
    if (!valid_name(tok)) {
      throw ParseError("bad token '" + tok + "'", st.line, 1);
    }
    e.terms.push_back({has_coef ? coef : sign, tok});
    has_coef = false;
    sign = 1;
  }
  if (has_coef) {
    throw ParseError("dangling coefficient in '" + st.label + "'", st.line, 1);
  }
  if (allow_relation && !e.relation) {
    throw ParseError("constraint '" + st.label + "' has no relation", st.line, 1);
  }
  return e;
}

} // namespace

IpModel read_lp(std::string_view text) {
  IpModel m;
  Section section = Section::kNone;
  std::vector<Statement> objective;
  std::vector<Statement> constraints;
  bool saw_dummy_bound = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size() && section != Section::kEnd) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto comment = line.find('\\'); comment != std::string_view::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::string key = lower(line);
    if (key == "minimize" || key == "maximize") {
      m.sense = key == "minimize" ? Sense::kMinimize : Sense::kMaximize;
      section = Section::kObjective;
      continue;
    }
    if (key == "subject to" || key == "st" || key == "s.t.") {
      section = Section::kConstraints;
      continue;
    }
    if (key == "bounds") {
      section = Section::kBounds;
      continue;
    }
    if (key == "binary" || key == "binaries") {
      section = Section::kBinary;
      continue;
    }
    if (key == "end") {
      section = Section::kEnd;
      continue;
    }

    auto toks = tokens_of(line);
    switch (section) {
    case Section::kNone:
      throw ParseError("content before the objective section", line_no, 1);
    case Section::kObjective:
    case Section::kConstraints: {
      auto &list = section == Section::kObjective ? objective : constraints;
      std::size_t t = 0;
      if (toks[0].back() == ':') {
        list.push_back({line_no, toks[0].substr(0, toks[0].size() - 1), {}});
        t = 1;
      } else if (list.empty()) {
        throw ParseError("expected a 'name:' label", line_no, 1);
      }
      list.back().tokens.insert(list.back().tokens.end(), toks.begin() + static_cast<std::ptrdiff_t>(t), toks.end());
      break;
    }
    case Section::kBounds:
      if (toks.size() == 5 && toks[0] == "0" && toks[1] == "<=" && toks[3] == "<=" && toks[4] == "1") {
        m.bounded_reals.push_back(toks[2]);
      } else if (toks.size() == 3 && toks[0] == kDummy && toks[1] == "=" && toks[2] == "0") {
        saw_dummy_bound = true;
      } else {
        throw ParseError("unsupported bound '" + std::string(line) + "'", line_no, 1);
      }
      break;
    case Section::kBinary:
      m.binaries.insert(m.binaries.end(), toks.begin(), toks.end());
      break;
    case Section::kEnd:
      break;
    }
  }
  if (section != Section::kEnd) {
    throw ParseError("missing End", line_no, 1);
  }
  if (objective.size() > 1) {
    throw ParseError("more than one objective", objective[1].line, 1);
  }
  if (!objective.empty()) {
    m.objective = parse_statement(objective[0], false).terms;
  }
  if (saw_dummy_bound && m.objective.size() == 1 && m.objective[0].var == kDummy && m.objective[0].coef == 0) {
    m.objective.clear();
  }
  for (const Statement &st : constraints) {
    ParsedExpression e = parse_statement(st, true);
    m.constraints.push_back({st.label, std::move(e.terms), *e.relation, e.rhs});
  }
  try {
    m.validate();
  } catch (const std::invalid_argument &err) {
    throw ParseError(err.what(), line_no, 1);
  }
  return m;
}

} // namespace placer
