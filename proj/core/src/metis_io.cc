#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <sstream>

#include "placer/partitioner.h"

namespace placer {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    lines.push_back(line);
    start = end + 1;
  }
  // A trailing newline does not open another line.
  if (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  return lines;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
      ++i;
    }
    if (i > start) {
      tokens.push_back(line.substr(start, i - start));
    }
  }
  return tokens;
}

std::int64_t to_int(std::string_view token, std::size_t line, std::size_t column) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("expected an integer, got '" + std::string(token) + "'", line, column);
  }
  return value;
}

} // namespace

std::string export_graph(const PartGraph &g) {
  if (g.has_infinite_edges()) {
    throw std::invalid_argument("graph has infinite edges; encode them with a big-M weight first");
  }
  std::vector<std::vector<std::pair<std::size_t, Cost>>> adj(g.nodes.size());
  for (const PartEdge &e : g.edges) {
    adj[e.u].emplace_back(e.v, e.weight.value());
    adj[e.v].emplace_back(e.u, e.weight.value());
  }

  std::ostringstream out;
  out << g.nodes.size() << ' ' << g.edges.size() << " 011 " << g.ncon << '\n';
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    std::sort(adj[v].begin(), adj[v].end());
    bool first = true;
    for (const Cost w : g.nodes[v].weights) {
      out << (first ? "" : " ") << w;
      first = false;
    }
    for (const auto &[u, w] : adj[v]) {
      out << ' ' << (u + 1) << ' ' << w;
    }
    out << '\n';
  }
  return out.str();
}

PartGraph import_graph(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> lines; // (1-based line, content)
  {
    std::size_t number = 0;
    for (const std::string_view line : split_lines(text)) {
      ++number;
      if (!line.empty() && line.front() == '%') {
        continue;
      }
      lines.emplace_back(number, line);
    }
  }
  if (lines.empty()) {
    throw ParseError("missing header line", 1, 1);
  }

  const auto header = split_tokens(lines[0].second);
  const std::size_t header_line = lines[0].first;
  if (header.size() < 2 || header.size() > 4) {
    throw ParseError("header must be 'n m [fmt [ncon]]'", header_line, 1);
  }
  const std::int64_t n = to_int(header[0], header_line, 1);
  const std::int64_t m = to_int(header[1], header_line, 1);
  if (n < 0 || m < 0) {
    throw ParseError("negative node or edge count", header_line, 1);
  }
  bool has_vwgt = false;
  bool has_ewgt = false;
  if (header.size() >= 3) {
    std::string fmt(header[2]);
    if (fmt.size() > 3 || fmt.find_first_not_of("01") != std::string::npos) {
      throw ParseError("bad format field '" + fmt + "'", header_line, 1);
    }
    fmt.insert(0, 3 - fmt.size(), '0');
    if (fmt[0] == '1') {
      throw ParseError("vertex sizes are not supported", header_line, 1);
    }
    has_vwgt = fmt[1] == '1';
    has_ewgt = fmt[2] == '1';
  }
  std::size_t ncon = 1;
  if (header.size() == 4) {
    const std::int64_t value = to_int(header[3], header_line, 1);
    if (value < 1) {
      throw ParseError("ncon must be positive", header_line, 1);
    }
    ncon = static_cast<std::size_t>(value);
  }
  if (lines.size() - 1 != static_cast<std::size_t>(n)) {
    throw ParseError(
        "expected " + std::to_string(n) + " node lines, got " + std::to_string(lines.size() - 1),
        lines.back().first,
        1
    );
  }

  PartGraph g;
  g.ncon = ncon;
  g.nodes.resize(static_cast<std::size_t>(n));
  std::map<std::pair<std::size_t, std::size_t>, std::pair<Cost, int>> seen; // weight, directions
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto [line_no, line] = lines[v + 1];
    const auto tokens = split_tokens(line);
    std::size_t t = 0;
    PartNode &node = g.nodes[v];
    node.id = std::to_string(v + 1);
    node.weights.assign(ncon, 1);
    if (has_vwgt) {
      if (tokens.size() < ncon) {
        throw ParseError("missing node weights", line_no, 1);
      }
      for (std::size_t c = 0; c < ncon; ++c) {
        node.weights[c] = to_int(tokens[t++], line_no, 1);
        if (node.weights[c] < 0) {
          throw ParseError("negative node weight", line_no, 1);
        }
      }
    }
    const std::size_t stride = has_ewgt ? 2 : 1;
    if ((tokens.size() - t) % stride != 0) {
      throw ParseError("neighbor without an edge weight", line_no, 1);
    }
    for (; t < tokens.size(); t += stride) {
      const std::int64_t u = to_int(tokens[t], line_no, 1);
      if (u < 1 || u > n || static_cast<std::size_t>(u - 1) == v) {
        throw ParseError("bad neighbor " + std::to_string(u), line_no, 1);
      }
      const Cost w = has_ewgt ? to_int(tokens[t + 1], line_no, 1) : 1;
      if (w <= 0) {
        throw ParseError("edge weights must be positive", line_no, 1);
      }
      const auto a = std::min(v, static_cast<std::size_t>(u - 1));
      const auto b = std::max(v, static_cast<std::size_t>(u - 1));
      auto [it, inserted] = seen.try_emplace({a, b}, w, 0);
      if (!inserted && it->second.first != w) {
        throw ParseError("asymmetric edge weight between " + std::to_string(a + 1) + " and " +
                             std::to_string(b + 1),
                         line_no, 1);
      }
      ++it->second.second;
    }
  }
  for (const auto &[key, value] : seen) {
    if (value.second != 2) {
      throw ParseError(
          "edge " + std::to_string(key.first + 1) + "-" + std::to_string(key.second + 1) +
              " is not listed by both endpoints",
          header_line,
          1
      );
    }
    g.edges.push_back({key.first, key.second, ExtendedCost(value.first)});
  }
  if (g.edges.size() != static_cast<std::size_t>(m)) {
    throw ParseError(
        "header declares " + std::to_string(m) + " edges, found " + std::to_string(g.edges.size()),
        header_line,
        1
    );
  }
  return g;
}

std::string export_target_fractions(const PartGraph &g) {
  std::ostringstream out;
  out << std::setprecision(9);
  for (std::size_t c = 0; c < g.ncon; ++c) {
    Cost total = 0;
    for (const auto &cap : g.part_capacities) {
      total = checked_add(total, cap.at(c));
    }
    for (std::size_t p = 0; p < g.num_parts(); ++p) {
      const double fraction = total > 0 ? static_cast<double>(g.part_capacities[p][c]) / static_cast<double>(total)
                                        : 1.0 / static_cast<double>(g.num_parts());
      out << p;
      if (g.ncon > 1) {
        out << ':' << c;
      }
      out << " = " << fraction << '\n';
    }
  }
  return out.str();
}

PartitionAssignment import_partition(std::string_view text, const PartGraph &g) {
  const auto lines = split_lines(text);
  if (lines.size() != g.nodes.size()) {
    throw ParseError(
        "expected " + std::to_string(g.nodes.size()) + " lines, got " + std::to_string(lines.size()),
        lines.size(),
        1
    );
  }
  PartitionAssignment a(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tokens = split_tokens(lines[i]);
    if (tokens.size() != 1) {
      throw ParseError("expected one part index", i + 1, 1);
    }
    const std::int64_t p = to_int(tokens[0], i + 1, 1);
    if (p < 0 || static_cast<std::size_t>(p) >= g.num_parts()) {
      throw ParseError("part index " + std::to_string(p) + " out of range", i + 1, 1);
    }
    a[i] = static_cast<std::size_t>(p);
  }
  return a;
}

} // namespace placer
