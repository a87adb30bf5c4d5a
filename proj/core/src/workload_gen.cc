#include "placer/workload_gen.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace placer {

std::string_view to_string(GenShape shape) {
  return shape == GenShape::kRandom ? "random" : "tpcds";
}

GenShape parse_gen_shape(std::string_view text) {
  if (text == "random") {
    return GenShape::kRandom;
  }
  if (text == "tpcds") {
    return GenShape::kTpcDsLike;
  }
  throw std::invalid_argument("unknown workload shape '" + std::string(text) + "' (expected random or tpcds)");
}

void GenSpec::validate() const {
  if (shape == GenShape::kRandom && (n_tables == 0 || n_queries == 0)) {
    throw std::invalid_argument("n_tables and n_queries must be positive");
  }
  if (!(size_dist.stddev > 0.0) || !(refs_dist.stddev > 0.0)) {
    throw std::invalid_argument("standard deviations must be positive");
  }
  if (n_servers == 0) {
    throw std::invalid_argument("n_servers must be positive");
  }
  if (capacity && *capacity < 0) {
    throw std::invalid_argument("capacity must be nonnegative");
  }
}

double GenRng::uniform() {
  return static_cast<double>(_engine() >> 11) * 0x1.0p-53;
}

double GenRng::normal(const NormalDist &d) {
  if (_spare) {
    const double z = *_spare;
    _spare.reset();
    return d.mean + d.stddev * z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  _spare = radius * std::sin(angle);
  return d.mean + d.stddev * radius * std::cos(angle);
}

Cost GenRng::floor_truncated(const NormalDist &d) {
  double x = normal(d);
  while (x < 1.0) {
    x = normal(d);
  }
  return static_cast<Cost>(std::floor(x));
}

std::size_t GenRng::below(std::size_t n) {
  return static_cast<std::size_t>(_engine() % n);
}

Cost GenRng::between(Cost lo, Cost hi) {
  return lo + static_cast<Cost>(below(static_cast<std::size_t>(hi - lo + 1)));
}

namespace {

void finish_servers(Workload &w, const GenSpec &spec) {
  Cost largest = 0;
  for (const Table &t : w.tables) {
    largest = std::max(largest, t.size);
  }
  const Cost total = w.total_table_size();
  const auto l = static_cast<Cost>(spec.n_servers);
  const Cost capacity = spec.capacity.value_or(std::max(largest, (105 * total + 100 * l - 1) / (100 * l)));
  for (std::size_t k = 0; k < spec.n_servers; ++k) {
    w.servers.push_back({"s" + std::to_string(k + 1), capacity, std::nullopt});
  }
}

Query make_query(std::string id, const std::vector<std::size_t> &tables, const Workload &w) {
  Query q;
  q.id = std::move(id);
  for (const std::size_t j : tables) {
    q.refs.push_back({j, w.tables[j].size});
  }
  std::sort(q.refs.begin(), q.refs.end(), [](const QueryRef &a, const QueryRef &b) { return a.table < b.table; });
  q.exec_cost = q.total_ref_cost();
  return q;
}

Workload generate_random(const GenSpec &spec) {
  GenRng rng(spec.seed);
  Workload w;
  for (std::size_t j = 0; j < spec.n_tables; ++j) {
    w.tables.push_back({"t" + std::to_string(j + 1), rng.floor_truncated(spec.size_dist)});
  }
  // Partial Fisher-Yates on a persistent pool draws without replacement.
  std::vector<std::size_t> pool(spec.n_tables);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < spec.n_queries; ++i) {
    const auto refs = std::min<std::size_t>(static_cast<std::size_t>(rng.floor_truncated(spec.refs_dist)), spec.n_tables);
    for (std::size_t t = 0; t < refs; ++t) {
      std::swap(pool[t], pool[t + rng.below(spec.n_tables - t)]);
    }
    w.queries.push_back(make_query("q" + std::to_string(i + 1), {pool.begin(), pool.begin() + refs}, w));
  }
  finish_servers(w, spec);
  return w;
}

constexpr std::size_t kFacts = 7;
constexpr std::size_t kDimensions = 17;
constexpr std::size_t kDssQueries = 99;
constexpr std::size_t kMaxRefs = 13;

Workload generate_tpcds(const GenSpec &spec) {
  GenRng rng(spec.seed);
  Workload w;
  for (std::size_t j = 0; j < kFacts; ++j) {
    w.tables.push_back({"fact" + std::to_string(j + 1), rng.between(50, 100)});
  }
  for (std::size_t j = 0; j < kDimensions; ++j) {
    w.tables.push_back({"dim" + std::to_string(j + 1), rng.between(1, 10)});
  }
  const std::size_t n = w.tables.size();

  const NormalDist extra_dist{3.5, 2.5};
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < kDssQueries; ++i) {
    std::size_t refs = 0;
    if (i == 0) {
      refs = 1;
    } else if (i == 1) {
      refs = kMaxRefs;
    } else {
      const double extra = std::clamp(std::floor(rng.normal(extra_dist)), 0.0, static_cast<double>(kMaxRefs - 1));
      refs = 1 + static_cast<std::size_t>(extra);
    }
    // One fact table, then the rest drawn from all remaining tables.
    std::iota(pool.begin(), pool.end(), 0);
    std::swap(pool[0], pool[rng.below(kFacts)]);
    for (std::size_t t = 1; t < refs; ++t) {
      std::swap(pool[t], pool[t + rng.below(n - t)]);
    }
    w.queries.push_back(make_query("q" + std::to_string(i + 1), {pool.begin(), pool.begin() + refs}, w));
  }
  finish_servers(w, spec);
  return w;
}

} // namespace

Workload generate(const GenSpec &spec) {
  spec.validate();
  Workload w = spec.shape == GenShape::kRandom ? generate_random(spec) : generate_tpcds(spec);
  validate(w);
  return w;
}

} // namespace placer
