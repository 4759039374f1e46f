#pragma once

// Trace loading and arrival synthesis.
//
// Traffic CSV: no header, T lines of P comma-separated nonnegative decimals
//   (row = 5-minute slot, column = source-destination pair).
// Routing CSV: no header, P lines of L comma-separated 0/1 tokens
//   (row = the link set of one pair).
// Instance CSV: optional '#' comment lines (one of them "# link_count=L"),
//   then the header index,variant,a_or_s,k,budget,links with links a
//   semicolon-joined index list.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "onum/core.hpp"
#include "onum/csv.hpp"
#include "onum/random.hpp"

namespace onum {

inline constexpr std::size_t kSlotsPerEpisode = 288;
inline constexpr std::size_t kAbileneNodes = 11;
inline constexpr std::size_t kAbileneLinks = 41;
inline constexpr std::size_t kAbilenePairs = 110;
inline constexpr std::size_t kAbileneSlots = 2016;

struct TrafficMatrix {
  std::size_t slots = 0;
  std::size_t pairs = 0;
  std::vector<double> values;  // row-major, slots x pairs

  double at(std::size_t slot, std::size_t pair) const { return values[slot * pairs + pair]; }
  double& at(std::size_t slot, std::size_t pair) { return values[slot * pairs + pair]; }
  friend bool operator==(const TrafficMatrix&, const TrafficMatrix&) = default;
};

struct RoutingMatrix {
  std::size_t pairs = 0;
  std::size_t links = 0;
  std::vector<std::uint8_t> entries;  // row-major, pairs x links

  bool at(std::size_t pair, std::size_t link) const { return entries[pair * links + link] != 0; }

  std::vector<std::size_t> route(std::size_t pair) const {
    std::vector<std::size_t> out;
    for (std::size_t link = 0; link < links; ++link) {
      if (at(pair, link)) out.push_back(link);
    }
    return out;
  }
  friend bool operator==(const RoutingMatrix&, const RoutingMatrix&) = default;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Empty, RowLength, BadNumber, Negative, NonBinary, EmptyRoute };

  ParseError(Kind kind, std::size_t row, std::size_t column, const std::string& what)
      : std::runtime_error(what), kind_(kind), row_(row), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }        // 1-based line
  std::size_t column() const noexcept { return column_; }  // 1-based field, 0 = whole row

 private:
  Kind kind_;
  std::size_t row_;
  std::size_t column_;
};

namespace detail {

inline std::string location(std::size_t row, std::size_t column) {
  return "row " + std::to_string(row) + ", column " + std::to_string(column);
}

// Drops trailing blank lines only; blank lines inside are malformed rows.
inline std::vector<std::string_view> data_lines(std::string_view text) {
  auto rows = csv::lines(text);
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  return rows;
}

}  // namespace detail

inline TrafficMatrix parse_traffic(std::string_view text) {
  const auto rows = detail::data_lines(text);
  if (rows.empty()) throw ParseError(ParseError::Kind::Empty, 0, 0, "traffic file is empty");
  TrafficMatrix out;
  out.slots = rows.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto fields = csv::split(rows[r]);
    if (r == 0) out.pairs = fields.size();
    if (fields.size() != out.pairs) {
      throw ParseError(ParseError::Kind::RowLength, r + 1, 0,
                       "traffic row " + std::to_string(r + 1) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(out.pairs));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = csv::parse_double(fields[c]);
      if (!value || !std::isfinite(*value)) {
        throw ParseError(ParseError::Kind::BadNumber, r + 1, c + 1,
                         "bad traffic value at " + detail::location(r + 1, c + 1));
      }
      if (*value < 0.0) {
        throw ParseError(ParseError::Kind::Negative, r + 1, c + 1,
                         "negative traffic at " + detail::location(r + 1, c + 1));
      }
      out.values.push_back(*value);
    }
  }
  return out;
}

inline RoutingMatrix parse_routing(std::string_view text) {
  const auto rows = detail::data_lines(text);
  if (rows.empty()) throw ParseError(ParseError::Kind::Empty, 0, 0, "routing file is empty");
  RoutingMatrix out;
  out.pairs = rows.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto fields = csv::split(rows[r]);
    if (r == 0) out.links = fields.size();
    if (fields.size() != out.links) {
      throw ParseError(ParseError::Kind::RowLength, r + 1, 0,
                       "routing row " + std::to_string(r + 1) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(out.links));
    }
    bool any = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      std::string_view token = fields[c];
      while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
      while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
      if (token != "0" && token != "1") {
        throw ParseError(ParseError::Kind::NonBinary, r + 1, c + 1,
                         "non-binary routing entry at " + detail::location(r + 1, c + 1));
      }
      const bool on = token == "1";
      any = any || on;
      out.entries.push_back(on ? 1 : 0);
    }
    if (!any) {
      throw ParseError(ParseError::Kind::EmptyRoute, r + 1, 0,
                       "empty route, row " + std::to_string(r + 1));
    }
  }
  return out;
}

inline TrafficMatrix load_traffic(const std::string& path) {
  return parse_traffic(csv::read_file(path));
}

inline RoutingMatrix load_routing(const std::string& path) {
  return parse_routing(csv::read_file(path));
}

inline std::string traffic_csv(const TrafficMatrix& traffic) {
  std::string out;
  for (std::size_t t = 0; t < traffic.slots; ++t) {
    for (std::size_t j = 0; j < traffic.pairs; ++j) {
      if (j) out.push_back(',');
      out += csv::format(traffic.at(t, j));
    }
    out.push_back('\n');
  }
  return out;
}

inline std::string routing_csv(const RoutingMatrix& routing) {
  std::string out;
  out.reserve(routing.pairs * routing.links * 2);
  for (std::size_t j = 0; j < routing.pairs; ++j) {
    for (std::size_t l = 0; l < routing.links; ++l) {
      if (l) out.push_back(',');
      out.push_back(routing.at(j, l) ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

inline void save_traffic(const std::string& path, const TrafficMatrix& traffic) {
  csv::write_file(path, traffic_csv(traffic));
}

inline void save_routing(const std::string& path, const RoutingMatrix& routing) {
  csv::write_file(path, routing_csv(routing));
}

/// Gaussian(mu, sigma) conditioned on [lb, ub]. Rejection sampling while
/// the window holds at least 1% of the mass, inverse CDF otherwise (taken
/// on the tail side of the mean to keep precision). sigma = 0 clamps mu.
inline double truncated_gaussian(double mu, double sigma, double lb, double ub, Rng& rng) {
  if (lb > ub) throw std::domain_error("truncated gaussian needs lb <= ub");
  if (!(sigma >= 0.0)) throw std::domain_error("truncated gaussian needs sigma >= 0");
  if (sigma == 0.0 || lb == ub) return std::clamp(mu, lb, ub);

  const boost::math::normal standard(0.0, 1.0);
  const double a = (lb - mu) / sigma;
  const double b = (ub - mu) / sigma;
  // Mass measured on whichever side avoids cancellation.
  const bool upper_tail = a > 0.0;
  const bool lower_tail = b < 0.0;
  auto survival = [&](double z) {
    return std::isinf(z) ? (z > 0 ? 0.0 : 1.0) : boost::math::cdf(boost::math::complement(standard, z));
  };
  auto cdf = [&](double z) {
    return std::isinf(z) ? (z > 0 ? 1.0 : 0.0) : boost::math::cdf(standard, z);
  };
  double mass = 0.0;
  if (upper_tail) {
    mass = survival(a) - survival(b);
  } else {
    mass = cdf(b) - cdf(a);
  }

  if (mass >= 0.01) {
    std::normal_distribution<double> normal(mu, sigma);
    while (true) {
      const double x = normal(rng);
      if (x >= lb && x <= ub) return x;
    }
  }

  const double u = uniform01(rng);
  double z = 0.0;
  if (upper_tail) {
    const double qa = survival(a);
    const double qb = survival(b);
    const double q = qb + u * (qa - qb);
    if (!(q > 0.0)) return lb;
    z = boost::math::quantile(boost::math::complement(standard, std::min(q, 1.0)));
  } else if (lower_tail) {
    const double pa = cdf(a);
    const double pb = cdf(b);
    const double p = pa + u * (pb - pa);
    if (!(p > 0.0)) return ub;
    z = boost::math::quantile(standard, std::min(p, 1.0));
  } else {
    const double p = cdf(a) + u * mass;
    z = boost::math::quantile(standard, std::clamp(p, std::numeric_limits<double>::min(),
                                                   1.0 - std::numeric_limits<double>::epsilon()));
  }
  return std::clamp(mu + sigma * z, lb, ub);
}

/// Distribution of the Log-utility coefficients a_i. Fixed draws every a_i
/// around mu; Drift moves the mean linearly from mu to mu_end over the
/// arrival index. Budgets are always Uniform(0, 1).
struct UtilityDistSpec {
  enum class Mode { Fixed, Drift };
  Mode mode = Mode::Fixed;
  double mu = 1.0;
  double mu_end = 1.0;
  double sigma = 0.0;
  double lb = 0.0;
  double ub = std::numeric_limits<double>::infinity();

  static UtilityDistSpec fixed(double mu, double sigma, double lb, double ub) {
    return {Mode::Fixed, mu, mu, sigma, lb, ub};
  }
  static UtilityDistSpec drift(double mu_start, double mu_end, double sigma, double lb, double ub) {
    return {Mode::Drift, mu_start, mu_end, sigma, lb, ub};
  }

  double mean_at(std::size_t index, std::size_t count) const {
    if (mode == Mode::Fixed || count < 2) return mu;
    const double frac = static_cast<double>(index) / static_cast<double>(count - 1);
    return mu + (mu_end - mu) * frac;
  }

  void validate() const {
    if (!(lb <= ub)) throw std::domain_error("utility distribution needs LB <= UB");
    if (!(sigma >= 0.0)) throw std::domain_error("utility distribution needs sigma >= 0");
  }
};

/// Coefficient bounds [m (1 + b_max), M] under which every Log arrival with
/// k = |L_i| and budget <= b_max has per-link marginals inside [m, M].
inline std::pair<double, double> default_coefficient_bounds(double m, double M,
                                                            double max_budget = 1.0) {
  return {m * (1.0 + max_budget), M};
}

inline void require_compatible(const TrafficMatrix& traffic, const RoutingMatrix& routing) {
  if (traffic.pairs != routing.pairs) {
    throw std::invalid_argument("traffic has " + std::to_string(traffic.pairs) +
                                " pairs but routing has " + std::to_string(routing.pairs));
  }
}

/// Arrivals for slots [slot_begin, slot_end). In each slot, pair j emits
/// Poisson(rate_scale * share_j) arrivals where share_j is its fraction of
/// the slot's traffic; arrivals within a slot are shuffled; each arrival
/// requests its pair's route with a Log utility (k = |route|) and a
/// Uniform(0,1) budget.
inline Instance synthesize_instance(const TrafficMatrix& traffic, const RoutingMatrix& routing,
                                    std::size_t slot_begin, std::size_t slot_end,
                                    double rate_scale, const UtilityDistSpec& spec,
                                    std::uint64_t seed) {
  require_compatible(traffic, routing);
  spec.validate();
  if (!(rate_scale > 0.0)) throw std::invalid_argument("rate_scale must be positive");
  if (slot_begin > slot_end || slot_end > traffic.slots) {
    throw std::invalid_argument("slot range outside the traffic matrix");
  }
  Rng counts = make_stream(seed, "arrival-counts");
  Rng order = make_stream(seed, "arrival-order");
  Rng utility = make_stream(seed, "utility");
  Rng budget = make_stream(seed, "budget");

  std::vector<std::vector<std::size_t>> routes(routing.pairs);
  for (std::size_t j = 0; j < routing.pairs; ++j) routes[j] = routing.route(j);

  std::vector<std::size_t> sequence;
  std::vector<std::size_t> slot_pairs;
  for (std::size_t t = slot_begin; t < slot_end; ++t) {
    double total = 0.0;
    for (std::size_t j = 0; j < traffic.pairs; ++j) total += traffic.at(t, j);
    if (!(total > 0.0)) continue;
    slot_pairs.clear();
    for (std::size_t j = 0; j < traffic.pairs; ++j) {
      const double rate = rate_scale * traffic.at(t, j) / total;
      if (!(rate > 0.0)) continue;
      std::poisson_distribution<long> poisson(rate);
      const long count = poisson(counts);
      slot_pairs.insert(slot_pairs.end(), static_cast<std::size_t>(count), j);
    }
    std::shuffle(slot_pairs.begin(), slot_pairs.end(), order);
    sequence.insert(sequence.end(), slot_pairs.begin(), slot_pairs.end());
  }

  std::vector<Arrival> arrivals;
  arrivals.reserve(sequence.size());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto& route = routes[sequence[i]];
    const double a =
        truncated_gaussian(spec.mean_at(i, sequence.size()), spec.sigma, spec.lb, spec.ub, utility);
    const double b = uniform01(budget);
    arrivals.push_back(
        {UtilityFunction::log(a, static_cast<double>(route.size())), route, b});
  }
  return Instance(Network(routing.links), std::move(arrivals));
}

/// Abilene-shaped stand-in: 11 nodes, 41 directed links (a bidirectional
/// ring plus 19 random chords), shortest-path routes under random link
/// weights for all 110 ordered pairs, and 2016 slots of diurnal lognormal
/// traffic.
inline std::pair<TrafficMatrix, RoutingMatrix> generate_synthetic_abilene(std::uint64_t seed) {
  constexpr std::size_t n = kAbileneNodes;
  Rng topology = make_stream(seed, "topology");

  struct Edge {
    std::size_t from, to;
    double weight;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  auto add = [&](std::size_t u, std::size_t v) {
    edges.push_back({u, v, 1.0 + 9.0 * uniform01(topology)});
    present[u][v] = true;
  };
  for (std::size_t u = 0; u < n; ++u) {
    add(u, (u + 1) % n);
    add((u + 1) % n, u);
  }
  while (edges.size() < kAbileneLinks) {
    const auto u = static_cast<std::size_t>(topology() % n);
    const auto v = static_cast<std::size_t>(topology() % n);
    if (u != v && !present[u][v]) add(u, v);
  }

  std::vector<std::vector<std::size_t>> out_edges(n);
  for (std::size_t e = 0; e < edges.size(); ++e) out_edges[edges[e].from].push_back(e);

  RoutingMatrix routing;
  routing.pairs = kAbilenePairs;
  routing.links = kAbileneLinks;
  routing.entries.assign(kAbilenePairs * kAbileneLinks, 0);
  std::size_t pair = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> via(n, edges.size());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
    dist[s] = 0.0;
    frontier.push({0.0, s});
    while (!frontier.empty()) {
      const auto [d, u] = frontier.top();
      frontier.pop();
      if (d > dist[u]) continue;
      for (std::size_t e : out_edges[u]) {
        const std::size_t v = edges[e].to;
        const double candidate = d + edges[e].weight;
        if (candidate < dist[v]) {
          dist[v] = candidate;
          via[v] = e;
          frontier.push({candidate, v});
        }
      }
    }
    for (std::size_t d = 0; d < n; ++d) {
      if (d == s) continue;
      for (std::size_t v = d; v != s; v = edges[via[v]].from) {
        routing.entries[pair * kAbileneLinks + via[v]] = 1;
      }
      ++pair;
    }
  }

  Rng volume = make_stream(seed, "traffic");
  std::normal_distribution<double> standard(0.0, 1.0);
  std::vector<double> base(kAbilenePairs), phase(kAbilenePairs);
  for (std::size_t j = 0; j < kAbilenePairs; ++j) {
    base[j] = std::exp(standard(volume));
    phase[j] = 0.6 * (uniform01(volume) - 0.5);
  }
  TrafficMatrix traffic;
  traffic.slots = kAbileneSlots;
  traffic.pairs = kAbilenePairs;
  traffic.values.resize(kAbileneSlots * kAbilenePairs);
  for (std::size_t t = 0; t < kAbileneSlots; ++t) {
    const double day_angle = 2.0 * std::numbers::pi * static_cast<double>(t % kSlotsPerEpisode) /
                             static_cast<double>(kSlotsPerEpisode);
    for (std::size_t j = 0; j < kAbilenePairs; ++j) {
      const double diurnal = 1.0 + 0.6 * std::sin(day_angle + phase[j]);
      traffic.at(t, j) = base[j] * diurnal * std::exp(0.25 * standard(volume));
    }
  }
  return {std::move(traffic), std::move(routing)};
}

/// One Instance per consecutive 288-slot block (a trailing partial block is
/// dropped). With `count` > 0 the blocks are cycled to produce exactly
/// `count` episodes, each from its own seed stream.
inline std::vector<Instance> make_episodes(const TrafficMatrix& traffic,
                                           const RoutingMatrix& routing, double rate_scale,
                                           const UtilityDistSpec& spec, std::uint64_t seed,
                                           std::size_t count = 0) {
  if (traffic.slots < kSlotsPerEpisode) {
    throw std::domain_error("episodes need at least 288 traffic rows");
  }
  const std::size_t blocks = traffic.slots / kSlotsPerEpisode;
  if (count == 0) count = blocks;
  std::vector<Instance> episodes;
  episodes.reserve(count);
  for (std::size_t e = 0; e < count; ++e) {
    const std::size_t block = e % blocks;
    episodes.push_back(synthesize_instance(traffic, routing, block * kSlotsPerEpisode,
                                           (block + 1) * kSlotsPerEpisode, rate_scale, spec,
                                           stream_seed(seed, "episode", e)));
  }
  return episodes;
}

inline std::string instance_csv(const Instance& instance) {
  std::string out = "# link_count=" + std::to_string(instance.network().link_count()) + '\n';
  out += "index,variant,a_or_s,k,budget,links\n";
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Arrival& a = instance[i];
    const bool log = a.utility.kind() == UtilityKind::Log;
    out += std::to_string(i);
    out += log ? ",log," : ",linear,";
    out += csv::format(a.utility.coefficient());
    out += ',';
    if (log) out += csv::format(a.utility.scale());
    out += ',';
    out += csv::format(a.budget);
    out += ',';
    out += csv::join(a.links, ';');
    out += '\n';
  }
  return out;
}

/// Parses an instance CSV. Without a link_count comment the network size is
/// one past the largest link index.
inline Instance parse_instance(std::string_view text) {
  const auto rows = detail::data_lines(text);
  std::size_t link_count = 0;
  bool header_seen = false;
  std::vector<Arrival> arrivals;
  std::size_t max_link = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string_view line = rows[r];
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "link_count=";
      const auto pos = line.find(key);
      if (pos != std::string_view::npos) {
        const auto value = csv::parse_uint(line.substr(pos + key.size()));
        if (!value) throw ParseError(ParseError::Kind::BadNumber, r + 1, 0, "bad link_count");
        link_count = static_cast<std::size_t>(*value);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line != "index,variant,a_or_s,k,budget,links") {
        throw ParseError(ParseError::Kind::RowLength, r + 1, 0, "unexpected instance header");
      }
      continue;
    }
    const auto fields = csv::split(line);
    if (fields.size() != 6) {
      throw ParseError(ParseError::Kind::RowLength, r + 1, 0,
                       "instance row " + std::to_string(r + 1) + " needs 6 fields");
    }
    auto number = [&](std::size_t c) {
      const auto v = csv::parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(ParseError::Kind::BadNumber, r + 1, c + 1,
                         "bad number at " + detail::location(r + 1, c + 1));
      }
      return *v;
    };
    Arrival arrival;
    if (fields[1] == "log") {
      arrival.utility = UtilityFunction::log(number(2), number(3));
    } else if (fields[1] == "linear") {
      arrival.utility = UtilityFunction::linear(number(2));
    } else {
      throw ParseError(ParseError::Kind::BadNumber, r + 1, 2,
                       "unknown utility variant at " + detail::location(r + 1, 2));
    }
    arrival.budget = number(4);
    for (std::string_view token : csv::split(fields[5], ';')) {
      const auto link = csv::parse_uint(token);
      if (!link) {
        throw ParseError(ParseError::Kind::BadNumber, r + 1, 6,
                         "bad link index at " + detail::location(r + 1, 6));
      }
      arrival.links.push_back(static_cast<std::size_t>(*link));
      max_link = std::max(max_link, static_cast<std::size_t>(*link));
    }
    arrivals.push_back(std::move(arrival));
  }
  if (link_count == 0) {
    if (arrivals.empty()) throw ParseError(ParseError::Kind::Empty, 0, 0, "instance has no links");
    link_count = max_link + 1;
  }
  return Instance(Network(link_count), std::move(arrivals));
}

inline Instance load_instance(const std::string& path) {
  return parse_instance(csv::read_file(path));
}

inline void save_instance(const std::string& path, const Instance& instance) {
  csv::write_file(path, instance_csv(instance));
}

}  // namespace onum
