#pragma once

// Experiment commands behind the CLI: single runs, parameter sweeps, the
// adaptive tuner, the worst-case table and the invariant self-check. Each
// command writes CSVs into the output directory and returns a process exit
// code (0 ok, 1 property failure, 2 config error, 3 IO error).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "onum/adversary.hpp"
#include "onum/allocator.hpp"
#include "onum/baselines.hpp"
#include "onum/core.hpp"
#include "onum/csv.hpp"
#include "onum/ingest.hpp"
#include "onum/learner.hpp"
#include "onum/oracle.hpp"
#include "onum/random.hpp"

namespace onum {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitIo = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  // Network source: both trace paths, or a synthetic network (seed defaults
  // to the master seed).
  std::string trace_traffic;
  std::string trace_routing;
  std::optional<std::uint64_t> synthetic;
  std::string instance;  // run only: replay a saved instance

  double m = 1.0;
  double M = 10.0;
  std::string algorithm = "oa";  // oa | greedy | reservation
  double reserve = 0.5;
  double threshold = 0.5;

  // NaN bounds pick the defaults: [LB, UB] for the mean, [0.1, 3] for the
  // variance.
  std::string axis = "mean";  // mean | variance
  double axis_min = std::numeric_limits<double>::quiet_NaN();
  double axis_max = std::numeric_limits<double>::quiet_NaN();
  std::size_t axis_points = 5;
  double mean = std::numeric_limits<double>::quiet_NaN();  // NaN: (m + M) / 2
  double variance = 1.0;
  std::string drift = "none";  // none | increasing | decreasing

  std::size_t replications = 20;
  double rate_scale = 1.0;
  std::size_t slot_begin = 0;
  std::size_t slot_end = kSlotsPerEpisode;

  std::size_t episodes = kDefaultEpisodes;
  std::size_t training_episodes = 7;
  double eta = kDefaultEta;
  int grid_steps = kDefaultGridSteps;
  bool adapt_reservation = true;

  std::vector<std::size_t> links{2, 3, 4, 5};
  std::size_t t = 5000;
  double eps = 0.0;  // 0: 1/t

  bool inject_half_alpha = false;
  unsigned threads = 0;

  double effective_mean() const { return std::isnan(mean) ? (m + M) / 2.0 : mean; }
  std::pair<double, double> coefficient_bounds() const { return default_coefficient_bounds(m, M); }

  /// Every field that affects output, one key=value per line. The output
  /// directory and thread count are left out: neither changes results.
  std::string canonical() const {
    std::ostringstream out;
    auto put = [&](const char* key, const auto& value) { out << key << '=' << value << '\n'; };
    auto num = [&](const char* key, double value) { put(key, csv::format(value)); };
    put("seed", seed);
    put("trace_traffic", trace_traffic);
    put("trace_routing", trace_routing);
    put("synthetic", synthetic ? std::to_string(*synthetic) : std::string("-"));
    put("instance", instance);
    num("m", m);
    num("M", M);
    put("algorithm", algorithm);
    num("reserve", reserve);
    num("threshold", threshold);
    put("axis", axis);
    num("axis_min", axis_min);
    num("axis_max", axis_max);
    put("axis_points", axis_points);
    num("mean", mean);
    num("variance", variance);
    put("drift", drift);
    put("replications", replications);
    num("rate_scale", rate_scale);
    put("slot_begin", slot_begin);
    put("slot_end", slot_end);
    put("episodes", episodes);
    put("training_episodes", training_episodes);
    num("eta", eta);
    put("grid_steps", grid_steps);
    put("adapt_reservation", adapt_reservation);
    put("links", csv::join(links, ';'));
    put("t", t);
    num("eps", eps);
    put("inject_half_alpha", inject_half_alpha);
    return out.str();
  }

  std::uint64_t hash() const { return fnv1a(canonical()); }
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

inline void validate_common(const ExperimentConfig& cfg) {
  require(cfg.m > 0.0 && std::isfinite(cfg.m), "m must be positive");
  require(cfg.M > cfg.m && std::isfinite(cfg.M), "M must exceed m");
}

inline void validate_synthesis(const ExperimentConfig& cfg) {
  validate_common(cfg);
  const auto [lb, ub] = cfg.coefficient_bounds();
  require(lb <= ub, "M must be at least 2m so coefficient bounds [2m, M] are nonempty");
  require(cfg.rate_scale > 0.0 && std::isfinite(cfg.rate_scale), "rate_scale must be positive");
  require(cfg.variance >= 0.0, "variance must be nonnegative");
  require(cfg.drift == "none" || cfg.drift == "increasing" || cfg.drift == "decreasing",
          "drift must be none, increasing or decreasing");
  require(cfg.trace_traffic.empty() == cfg.trace_routing.empty(),
          "--trace-traffic and --trace-routing go together");
  require(!(cfg.synthetic && !cfg.trace_traffic.empty()),
          "choose either trace files or --synthetic, not both");
}

inline void validate_reservation(const ExperimentConfig& cfg) {
  require(cfg.reserve >= 0.0 && cfg.reserve <= 1.0, "reserve must lie in [0, 1]");
  require(cfg.threshold >= 0.0 && cfg.threshold <= 1.0, "threshold must lie in [0, 1]");
}

inline std::string header_comment(const ExperimentConfig& cfg, std::string_view command) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  return "# onum " + std::string(command) + " config_hash=" + hex +
         " seed=" + std::to_string(cfg.seed) + '\n';
}

inline std::string output_path(const ExperimentConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw csv::IoError("cannot create output directory " + cfg.out_dir + ": " + ec.message());
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline void write_csv(const ExperimentConfig& cfg, std::string_view command,
                      const std::string& name, const std::string& body) {
  csv::write_file(output_path(cfg, name), header_comment(cfg, command) + body);
}

inline std::pair<TrafficMatrix, RoutingMatrix> load_network(const ExperimentConfig& cfg) {
  if (!cfg.trace_traffic.empty()) {
    auto traffic = load_traffic(cfg.trace_traffic);
    auto routing = load_routing(cfg.trace_routing);
    try {
      require_compatible(traffic, routing);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return {std::move(traffic), std::move(routing)};
  }
  return generate_synthetic_abilene(cfg.synthetic.value_or(cfg.seed));
}

/// Drift moves the coefficient mean between m and M; draws are still
/// truncated to [LB, UB].
inline UtilityDistSpec utility_spec(const ExperimentConfig& cfg, double mean, double variance) {
  const auto [lb, ub] = cfg.coefficient_bounds();
  const double sigma = std::sqrt(variance);
  if (cfg.drift == "increasing") return UtilityDistSpec::drift(cfg.m, cfg.M, sigma, lb, ub);
  if (cfg.drift == "decreasing") return UtilityDistSpec::drift(cfg.M, cfg.m, sigma, lb, ub);
  return UtilityDistSpec::fixed(mean, sigma, lb, ub);
}

inline RunResult run_algorithm(const std::string& algorithm, const Instance& instance,
                               const ExperimentConfig& cfg) {
  if (algorithm == "oa") return run_online(instance, make_value_function(cfg.m, cfg.M));
  if (algorithm == "greedy") return run_greedy(instance);
  if (algorithm == "reservation") {
    return run_reservation(instance, {cfg.reserve, cfg.threshold, cfg.M});
  }
  throw ConfigError("unknown algorithm '" + algorithm + "' (expected oa, greedy or reservation)");
}

/// Runs fn(k) for k in [0, n) on up to `threads` workers; each k writes its
/// own slot, so results do not depend on scheduling.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n; k += threads) fn(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

inline std::vector<double> axis_values(const ExperimentConfig& cfg) {
  const auto [lb, ub] = cfg.coefficient_bounds();
  double lo = cfg.axis_min;
  double hi = cfg.axis_max;
  if (cfg.axis == "mean") {
    require(cfg.drift == "none", "a mean sweep needs drift = none (drift fixes the mean path)");
    if (std::isnan(lo)) lo = lb;
    if (std::isnan(hi)) hi = ub;
  } else if (cfg.axis == "variance") {
    if (std::isnan(lo)) lo = 0.1;
    if (std::isnan(hi)) hi = 3.0;
    require(lo >= 0.0, "variance axis must be nonnegative");
  } else {
    throw ConfigError("axis must be mean or variance");
  }
  require(lo <= hi, "axis range is empty");
  require(cfg.axis_points >= 1, "axis_points must be at least 1");
  if (cfg.axis_points == 1) return {lo};
  std::vector<double> out(cfg.axis_points);
  for (std::size_t j = 0; j < cfg.axis_points; ++j) {
    out[j] = j + 1 == cfg.axis_points
                 ? hi
                 : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(cfg.axis_points - 1);
  }
  return out;
}

inline Instance random_bounded_instance(Rng& rng, std::size_t links, std::size_t arrivals,
                                        double m, double M) {
  std::vector<Arrival> list;
  for (std::size_t i = 0; i < arrivals; ++i) {
    Arrival a;
    while (a.links.empty()) {
      for (std::size_t l = 0; l < links; ++l) {
        if (uniform01(rng) < 0.5) a.links.push_back(l);
      }
    }
    const double k = static_cast<double>(a.links.size());
    a.budget = uniform01(rng);
    if (uniform01(rng) < 0.2) {
      a.utility = UtilityFunction::linear(k * (m + (M - m) * uniform01(rng)));
    } else {
      const double lo = m * (1.0 + a.budget);
      a.utility = UtilityFunction::log(lo + (M - lo) * uniform01(rng), k);
    }
    list.push_back(std::move(a));
  }
  return Instance(Network(links), std::move(list));
}

}  // namespace detail

inline int cmd_run(const ExperimentConfig& cfg, std::ostream& out) {
  detail::validate_common(cfg);
  detail::validate_reservation(cfg);
  Instance instance(Network(1));
  if (!cfg.instance.empty()) {
    instance = load_instance(cfg.instance);
  } else {
    detail::validate_synthesis(cfg);
    const auto [traffic, routing] = detail::load_network(cfg);
    detail::require(cfg.slot_begin <= cfg.slot_end && cfg.slot_end <= traffic.slots,
                    "slot range exceeds the traffic matrix");
    instance = synthesize_instance(traffic, routing, cfg.slot_begin, cfg.slot_end, cfg.rate_scale,
                                   detail::utility_spec(cfg, cfg.effective_mean(), cfg.variance),
                                   stream_seed(cfg.seed, "instance"));
  }
  const RunResult result = detail::run_algorithm(cfg.algorithm, instance, cfg);
  detail::write_csv(cfg, "run", "decisions.csv", decision_log_csv(instance, result));
  const std::string summary = cfg.algorithm + ',' + std::to_string(instance.size()) + ',' +
                              csv::format(result.total_utility) + ',' +
                              csv::join(result.final_state.omega, ';');
  detail::write_csv(cfg, "run", "summary.csv",
                    "algorithm,arrivals,total_utility,final_utilization\n" + summary + '\n');
  out << "algorithm=" << cfg.algorithm << " arrivals=" << instance.size()
      << " total_utility=" << csv::format(result.total_utility) << '\n';
  return kExitOk;
}

inline const std::vector<std::string>& compared_algorithms() {
  static const std::vector<std::string> names{"oa", "greedy", "reservation"};
  return names;
}

inline int cmd_compare(const ExperimentConfig& cfg, std::ostream& out) {
  detail::validate_synthesis(cfg);
  detail::validate_reservation(cfg);
  detail::require(cfg.replications >= 1, "replications must be at least 1");
  const auto values = detail::axis_values(cfg);
  const auto [traffic, routing] = detail::load_network(cfg);
  detail::require(cfg.slot_begin <= cfg.slot_end && cfg.slot_end <= traffic.slots,
                  "slot range exceeds the traffic matrix");
  const auto& algorithms = compared_algorithms();

  // utilities[(point * R + rep) * A + alg]; instance seeds depend only on the
  // replication, so every axis point and algorithm sees the same arrivals.
  const std::size_t R = cfg.replications;
  const std::size_t A = algorithms.size();
  std::vector<double> utilities(values.size() * R * A, 0.0);
  detail::parallel_for(values.size() * R, cfg.threads, [&](std::size_t task) {
    const std::size_t point = task / R;
    const std::size_t rep = task % R;
    const double mean = cfg.axis == "mean" ? values[point] : cfg.effective_mean();
    const double variance = cfg.axis == "variance" ? values[point] : cfg.variance;
    const Instance instance =
        synthesize_instance(traffic, routing, cfg.slot_begin, cfg.slot_end, cfg.rate_scale,
                            detail::utility_spec(cfg, mean, variance),
                            stream_seed(cfg.seed, "replication", rep));
    for (std::size_t a = 0; a < A; ++a) {
      utilities[task * A + a] = detail::run_algorithm(algorithms[a], instance, cfg).total_utility;
    }
  });

  std::string body = "axis_value,algorithm,mean_utility,stddev\n";
  for (std::size_t point = 0; point < values.size(); ++point) {
    for (std::size_t a = 0; a < A; ++a) {
      std::vector<double> xs(R);
      for (std::size_t rep = 0; rep < R; ++rep) xs[rep] = utilities[(point * R + rep) * A + a];
      const auto [mean, sd] = detail::mean_stddev(xs);
      body += csv::format(values[point]) + ',' + algorithms[a] + ',' + csv::format(mean) + ',' +
              csv::format(sd) + '\n';
    }
  }
  detail::write_csv(cfg, "compare", "compare.csv", body);
  out << "compare: " << values.size() << " axis points x " << R << " replications -> "
      << detail::output_path(cfg, "compare.csv") << '\n';
  return kExitOk;
}

inline int cmd_adapt(const ExperimentConfig& cfg, std::ostream& out) {
  detail::validate_synthesis(cfg);
  detail::validate_reservation(cfg);
  detail::require(cfg.episodes >= 1, "episodes must be at least 1");
  detail::require(cfg.eta > 0.0, "eta must be positive");
  detail::require(cfg.grid_steps >= 1, "grid_steps must be at least 1");
  const auto [traffic, routing] = detail::load_network(cfg);
  detail::require(traffic.slots >= kSlotsPerEpisode, "episodes need at least 288 traffic rows");
  const auto spec = detail::utility_spec(cfg, cfg.effective_mean(), cfg.variance);
  const auto episodes = make_episodes(traffic, routing, cfg.rate_scale, spec,
                                      stream_seed(cfg.seed, "episodes"), cfg.episodes);

  const ArmGrid grid = build_arm_grid(cfg.m, cfg.M, cfg.grid_steps);
  const auto adaptive =
      run_adaptive(episodes, grid, cfg.eta, stream_seed(cfg.seed, "learner"), cfg.threads);
  detail::write_csv(cfg, "adapt", "convergence.csv", convergence_csv(adaptive));

  struct Row {
    std::string algorithm;
    std::string parameters;
    std::vector<double> utilities;
  };
  std::vector<Row> rows;
  auto column = [](const std::vector<std::vector<double>>& history, std::size_t k) {
    std::vector<double> xs;
    for (const auto& row : history) xs.push_back(row[k]);
    return xs;
  };
  auto pair_text = [](double a, double b) { return csv::format(a) + ';' + csv::format(b); };

  rows.push_back({"adaptive", "", adaptive.played});
  const auto identity = std::find(grid.arms.begin(), grid.arms.end(), BoundsArm{cfg.m, cfg.M});
  rows.push_back({"oa", pair_text(cfg.m, cfg.M),
                  column(adaptive.history, static_cast<std::size_t>(identity - grid.arms.begin()))});

  std::vector<Instance> training;
  if (cfg.training_episodes > 0) {
    training = make_episodes(traffic, routing, cfg.rate_scale, spec,
                             stream_seed(cfg.seed, "training"), cfg.training_episodes);
    const auto fixed = best_fixed_arm(training, grid, cfg.threads);
    rows.push_back({"best-fixed", pair_text(fixed.arm.lower, fixed.arm.upper),
                    column(adaptive.history, fixed.index)});
  }
  const auto hindsight = best_arm_from_table(adaptive.history, grid.arms);
  rows.push_back({"hindsight-best", pair_text(hindsight.arm.lower, hindsight.arm.upper),
                  column(adaptive.history, hindsight.index)});

  std::vector<double> greedy;
  std::vector<double> reservation;
  for (const Instance& episode : episodes) {
    greedy.push_back(run_greedy(episode).total_utility);
    reservation.push_back(
        run_reservation(episode, {cfg.reserve, cfg.threshold, cfg.M}).total_utility);
  }
  rows.push_back({"greedy", "", greedy});
  rows.push_back({"reservation", pair_text(cfg.reserve, cfg.threshold), reservation});

  if (cfg.adapt_reservation) {
    const ReservationGrid pq = build_reservation_grid(cfg.grid_steps);
    const auto adaptive_res = run_adaptive_reservation(
        episodes, pq, cfg.M, cfg.eta, stream_seed(cfg.seed, "learner-reservation"), cfg.threads);
    detail::write_csv(cfg, "adapt", "convergence_reservation.csv", convergence_csv(adaptive_res));
    rows.push_back({"adaptive-reservation", "", adaptive_res.played});
    if (!training.empty()) {
      const auto fixed = best_fixed_reservation(training, pq, cfg.M, cfg.threads);
      rows.push_back({"best-fixed-reservation", pair_text(fixed.arm.reserve, fixed.arm.threshold),
                      column(adaptive_res.history, fixed.index)});
    }
  }

  std::string body = "algorithm,parameters,mean_utility,stddev\n";
  for (const Row& row : rows) {
    const auto [mean, sd] = detail::mean_stddev(row.utilities);
    body += row.algorithm + ',' + row.parameters + ',' + csv::format(mean) + ',' +
            csv::format(sd) + '\n';
  }
  detail::write_csv(cfg, "adapt", "adapt_comparison.csv", body);
  out << "adapt: " << episodes.size() << " episodes, " << grid.size() << " arms";
  if (!adaptive.skipped.empty()) out << ", " << adaptive.skipped.size() << " skipped (u* = 0)";
  out << '\n';
  return kExitOk;
}

inline int cmd_worstcase(const ExperimentConfig& cfg, std::ostream& out) {
  detail::validate_common(cfg);
  detail::require(!cfg.links.empty(), "worstcase needs at least one link count");
  for (std::size_t L : cfg.links) {
    detail::require(L >= 2,
                    "link count " + std::to_string(L) +
                        " rejected: the construction needs L >= 2 (for L = 1 the two-arrival "
                        "case already attains the bound alpha)");
  }
  detail::require(cfg.t >= 1, "t must be at least 1");
  detail::require(cfg.eps >= 0.0, "eps must be nonnegative (0 selects 1/t)");
  std::vector<RatioRow> rows;
  try {
    rows = ratio_curve(cfg.links, cfg.m, cfg.M, cfg.t, cfg.eps);
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  detail::write_csv(cfg, "worstcase", "worstcase.csv", ratio_curve_csv(rows));
  for (const RatioRow& row : rows) {
    out << "L=" << row.links << " ratio=" << csv::format(row.ratio)
        << " L_alpha=" << csv::format(row.l_alpha) << '\n';
  }
  return kExitOk;
}

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The invariant suites behind `validate`. With inject_half_alpha the
/// condition suite checks value functions whose certified alpha is halved.
inline std::vector<SuiteResult> run_validation_suites(std::uint64_t seed, bool inject_half_alpha) {
  std::vector<SuiteResult> results;
  auto uniform = [](Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };

  {
    Rng rng = make_stream(seed, "validate-conditions");
    std::size_t failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const double m = uniform(rng, 0.05, 20.0);
      const double M = m * std::exp(uniform(rng, 0.0, 6.0));
      ValueFunction vf = make_value_function(m, M);
      if (inject_half_alpha) {
        vf = ValueFunction::custom(m, M, vf.alpha() / 2.0, vf.beta(), vf.rate());
      }
      if (!validate_conditions(vf, 10000).all()) ++failures;
    }
    results.push_back({"value-function conditions", failures == 0,
                       std::to_string(failures) + "/100 draws failed"});
  }

  {
    Rng rng = make_stream(seed, "validate-solver");
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t links = 1 + static_cast<std::size_t>(rng() % 4);
      const double m = uniform(rng, 0.2, 2.0);
      const auto vf = make_value_function(m, m * uniform(rng, 2.0, 50.0));
      UtilizationState state(links);
      for (double& w : state.omega) w = uniform01(rng) < 0.2 ? 1.0 : uniform01(rng);
      const Instance one = detail::random_bounded_instance(rng, links, 1, m, vf.upper());
      const Arrival& arrival = one[0];
      const double y = solve_pseudo_utility(arrival, state, vf);
      const double y_max = detail::path_headroom(arrival, state);
      const double value = pseudo_utility(arrival, state, vf, y);
      for (int j = 0; j <= 2000; ++j) {
        worst = std::max(worst, pseudo_utility(arrival, state, vf, y_max * j / 2000.0) - value);
      }
    }
    results.push_back({"pseudo-utility maximizer", worst <= 1e-6,
                       "max grid excess " + csv::format(worst)});
  }

  {
    Rng rng = make_stream(seed, "validate-case1");
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double m = uniform(rng, 0.5, 2.0);
      const double M = m * uniform(rng, 2.0, 20.0);
      const auto vf = make_value_function(m, M);
      const std::size_t links = 1 + static_cast<std::size_t>(rng() % 3);
      Instance inst = detail::random_bounded_instance(rng, links, 4, m, M);
      std::vector<Arrival> arrivals(inst.arrivals().begin(), inst.arrivals().end());
      for (auto& a : arrivals) a.budget *= vf.beta() / 4.5;
      inst = Instance(inst.network(), std::move(arrivals));
      const double opt = solve_offline_grid(inst, 11).value;
      const double alg = run_online(inst, vf).total_utility;
      if (opt > 0.0) worst = std::max(worst, std::abs(opt - alg) / opt);
    }
    results.push_back({"uncongested exactness", worst <= 1e-4,
                       "max relative gap " + csv::format(worst)});
  }

  {
    Rng rng = make_stream(seed, "validate-ratio");
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t links = 1 + static_cast<std::size_t>(rng() % 5);
      const double m = uniform(rng, 0.5, 2.0);
      const double M = m * uniform(rng, 2.0, 20.0);
      const auto vf = make_value_function(m, M);
      const Instance inst = detail::random_bounded_instance(
          rng, links, 1 + static_cast<std::size_t>(rng() % 30), m, M);
      const auto report = empirical_ratio_report(inst, vf);
      const double bound = static_cast<double>(links) * vf.alpha();
      if (report.alg > 0.0) worst = std::max(worst, report.opt_upper / report.alg - bound);
    }
    results.push_back({"competitive bound", worst <= 1e-6,
                       "max (upper/ALG - L alpha) " + csv::format(worst)});
  }

  {
    Rng rng = make_stream(seed, "validate-oracle");
    double worst = 0.0;
    bool dual_ok = true;
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t links = 1 + static_cast<std::size_t>(rng() % 3);
      const Instance inst = detail::random_bounded_instance(
          rng, links, 1 + static_cast<std::size_t>(rng() % 4), 1.0, uniform(rng, 2.0, 10.0));
      const auto grid = solve_offline_grid(inst, 101);
      const auto dual = solve_offline_dual(inst);
      if (grid.value > 0.0) worst = std::max(worst, std::abs(dual.primal - grid.value) / grid.value);
      dual_ok = dual_ok && dual.dual >= grid.value - 1e-6;
    }
    results.push_back({"oracle agreement", worst <= 0.01 && dual_ok,
                       "max relative gap " + csv::format(worst) +
                           (dual_ok ? "" : ", dual below grid optimum")});
  }

  {
    const auto vf = make_value_function(1.0, std::numbers::e);
    const auto two = run_online(build_two_arrival_case(3, 1.0, std::numbers::e), vf);
    const double ratio = 3.0 / two.total_utility;
    const auto rows = ratio_curve({2, 3}, 1.0, std::numbers::e, 1000);
    bool below = true;
    for (const auto& row : rows) below = below && row.ratio <= row.l_alpha + 1e-6;
    results.push_back({"tightness", std::abs(ratio - 6.0) <= 1e-6 && below,
                       "two-arrival ratio " + csv::format(ratio)});
  }
  return results;
}

inline int cmd_validate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto results = run_validation_suites(cfg.seed, cfg.inject_half_alpha);
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    all = all && r.passed;
  }
  return all ? kExitOk : kExitFailure;
}

/// Runs a command and maps exceptions to exit codes, reporting on `err`.
inline int dispatch(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const csv::IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace onum
