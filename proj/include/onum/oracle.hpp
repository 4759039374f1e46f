#pragma once

// Offline optimum for an arrival instance.
//
// Primary route: projected dual subgradient on the link prices. Each user
// best-responds to the sum of prices on its path, prices move against the
// capacity residual, and the iterate is repaired into a feasible primal by
// proportional down-scaling on violated links. The best dual value seen is
// an upper bound on OPT and the best repaired primal a lower bound.
//
// Independent route: exhaustive search over a per-arrival rate grid, for
// instances with a handful of arrivals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "onum/allocator.hpp"
#include "onum/core.hpp"

namespace onum {

/// Rate maximizing g(y) - price * y over [0, b]. Ties resolve to the
/// largest maximizer, matching the online allocator.
inline double best_response(const Arrival& arrival, double path_price) {
  if (path_price < 0.0) {
    throw std::invalid_argument("path price must be nonnegative");
  }
  const UtilityFunction& g = arrival.utility;
  if (g.kind() == UtilityKind::Linear) {
    return g.coefficient() >= path_price ? arrival.budget : 0.0;
  }
  if (path_price == 0.0) {
    return arrival.budget;
  }
  const double y = g.coefficient() * g.scale() / path_price - 1.0;
  return std::clamp(y, 0.0, arrival.budget);
}

struct OfflineSolution {
  std::vector<double> allocations;  // repaired, feasible
  std::vector<double> prices;       // final link prices
  std::vector<double> slack;        // c_l - load_l of the repaired allocation
  double primal = 0.0;
  double dual = std::numeric_limits<double>::infinity();
  double gap = 0.0;  // (dual - primal) / dual
  int iterations = 0;
  bool converged = false;
};

struct DualOptions {
  int max_iters = 20000;
  double gamma0 = 1.0;
  double tolerance = 1e-5;  // relative duality gap for early exit
};

namespace detail {

inline double objective(const Instance& instance, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    total += instance[i].utility.value(y[i]);
  }
  return total;
}

inline std::vector<double> link_loads(const Instance& instance, const std::vector<double>& y) {
  std::vector<double> load(instance.network().link_count(), 0.0);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    for (std::size_t link : instance[i].links) {
      load[link] += y[i];
    }
  }
  return load;
}

// Scales every user of a violated link by c_l / load_l until no link is
// violated. Scaling only ever shrinks loads, so the loop terminates.
inline void repair(const Instance& instance, std::vector<double>& y) {
  const Network& net = instance.network();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::clamp(y[i], 0.0, instance[i].budget);
  }
  for (int pass = 0; pass < 64; ++pass) {
    bool violated = false;
    std::vector<double> load = link_loads(instance, y);
    for (std::size_t link = 0; link < load.size(); ++link) {
      if (load[link] > net.capacity(link)) {
        violated = true;
        const double factor = net.capacity(link) / load[link];
        for (std::size_t i = 0; i < instance.size(); ++i) {
          const auto& links = instance[i].links;
          if (std::find(links.begin(), links.end(), link) != links.end()) {
            y[i] *= factor;
          }
        }
        load = link_loads(instance, y);
      }
    }
    if (!violated) {
      return;
    }
  }
  // Rounding residue after repeated scaling; shave the last ulps off.
  for (double& v : y) v *= 1.0 - 1e-15;
}

}  // namespace detail

/// Dual subgradient with step gamma0 / sqrt(t), followed by primal repair.
/// Non-convergence is reported through `converged`, never thrown.
inline OfflineSolution solve_offline_dual(const Instance& instance, const DualOptions& options = {}) {
  if (options.max_iters < 1) {
    throw std::invalid_argument("solve_offline_dual needs max_iters >= 1");
  }
  if (!(options.gamma0 > 0.0)) {
    throw std::invalid_argument("solve_offline_dual needs gamma0 > 0");
  }
  const Network& net = instance.network();
  const std::size_t n = instance.size();
  const std::size_t links = net.link_count();

  OfflineSolution best;
  best.allocations.assign(n, 0.0);
  best.primal = 0.0;
  best.dual = std::numeric_limits<double>::infinity();

  std::vector<double> lambda(links, 0.0);
  std::vector<double> y(n, 0.0);
  std::vector<double> average(n, 0.0);
  std::vector<double> load(links, 0.0);

  auto consider_primal = [&](std::vector<double> candidate) {
    detail::repair(instance, candidate);
    const double value = detail::objective(instance, candidate);
    if (value > best.primal) {
      best.primal = value;
      best.allocations = std::move(candidate);
    }
  };

  int t = 1;
  for (; t <= options.max_iters; ++t) {
    std::fill(load.begin(), load.end(), 0.0);
    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Arrival& arrival = instance[i];
      double path_price = 0.0;
      for (std::size_t link : arrival.links) path_price += lambda[link];
      y[i] = best_response(arrival, path_price);
      dual += arrival.utility.value(y[i]) - path_price * y[i];
      for (std::size_t link : arrival.links) load[link] += y[i];
      average[i] += (y[i] - average[i]) / t;
    }
    for (std::size_t link = 0; link < links; ++link) {
      dual += lambda[link] * net.capacity(link);
    }
    best.dual = std::min(best.dual, dual);

    consider_primal(y);
    consider_primal(average);

    best.gap = best.dual > 0.0 ? (best.dual - best.primal) / best.dual : 0.0;
    if (best.gap <= options.tolerance) {
      best.converged = true;
      break;
    }

    const double gamma = options.gamma0 / std::sqrt(static_cast<double>(t));
    for (std::size_t link = 0; link < links; ++link) {
      lambda[link] = std::max(0.0, lambda[link] - gamma * (net.capacity(link) - load[link]));
    }
  }
  best.iterations = std::min(t, options.max_iters);
  best.prices = lambda;
  const std::vector<double> final_load = detail::link_loads(instance, best.allocations);
  best.slack.resize(links);
  for (std::size_t link = 0; link < links; ++link) {
    best.slack[link] = net.capacity(link) - final_load[link];
  }
  if (n == 0) {
    best.dual = 0.0;
    best.gap = 0.0;
    best.converged = true;
  }
  return best;
}

inline OfflineSolution solve_offline_dual(const Instance& instance, int max_iters, double gamma0) {
  DualOptions options;
  options.max_iters = max_iters;
  options.gamma0 = gamma0;
  return solve_offline_dual(instance, options);
}

struct GridSolution {
  double value = 0.0;
  double error_bound = 0.0;  // true optimum lies in [value, value + error_bound]
  std::vector<double> allocations;
};

inline constexpr std::size_t kGridMaxArrivals = 5;

/// Exhaustive search over {0, b_i/n, ..., b_i} for every arrival. Rounding
/// the true optimum down to the grid stays feasible, so the gap to OPT is
/// at most sum_i g_i'(0) * b_i / n.
inline GridSolution solve_offline_grid(const Instance& instance, int grid_n) {
  if (instance.size() > kGridMaxArrivals) {
    throw std::length_error("grid oracle supports at most 5 arrivals");
  }
  if (grid_n < 11) {
    throw std::invalid_argument("grid oracle needs grid_n >= 11");
  }
  const Network& net = instance.network();
  const std::size_t n = instance.size();
  GridSolution result;
  result.allocations.assign(n, 0.0);
  if (n == 0) {
    return result;
  }

  // Rate and utility tables per arrival.
  std::vector<std::vector<double>> rate(n), value(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Arrival& a = instance[i];
    rate[i].resize(grid_n + 1);
    value[i].resize(grid_n + 1);
    for (int j = 0; j <= grid_n; ++j) {
      rate[i][j] = (j == grid_n) ? a.budget : a.budget * j / grid_n;
      value[i][j] = a.utility.value(rate[i][j]);
    }
    result.error_bound += a.utility.marginal(0.0) * a.budget / grid_n;
  }

  std::vector<double> load(net.link_count(), 0.0);
  std::vector<int> choice(n, 0);
  double best = -1.0;
  std::vector<int> best_choice(n, 0);

  auto fits = [&](std::size_t i, double y) {
    for (std::size_t link : instance[i].links) {
      if (load[link] + y > net.capacity(link) + 1e-12) return false;
    }
    return true;
  };

  // Utilities are nondecreasing, so the last arrival always takes its
  // largest feasible grid point.
  auto search = [&](auto&& self, std::size_t i, double partial) -> void {
    if (i + 1 == n) {
      int j = grid_n;
      while (j > 0 && !fits(i, rate[i][j])) --j;
      const double total = partial + value[i][j];
      if (total > best) {
        best = total;
        choice[i] = j;
        best_choice = choice;
      }
      return;
    }
    for (int j = 0; j <= grid_n; ++j) {
      const double y = rate[i][j];
      if (!fits(i, y)) break;  // larger rates only add load
      for (std::size_t link : instance[i].links) load[link] += y;
      choice[i] = j;
      self(self, i + 1, partial + value[i][j]);
      for (std::size_t link : instance[i].links) load[link] -= y;
    }
  };
  search(search, 0, 0.0);

  result.value = best;
  for (std::size_t i = 0; i < n; ++i) {
    result.allocations[i] = rate[i][best_choice[i]];
  }
  return result;
}

inline constexpr std::size_t kRatioGridArrivals = 4;
inline constexpr int kRatioGridPoints = 101;

struct RatioReport {
  double opt = 0.0;          // best certified feasible value
  double opt_upper = 0.0;    // dual upper bound
  double alg = 0.0;
  double ratio = 0.0;        // opt / alg
};

/// OPT/ALG for the online algorithm on this instance. OPT is the better of
/// the repaired dual primal and (for small instances) the grid optimum.
/// ALG = 0 with OPT > 0 yields +infinity; ALG = OPT = 0 yields 1.
inline RatioReport empirical_ratio_report(const Instance& instance, const ValueFunction& vf,
                                          const DualOptions& options = {}) {
  RatioReport report;
  report.alg = run_online(instance, vf).total_utility;
  const OfflineSolution dual = solve_offline_dual(instance, options);
  report.opt = dual.primal;
  report.opt_upper = dual.dual;
  if (instance.size() <= kRatioGridArrivals) {
    report.opt = std::max(report.opt, solve_offline_grid(instance, kRatioGridPoints).value);
  }
  if (report.alg > 0.0) {
    report.ratio = report.opt / report.alg;
  } else {
    report.ratio = report.opt > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return report;
}

inline double empirical_ratio(const Instance& instance, const ValueFunction& vf) {
  return empirical_ratio_report(instance, vf).ratio;
}

}  // namespace onum
