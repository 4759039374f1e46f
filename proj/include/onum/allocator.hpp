#pragma once

// The online threshold algorithm: each arrival receives the rate that
// maximizes its utility minus the integrated link prices along its path,
// then the path's utilization levels advance by that rate.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "onum/core.hpp"
#include "onum/csv.hpp"

namespace onum {

struct RunResult {
  double total_utility = 0.0;
  std::vector<double> decisions;
  UtilizationState final_state;
  std::vector<double> per_arrival_utilities;
};

inline constexpr double kAllocationTolerance = 1e-9;

namespace detail {

inline void require_feasible(const Arrival& arrival, const UtilizationState& state) {
  for (std::size_t link : arrival.links) {
    if (link >= state.omega.size()) {
      throw std::invalid_argument("utilization state does not cover requested link");
    }
    const double w = state.omega[link];
    if (!(w >= 0.0 && w <= 1.0 + 1e-12)) {
      throw std::invalid_argument("infeasible utilization state");
    }
  }
}

// Largest rate the path can still carry under unit capacities.
inline double path_headroom(const Arrival& arrival, const UtilizationState& state) {
  double headroom = arrival.budget;
  for (std::size_t link : arrival.links) {
    headroom = std::min(headroom, 1.0 - state.omega[link]);
  }
  return std::max(headroom, 0.0);
}

}  // namespace detail

/// Derivative of the pseudo-utility J(y) = g(y) - sum_l int phi over the
/// slice [omega_l, omega_l + y].
inline double pseudo_utility_slope(const Arrival& arrival, const UtilizationState& state,
                                   const ValueFunction& vf, double y) {
  double price = 0.0;
  for (std::size_t link : arrival.links) {
    price += vf(state.omega[link] + y);
  }
  return arrival.utility.marginal(y) - price;
}

inline double pseudo_utility(const Arrival& arrival, const UtilizationState& state,
                             const ValueFunction& vf, double y) {
  double cost = 0.0;
  for (std::size_t link : arrival.links) {
    const double w = state.omega[link];
    cost += vf.integral(w, std::min(w + y, 1.0));
  }
  return arrival.utility.value(y) - cost;
}

/// Maximizer of the pseudo-utility over [0, y_max], y_max = min(b_i, min
/// residual capacity on the path). J' is nonincreasing, so the largest
/// point with J' >= 0 is located by bisection. Flat stretches where J' = 0
/// resolve to their right end.
inline double solve_pseudo_utility(const Arrival& arrival, const UtilizationState& state,
                                   const ValueFunction& vf) {
  detail::require_feasible(arrival, state);
  const double y_max = detail::path_headroom(arrival, state);
  if (y_max <= 0.0) {
    return 0.0;
  }
  if (pseudo_utility_slope(arrival, state, vf, 0.0) < 0.0) {
    return 0.0;
  }
  if (pseudo_utility_slope(arrival, state, vf, y_max) >= 0.0) {
    return y_max;
  }
  double lo = 0.0;
  double hi = y_max;
  while (hi - lo > kAllocationTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (pseudo_utility_slope(arrival, state, vf, mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Advances the path's utilization by y, capped at capacity.
inline void apply_allocation(const Arrival& arrival, double y, UtilizationState& state) {
  for (std::size_t link : arrival.links) {
    state.omega[link] = std::min(state.omega[link] + y, 1.0);
  }
}

inline std::pair<double, UtilizationState> step(const UtilizationState& state,
                                                const Arrival& arrival,
                                                const ValueFunction& vf) {
  const double y = solve_pseudo_utility(arrival, state, vf);
  UtilizationState next = state;
  apply_allocation(arrival, y, next);
  return {y, std::move(next)};
}

/// Runs the online algorithm over the instance from a zero-utilization
/// start. Identical inputs give bit-identical results.
inline RunResult run_online(const Instance& instance, const ValueFunction& vf) {
  if (!instance.network().unit_capacities()) {
    throw std::invalid_argument("online allocation expects unit link capacities");
  }
  RunResult result;
  result.final_state = UtilizationState(instance.network().link_count());
  result.decisions.reserve(instance.size());
  result.per_arrival_utilities.reserve(instance.size());
  for (const Arrival& arrival : instance.arrivals()) {
    const double y = solve_pseudo_utility(arrival, result.final_state, vf);
    apply_allocation(arrival, y, result.final_state);
    const double gain = arrival.utility.value(y);
    result.decisions.push_back(y);
    result.per_arrival_utilities.push_back(gain);
    result.total_utility += gain;
  }
  return result;
}

/// Decision log: arrival_index, y, utility_gain, then the post-update
/// utilization of each requested link in request order (so rows are as
/// long as the arrival's path).
inline std::string decision_log_csv(const Instance& instance, const RunResult& result) {
  if (result.decisions.size() != instance.size()) {
    throw std::invalid_argument("run result does not match instance");
  }
  std::string out = "arrival_index,y,utility_gain,post_omega\n";
  std::vector<double> omega(instance.network().link_count(), 0.0);
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const Arrival& arrival = instance[i];
    const double y = result.decisions[i];
    out += std::to_string(i);
    out += ',';
    out += csv::format(y);
    out += ',';
    out += csv::format(result.per_arrival_utilities[i]);
    for (std::size_t link : arrival.links) {
      omega[link] = std::min(omega[link] + y, instance.network().capacity(link));
      out += ',';
      out += csv::format(omega[link]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace onum
