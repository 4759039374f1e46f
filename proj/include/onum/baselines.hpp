#pragma once

// Comparison heuristics: greedy first-come allocation and a static
// capacity reservation for high-valuation arrivals.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "onum/allocator.hpp"
#include "onum/core.hpp"

namespace onum {

struct ReservationParams {
  double reserve = 0.0;    // p: fraction of every link held back
  double threshold = 0.0;  // q: high-valuation cutoff as a fraction of M
  double upper = 1.0;      // M

  void validate() const {
    if (!(reserve >= 0.0 && reserve <= 1.0)) {
      throw std::invalid_argument("reservation fraction p must lie in [0, 1]");
    }
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw std::invalid_argument("valuation threshold q must lie in [0, 1]");
    }
    if (!(upper > 0.0)) {
      throw std::invalid_argument("reservation needs M > 0");
    }
  }
};

namespace detail {

inline void record(const Arrival& arrival, double y, RunResult& result) {
  const double gain = arrival.utility.value(y);
  result.decisions.push_back(y);
  result.per_arrival_utilities.push_back(gain);
  result.total_utility += gain;
}

}  // namespace detail

/// Every arrival takes its whole budget, truncated to the path's residual
/// capacity.
inline RunResult run_greedy(const Instance& instance) {
  const Network& net = instance.network();
  RunResult result;
  result.final_state = UtilizationState(net.link_count());
  auto& omega = result.final_state.omega;
  for (const Arrival& arrival : instance.arrivals()) {
    double y = arrival.budget;
    for (std::size_t link : arrival.links) {
      y = std::min(y, net.capacity(link) - omega[link]);
    }
    y = std::max(y, 0.0);
    for (std::size_t link : arrival.links) {
      omega[link] = std::min(omega[link] + y, net.capacity(link));
    }
    detail::record(arrival, y, result);
  }
  return result;
}

/// An arrival is high-valuation when its largest per-link marginal
/// g'(0)/|L_i| reaches q*M. High-valuation arrivals allocate greedily
/// against full capacity; the rest may only use the unreserved (1-p)
/// share, tracked separately per link.
inline RunResult run_reservation(const Instance& instance, const ReservationParams& params) {
  params.validate();
  const Network& net = instance.network();
  RunResult result;
  result.final_state = UtilizationState(net.link_count());
  auto& omega = result.final_state.omega;
  std::vector<double> low_usage(net.link_count(), 0.0);
  const double cutoff = params.threshold * params.upper;
  for (const Arrival& arrival : instance.arrivals()) {
    const double top =
        arrival.utility.marginal(0.0) / static_cast<double>(arrival.links.size());
    const bool high = top >= cutoff;
    double y = arrival.budget;
    for (std::size_t link : arrival.links) {
      const double cap = net.capacity(link);
      y = std::min(y, cap - omega[link]);
      if (!high) {
        y = std::min(y, std::max(0.0, (1.0 - params.reserve) * cap - low_usage[link]));
      }
    }
    y = std::max(y, 0.0);
    for (std::size_t link : arrival.links) {
      omega[link] = std::min(omega[link] + y, net.capacity(link));
      if (!high) {
        low_usage[link] += y;
      }
    }
    detail::record(arrival, y, result);
  }
  return result;
}

}  // namespace onum
