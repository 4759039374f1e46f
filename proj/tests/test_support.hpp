#pragma once

// Generators and independent numerical oracles used across the suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "onum/core.hpp"
#include "onum/random.hpp"

namespace onum::testing {

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

/// Nonempty random subset of {0..links-1}, ascending.
inline std::vector<std::size_t> random_path(Rng& rng, std::size_t links) {
  std::vector<std::size_t> out;
  while (out.empty()) {
    for (std::size_t l = 0; l < links; ++l) {
      if (uniform01(rng) < 0.5) out.push_back(l);
    }
  }
  return out;
}

/// Arrival whose per-link marginals lie in [m, M] over its budget.
/// Requires M >= 2m so a Log arrival can use any budget in [0, 1).
inline Arrival bounded_arrival(Rng& rng, std::size_t links, double m, double M,
                               double linear_share = 0.2) {
  Arrival arrival;
  arrival.links = random_path(rng, links);
  const double k = static_cast<double>(arrival.links.size());
  arrival.budget = uniform01(rng);
  if (uniform01(rng) < linear_share) {
    arrival.utility = UtilityFunction::linear(k * uniform(rng, m, M));
  } else {
    const double a = uniform(rng, m * (1.0 + arrival.budget), M);
    arrival.utility = UtilityFunction::log(a, k);
  }
  return arrival;
}

inline Instance bounded_instance(Rng& rng, std::size_t links, std::size_t arrivals, double m,
                                 double M, double linear_share = 0.2) {
  std::vector<Arrival> list;
  for (std::size_t i = 0; i < arrivals; ++i) {
    list.push_back(bounded_arrival(rng, links, m, M, linear_share));
  }
  return Instance(Network(links), std::move(list));
}

/// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  auto simpson = [&](double lo, double hi, double flo, double fmid, double fhi) {
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  };
  std::function<double(double, double, double, double, double, double, double, int)> recurse =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps,
          int depth) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid);
        const double rm = 0.5 * (mid + hi);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = simpson(lo, mid, flo, flm, fmid);
        const double right = simpson(mid, hi, fmid, frm, fhi);
        if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
          return left + right + (left + right - whole) / 15.0;
        }
        return recurse(lo, mid, flo, flm, fmid, left, eps / 2.0, depth - 1) +
               recurse(mid, hi, fmid, frm, fhi, right, eps / 2.0, depth - 1);
      };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 50);
}

}  // namespace onum::testing
