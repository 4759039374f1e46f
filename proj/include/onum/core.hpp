#pragma once

// Shared domain types: networks, arrivals, utility families, and the
// threshold value function together with its sufficient-condition checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace onum {

/// Link set with per-link capacity. Capacities default to 1.
class Network {
 public:
  explicit Network(std::size_t link_count) : capacities_(link_count, 1.0) {
    if (link_count == 0) {
      throw std::invalid_argument("network needs at least one link");
    }
  }

  explicit Network(std::vector<double> capacities) : capacities_(std::move(capacities)) {
    if (capacities_.empty()) {
      throw std::invalid_argument("network needs at least one link");
    }
    for (double c : capacities_) {
      if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("link capacity must be positive and finite");
      }
    }
  }

  std::size_t link_count() const noexcept { return capacities_.size(); }
  double capacity(std::size_t link) const { return capacities_.at(link); }
  std::span<const double> capacities() const noexcept { return capacities_; }

  bool unit_capacities() const noexcept {
    return std::all_of(capacities_.begin(), capacities_.end(),
                       [](double c) { return c == 1.0; });
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<double> capacities_;
};

enum class UtilityKind { Log, Linear };

/// Closed family of concave utilities with analytic marginals.
///
/// Log:    g(y) = a * k * ln(1 + y),  g'(y) = a * k / (1 + y)
/// Linear: g(y) = s * y,              g'(y) = s
class UtilityFunction {
 public:
  static UtilityFunction log(double coefficient, double scale) {
    if (!(coefficient >= 0.0) || !std::isfinite(coefficient)) {
      throw std::invalid_argument("log utility coefficient must be finite and >= 0");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("log utility scale must be finite and > 0");
    }
    return UtilityFunction(UtilityKind::Log, coefficient, scale);
  }

  static UtilityFunction linear(double slope) {
    if (!(slope >= 0.0) || !std::isfinite(slope)) {
      throw std::invalid_argument("linear utility slope must be finite and >= 0");
    }
    return UtilityFunction(UtilityKind::Linear, slope, 1.0);
  }

  UtilityKind kind() const noexcept { return kind_; }
  /// a for Log, s for Linear.
  double coefficient() const noexcept { return coefficient_; }
  /// k for Log, 1 for Linear.
  double scale() const noexcept { return scale_; }

  double value(double y) const noexcept {
    if (kind_ == UtilityKind::Log) {
      return coefficient_ * scale_ * std::log1p(y);
    }
    return coefficient_ * y;
  }

  double marginal(double y) const noexcept {
    if (kind_ == UtilityKind::Log) {
      return coefficient_ * scale_ / (1.0 + y);
    }
    return coefficient_;
  }

  friend bool operator==(const UtilityFunction&, const UtilityFunction&) = default;

 private:
  UtilityFunction(UtilityKind kind, double coefficient, double scale)
      : kind_(kind), coefficient_(coefficient), scale_(scale) {}

  UtilityKind kind_;
  double coefficient_;
  double scale_;
};

/// One request A_i: utility, requested link set, and rate budget.
struct Arrival {
  UtilityFunction utility = UtilityFunction::linear(0.0);
  std::vector<std::size_t> links;
  double budget = 0.0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// A network plus an ordered, immutable arrival sequence.
class Instance {
 public:
  explicit Instance(Network network) : network_(std::move(network)) {}

  Instance(Network network, std::vector<Arrival> arrivals)
      : network_(std::move(network)), arrivals_(std::move(arrivals)) {
    for (std::size_t i = 0; i < arrivals_.size(); ++i) {
      validate(arrivals_[i], i);
    }
  }

  const Network& network() const noexcept { return network_; }
  std::span<const Arrival> arrivals() const noexcept { return arrivals_; }
  const Arrival& operator[](std::size_t i) const { return arrivals_.at(i); }
  std::size_t size() const noexcept { return arrivals_.size(); }
  bool empty() const noexcept { return arrivals_.empty(); }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  void validate(const Arrival& arrival, std::size_t index) const {
    const auto where = " (arrival " + std::to_string(index) + ")";
    if (arrival.links.empty()) {
      throw std::invalid_argument("arrival requests no links" + where);
    }
    if (!(arrival.budget >= 0.0) || !std::isfinite(arrival.budget)) {
      throw std::invalid_argument("arrival budget must be finite and >= 0" + where);
    }
    std::vector<std::size_t> sorted = arrival.links;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("arrival repeats a link" + where);
    }
    if (sorted.back() >= network_.link_count()) {
      throw std::invalid_argument("arrival link index out of range" + where);
    }
  }

  Network network_;
  std::vector<Arrival> arrivals_;
};

/// Per-link utilization levels. The only mutable state of an online run.
struct UtilizationState {
  std::vector<double> omega;

  UtilizationState() = default;
  explicit UtilizationState(std::size_t link_count) : omega(link_count, 0.0) {}

  friend bool operator==(const UtilizationState&, const UtilizationState&) = default;
};

/// Piecewise price curve phi on [0, 1]:
///   phi(y) = m                          for y in [0, beta)
///   phi(y) = m * exp(rate * (y - beta)) for y in [beta, 1]
///
/// `alpha` is the competitive parameter the curve is certified against;
/// `rate` is the exponent actually used by the curve. The canonical
/// construction sets rate = alpha = ln(M/m) + 1 and beta = 1 / alpha, giving
/// phi(beta) = m and phi(1) = M. Prices beyond y = 1 are never evaluated;
/// callers cap allocations at the remaining capacity instead.
class ValueFunction {
 public:
  static ValueFunction canonical(double m, double M) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::domain_error("value function needs m > 0");
    }
    if (!(M >= m) || !std::isfinite(M)) {
      throw std::domain_error("value function needs M >= m");
    }
    const double alpha = std::log(M / m) + 1.0;
    return ValueFunction(m, M, alpha, 1.0 / alpha, alpha);
  }

  /// Hand-built curve; no relation between the parameters is enforced
  /// beyond basic ranges, so validate_conditions() can reject it.
  static ValueFunction custom(double m, double M, double alpha, double beta, double rate) {
    if (!(m > 0.0) || !(M >= m)) {
      throw std::domain_error("value function needs 0 < m <= M");
    }
    if (!(beta > 0.0 && beta <= 1.0)) {
      throw std::domain_error("value function needs beta in (0, 1]");
    }
    if (!(alpha > 0.0) || !(rate > 0.0)) {
      throw std::domain_error("value function needs positive alpha and rate");
    }
    return ValueFunction(m, M, alpha, beta, rate);
  }

  double lower() const noexcept { return m_; }
  double upper() const noexcept { return M_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double rate() const noexcept { return rate_; }

  /// Price at utilization y. Throws std::domain_error outside [0, 1].
  double operator()(double y) const {
    y = checked(y);
    if (y < beta_) {
      return m_;
    }
    return m_ * std::exp(rate_ * (y - beta_));
  }

  /// Closed-form integral of phi over [y0, y1].
  double integral(double y0, double y1) const {
    y0 = checked(y0);
    y1 = checked(y1);
    if (y1 < y0) {
      throw std::domain_error("phi integral bounds reversed");
    }
    const double flat = m_ * (std::min(y1, beta_) - std::min(y0, beta_));
    const double hi = std::max(y1, beta_) - beta_;
    const double lo = std::max(y0, beta_) - beta_;
    // expm1 difference keeps precision for short slices.
    const double curved = (m_ / rate_) * (std::expm1(rate_ * hi) - std::expm1(rate_ * lo));
    return flat + curved;
  }

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

 private:
  ValueFunction(double m, double M, double alpha, double beta, double rate)
      : m_(m), M_(M), alpha_(alpha), beta_(beta), rate_(rate) {}

  // Tolerates rounding residue at the interval ends.
  static double checked(double y) {
    constexpr double slack = 1e-12;
    if (!(y >= -slack && y <= 1.0 + slack)) {
      throw std::domain_error("utilization outside [0, 1]: " + std::to_string(y));
    }
    return std::clamp(y, 0.0, 1.0);
  }

  double m_;
  double M_;
  double alpha_;
  double beta_;
  double rate_;
};

inline ValueFunction make_value_function(double m, double M) {
  return ValueFunction::canonical(m, M);
}

inline double phi_eval(const ValueFunction& vf, double y) { return vf(y); }

inline double phi_integral(const ValueFunction& vf, double y0, double y1) {
  return vf.integral(y0, y1);
}

struct ConditionReport {
  bool endpoints = false;     // phi(beta) = m and phi(1) = M
  bool monotone = false;      // nondecreasing on the grid
  bool differential = false;  // alpha * phi - phi' >= -slack
  double endpoint_error = 0.0;      // worst relative endpoint mismatch
  double differential_slack = 0.0;  // min over the grid of alpha * phi - phi'

  bool all() const noexcept { return endpoints && monotone && differential; }
};

inline constexpr double kEndpointTolerance = 1e-9;
inline constexpr double kDifferentialSlack = 1e-6;

namespace detail {

// Derivative of phi at y, with every stencil point kept inside [beta, 1]
// so the kink at beta never leaks into the estimate. Near the ends a
// second-order one-sided stencil is used; for an exponential it
// underestimates phi', which keeps the inequality check conservative in
// the right direction.
inline double phi_derivative(const ValueFunction& vf, double y) {
  const double lo = vf.beta();
  const double span = 1.0 - lo;
  const double h = std::max(std::min(1e-3 / std::max(vf.rate(), 1.0), span / 4.0), 1e-7);
  auto f = [&](double x) { return vf(std::clamp(x, 0.0, 1.0)); };
  if (y - 2.0 * h >= lo && y + 2.0 * h <= 1.0) {
    const double s1 = f(y + h) - f(y - h);
    const double s2 = f(y + 2.0 * h) - f(y - 2.0 * h);
    return (8.0 * s1 - s2) / (12.0 * h);
  }
  if (y - 2.0 * h < lo && y + 2.0 * h <= 1.0) {
    return (-3.0 * f(y) + 4.0 * f(y + h) - f(y + 2.0 * h)) / (2.0 * h);
  }
  return (3.0 * f(y) - 4.0 * f(y - h) + f(y - 2.0 * h)) / (2.0 * h);
}

}  // namespace detail

/// Checks the sufficient conditions on a uniform grid over [beta, 1].
/// Never throws on a failed condition; the report says which one failed.
inline ConditionReport validate_conditions(const ValueFunction& vf, int grid_points) {
  if (grid_points < 2) {
    throw std::invalid_argument("validate_conditions needs at least 2 grid points");
  }
  ConditionReport report;
  const double m = vf.lower();
  const double M = vf.upper();
  report.endpoint_error =
      std::max(std::abs(vf(vf.beta()) - m) / m, std::abs(vf(1.0) - M) / M);
  report.endpoints = report.endpoint_error <= kEndpointTolerance;

  report.monotone = true;
  report.differential_slack = std::numeric_limits<double>::infinity();
  const double lo = vf.beta();
  double previous = vf(lo);
  for (int j = 0; j < grid_points; ++j) {
    const double y = (j + 1 == grid_points)
                         ? 1.0
                         : lo + (1.0 - lo) * static_cast<double>(j) / (grid_points - 1);
    const double value = vf(y);
    if (value < previous) {
      report.monotone = false;
    }
    previous = value;
    const double slack = vf.alpha() * value - detail::phi_derivative(vf, y);
    report.differential_slack = std::min(report.differential_slack, slack);
  }
  report.differential = report.differential_slack >= -kDifferentialSlack;
  return report;
}

/// True iff every arrival's per-link marginal g'(y)/|L_i| stays in [m, M]
/// over [0, b_i]. Marginals are nonincreasing, so the endpoints decide.
inline bool check_marginal_bounds(const Instance& instance, double m, double M) {
  constexpr double rel = 1e-12;
  for (const Arrival& arrival : instance.arrivals()) {
    const double links = static_cast<double>(arrival.links.size());
    const double top = arrival.utility.marginal(0.0) / links;
    const double bottom = arrival.utility.marginal(arrival.budget) / links;
    if (top > M * (1.0 + rel) || bottom < m * (1.0 - rel)) {
      return false;
    }
  }
  return true;
}

}  // namespace onum
