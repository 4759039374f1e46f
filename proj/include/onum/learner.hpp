#pragma once

// Full-feedback exponential-weights tuning of algorithm parameters across
// episodes. Every arm is evaluated on every episode (the feedback is
// complete), one arm is sampled and played, and weights shrink by
// exp(eta * (u - u*) / u*).

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "onum/allocator.hpp"
#include "onum/baselines.hpp"
#include "onum/core.hpp"
#include "onum/csv.hpp"
#include "onum/random.hpp"

namespace onum {

/// Candidate value-function bounds (m~, M~).
struct BoundsArm {
  double lower = 0.0;
  double upper = 0.0;
  auto operator<=>(const BoundsArm&) const = default;
};

/// Candidate reservation parameters (p, q).
struct ReservationArm {
  double reserve = 0.0;
  double threshold = 0.0;
  auto operator<=>(const ReservationArm&) const = default;
};

template <typename Arm>
struct ArmSet {
  std::vector<Arm> arms;
  double step = 0.0;
  std::size_t size() const noexcept { return arms.size(); }
};

using ArmGrid = ArmSet<BoundsArm>;
using ReservationGrid = ArmSet<ReservationArm>;

inline constexpr int kDefaultGridSteps = 20;
inline constexpr double kDefaultEta = 10.0;
inline constexpr std::size_t kDefaultEpisodes = 30;

namespace detail {

inline std::vector<double> grid_points(double lo, double hi, int steps) {
  std::vector<double> points(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) {
    points[j] = (j == steps) ? hi : lo + (hi - lo) * j / steps;
  }
  return points;
}

}  // namespace detail

/// All pairs m <= m~ <= M~ <= M from a (steps+1)-point uniform grid.
inline ArmGrid build_arm_grid(double m, double M, int steps = kDefaultGridSteps) {
  if (!(m < M)) throw std::domain_error("arm grid needs m < M");
  if (!(m > 0.0)) throw std::domain_error("arm grid needs m > 0");
  if (steps < 1) throw std::domain_error("arm grid needs steps >= 1");
  const auto points = detail::grid_points(m, M, steps);
  ArmGrid grid;
  grid.step = (M - m) / steps;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i; j < points.size(); ++j) {
      grid.arms.push_back({points[i], points[j]});
    }
  }
  return grid;
}

/// Uniform (steps+1) x (steps+1) grid over [0, 1]^2.
inline ReservationGrid build_reservation_grid(int steps = kDefaultGridSteps) {
  if (steps < 1) throw std::domain_error("reservation grid needs steps >= 1");
  const auto points = detail::grid_points(0.0, 1.0, steps);
  ReservationGrid grid;
  grid.step = 1.0 / steps;
  for (double p : points) {
    for (double q : points) {
      grid.arms.push_back({p, q});
    }
  }
  return grid;
}

/// Evaluates fn(arm) for every arm, fanned out across `threads` workers
/// (0 picks the hardware concurrency). Each result lands in its own slot,
/// so the output equals sequential evaluation exactly.
template <typename Arm, typename Fn>
std::vector<double> evaluate_arms(const std::vector<Arm>& arms, Fn&& fn, unsigned threads = 0) {
  std::vector<double> out(arms.size(), 0.0);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(arms.size(), 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < arms.size(); ++k) out[k] = fn(arms[k]);
    return out;
  }
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t k = w; k < arms.size(); k += threads) out[k] = fn(arms[k]);
    });
  }
  for (auto& worker : workers) worker.join();
  return out;
}

inline std::vector<double> run_episode_all_arms(const Instance& episode, const ArmGrid& grid,
                                                unsigned threads = 0) {
  return evaluate_arms(
      grid.arms,
      [&](const BoundsArm& arm) {
        return run_online(episode, make_value_function(arm.lower, arm.upper)).total_utility;
      },
      threads);
}

inline std::vector<double> run_episode_all_arms(const Instance& episode,
                                                const ReservationGrid& grid, double M,
                                                unsigned threads = 0) {
  return evaluate_arms(
      grid.arms,
      [&](const ReservationArm& arm) {
        return run_reservation(episode, {arm.reserve, arm.threshold, M}).total_utility;
      },
      threads);
}

/// Exponential weights over a fixed arm set. Weights are kept in log form;
/// probabilities are normalized by a log-sum-exp taken in a canonical arm
/// order, so permuting the arm list permutes the probabilities exactly.
class LearnerState {
 public:
  template <typename Arm>
  LearnerState(const std::vector<Arm>& arms, double eta)
      : log_weights_(arms.size(), 0.0), eta_(eta), order_(arms.size()) {
    if (arms.empty()) throw std::invalid_argument("learner needs at least one arm");
    if (!(eta > 0.0)) throw std::invalid_argument("learner needs eta > 0");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return arms[a] < arms[b]; });
    normalize();
  }

  std::size_t size() const noexcept { return log_weights_.size(); }
  double eta() const noexcept { return eta_; }
  std::size_t episode() const noexcept { return episode_; }
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }
  const std::vector<double>& log_weights() const noexcept { return log_weights_; }
  const std::vector<std::vector<double>>& history() const noexcept { return history_; }
  const std::vector<std::size_t>& skipped() const noexcept { return skipped_; }

  /// w = exp(log w); can underflow to 0 after many bad episodes even though
  /// the probabilities stay exact.
  std::vector<double> weights() const {
    std::vector<double> w(log_weights_.size());
    std::transform(log_weights_.begin(), log_weights_.end(), w.begin(),
                   [](double lw) { return std::exp(lw); });
    return w;
  }

  /// One multiplicative update from a full utility vector. An episode in
  /// which no arm earns anything carries no information and is skipped.
  void update(const std::vector<double>& utilities) {
    if (utilities.size() != size()) {
      throw std::invalid_argument("utility vector size does not match arm count");
    }
    history_.push_back(utilities);
    const double best = *std::max_element(utilities.begin(), utilities.end());
    if (best > 0.0) {
      for (std::size_t k = 0; k < size(); ++k) {
        log_weights_[k] += eta_ * (utilities[k] - best) / best;
      }
      normalize();
    } else {
      skipped_.push_back(episode_);
    }
    ++episode_;
  }

  /// Inverse-CDF draw walking arms in canonical order.
  std::size_t sample(Rng& rng) const {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t last = order_.front();
    for (std::size_t k : order_) {
      if (probabilities_[k] <= 0.0) continue;
      last = k;
      cumulative += probabilities_[k];
      if (u < cumulative) return k;
    }
    return last;
  }

 private:
  void normalize() {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k : order_) top = std::max(top, log_weights_[k]);
    double total = 0.0;
    probabilities_.assign(size(), 0.0);
    for (std::size_t k : order_) {
      probabilities_[k] = std::exp(log_weights_[k] - top);
      total += probabilities_[k];
    }
    for (std::size_t k : order_) probabilities_[k] /= total;
  }

  std::vector<double> log_weights_;
  std::vector<double> probabilities_;
  double eta_;
  std::size_t episode_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::vector<double>> history_;
  std::vector<std::size_t> skipped_;
};

/// Free-function form of LearnerState::update.
inline LearnerState update_weights(LearnerState state, const std::vector<double>& utilities) {
  state.update(utilities);
  return state;
}

template <typename Arm>
struct AdaptiveResult {
  std::vector<std::size_t> chosen;  // index into the arm list as given
  std::vector<Arm> chosen_arms;
  std::vector<double> played;
  std::vector<double> best;  // u* per episode
  std::vector<std::vector<double>> history;
  std::vector<double> final_probabilities;
  std::vector<std::size_t> skipped;
};

/// Generic loop: sample, evaluate all arms (feedback for the sampled arm is
/// its own entry), update. evaluate(episode) returns the per-arm utilities.
template <typename Arm, typename Evaluate>
AdaptiveResult<Arm> run_exponential_weights(const std::vector<Instance>& episodes,
                                            const std::vector<Arm>& arms, double eta,
                                            std::uint64_t seed, Evaluate&& evaluate) {
  if (episodes.empty()) throw std::invalid_argument("adaptive run needs at least one episode");
  LearnerState state(arms, eta);
  Rng rng = make_stream(seed, "arm-sampling");
  AdaptiveResult<Arm> result;
  for (const Instance& episode : episodes) {
    const std::size_t pick = state.sample(rng);
    const std::vector<double> utilities = evaluate(episode);
    result.chosen.push_back(pick);
    result.chosen_arms.push_back(arms[pick]);
    result.played.push_back(utilities[pick]);
    result.best.push_back(*std::max_element(utilities.begin(), utilities.end()));
    state.update(utilities);
  }
  result.history = state.history();
  result.final_probabilities = state.probabilities();
  result.skipped = state.skipped();
  return result;
}

inline AdaptiveResult<BoundsArm> run_adaptive(const std::vector<Instance>& episodes,
                                              const ArmGrid& grid, double eta = kDefaultEta,
                                              std::uint64_t seed = 0, unsigned threads = 0) {
  return run_exponential_weights(episodes, grid.arms, eta, seed, [&](const Instance& episode) {
    return run_episode_all_arms(episode, grid, threads);
  });
}

inline AdaptiveResult<ReservationArm> run_adaptive_reservation(
    const std::vector<Instance>& episodes, const ReservationGrid& grid, double M,
    double eta = kDefaultEta, std::uint64_t seed = 0, unsigned threads = 0) {
  return run_exponential_weights(episodes, grid.arms, eta, seed, [&](const Instance& episode) {
    return run_episode_all_arms(episode, grid, M, threads);
  });
}

template <typename Arm>
struct FixedArmChoice {
  Arm arm{};
  std::size_t index = 0;
  double mean_utility = 0.0;
  std::vector<double> means;  // per arm, in the given order
};

/// Arm with the highest mean over a utility table [instance][arm]; ties go
/// to the smaller arm.
template <typename Arm>
FixedArmChoice<Arm> best_arm_from_table(const std::vector<std::vector<double>>& table,
                                        const std::vector<Arm>& arms) {
  if (table.empty()) throw std::invalid_argument("best fixed arm needs training data");
  FixedArmChoice<Arm> choice;
  choice.means.assign(arms.size(), 0.0);
  for (const auto& row : table) {
    for (std::size_t k = 0; k < arms.size(); ++k) choice.means[k] += row[k];
  }
  for (double& mean : choice.means) mean /= static_cast<double>(table.size());
  bool first = true;
  for (std::size_t k = 0; k < arms.size(); ++k) {
    const double mean = choice.means[k];
    if (first || mean > choice.mean_utility ||
        (mean == choice.mean_utility && arms[k] < choice.arm)) {
      choice.arm = arms[k];
      choice.index = k;
      choice.mean_utility = mean;
      first = false;
    }
  }
  return choice;
}

inline FixedArmChoice<BoundsArm> best_fixed_arm(const std::vector<Instance>& training,
                                                const ArmGrid& grid, unsigned threads = 0) {
  std::vector<std::vector<double>> table;
  table.reserve(training.size());
  for (const Instance& instance : training) {
    table.push_back(run_episode_all_arms(instance, grid, threads));
  }
  return best_arm_from_table(table, grid.arms);
}

inline FixedArmChoice<ReservationArm> best_fixed_reservation(const std::vector<Instance>& training,
                                                             const ReservationGrid& grid,
                                                             double M, unsigned threads = 0) {
  std::vector<std::vector<double>> table;
  table.reserve(training.size());
  for (const Instance& instance : training) {
    table.push_back(run_episode_all_arms(instance, grid, M, threads));
  }
  return best_arm_from_table(table, grid.arms);
}

/// Per-episode convergence table: episode, chosen arm, played utility,
/// best-arm utility.
template <typename Arm>
std::string convergence_csv(const AdaptiveResult<Arm>& result) {
  std::string out;
  if constexpr (std::is_same_v<Arm, BoundsArm>) {
    out = "episode,chosen_m,chosen_M,played_utility,best_arm_utility\n";
  } else {
    out = "episode,chosen_p,chosen_q,played_utility,best_arm_utility\n";
  }
  for (std::size_t e = 0; e < result.played.size(); ++e) {
    const Arm& arm = result.chosen_arms[e];
    double first = 0.0;
    double second = 0.0;
    if constexpr (std::is_same_v<Arm, BoundsArm>) {
      first = arm.lower;
      second = arm.upper;
    } else {
      first = arm.reserve;
      second = arm.threshold;
    }
    out += std::to_string(e) + ',' + csv::format(first) + ',' + csv::format(second) + ',' +
           csv::format(result.played[e]) + ',' + csv::format(result.best[e]) + '\n';
  }
  return out;
}

}  // namespace onum
