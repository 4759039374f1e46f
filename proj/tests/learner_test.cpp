#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "onum/learner.hpp"
#include "test_support.hpp"

using namespace onum;
using onum::testing::bounded_instance;

namespace {

std::vector<Instance> stationary_episodes(std::uint64_t seed, std::size_t count,
                                          std::size_t arrivals = 40) {
  Rng rng(seed);
  std::vector<Instance> out;
  for (std::size_t e = 0; e < count; ++e) {
    out.push_back(bounded_instance(rng, 3, arrivals, 1.0, 4.0, 0.0));
  }
  return out;
}

}  // namespace

TEST(ArmGrid, CountsAndStep) {
  const auto grid = build_arm_grid(1.0, 3.0);
  EXPECT_EQ(grid.size(), 231u);
  EXPECT_NEAR(grid.step, 0.1, 1e-15);
  for (const auto& arm : grid.arms) {
    EXPECT_GE(arm.lower, 1.0);
    EXPECT_LE(arm.lower, arm.upper);
    EXPECT_LE(arm.upper, 3.0);
  }
  const auto coarse = build_arm_grid(1.0, 3.0, 1);
  ASSERT_EQ(coarse.size(), 3u);
  EXPECT_EQ(coarse.arms[0], (BoundsArm{1.0, 1.0}));
  EXPECT_EQ(coarse.arms[1], (BoundsArm{1.0, 3.0}));
  EXPECT_EQ(coarse.arms[2], (BoundsArm{3.0, 3.0}));
  EXPECT_THROW(build_arm_grid(3.0, 3.0), std::domain_error);
  EXPECT_THROW(build_arm_grid(0.0, 3.0), std::domain_error);
}

TEST(ArmGrid, ReservationGrid) {
  const auto grid = build_reservation_grid();
  EXPECT_EQ(grid.size(), 441u);
  EXPECT_EQ(grid.arms.front(), (ReservationArm{0.0, 0.0}));
  EXPECT_EQ(grid.arms.back(), (ReservationArm{1.0, 1.0}));
}

TEST(EpisodeAllArms, DegenerateAndIdentityArms) {
  Rng rng(51);
  const Instance inst = bounded_instance(rng, 3, 60, 1.0, 3.0);
  ArmGrid grid;
  grid.arms = {{1.0, 3.0}, {2.0, 2.0}};
  const auto u = run_episode_all_arms(inst, grid, 1);
  EXPECT_EQ(u[0], run_online(inst, make_value_function(1.0, 3.0)).total_utility);
  EXPECT_EQ(u[1], run_online(inst, make_value_function(2.0, 2.0)).total_utility);
  EXPECT_EQ(u, run_episode_all_arms(inst, grid, 1));
}

TEST(EpisodeAllArms, ThreadCountDoesNotChangeResults) {
  Rng rng(52);
  const Instance inst = bounded_instance(rng, 3, 60, 1.0, 3.0);
  const auto grid = build_arm_grid(1.0, 3.0, 4);
  EXPECT_EQ(run_episode_all_arms(inst, grid, 1), run_episode_all_arms(inst, grid, 4));
}

TEST(LearnerState, EqualUtilitiesKeepUniform) {
  LearnerState state(std::vector<BoundsArm>{{1, 1}, {1, 2}, {2, 2}}, 10.0);
  state.update({3.0, 3.0, 3.0});
  for (double p : state.probabilities()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(LearnerState, HalfUtilityArmLosesFactorExpFive) {
  LearnerState state(std::vector<BoundsArm>{{1, 1}, {1, 2}}, 10.0);
  state = update_weights(state, {4.0, 2.0});
  const auto w = state.weights();
  EXPECT_NEAR(w[1] / w[0], std::exp(-5.0), 1e-15);
  EXPECT_NEAR(state.probabilities()[0], 1.0 / (1.0 + std::exp(-5.0)), 1e-15);
}

TEST(LearnerState, ScaleInvariantUpdate) {
  Rng rng(53);
  const std::vector<BoundsArm> arms(7, BoundsArm{});
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> u(arms.size());
    for (double& x : u) x = uniform01(rng);
    std::vector<double> scaled = u;
    const double c = onum::testing::uniform(rng, 0.01, 100.0);
    for (double& x : scaled) x *= c;
    LearnerState a(arms, 10.0);
    LearnerState b(arms, 10.0);
    a.update(u);
    b.update(scaled);
    for (std::size_t k = 0; k < arms.size(); ++k) {
      EXPECT_NEAR(a.probabilities()[k], b.probabilities()[k], 1e-12);
    }
  }
}

TEST(LearnerState, SimplexAndLeaderNeverLoses) {
  Rng rng(54);
  const auto grid = build_arm_grid(1.0, 2.0, 5);
  LearnerState state(grid.arms, 10.0);
  for (int episode = 0; episode < 200; ++episode) {
    std::vector<double> u(grid.size());
    for (double& x : u) x = uniform01(rng);
    const auto before = state.probabilities();
    state.update(u);
    const auto& p = state.probabilities();
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    const std::size_t leader = std::max_element(u.begin(), u.end()) - u.begin();
    for (std::size_t k = 0; k < p.size(); ++k) {
      EXPECT_GE(p[k], 0.0);
      EXPECT_GE(p[leader] / before[leader], p[k] / before[k] * (1.0 - 1e-12));
    }
  }
}

TEST(LearnerState, ZeroEpisodeIsSkipped) {
  LearnerState state(std::vector<BoundsArm>{{1, 1}, {1, 2}}, 10.0);
  state.update({2.0, 1.0});
  const auto before = state.probabilities();
  state.update({0.0, 0.0});
  EXPECT_EQ(state.probabilities(), before);
  EXPECT_EQ(state.skipped(), std::vector<std::size_t>{1});
  EXPECT_EQ(state.episode(), 2u);
  EXPECT_THROW(state.update({1.0}), std::invalid_argument);
}

TEST(LearnerState, RejectsBadConstruction) {
  EXPECT_THROW(LearnerState(std::vector<BoundsArm>{}, 10.0), std::invalid_argument);
  EXPECT_THROW(LearnerState(std::vector<BoundsArm>{{1, 1}}, 0.0), std::invalid_argument);
}

TEST(RunAdaptive, SingleArmPlaysPlainOnline) {
  const auto episodes = stationary_episodes(55, 5);
  ArmGrid grid;
  grid.arms = {{1.0, 4.0}};
  const auto result = run_adaptive(episodes, grid, 10.0, 7, 1);
  const auto vf = make_value_function(1.0, 4.0);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    EXPECT_EQ(result.chosen[e], 0u);
    EXPECT_EQ(result.played[e], run_online(episodes[e], vf).total_utility);
  }
}

TEST(RunAdaptive, ReplaysBitIdentically) {
  const auto episodes = stationary_episodes(56, 6);
  const auto grid = build_arm_grid(1.0, 4.0, 4);
  const auto a = run_adaptive(episodes, grid, 10.0, 99, 1);
  const auto b = run_adaptive(episodes, grid, 10.0, 99, 2);
  EXPECT_EQ(a.chosen, b.chosen);
  EXPECT_EQ(a.played, b.played);
  EXPECT_EQ(a.final_probabilities, b.final_probabilities);
  EXPECT_EQ(convergence_csv(a), convergence_csv(b));
}

TEST(RunAdaptive, PermutingArmsKeepsChoices) {
  const auto episodes = stationary_episodes(57, 8);
  const auto grid = build_arm_grid(1.0, 4.0, 4);
  ArmGrid shuffled = grid;
  Rng rng(5);
  std::shuffle(shuffled.arms.begin(), shuffled.arms.end(), rng);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto a = run_adaptive(episodes, grid, 10.0, seed, 1);
    const auto b = run_adaptive(episodes, shuffled, 10.0, seed, 1);
    EXPECT_EQ(a.chosen_arms, b.chosen_arms);
    EXPECT_EQ(a.played, b.played);
  }
}

TEST(RunAdaptive, StationaryEpisodesTrackBestFixedArm) {
  const auto episodes = stationary_episodes(58, 30);
  const auto grid = build_arm_grid(1.0, 4.0, 5);
  const auto result = run_adaptive(episodes, grid, 10.0, 11, 1);
  const auto fixed = best_arm_from_table(result.history, grid.arms);
  const double played =
      std::accumulate(result.played.begin(), result.played.end(), 0.0) / episodes.size();
  EXPECT_GE(played, 0.95 * fixed.mean_utility);
}

TEST(BestFixedArm, SelectionRules) {
  const std::vector<BoundsArm> arms{{2, 3}, {1, 3}, {1, 2}};
  const auto choice = best_arm_from_table<BoundsArm>({{1.0, 2.0, 2.0}, {3.0, 2.0, 2.0}}, arms);
  EXPECT_EQ(choice.arm, (BoundsArm{1, 2}));  // tie at mean 2 goes to the smaller arm
  EXPECT_EQ(choice.index, 2u);
  EXPECT_DOUBLE_EQ(choice.mean_utility, 2.0);
  EXPECT_THROW(best_arm_from_table<BoundsArm>({}, arms), std::invalid_argument);

  const auto single = best_arm_from_table<BoundsArm>({{5.0}}, {{1, 1}});
  EXPECT_EQ(single.arm, (BoundsArm{1, 1}));
}

TEST(BestFixedArm, BeatsOrMatchesIdentityArm) {
  const auto episodes = stationary_episodes(59, 4);
  const auto grid = build_arm_grid(1.0, 4.0, 3);
  const auto choice = best_fixed_arm(episodes, grid, 1);
  const auto identity = std::find(grid.arms.begin(), grid.arms.end(), BoundsArm{1.0, 4.0});
  ASSERT_NE(identity, grid.arms.end());
  EXPECT_GE(choice.mean_utility, choice.means[identity - grid.arms.begin()]);
  EXPECT_EQ(choice.arm, best_fixed_arm(episodes, grid, 2).arm);
}

TEST(ReservationLearner, ZeroArmIsGreedy) {
  const auto episodes = stationary_episodes(60, 4);
  ReservationGrid grid;
  grid.arms = {{0.0, 0.0}};
  const auto result = run_adaptive_reservation(episodes, grid, 4.0, 10.0, 3, 1);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    EXPECT_EQ(result.played[e], run_greedy(episodes[e]).total_utility);
  }
  const auto text = convergence_csv(result);
  EXPECT_EQ(csv::lines(text)[0], "episode,chosen_p,chosen_q,played_utility,best_arm_utility");
}

TEST(ReservationLearner, ConcentratesOnBestArm) {
  const auto episodes = stationary_episodes(61, 30);
  const auto grid = build_reservation_grid(4);
  const auto result = run_adaptive_reservation(episodes, grid, 4.0, 10.0, 3, 1);
  const auto fixed = best_arm_from_table(result.history, grid.arms);
  double mass = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (fixed.means[k] >= 0.95 * fixed.mean_utility) mass += result.final_probabilities[k];
  }
  EXPECT_GT(mass, 0.9);
}
