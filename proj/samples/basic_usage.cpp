// A small tour: price one link, allocate a few arrivals online, compare
// with the offline optimum and the greedy baseline.

#include <cmath>
#include <cstdio>

#include "onum/allocator.hpp"
#include "onum/baselines.hpp"
#include "onum/oracle.hpp"

int main() {
  using namespace onum;

  const ValueFunction vf = make_value_function(1.0, std::exp(1.0));
  std::printf("alpha=%.3f beta=%.3f phi(0.75)=%.4f\n", vf.alpha(), vf.beta(), vf(0.75));

  const Instance inst(Network(2), {
                                      {UtilityFunction::log(2.0, 1.0), {0}, 0.6},
                                      {UtilityFunction::log(2.5, 2.0), {0, 1}, 0.8},
                                      {UtilityFunction::linear(2.0), {1}, 0.5},
                                  });

  const RunResult online = run_online(inst, vf);
  for (std::size_t i = 0; i < inst.size(); ++i) {
    std::printf("arrival %zu: y=%.4f utility=%.4f\n", i, online.decisions[i],
                online.per_arrival_utilities[i]);
  }
  const OfflineSolution offline = solve_offline_dual(inst);
  std::printf("online %.4f  greedy %.4f  offline %.4f (dual bound %.4f)\n", online.total_utility,
              run_greedy(inst).total_utility, offline.primal, offline.dual);
  return 0;
}
