// onum: command-line front end for the experiment commands.

#include <CLI11.hpp>

#include <iostream>

#include "onum/experiment.hpp"

int main(int argc, char** argv) {
  onum::ExperimentConfig cfg;
  CLI::App app{"Online network utility maximization experiments"};
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.fallthrough();
  app.require_subcommand(1);

  std::uint64_t synthetic = 0;
  app.add_option("--seed", cfg.seed, "Master seed");
  app.add_option("--out-dir", cfg.out_dir, "Directory for output CSVs");
  app.add_option("--trace-traffic", cfg.trace_traffic, "Traffic matrix CSV (slots x pairs)");
  app.add_option("--trace-routing", cfg.trace_routing, "Routing matrix CSV (pairs x links)");
  auto* synthetic_opt =
      app.add_option("--synthetic", synthetic, "Seed for the synthetic Abilene-shaped network");
  app.add_option("--instance", cfg.instance, "Saved instance CSV to replay (run)");

  app.add_option("--m", cfg.m, "Lower marginal bound m");
  app.add_option("--M", cfg.M, "Upper marginal bound M");
  app.add_option("--algorithm", cfg.algorithm, "oa, greedy or reservation (run)");
  app.add_option("--reserve", cfg.reserve, "Reservation share p");
  app.add_option("--threshold", cfg.threshold, "Reservation cutoff q (as a fraction of M)");

  app.add_option("--axis", cfg.axis, "Sweep axis: mean or variance (compare)");
  app.add_option("--axis-min", cfg.axis_min, "Sweep start");
  app.add_option("--axis-max", cfg.axis_max, "Sweep end");
  app.add_option("--axis-points", cfg.axis_points, "Number of sweep points");
  app.add_option("--mean", cfg.mean, "Coefficient mean when not swept (default (m+M)/2)");
  app.add_option("--variance", cfg.variance, "Coefficient variance when not swept");
  app.add_option("--drift", cfg.drift, "none, increasing or decreasing");
  app.add_option("--replications", cfg.replications, "Replications per sweep point");
  app.add_option("--rate-scale", cfg.rate_scale, "Expected arrivals per slot");
  app.add_option("--slot-begin", cfg.slot_begin, "First traffic slot (run, compare)");
  app.add_option("--slot-end", cfg.slot_end, "One past the last traffic slot (run, compare)");

  app.add_option("--episodes", cfg.episodes, "Learner episodes (adapt)");
  app.add_option("--training-episodes", cfg.training_episodes,
                 "Episodes for the offline best-fixed search, 0 to skip (adapt)");
  app.add_option("--eta", cfg.eta, "Learning rate");
  app.add_option("--grid-steps", cfg.grid_steps, "Arm grid resolution");
  app.add_option("--adapt-reservation", cfg.adapt_reservation,
                 "Also tune the reservation baseline (adapt)");

  app.add_option("--links", cfg.links, "Link counts (worstcase)")->delimiter(',');
  app.add_option("--t", cfg.t, "Group sizes t1 = t2 (worstcase)");
  app.add_option("--eps", cfg.eps, "Slope spread, 0 for 1/t (worstcase)");

  app.add_flag("--inject-half-alpha", cfg.inject_half_alpha,
               "Check value functions with a halved alpha (validate)");
  app.add_option("--threads", cfg.threads, "Worker threads, 0 for all cores");

  auto* run = app.add_subcommand("run", "One algorithm on one instance");
  auto* compare = app.add_subcommand("compare", "Sweep an axis and compare algorithms");
  auto* adapt = app.add_subcommand("adapt", "Exponential-weights parameter tuning");
  auto* worstcase = app.add_subcommand("worstcase", "Worst-case ratio table");
  auto* validate = app.add_subcommand("validate", "Run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return onum::kExitIo;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return onum::kExitConfig;
  }
  if (synthetic_opt->count() > 0) cfg.synthetic = synthetic;

  return onum::dispatch(
      [&]() -> int {
        if (run->parsed()) return onum::cmd_run(cfg, std::cout);
        if (compare->parsed()) return onum::cmd_compare(cfg, std::cout);
        if (adapt->parsed()) return onum::cmd_adapt(cfg, std::cout);
        if (worstcase->parsed()) return onum::cmd_worstcase(cfg, std::cout);
        if (validate->parsed()) return onum::cmd_validate(cfg, std::cout);
        return onum::kExitConfig;
      },
      std::cerr);
}
