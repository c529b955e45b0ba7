// qsl: command-line front end for the speed-limit verification library.

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "qsl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quantum speed-limit verification toolkit"};
  app.require_subcommand(1);

  double hbar_value = 1.0;
  auto add_hbar = [&](CLI::App* cmd) {
    return cmd->add_option("--hbar", hbar_value, "Override hbar (default: problem value or 1)")
        ->check(CLI::PositiveNumber);
  };

  std::string problem, out = "-";
  double phi = 0.0;

  auto* sweep = app.add_subcommand("sweep", "Tabulate distances, rates and bounds (CSV)");
  sweep->add_option("--problem", problem, "Problem JSON file")->required();
  sweep->add_option("--out", out, "Output path ('-' for stdout)");
  auto* sweep_hbar = add_hbar(sweep);

  auto* limits = app.add_subcommand("speed-limits", "Speed-limit report (JSON)");
  limits->add_option("--problem", problem, "Problem JSON file")->required();
  limits->add_option("--out", out, "Output path ('-' for stdout)");
  auto* limits_hbar = add_hbar(limits);

  qsl::cli::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Run randomized verification campaigns (JSON)");
  verify->add_option("--instances", verify_opts.instances, "Random instances")
      ->capture_default_str();
  verify->add_option("--dims", verify_opts.dims, "Comma-separated dimensions")
      ->delimiter(',')
      ->check(CLI::Range(2, 64))
      ->capture_default_str();
  verify->add_option("--seed", verify_opts.seed, "Campaign seed")->capture_default_str();
  verify->add_option("--grid", verify_opts.grid, "Theta grid points per instance")
      ->check(CLI::Range(16, 1 << 20))
      ->capture_default_str();
  verify->add_option("--mixed-instances", verify_opts.mixed_instances,
                     "Purified mixed-state instances")
      ->capture_default_str();
  verify->add_option("--threads", verify_opts.threads, "Worker threads")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  verify->add_option("--out", out, "Output path ('-' for stdout)");
  auto* verify_hbar = add_hbar(verify);

  qsl::cli::CounterexampleSource source;
  auto* counter = app.add_subcommand("counterexample",
                                     "Overlap derivative on a log grid from theta = 1e-5 (CSV)");
  auto* counter_problem = counter->add_option("--problem", problem, "Problem JSON file");
  auto* counter_seed =
      counter->add_option("--seed", source.seed, "Random instance seed")->excludes(counter_problem);
  counter->add_option("--dim", source.dim, "Dimension of the random instance")
      ->check(CLI::Range(2, 64))
      ->needs(counter_seed);
  counter->add_option("--grid", source.grid, "Number of log-spaced points")
      ->check(CLI::Range(2, 1 << 20));
  counter->add_option("--out", out, "Output path ('-' for stdout)");
  auto* counter_hbar = add_hbar(counter);

  auto* optimal = app.add_subcommand("optimal", "Optimal state, saturation and speed limits (JSON)");
  optimal->add_option("--problem", problem, "Problem JSON file (only k is used)")->required();
  optimal->add_option("--phi", phi, "Relative phase of the k_max branch");
  optimal->add_option("--out", out, "Output path ('-' for stdout)");
  auto* optimal_hbar = add_hbar(optimal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qsl::cli::exit_input_error;
  }

  const auto hbar_of = [&](CLI::Option* opt) -> std::optional<double> {
    if (opt->count() > 0) return hbar_value;
    return std::nullopt;
  };

  if (sweep->parsed()) return qsl::cli::cmd_sweep(problem, out, hbar_of(sweep_hbar));
  if (limits->parsed()) return qsl::cli::cmd_speed_limits(problem, out, hbar_of(limits_hbar));
  if (verify->parsed()) {
    verify_opts.hbar = hbar_of(verify_hbar);
    return qsl::cli::cmd_verify(verify_opts, out);
  }
  if (counter->parsed()) {
    if (counter_problem->count() > 0) source.problem_path = problem;
    return qsl::cli::cmd_counterexample(source, out, hbar_of(counter_hbar));
  }
  if (optimal->parsed()) return qsl::cli::cmd_optimal(problem, phi, out, hbar_of(optimal_hbar));
  return qsl::cli::exit_input_error;
}
