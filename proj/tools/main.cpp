#include "clg/config.hpp"
#include "clg/parallel.hpp"
#include "clg/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Cauchy-Lagrangian time-Taylor solver for incompressible Euler flow"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  std::string config_path;
  std::string out_override;
  double oracle_t = 0;

  CLI::App* cmd_run = app.add_subcommand("run", "run a simulation from a JSON config");
  cmd_run->add_option("config", config_path, "config file")->required();
  cmd_run->add_option("--out", out_override, "override the output directory");
  cmd_run->fallthrough();

  CLI::App* cmd_weights =
      app.add_subcommand("check-weights", "verify the configured weight class");
  cmd_weights->add_option("config", config_path, "config file")->required();
  cmd_weights->fallthrough();

  CLI::App* cmd_radius =
      app.add_subcommand("radius", "report practical and cubic-bound convergence radii");
  cmd_radius->add_option("config", config_path, "config file")->required();
  cmd_radius->add_option("--out", out_override, "override the output directory");
  cmd_radius->fallthrough();

  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "integrate reference trajectories for a steady preset");
  cmd_oracle->add_option("config", config_path, "config file")->required();
  cmd_oracle->add_option("--t", oracle_t, "target time")->required();
  cmd_oracle->add_option("--out", out_override, "override the output directory");
  cmd_oracle->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? clg::kExitOk : clg::kExitConfig;
  }

  if (threads > 0) clg::set_num_threads(threads);

  clg::SimulationConfig cfg;
  try {
    cfg = clg::load_config(config_path);
  } catch (const clg::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return clg::kExitConfig;
  }
  if (!out_override.empty()) cfg.output_dir = out_override;

  if (cmd_run->parsed()) return clg::run_simulation(cfg);
  if (cmd_weights->parsed()) return clg::run_check_weights(cfg);
  if (cmd_radius->parsed()) return clg::run_radius(cfg);
  if (cmd_oracle->parsed()) return clg::run_oracle(cfg, oracle_t);
  return clg::kExitConfig;
}
