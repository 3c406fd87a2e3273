// nashpde: Nash equilibria of distributed-control games for the 1-D heat equation.

#include "nashpde/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibria of N-player distributed-control games for the heat equation"};
  app.set_version_flag("--version", nashpde::tool_version());
  app.require_subcommand(1);

  nashpde::CliOptions options;
  options.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string solver;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", options.config, "Problem configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--solver", solver, "Krylov solver")->check(CLI::IsMember({"cg", "gmres"}));
    sub->add_option("--rtol", options.rtol, "Relative residual tolerance")->capture_default_str();
    sub->add_option("--seed", options.seed, "Seed for random probes")->capture_default_str();
    sub->add_option("--threads", options.threads, "Worker threads for per-player adjoint solves");
    sub->add_flag("--paper-literal", options.literal_coefficients,
                  "Use the literal printed coefficients for the cooperative functionals");
    sub->add_option("--out", options.out, "Output directory")->capture_default_str();
    sub->add_option("--max-pairs", options.max_pairs, "Number of (j,p) functionals to certify")->capture_default_str();
    sub->add_flag("--check-manifest", options.check_manifest, "Verify the config hash against <out>/manifest.json");
  };

  auto* solve = app.add_subcommand("solve", "Solve for the Nash equilibrium");
  auto* verify = app.add_subcommand("verify", "Run the certification suite");
  auto* oracle = app.add_subcommand("oracle", "Dense ground truth at small scale");
  add_common(solve);
  add_common(verify);
  add_common(oracle);
  oracle->add_flag("--dump-dense", options.dump_dense, "Write dense_A.csv and dense_b.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nashpde::kExitConfig;
  }
  if (!solver.empty()) options.solver = solver;

  const std::string command = app.get_subcommands().front()->get_name();
  return nashpde::run_command(command, options, std::cout);
}
