#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tetra/commands.hpp"
#include "tetra/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tensor-train black-box optimization driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seeds;
  std::string out_dir;
  std::size_t parallel = 0;

  for (const char* name : {"optimize", "compare", "bench-parallel", "cross-test"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seeds, "comma-separated seeds, overrides the config");
    sub->add_option("--out", out_dir, "output directory, overrides the config");
    sub->add_option("--parallel", parallel,
                    "concurrent evaluations; overrides TETRA_PARALLEL and the config")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tetra::kExitConfigError;
  }

  tetra::CliOverrides overrides;
  try {
    if (!seeds.empty()) overrides.seeds = tetra::parse_seed_list(seeds);
  } catch (const tetra::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return tetra::kExitConfigError;
  }
  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (parallel > 0) overrides.parallel = parallel;

  const std::string subcommand = app.get_subcommands().front()->get_name();
  return tetra::run_command(subcommand, config_path, overrides, std::cout, std::cerr);
}
