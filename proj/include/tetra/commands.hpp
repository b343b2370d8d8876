#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tetra/run_config.hpp"
#include "tetra/trace.hpp"

namespace tetra {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

struct CommandContext {
  RunConfig config;
  std::size_t parallel = 1;
  std::filesystem::path out_dir;
};

struct OptimizerRun {
  std::string optimizer;
  std::uint64_t seed = 0;
  OptimizationTrace trace;
  std::size_t failures = 0;
};

/// One optimizer run on the configured objective. Throws ConfigError for
/// settings that do not fit the objective (e.g. a grid length mismatch).
OptimizerRun run_optimizer(const OptimizerSpec& optimizer, const ObjectiveSpec& objective,
                           std::uint64_t seed, std::size_t parallel);

/// Writes <optimizer>_seed<k>.csv per run and summary.json; returns the summary.
nlohmann::json cmd_optimize(const CommandContext& ctx);

/// Needs exactly two optimizers. Writes compare.csv (one row per trace event:
/// optimizer,seed,wall_time_s,calls,best_value), envelope.csv
/// (optimizer,wall_time_s,median,best,worst) and compare_summary.json.
nlohmann::json cmd_compare(const CommandContext& ctx);

/// Writes scaling.csv (parallelism,effective_time_per_eval_s).
nlohmann::json cmd_bench_parallel(const CommandContext& ctx);

/// Recovers seeded random trains by cross approximation. Writes
/// cross_test.csv (seed,rel_error,max_abs_error,unique_calls,budget,
/// within_budget,sample_max,power_max) and cross_test_summary.json.
nlohmann::json cmd_cross_test(const CommandContext& ctx);

struct CliOverrides {
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> parallel;
};

/// Loads the config, applies overrides and runs `subcommand`
/// (optimize | compare | bench-parallel | cross-test). Prints the summary
/// JSON to `out` and diagnostics to `err`; returns an exit code.
int run_command(const std::string& subcommand, const std::string& config_path,
                const CliOverrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace tetra
