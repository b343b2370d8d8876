#include "tetra/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

#include "tetra/bayes_opt.hpp"
#include "tetra/error.hpp"
#include "tetra/eval_harness.hpp"
#include "tetra/power_method.hpp"
#include "tetra/search_grid.hpp"
#include "tetra/tetraopt.hpp"
#include "tetra/tt_cross.hpp"

namespace tetra {
namespace {

using nlohmann::json;

constexpr std::size_t kEnvelopePoints = 50;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os = open_output(path);
  os << j.dump(2) << "\n";
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const ObjectiveSpec& require_objective(const RunConfig& cfg) {
  if (!cfg.objective) throw ConfigError("objective", "missing required field");
  return *cfg.objective;
}

std::vector<std::string> parameter_names(const ObjectiveSpec& spec) {
  if (spec.name == "mixer") return mixer_parameter_names();
  return {};
}

SearchGrid make_grid(const OptimizerSpec& opt, const std::vector<Bounds>& bounds) {
  const std::size_t d = bounds.size();
  std::vector<std::size_t> points = opt.points_per_dim;
  if (points.size() == 1) points.assign(d, points.front());
  if (points.size() != d) {
    throw ConfigError("optimizer.points_per_dim", "has " + std::to_string(points.size()) +
                                                      " entries for " + std::to_string(d) +
                                                      " parameters");
  }
  std::vector<GridDim> dims;
  for (std::size_t k = 0; k < d; ++k) {
    if (points[k] == 1 && bounds[k].lower != bounds[k].upper) {
      throw ConfigError("optimizer.points_per_dim",
                        "a single grid point needs lower == upper in dimension " + std::to_string(k));
    }
    dims.push_back({bounds[k].lower, bounds[k].upper, points[k]});
  }
  return SearchGrid(std::move(dims));
}

json run_summary(const OptimizerRun& run) {
  return {{"optimizer", run.optimizer},
          {"seed", run.seed},
          {"best_value", finite_or_null(run.trace.best_value())},
          {"best_point", run.trace.best_point()},
          {"calls", run.trace.total_calls},
          {"failures", run.failures},
          {"runtime_s", run.trace.total_runtime_s}};
}

}  // namespace

OptimizerRun run_optimizer(const OptimizerSpec& optimizer, const ObjectiveSpec& objective,
                           std::uint64_t seed, std::size_t parallel) {
  const BlackBoxObjective obj = make_objective(objective, seed);
  OptimizerRun run;
  run.optimizer = optimizer_name(optimizer.kind);
  run.seed = seed;
  if (optimizer.kind == OptimizerKind::tetraopt) {
    TetraOptConfig cfg;
    cfg.grid = make_grid(optimizer, objective.bounds);
    cfg.rank = optimizer.rank;
    cfg.iterations = optimizer.iterations;
    cfg.seed = seed;
    cfg.max_parallel = parallel;
    TetraOptResult r = tetraopt_minimize(obj, cfg);
    run.trace = std::move(r.trace);
    run.failures = r.failures;
  } else {
    BayesConfig cfg;
    cfg.n_initial = optimizer.n_initial;
    cfg.n_iterations = optimizer.n_iterations;
    cfg.kappa = optimizer.kappa;
    cfg.bounds = objective.bounds;
    cfg.seed = seed;
    cfg.kernel = Kernel{optimizer.kernel, optimizer.length_scale, 1.0};
    cfg.noise_variance = optimizer.noise_variance;
    BayesResult r = bayes_minimize(obj, cfg);
    run.trace = std::move(r.trace);
    run.failures = static_cast<std::size_t>(
        std::count_if(r.observations.begin(), r.observations.end(),
                      [](const BayesObservation& o) { return o.failed; }));
  }
  return run;
}

json cmd_optimize(const CommandContext& ctx) {
  const ObjectiveSpec& objective = require_objective(ctx.config);
  if (ctx.config.optimizers.empty()) throw ConfigError("optimizer", "missing required field");
  TraceCsvOptions csv;
  csv.parameter_names = parameter_names(objective);

  json summary = {{"objective", objective.name}, {"optimizers", json::array()}};
  for (const OptimizerSpec& opt : ctx.config.optimizers) {
    json runs = json::array();
    std::vector<double> finals;
    std::vector<double> calls;
    for (std::uint64_t seed : ctx.config.seeds) {
      const OptimizerRun run = run_optimizer(opt, objective, seed, ctx.parallel);
      std::ofstream os = open_output(ctx.out_dir / (run.optimizer + "_seed" + std::to_string(seed) + ".csv"));
      write_trace_csv(os, run.trace, csv);
      finals.push_back(run.trace.best_value());
      calls.push_back(static_cast<double>(run.trace.total_calls));
      runs.push_back(run_summary(run));
    }
    const auto best_it = std::min_element(finals.begin(), finals.end());
    summary["optimizers"].push_back(
        {{"optimizer", optimizer_name(opt.kind)},
         {"median_best_value", finite_or_null(median(finals))},
         {"best_value", finite_or_null(*best_it)},
         {"best_point", runs[static_cast<std::size_t>(best_it - finals.begin())]["best_point"]},
         {"median_calls", median(calls)},
         {"runs", runs}});
  }
  write_json(ctx.out_dir / "summary.json", summary);
  return summary;
}

json cmd_compare(const CommandContext& ctx) {
  const ObjectiveSpec& objective = require_objective(ctx.config);
  if (ctx.config.optimizers.size() != 2) {
    throw ConfigError("optimizers", "compare needs exactly two optimizers");
  }
  std::vector<std::vector<OptimizerRun>> runs(2);
  for (std::size_t o = 0; o < 2; ++o) {
    for (std::uint64_t seed : ctx.config.seeds) {
      runs[o].push_back(run_optimizer(ctx.config.optimizers[o], objective, seed, ctx.parallel));
    }
  }

  std::ofstream csv = open_output(ctx.out_dir / "compare.csv");
  csv.precision(17);
  csv << "optimizer,seed,wall_time_s,calls,best_value\n";
  double horizon = 0.0;
  for (const auto& group : runs) {
    for (const OptimizerRun& run : group) {
      horizon = std::max(horizon, run.trace.total_runtime_s);
      for (const TraceEvent& e : run.trace.events) {
        csv << run.optimizer << ',' << run.seed << ',' << e.wall_time_s << ',' << e.calls << ','
            << e.best_value << '\n';
      }
    }
  }

  std::ofstream env = open_output(ctx.out_dir / "envelope.csv");
  env.precision(17);
  env << "optimizer,wall_time_s,median,best,worst\n";
  for (const auto& group : runs) {
    for (std::size_t k = 1; k <= kEnvelopePoints; ++k) {
      const double t = horizon * static_cast<double>(k) / static_cast<double>(kEnvelopePoints);
      std::vector<double> at_t;
      for (const OptimizerRun& run : group) at_t.push_back(run.trace.best_value_at(t));
      env << group.front().optimizer << ',' << t << ',' << median(at_t) << ','
          << *std::min_element(at_t.begin(), at_t.end()) << ','
          << *std::max_element(at_t.begin(), at_t.end()) << '\n';
    }
  }

  // Equal wall-clock budget: the smaller of the two median run times.
  std::vector<double> median_runtime(2);
  for (std::size_t o = 0; o < 2; ++o) {
    std::vector<double> t;
    for (const OptimizerRun& run : runs[o]) t.push_back(run.trace.total_runtime_s);
    median_runtime[o] = median(t);
  }
  const double budget = std::min(median_runtime[0], median_runtime[1]);

  json summary = {{"objective", objective.name}, {"budget_s", budget}, {"optimizers", json::array()}};
  std::vector<double> medians(2);
  for (std::size_t o = 0; o < 2; ++o) {
    std::vector<double> finals;
    std::vector<double> at_budget;
    for (const OptimizerRun& run : runs[o]) {
      finals.push_back(run.trace.best_value());
      at_budget.push_back(run.trace.best_value_at(budget));
    }
    medians[o] = median(finals);
    summary["optimizers"].push_back(
        {{"optimizer", runs[o].front().optimizer},
         {"median_best_value", finite_or_null(medians[o])},
         {"best_best_value", finite_or_null(*std::min_element(finals.begin(), finals.end()))},
         {"worst_best_value", finite_or_null(*std::max_element(finals.begin(), finals.end()))},
         {"median_best_value_at_budget", finite_or_null(median(at_budget))},
         {"median_runtime_s", median_runtime[o]}});
  }
  const std::string a = runs[0].front().optimizer;
  const std::string b = runs[1].front().optimizer;
  summary["median_ratio"] = medians[0] != 0.0 ? finite_or_null(medians[1] / medians[0]) : json(nullptr);
  summary["median_ratio_definition"] = "median best of " + b + " / median best of " + a;
  write_json(ctx.out_dir / "compare_summary.json", summary);
  return summary;
}

json cmd_bench_parallel(const CommandContext& ctx) {
  const BenchSpec& bench = ctx.config.bench;
  BlackBoxObjective base = ctx.config.objective ? make_objective(*ctx.config.objective)
                                                : mixer_objective();
  const BlackBoxObjective obj = with_latency(std::move(base), bench.latency_s, bench.latency_kind);
  std::vector<std::size_t> levels = bench.levels;
  if (levels.empty()) {
    const std::size_t top = 4 * default_parallelism();
    for (std::size_t p = 1; p < top; p *= 2) levels.push_back(p);
    levels.push_back(top);
  }
  const std::vector<ScalingRow> rows = parallel_scaling_report(obj, bench.batch_size, levels);
  std::ofstream os = open_output(ctx.out_dir / "scaling.csv");
  write_scaling_csv(os, rows);
  json table = json::array();
  for (const ScalingRow& r : rows) {
    table.push_back({{"parallelism", r.parallelism},
                     {"effective_time_per_eval_s", r.effective_time_per_eval_s}});
  }
  return {{"batch_size", bench.batch_size}, {"latency_s", bench.latency_s}, {"rows", table}};
}

json cmd_cross_test(const CommandContext& ctx) {
  const CrossTestSpec& spec = ctx.config.cross;
  const std::size_t cross_rank = spec.cross_rank.value_or(spec.rank);
  const std::size_t d = spec.shape.size();
  const std::size_t n = *std::max_element(spec.shape.begin(), spec.shape.end());
  const std::size_t budget = 2 * spec.sweeps * d * n * cross_rank * cross_rank;

  std::ofstream csv = open_output(ctx.out_dir / "cross_test.csv");
  csv.precision(17);
  csv << "seed,rel_error,max_abs_error,unique_calls,budget,within_budget,sample_max,power_max\n";
  json rows = json::array();
  double worst_rel = 0.0;
  bool all_within = true;
  for (std::uint64_t seed : ctx.config.seeds) {
    const TensorTrain truth = random_tensor_train(spec.shape, spec.rank, seed);
    const BatchOracle oracle = [&](std::span<const MultiIndex> indices) {
      std::vector<double> v;
      v.reserve(indices.size());
      for (const MultiIndex& idx : indices) v.push_back(tt_eval(truth, idx));
      return v;
    };
    CrossOptions opts;
    opts.rank = cross_rank;
    opts.sweeps = spec.sweeps;
    opts.seed = seed;
    const CrossResult cr = tt_cross(oracle, spec.shape, opts);

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    double err2 = 0.0;
    double ref2 = 0.0;
    double max_abs = 0.0;
    MultiIndex idx(d);
    for (std::size_t p = 0; p < spec.probes; ++p) {
      for (std::size_t k = 0; k < d; ++k) {
        idx[k] = std::uniform_int_distribution<std::size_t>(0, spec.shape[k] - 1)(rng);
      }
      const double t = tt_eval(truth, idx);
      const double e = tt_eval(cr.tt, idx) - t;
      err2 += e * e;
      ref2 += t * t;
      max_abs = std::max(max_abs, std::abs(e));
    }
    const double rel = ref2 > 0.0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);
    const std::size_t calls = cr.log.unique_count();
    const bool within = calls <= budget;

    double sample_max = -std::numeric_limits<double>::infinity();
    for (const SampleRecord& r : cr.log.entries) sample_max = std::max(sample_max, r.value);
    PowerConfig pc;
    pc.seed = seed;
    const double power_max = tt_power_argmax(cr.tt, pc).value;

    worst_rel = std::max(worst_rel, rel);
    all_within = all_within && within;
    csv << seed << ',' << rel << ',' << max_abs << ',' << calls << ',' << budget << ','
        << (within ? 1 : 0) << ',' << sample_max << ',' << power_max << '\n';
    rows.push_back({{"seed", seed},
                    {"rel_error", rel},
                    {"max_abs_error", max_abs},
                    {"unique_calls", calls},
                    {"within_budget", within},
                    {"sample_max", sample_max},
                    {"power_max", power_max}});
  }
  json summary = {{"shape", spec.shape},     {"rank", spec.rank},
                  {"cross_rank", cross_rank}, {"sweeps", spec.sweeps},
                  {"budget", budget},         {"max_rel_error", worst_rel},
                  {"all_within_budget", all_within}, {"runs", rows}};
  write_json(ctx.out_dir / "cross_test_summary.json", summary);
  return summary;
}

int run_command(const std::string& subcommand, const std::string& config_path,
                const CliOverrides& overrides, std::ostream& out, std::ostream& err) {
  try {
    CommandContext ctx;
    ctx.config = load_run_config(config_path);
    if (overrides.seeds) ctx.config.seeds = *overrides.seeds;
    ctx.parallel = resolve_parallelism(overrides.parallel, std::getenv("TETRA_PARALLEL"),
                                       ctx.config.parallel);
    ctx.out_dir = overrides.out_dir.value_or(ctx.config.output);

    json summary;
    if (subcommand == "optimize") {
      summary = cmd_optimize(ctx);
    } else if (subcommand == "compare") {
      summary = cmd_compare(ctx);
    } else if (subcommand == "bench-parallel") {
      summary = cmd_bench_parallel(ctx);
    } else if (subcommand == "cross-test") {
      summary = cmd_cross_test(ctx);
    } else {
      err << "error: unknown subcommand " << subcommand << "\n";
      return kExitConfigError;
    }
    summary["parallel"] = ctx.parallel;
    out << summary.dump(2) << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace tetra
