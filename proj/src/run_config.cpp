#include "tetra/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tetra/error.hpp"
#include "tetra/eval_harness.hpp"

namespace tetra {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) throw ConfigError(join(path, item.key()), "unknown key");
  }
}

double get_real(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

double get_nonneg(const json& v, const std::string& path) {
  const double x = get_real(v, path);
  if (x < 0.0) throw ConfigError(path, "must be >= 0");
  return x;
}

std::uint64_t get_uint(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::size_t get_positive(const json& v, const std::string& path) {
  const std::uint64_t x = get_uint(v, path);
  if (x == 0) throw ConfigError(path, "must be >= 1");
  return static_cast<std::size_t>(x);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_reals(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_real(v[i], at(path, i)));
  return out;
}

LatencyKind get_latency_kind(const json& v, const std::string& path) {
  const std::string s = get_string(v, path);
  if (s == "sleep") return LatencyKind::sleep;
  if (s == "cpu") return LatencyKind::cpu;
  throw ConfigError(path, "expected \"sleep\" or \"cpu\", got \"" + s + "\"");
}

std::vector<Bounds> get_bounds(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty array of [lower, upper]");
  std::vector<Bounds> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = at(path, i);
    if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(p, "expected [lower, upper]");
    const Bounds b{get_real(v[i][0], p + "[0]"), get_real(v[i][1], p + "[1]")};
    if (b.lower > b.upper) throw ConfigError(p, "lower exceeds upper");
    out.push_back(b);
  }
  return out;
}

const std::set<std::string> kObjectiveNames{"mixer", "quadratic", "rosenbrock", "rastrigin",
                                            "ackley", "constant"};

ObjectiveSpec parse_objective(const json& j, const std::string& path) {
  reject_unknown(j, path, {"name", "dimension", "bounds", "center", "value", "latency_s",
                           "latency_kind", "failure_rate"});
  ObjectiveSpec spec;
  if (!j.contains("name")) throw ConfigError(join(path, "name"), "missing required field");
  spec.name = get_string(j["name"], join(path, "name"));
  if (!kObjectiveNames.contains(spec.name)) {
    throw ConfigError(join(path, "name"), "unknown objective \"" + spec.name + "\"");
  }
  if (j.contains("bounds")) {
    spec.bounds = get_bounds(j["bounds"], join(path, "bounds"));
  } else if (spec.name == "mixer") {
    spec.bounds = mixer_bounds();
  } else {
    throw ConfigError(join(path, "bounds"), "missing required field");
  }
  if (spec.name == "mixer" && spec.bounds.size() != 4) {
    throw ConfigError(join(path, "bounds"), "mixer takes 4 parameters");
  }
  if (j.contains("dimension")) {
    const std::size_t d = get_positive(j["dimension"], join(path, "dimension"));
    if (d != spec.bounds.size()) {
      throw ConfigError(join(path, "dimension"), "does not match the number of bounds (" +
                                                     std::to_string(spec.bounds.size()) + ")");
    }
  }
  if (j.contains("center")) {
    if (spec.name != "quadratic") throw ConfigError(join(path, "center"), "only valid for quadratic");
    spec.center = get_reals(j["center"], join(path, "center"));
    if (spec.center.size() != spec.bounds.size()) {
      throw ConfigError(join(path, "center"), "length differs from the number of bounds");
    }
  }
  if (j.contains("value")) {
    if (spec.name != "constant") throw ConfigError(join(path, "value"), "only valid for constant");
    spec.value = get_real(j["value"], join(path, "value"));
  }
  if (j.contains("latency_s")) spec.latency_s = get_nonneg(j["latency_s"], join(path, "latency_s"));
  if (j.contains("latency_kind")) {
    spec.latency_kind = get_latency_kind(j["latency_kind"], join(path, "latency_kind"));
  }
  if (j.contains("failure_rate")) {
    spec.failure_rate = get_nonneg(j["failure_rate"], join(path, "failure_rate"));
    if (spec.failure_rate > 1.0) throw ConfigError(join(path, "failure_rate"), "must be <= 1");
  }
  return spec;
}

OptimizerSpec parse_optimizer(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains("name")) throw ConfigError(join(path, "name"), "missing required field");
  const std::string name = get_string(j["name"], join(path, "name"));
  OptimizerSpec spec;
  if (name == "tetraopt") {
    reject_unknown(j, path, {"name", "points_per_dim", "rank", "iterations"});
    spec.kind = OptimizerKind::tetraopt;
    if (j.contains("points_per_dim")) {
      const json& p = j["points_per_dim"];
      const std::string pp = join(path, "points_per_dim");
      spec.points_per_dim.clear();
      if (p.is_array()) {
        if (p.empty()) throw ConfigError(pp, "expected a nonempty array");
        for (std::size_t i = 0; i < p.size(); ++i) spec.points_per_dim.push_back(get_positive(p[i], at(pp, i)));
      } else {
        spec.points_per_dim.push_back(get_positive(p, pp));
      }
    }
    if (j.contains("rank")) spec.rank = get_positive(j["rank"], join(path, "rank"));
    if (j.contains("iterations")) spec.iterations = get_positive(j["iterations"], join(path, "iterations"));
  } else if (name == "bayes") {
    reject_unknown(j, path, {"name", "n_initial", "n_iterations", "kappa", "kernel",
                             "length_scale", "noise_variance"});
    spec.kind = OptimizerKind::bayes;
    if (j.contains("n_initial")) spec.n_initial = get_positive(j["n_initial"], join(path, "n_initial"));
    if (j.contains("n_iterations")) {
      spec.n_iterations = static_cast<std::size_t>(get_uint(j["n_iterations"], join(path, "n_iterations")));
    }
    if (j.contains("kappa")) spec.kappa = get_nonneg(j["kappa"], join(path, "kappa"));
    if (j.contains("kernel")) {
      const std::string k = get_string(j["kernel"], join(path, "kernel"));
      if (k == "matern52") {
        spec.kernel = KernelKind::matern52;
      } else if (k == "squared_exponential") {
        spec.kernel = KernelKind::squared_exponential;
      } else {
        throw ConfigError(join(path, "kernel"), "expected \"matern52\" or \"squared_exponential\"");
      }
    }
    if (j.contains("length_scale")) {
      spec.length_scale = get_real(j["length_scale"], join(path, "length_scale"));
      if (spec.length_scale <= 0.0) throw ConfigError(join(path, "length_scale"), "must be > 0");
    }
    if (j.contains("noise_variance")) {
      spec.noise_variance = get_nonneg(j["noise_variance"], join(path, "noise_variance"));
    }
  } else {
    throw ConfigError(join(path, "name"), "expected \"tetraopt\" or \"bayes\", got \"" + name + "\"");
  }
  return spec;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::tetraopt ? "tetraopt" : "bayes";
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    // The reported byte is one past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError("", "syntax error at line " + std::to_string(line_of(text, byte)) + ": " +
                              e.what());
  }
  reject_unknown(j, "", {"objective", "optimizer", "optimizers", "seeds", "parallel", "output",
                         "bench", "cross"});
  RunConfig cfg;
  if (j.contains("objective")) cfg.objective = parse_objective(j["objective"], "objective");
  if (j.contains("optimizer") && j.contains("optimizers")) {
    throw ConfigError("optimizers", "give either optimizer or optimizers, not both");
  }
  if (j.contains("optimizer")) cfg.optimizers.push_back(parse_optimizer(j["optimizer"], "optimizer"));
  if (j.contains("optimizers")) {
    const json& list = j["optimizers"];
    if (!list.is_array() || list.empty()) throw ConfigError("optimizers", "expected a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.optimizers.push_back(parse_optimizer(list[i], at("optimizers", i)));
    }
  }
  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    if (!s.is_array() || s.empty()) throw ConfigError("seeds", "expected a nonempty array of integers");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) cfg.seeds.push_back(get_uint(s[i], at("seeds", i)));
  }
  if (j.contains("parallel")) cfg.parallel = get_positive(j["parallel"], "parallel");
  if (j.contains("output")) cfg.output = get_string(j["output"], "output");
  if (j.contains("bench")) {
    const json& b = j["bench"];
    reject_unknown(b, "bench", {"batch_size", "levels", "latency_s", "latency_kind"});
    if (b.contains("batch_size")) cfg.bench.batch_size = get_positive(b["batch_size"], "bench.batch_size");
    if (b.contains("levels")) {
      const json& l = b["levels"];
      if (!l.is_array() || l.empty()) throw ConfigError("bench.levels", "expected a nonempty array");
      for (std::size_t i = 0; i < l.size(); ++i) {
        cfg.bench.levels.push_back(get_positive(l[i], at("bench.levels", i)));
      }
    }
    if (b.contains("latency_s")) cfg.bench.latency_s = get_nonneg(b["latency_s"], "bench.latency_s");
    if (b.contains("latency_kind")) {
      cfg.bench.latency_kind = get_latency_kind(b["latency_kind"], "bench.latency_kind");
    }
  }
  if (j.contains("cross")) {
    const json& c = j["cross"];
    reject_unknown(c, "cross", {"shape", "rank", "cross_rank", "sweeps", "probes"});
    if (c.contains("shape")) {
      const json& s = c["shape"];
      if (!s.is_array() || s.empty()) throw ConfigError("cross.shape", "expected a nonempty array");
      cfg.cross.shape.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        cfg.cross.shape.push_back(get_positive(s[i], at("cross.shape", i)));
      }
    }
    if (c.contains("rank")) cfg.cross.rank = get_positive(c["rank"], "cross.rank");
    if (c.contains("cross_rank")) cfg.cross.cross_rank = get_positive(c["cross_rank"], "cross.cross_rank");
    if (c.contains("sweeps")) cfg.cross.sweeps = get_positive(c["sweeps"], "cross.sweeps");
    if (c.contains("probes")) cfg.cross.probes = get_positive(c["probes"], "cross.probes");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

BlackBoxObjective make_objective(const ObjectiveSpec& spec, std::uint64_t seed) {
  BlackBoxObjective obj;
  const std::size_t d = spec.bounds.size();
  if (spec.name == "mixer") {
    obj = mixer_objective();
    obj.bounds = spec.bounds;
  } else if (spec.name == "quadratic") {
    obj = quadratic_objective(spec.center.empty() ? std::vector<double>(d, 0.3) : spec.center,
                              spec.bounds);
  } else if (spec.name == "constant") {
    obj = constant_objective(spec.value, spec.bounds);
  } else {
    obj = benchmark(spec.name, d);
    obj.bounds = spec.bounds;
  }
  if (spec.failure_rate > 0.0) obj = with_random_failures(std::move(obj), spec.failure_rate, seed);
  if (spec.latency_s > 0.0) obj = with_latency(std::move(obj), spec.latency_s, spec.latency_kind);
  return obj;
}

std::size_t resolve_parallelism(std::optional<std::size_t> flag, const char* env_value,
                                std::optional<std::size_t> config) {
  if (flag) {
    if (*flag == 0) throw ConfigError("--parallel", "must be >= 1");
    return *flag;
  }
  if (env_value != nullptr && *env_value != '\0') {
    const std::string s(env_value);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
      throw ConfigError("TETRA_PARALLEL", "expected a positive integer, got \"" + s + "\"");
    }
    return v;
  }
  if (config) return *config;
  return default_parallelism();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("--seed", "expected comma-separated non-negative integers, got \"" + text + "\"");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace tetra
