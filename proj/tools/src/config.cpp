#include "carpetlab_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "carpetlab/errors.hpp"

namespace carpetlab::cli {
namespace {

void check_keys(const Json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw ConfigError(where + " needs field '" + std::string(key) + "'");
  }
  return j.at(key);
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(where + " out of range");
  }
  return static_cast<int>(v);
}

std::vector<Scalar> scalar_list(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a nonempty list");
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(scalar_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// 1-based digit tuples to 0-based digits.
std::vector<Digit> digit_list(const Json& j, int dim) {
  if (!j.is_array() || j.empty()) throw ConfigError("system.digits must be a nonempty list");
  std::vector<Digit> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "system.digits[" + std::to_string(i) + "]";
    Digit d{0, 0, 0};
    if (dim == 1 && j[i].is_number_integer()) {
      d[0] = as_int(j[i], where) - 1;
    } else {
      if (!j[i].is_array() || static_cast<int>(j[i].size()) != dim) {
        throw ConfigError(where + " must list " + std::to_string(dim) + " indices");
      }
      for (int k = 0; k < dim; ++k) d[k] = as_int(j[i][k], where) - 1;
    }
    out.push_back(d);
  }
  return out;
}

std::vector<Scalar> equal(int p) {
  if (p < 2) throw ConfigError("subdivision counts must be >= 2");
  return std::vector<Scalar>(static_cast<std::size_t>(p), make_scalar(1, p));
}

GridMeasure factor_from_json(const Json& j, std::uint64_t seed,
                             const std::filesystem::path& base, int dim,
                             const std::string& where);

GridMeasure measure_file(const Json& j, const std::filesystem::path& base,
                         const std::string& where) {
  const auto path = base / require(j, "path", where).get<std::string>();
  std::ifstream in(path);
  if (!in) throw ConfigError(where + ": cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return measure_from_json(ss.str());
}

SplitParams split_params(const Json& j, std::uint64_t seed, const std::string& where) {
  SplitParams p;
  p.tau = scalar_from_json(require(j, "tau", where), where + ".tau");
  p.depth = as_int(require(j, "depth", where), where + ".depth");
  p.seed = seed;
  if (j.contains("seed")) p.seed = static_cast<std::uint64_t>(as_int(j["seed"], where + ".seed"));
  if (j.contains("policy")) p.policy = parse_split_policy(j["policy"].get<std::string>());
  if (j.contains("grid_steps")) p.grid_steps = as_int(j["grid_steps"], where + ".grid_steps");
  return p;
}

GridMeasure factor_from_json(const Json& j, std::uint64_t seed,
                             const std::filesystem::path& base, int dim,
                             const std::string& where) {
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "lebesgue") {
    check_keys(j, where, {"kind", "dim", "depth"});
    const int d = j.contains("dim") ? as_int(j["dim"], where + ".dim") : dim;
    const int depth = j.contains("depth") ? as_int(j["depth"], where + ".depth") : 0;
    return lebesgue(d, depth);
  }
  if (kind == "split") {
    check_keys(j, where, {"kind", "dim", "tau", "depth", "seed", "policy", "grid_steps"});
    const int d = j.contains("dim") ? as_int(j["dim"], where + ".dim") : dim;
    if (d < 1 || d > kMaxDim) throw ConfigError(where + ".dim must be 1..3");
    SplitParams p = split_params(j, seed, where);
    // Axis k draws with seed + k.
    std::vector<GridMeasure> factors;
    for (int k = 0; k < d; ++k) {
      SplitParams pk = p;
      pk.seed = p.seed + static_cast<std::uint64_t>(k);
      factors.push_back(gen_split_measure_1d(pk));
    }
    return d == 1 ? factors.front() : product_measure(factors);
  }
  if (kind == "product") {
    check_keys(j, where, {"kind", "factors"});
    const Json& fs = require(j, "factors", where);
    if (!fs.is_array() || fs.empty()) throw ConfigError(where + ".factors must be a nonempty list");
    std::vector<GridMeasure> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      factors.push_back(factor_from_json(fs[i], seed + i, base, 1,
                                         where + ".factors[" + std::to_string(i) + "]"));
    }
    return product_measure(factors);
  }
  if (kind == "file") {
    check_keys(j, where, {"kind", "path"});
    return measure_file(j, base, where);
  }
  throw ConfigError(where + ": unknown measure kind '" + kind + "'");
}

}  // namespace

Scalar scalar_from_json(const Json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_scalar(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(j.get<long>());
    if (j.is_number_float()) {
      std::ostringstream os;
      os.precision(17);
      os << j.get<double>();
      return parse_scalar(os.str());
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + " must be a number or a fraction string");
}

SystemSpec system_from_json(const Json& j) {
  const std::string where = "system";
  const std::string kind = require(j, "kind", where).get<std::string>();
  try {
    if (kind == "carpet") {
      check_keys(j, where, {"kind", "widths", "heights", "digits"});
      return make_carpet(scalar_list(require(j, "widths", where), "system.widths"),
                         scalar_list(require(j, "heights", where), "system.heights"),
                         digit_list(require(j, "digits", where), 2));
    }
    if (kind == "bm") {
      check_keys(j, where, {"kind", "p", "q", "digits"});
      return make_carpet(equal(as_int(require(j, "p", where), "system.p")),
                         equal(as_int(require(j, "q", where), "system.q")),
                         digit_list(require(j, "digits", where), 2));
    }
    if (kind == "sponge") {
      check_keys(j, where, {"kind", "p", "q", "u", "digits"});
      return make_sponge(as_int(require(j, "p", where), "system.p"),
                         as_int(require(j, "q", where), "system.q"),
                         as_int(require(j, "u", where), "system.u"),
                         digit_list(require(j, "digits", where), 3));
    }
    if (kind == "interval") {
      check_keys(j, where, {"kind", "p", "lengths", "digits"});
      std::vector<int> ds;
      for (const auto& d : digit_list(require(j, "digits", where), 1)) ds.push_back(d[0]);
      if (j.contains("lengths") == j.contains("p")) {
        throw ConfigError("system needs exactly one of 'p' and 'lengths'");
      }
      if (j.contains("p")) return make_interval_system(equal(as_int(j["p"], "system.p")), ds);
      return make_interval_system(scalar_list(j["lengths"], "system.lengths"), ds);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid system: ") + e.what());
  }
  throw ConfigError("unknown system kind '" + kind + "'");
}

ExperimentConfig parse_config(const std::string& text, const std::string& task,
                              const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check_keys(j, "config", {"task", "system", "measure", "params", "seed", "budget", "output"});
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  try {
    if (j.contains("task")) cfg.task = j["task"].get<std::string>();
    if (!task.empty()) {
      if (!cfg.task.empty() && cfg.task != task) {
        throw ConfigError("config is for task '" + cfg.task + "', not '" + task + "'");
      }
      cfg.task = task;
    }
    if (std::find(std::begin(kTasks), std::end(kTasks), cfg.task) == std::end(kTasks)) {
      throw ConfigError("unknown or missing task '" + cfg.task + "'");
    }
    if (j.contains("system")) {
      cfg.system_desc = j["system"];
      cfg.system = system_from_json(cfg.system_desc);
    }
    if (j.contains("measure")) {
      cfg.measure_desc = j["measure"];
      if (!cfg.measure_desc.is_object()) throw ConfigError("measure must be an object");
      if (cfg.measure_desc.value("kind", "") == "file") {
        const auto path = base_dir / cfg.measure_desc.value("path", "");
        if (!std::filesystem::exists(path)) {
          throw ConfigError("measure file " + path.string() + " does not exist");
        }
      }
    }
    if (j.contains("params")) {
      cfg.params = j["params"];
      if (!cfg.params.is_object()) throw ConfigError("params must be an object");
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("budget")) {
      if (!j["budget"].is_number_unsigned() || j["budget"].get<std::uint64_t>() == 0) {
        throw ConfigError("budget must be a positive integer");
      }
      cfg.budget = j["budget"].get<std::uint64_t>();
    }
    if (j.contains("output")) cfg.output = j["output"].get<std::string>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::string& task) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), task, path.parent_path().empty() ? "." : path.parent_path());
}

Json config_echo(const ExperimentConfig& cfg) {
  Json j;
  j["task"] = cfg.task;
  j["system"] = cfg.system_desc;
  j["measure"] = cfg.measure_desc;
  j["params"] = cfg.params;
  j["seed"] = cfg.seed;
  j["budget"] = cfg.budget;
  return j;
}

GridMeasure realize_measure(const ExperimentConfig& cfg, int dim) {
  if (cfg.measure_desc.is_null()) throw ConfigError("task needs a measure");
  GridMeasure mu;
  try {
    mu = factor_from_json(cfg.measure_desc, cfg.seed, cfg.base_dir, dim == 0 ? 1 : dim,
                          "measure");
  } catch (const ConfigError&) {
    throw;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad measure value: ") + e.what());
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid measure: ") + e.what());
  }
  if (dim != 0 && mu.dim() != dim) {
    throw ConfigError("measure has dimension " + std::to_string(mu.dim()) + ", expected " +
                      std::to_string(dim));
  }
  return mu;
}

void check_params(const Json& params, std::initializer_list<const char*> allowed) {
  check_keys(params, "params", allowed);
}

int param_int(const Json& params, const char* key, int fallback) {
  if (!params.contains(key)) return fallback;
  return as_int(params[key], std::string("params.") + key);
}

bool param_bool(const Json& params, const char* key, bool fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_boolean()) throw ConfigError(std::string("params.") + key + " must be a boolean");
  return params[key].get<bool>();
}

double param_double(const Json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) throw ConfigError(std::string("params.") + key + " must be a number");
  return params[key].get<double>();
}

Scalar param_scalar(const Json& params, const char* key, const Scalar& fallback) {
  if (!params.contains(key)) return fallback;
  return scalar_from_json(params[key], std::string("params.") + key);
}

std::optional<Scalar> param_scalar_opt(const Json& params, const char* key) {
  if (!params.contains(key)) return std::nullopt;
  return scalar_from_json(params[key], std::string("params.") + key);
}

std::optional<std::vector<int>> param_int_list(const Json& params, const char* key) {
  if (!params.contains(key)) return std::nullopt;
  const Json& j = params[key];
  if (!j.is_array()) throw ConfigError(std::string("params.") + key + " must be a list");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_int(j[i], std::string("params.") + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string param_string(const Json& params, const char* key, const std::string& fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_string()) throw ConfigError(std::string("params.") + key + " must be a string");
  return params[key].get<std::string>();
}

}  // namespace carpetlab::cli
