// Experiment configuration for the carpetlab driver.

#ifndef CARPETLAB_CLI_CONFIG_HPP_
#define CARPETLAB_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "carpetlab/measure.hpp"
#include "carpetlab/systems.hpp"
#include "json.hpp"

namespace carpetlab::cli {

using Json = nlohmann::json;

inline constexpr const char* kTasks[] = {"diagnose", "certify", "adversary",
                                         "decay",    "graph",   "render"};

struct ExperimentConfig {
  std::string task;
  std::optional<SystemSpec> system;
  Json system_desc;   // null when absent
  Json measure_desc;  // null when absent, realized per run with the seed
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultBudget;
  std::string output = "out";
  std::filesystem::path base_dir;  // relative paths resolve against this
};

// Parses a config document. `task` (when nonempty) must agree with the
// document's task field if it has one. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& task = "",
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& task = "");

// Everything after parsing and command-line overrides, as recorded in
// reports.
Json config_echo(const ExperimentConfig& cfg);

SystemSpec system_from_json(const Json& j);

// Builds the measure; `dim` is the expected dimension (0 to skip).
GridMeasure realize_measure(const ExperimentConfig& cfg, int dim = 0);

// Checked access to task parameters. Unknown keys are rejected by
// check_params.
void check_params(const Json& params, std::initializer_list<const char*> allowed);
int param_int(const Json& params, const char* key, int fallback);
bool param_bool(const Json& params, const char* key, bool fallback);
double param_double(const Json& params, const char* key, double fallback);
Scalar param_scalar(const Json& params, const char* key, const Scalar& fallback);
std::optional<Scalar> param_scalar_opt(const Json& params, const char* key);
std::optional<std::vector<int>> param_int_list(const Json& params, const char* key);
std::string param_string(const Json& params, const char* key,
                         const std::string& fallback);

// Scalars may be given as JSON numbers or as strings ("2/3", "0.25").
Scalar scalar_from_json(const Json& j, const std::string& where);

}  // namespace carpetlab::cli

#endif  // CARPETLAB_CLI_CONFIG_HPP_
