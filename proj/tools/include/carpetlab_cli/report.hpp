// Report assembly: a JSON document with a deterministic section, a CSV
// series table and optional figures.

#ifndef CARPETLAB_CLI_REPORT_HPP_
#define CARPETLAB_CLI_REPORT_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "carpetlab/scalar.hpp"
#include "carpetlab_cli/config.hpp"

namespace carpetlab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// {"exact": "p/q", "decimal": "..."} with 12 significant digits.
Json scalar_json(const Scalar& x);

struct Series {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct TaskOutput {
  Json results = Json::object();
  Series series;
  // File name -> contents, e.g. figure.svg or program.lp.
  std::map<std::string, std::string> files;
};

Json make_report(const ExperimentConfig& cfg, const TaskOutput& out,
                 double wall_seconds);

// Writes report.json, series.csv and the extra files into `dir`.
void write_outputs(const std::filesystem::path& dir, const Json& report,
                   const TaskOutput& out);

}  // namespace carpetlab::cli

#endif  // CARPETLAB_CLI_REPORT_HPP_
