#include "carpetlab_cli/report.hpp"

#include <fstream>
#include <sstream>

#include "carpetlab/errors.hpp"

namespace carpetlab::cli {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

Json scalar_json(const Scalar& x) {
  return Json{{"exact", to_fraction_string(x)}, {"decimal", to_decimal_string(x, 12)}};
}

std::string Series::to_csv() const {
  std::ostringstream os;
  auto line = [&os](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << csv_field(row[i]);
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

Json make_report(const ExperimentConfig& cfg, const TaskOutput& out,
                 double wall_seconds) {
  Json report;
  report["tool"] = "carpetlab";
  report["version"] = kToolVersion;
  report["report"] = {{"config", config_echo(cfg)}, {"results", out.results}};
  report["timing"] = {{"wall_seconds", wall_seconds}};
  return report;
}

void write_outputs(const std::filesystem::path& dir, const Json& report,
                   const TaskOutput& out) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_file(dir / "series.csv", out.series.to_csv());
  for (const auto& [name, text] : out.files) write_file(dir / name, text);
}

}  // namespace carpetlab::cli
