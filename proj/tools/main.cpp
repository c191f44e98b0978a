// carpetlab command-line driver.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "carpetlab/errors.hpp"
#include "carpetlab_cli/config.hpp"
#include "carpetlab_cli/report.hpp"
#include "carpetlab_cli/tasks.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
};

int run(const std::string& task, const Flags& f) {
  using namespace carpetlab::cli;
  ExperimentConfig cfg = load_config(f.config, task);
  if (f.seed) cfg.seed = *f.seed;
  if (f.budget) {
    if (*f.budget == 0) throw carpetlab::ConfigError("--budget must be positive");
    cfg.budget = *f.budget;
  }
  std::filesystem::path out_dir;
  if (f.out) {
    out_dir = *f.out;
    cfg.output = *f.out;
  } else {
    out_dir = cfg.base_dir / cfg.output;
  }
  const Json report = run_and_write(cfg, out_dir);
  std::cout << task << ": wrote " << (out_dir / "report.json").string() << " ("
            << report["timing"]["wall_seconds"].get<double>() << " s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carpetlab: thin-set experiments on self-affine carpets and sponges"};
  app.require_subcommand(1);
  app.set_version_flag("--version", carpetlab::cli::kToolVersion);
  Flags flags;
  for (const char* name : carpetlab::cli::kTasks) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " task");
    sub->add_option("--config", flags.config, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "random seed override");
    sub->add_option("--budget", flags.budget, "enumeration budget override");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : carpetlab::cli::kExitConfig;
  }
  const std::string task = app.get_subcommands().front()->get_name();
  try {
    return run(task, flags);
  } catch (const std::exception& e) {
    std::cerr << "carpetlab " << task << ": " << e.what() << "\n";
    return carpetlab::cli::exit_code_for(e);
  }
}
