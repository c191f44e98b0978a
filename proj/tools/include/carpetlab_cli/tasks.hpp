// Task runners behind the carpetlab subcommands.

#ifndef CARPETLAB_CLI_TASKS_HPP_
#define CARPETLAB_CLI_TASKS_HPP_

#include <exception>
#include <filesystem>

#include "carpetlab_cli/config.hpp"
#include "carpetlab_cli/report.hpp"

namespace carpetlab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitBudget = 3,
  kExitInternal = 4,
};

TaskOutput run_task(const ExperimentConfig& cfg);

// Runs the task and writes its outputs into `out_dir`; returns the report.
Json run_and_write(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Exit status for an exception escaping a task.
int exit_code_for(const std::exception& e);

}  // namespace carpetlab::cli

#endif  // CARPETLAB_CLI_TASKS_HPP_
