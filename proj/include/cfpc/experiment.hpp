#pragma once

#include "cfpc/config_file.hpp"

namespace cfpc {

// Command entry points; each returns a process exit code (0 success,
// 1 runtime failure). Configuration problems throw ConfigError (exit 2).
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_dataset(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_bench(const ExperimentConfig& cfg);

} // namespace cfpc
