#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cfpc/barrier.hpp"
#include "cfpc/ml.hpp"
#include "cfpc/types.hpp"

namespace cfpc {

// Usage / configuration problems: the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Everything a command needs: system, solver, and training blocks plus the
// run description.
struct ExperimentConfig {
  SystemConfig system;
  SolverConfig solver;
  TrainConfig train;

  std::vector<std::string> policies = {"upc", "fpc-fair", "fpc-opp", "opc-maximin", "opc-lse"};
  std::string beamformer = "cb";      // cb | rzf
  std::string direction = "dl";       // dl | ul
  std::string eval_mode = "estimated"; // estimated | true
  int trials = 10;
  int samples = 2000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  bool unfold = false;
  int stages = 3;
  std::string model_path;                 // e2e model for simulate/bench
  std::vector<std::string> stage_model_paths; // unfolded cascade
  std::string dataset_path;               // input of cmd_train

  ExperimentConfig() { train.batch_size = 0; } // 0: resolved per direction

  void validate() const; // throws ConfigError
};

// Named parameter sets: "small" (desk scale) or "paper" (full scale).
void apply_preset(ExperimentConfig& cfg, const std::string& name);

// INI-style file: [section] blocks of key = value lines, '#' comments.
// Unknown sections or keys are rejected.
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base);

// Batch size fallback: 256 (DL) or 64 (UL) when not set explicitly.
int resolve_batch_size(const ExperimentConfig& cfg);

} // namespace cfpc
