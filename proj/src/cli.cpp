#include "cfpc/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cfpc/config_file.hpp"
#include "cfpc/experiment.hpp"

namespace cfpc {

namespace {

std::vector<std::string> split_csv(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  for (char c : v) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Cell-free network power control experiments"};
  app.require_subcommand(1);
  app.fallthrough(); // accept global options after the subcommand name

  std::string config_path, out_dir, preset, policy_csv, direction, beamformer;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "Experiment config file (INI-style sections)");
  app.add_option("--seed", seed, "Master seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--preset", preset, "Named parameter set: small or paper");
  app.add_option("--policy", policy_csv, "Comma-separated policy list");
  app.add_option("--direction", direction, "Link direction: dl or ul");
  app.add_option("--beamformer", beamformer, "Beamformer: cb or rzf");

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo evaluation of the configured policies");
  auto* dat = app.add_subcommand("dataset", "Generate a supervised dataset from solver runs");
  auto* trn = app.add_subcommand("train", "Train the configured network on a dataset");
  auto* ben = app.add_subcommand("bench", "Measure per-policy wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    ExperimentConfig cfg;
    if (!preset.empty()) apply_preset(cfg, preset);
    if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!policy_csv.empty()) cfg.policies = split_csv(policy_csv);
    if (!direction.empty()) cfg.direction = direction;
    if (!beamformer.empty()) cfg.beamformer = beamformer;

    if (sim->parsed()) return cmd_simulate(cfg);
    if (dat->parsed()) return cmd_dataset(cfg);
    if (trn->parsed()) return cmd_train(cfg);
    if (ben->parsed()) return cmd_bench(cfg);
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace cfpc
