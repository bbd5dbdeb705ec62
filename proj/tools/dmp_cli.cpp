#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dmp/experiment.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized Mirror-Prox experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  bool plot = false;
  std::uint64_t seed_override = 0;
  bool has_seed = false;

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed_override, "override [run] seed")
      ->each([&](const std::string&) { has_seed = true; });
  run->add_flag("--plot", plot, "emit plot.svg");

  std::string topologies_csv;
  CLI::App* sweep = app.add_subcommand("sweep", "compare topologies");
  sweep->add_option("--config", config_path, "experiment config file")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--topologies", topologies_csv,
                    "comma list, e.g. complete,star,cycle,erdos:0.5")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    dmp::ExperimentConfig cfg = dmp::ExperimentConfig::parse_file(config_path);
    if (has_seed) cfg.seed = seed_override;
    if (run->parsed()) {
      dmp::ExperimentOutcome outcome = dmp::run_experiment(cfg, out_dir, plot);
      std::cout << outcome.summary;
      if (outcome.divergence_event) return 3;
    } else {
      const std::string table =
          dmp::topology_sweep(cfg, split_list(topologies_csv), out_dir);
      std::cout << table;
    }
  } catch (const dmp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dmp::NumericFailure& e) {
    std::cerr << "numeric divergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
