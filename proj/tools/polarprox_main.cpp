#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "polarprox/errors.hpp"
#include "polarprox/scenario.hpp"

namespace cli = polarprox::cli;

int main(int argc, char** argv) {
  CLI::App app{"polar envelope / projected polar proximal point toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string builtin_name;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool all = false;

  auto* run = app.add_subcommand("run", "run a scenario: solver, audits, trace and summary");
  run->add_option("config", config_path, "scenario config file (JSON)");
  run->add_option("--builtin", builtin_name, "run a builtin scenario by name");
  run->add_flag("--all", all, "run every builtin scenario concurrently");
  run->add_option("--out-dir", out_dir, "directory for trace/summary outputs");
  run->add_option("--seed", seed, "override the config seed");

  auto* grid = app.add_subcommand("grid", "emit the envelope grid of a scenario config");
  grid->add_option("config", config_path, "scenario config file (JSON)")->required();
  grid->add_option("--out-dir", out_dir, "directory for the grid CSV");

  auto* list = app.add_subcommand("list", "list builtin scenarios");
  (void)list;

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      for (const auto& info : cli::list_builtin_scenarios())
        std::cout << info.name << "  -  " << info.description << "\n";
      return 0;
    }
    if (app.got_subcommand("grid")) {
      const cli::ScenarioConfig cfg = cli::load_scenario_file(config_path);
      if (!cfg.grid) {
        std::cerr << "outputs.grid: config has no grid spec\n";
        return 3;
      }
      std::filesystem::create_directories(out_dir);
      cli::emit_envelope_grid(cfg, std::filesystem::path(out_dir) / cfg.grid->path);
      std::cout << "wrote " << (std::filesystem::path(out_dir) / cfg.grid->path).string()
                << "\n";
      return 0;
    }
    // run
    cli::RunOptions opts;
    opts.out_dir = out_dir;
    opts.seed_override = seed;
    if (all) return cli::run_all_builtins(opts);
    if (!builtin_name.empty())
      return cli::run_scenario(cli::load_builtin_scenario(builtin_name), opts);
    if (config_path.empty()) {
      std::cerr << "run: provide a config file, --builtin <name>, or --all\n";
      return 3;
    }
    return cli::run_scenario(cli::load_scenario_file(config_path), opts);
  } catch (const polarprox::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
