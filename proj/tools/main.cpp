#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

#include "geomq/scenario.hpp"

namespace {

constexpr int kPass        = 0;
constexpr int kFail        = 1;
constexpr int kConfigError = 2;

geomq::cli::ScenarioConfig load_valid(const std::string & path)
{
  auto config = geomq::cli::load_config(path);
  geomq::cli::validate(config);
  return config;
}

int run_command(const std::string & path)
{
  geomq::cli::ScenarioConfig config;
  try {
    config = load_valid(path);
  } catch (const geomq::cli::ConfigError & e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const auto result = geomq::cli::run(config);
    for (const auto & c : result.checks) {
      std::cout << (c.passed() ? "PASS " : "FAIL ") << std::left << std::setw(48) << c.name << ' ' << c.value
                << (c.at_least ? " >= " : " <= ") << c.tolerance << '\n';
    }
    std::cout << "outputs in " << result.output_dir.string() << '\n';
    return result.passed() ? kPass : kFail;
  } catch (const std::exception & e) {
    std::cerr << "scenario " << geomq::cli::to_string(config.scenario) << " failed: " << e.what() << '\n';
    return kFail;
  }
}

int validate_command(const std::string & path)
{
  try {
    const auto config = load_valid(path);
    std::cout << path << ": ok (" << geomq::cli::to_string(config.scenario) << ")\n";
    return kPass;
  } catch (const geomq::cli::ConfigError & e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Ensemble geometry scenario runner"};
  app.require_subcommand(1);

  std::string config_path;
  auto * run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  auto * check = app.add_subcommand("validate", "Parse and validate a config file without running it");
  check->add_option("config", config_path, "Config file")->required();
  auto * list = app.add_subcommand("list-scenarios", "List scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  if (*list) {
    for (auto kind : geomq::cli::all_scenarios()) {
      std::cout << std::left << std::setw(20) << geomq::cli::to_string(kind) << geomq::cli::describe(kind) << '\n';
    }
    return kPass;
  }
  if (*check) { return validate_command(config_path); }
  return run_command(config_path);
}
