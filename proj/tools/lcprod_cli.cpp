#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lcprod/experiment.hpp"

namespace {

std::optional<lcprod::ExperimentConfig> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    return std::nullopt;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const lcprod::ConfigParseResult parsed = lcprod::parse_config(buf.str());
  if (!parsed.ok()) {
    std::cerr << path << ": invalid configuration\n" << parsed.describe_issues();
    return std::nullopt;
  }
  return parsed.config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-concave product measures: approximant studies and checks"};
  app.set_version_flag("--version", lcprod::library_version());
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the experiment and write <output>.csv/.json/.manifest.json");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_flag("-q,--quiet", quiet, "Suppress the summary line");

  auto* validate = app.add_subcommand("validate", "Parse and check a configuration, print it back");
  validate->add_option("config", config_path, "Configuration file")->required();

  CLI11_PARSE(app, argc, argv);

  const auto config = load(config_path);
  if (!config) return lcprod::kExitIoOrConfig;

  if (*validate) {
    std::cout << lcprod::to_config_text(*config);
    return 0;
  }

  const lcprod::ExperimentOutcome out = lcprod::run_experiment(*config);
  if (out.exit_code == lcprod::kExitIoOrConfig) {
    std::cerr << "error: " << out.message << "\n";
  } else if (!quiet) {
    std::cout << out.message << "\n";
  }
  return out.exit_code;
}
