#pragma once

#include <string>

#include <json.hpp>

#include "lcprod/config.hpp"

namespace lcprod {

// Process exit statuses of a batch run.
enum ExitStatus : int {
  kExitPass = 0,
  kExitIoOrConfig = 1,
  kExitPropertyFailure = 2,
  kExitHypothesisNotMet = 3,
  kExitTailDiverges = 4,
};

struct ExperimentOutcome {
  int exit_code = kExitPass;
  std::string csv;
  nlohmann::json json;
  std::string message;  // one-line summary, or the error text
};

// Runs the study described by the config without touching the filesystem.
ExperimentOutcome execute_experiment(const ExperimentConfig& config);

// execute_experiment plus <output>.csv, <output>.json and
// <output>.manifest.json. Write failures give kExitIoOrConfig.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

nlohmann::json make_manifest(const ExperimentConfig& config, const ExperimentOutcome& outcome,
                             double wall_seconds);

const char* library_version();

}  // namespace lcprod
