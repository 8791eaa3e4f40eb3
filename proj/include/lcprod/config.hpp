#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lcprod/approximation.hpp"

namespace lcprod {

enum class ExperimentType { Convexity, Convergence, Criterion, Bound };

const char* to_string(ExperimentType type);

// One batch run. Rules are kept as text so the config can be echoed back.
struct ExperimentConfig {
  std::string measure_rule;
  std::string functional_rule;
  ExperimentType experiment = ExperimentType::Convergence;
  ApproximantKind kind = ApproximantKind::CondExp;
  std::vector<std::size_t> depths;
  std::size_t eval_depth = 0;
  std::size_t probe_depth = kDefaultProbeDepth;
  std::size_t point_count = 1000;
  std::size_t samples = 100000;
  std::size_t pairs = 50;  // convexity: random box pairs
  std::size_t block = 1;   // convexity: which block of the measure
  std::uint64_t seed = 0;
  std::string output;

  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 when the issue is not tied to a line
  std::string field;     // section.key
  std::string message;
};

struct ConfigParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> issues;

  bool ok() const { return config.has_value(); }
  std::string describe_issues() const;
};

// Flat `key = value` lines under [measure], [functional] and [experiment]
// headers; '#' starts a comment; values may be double-quoted. Every problem
// found is reported, not just the first.
ConfigParseResult parse_config(std::string_view text);

// Canonical text that parse_config reads back to an equal config.
std::string to_config_text(const ExperimentConfig& config);

}  // namespace lcprod
