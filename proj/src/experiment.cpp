#include "lcprod/experiment.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "lcprod/error.hpp"
#include "lcprod/report.hpp"

#ifndef LCPROD_VERSION
#define LCPROD_VERSION "0.0.0"
#endif

namespace lcprod {

const char* library_version() { return LCPROD_VERSION; }

namespace {

ExperimentOutcome run_convexity(const ExperimentConfig& c) {
  const ProductMeasure mu = make_product(c.measure_rule);
  const BlockMeasure& block = mu.block(c.block);
  Rng pair_rng(derive_seed(c.seed, 0));
  std::vector<ConvexityRow> rows;
  std::size_t failures = 0;
  std::size_t inconclusive = 0;
  for (std::size_t i = 0; i < c.pairs; ++i) {
    ConvexityRow row;
    row.pair = i + 1;
    row.boxes = random_box_pair(block, pair_rng);
    row.result = check_convexity_inequality(block, row.boxes, c.samples, derive_seed(c.seed, i + 1));
    if (row.result.verdict == Verdict::Fail) ++failures;
    if (row.result.verdict == Verdict::Inconclusive) ++inconclusive;
    rows.push_back(std::move(row));
  }
  ExperimentOutcome out;
  out.csv = to_csv(rows);
  out.json = to_json(rows);
  out.exit_code = failures ? kExitPropertyFailure : kExitPass;
  std::ostringstream os;
  os << "convexity: " << failures << " of " << c.pairs << " pairs failed, " << inconclusive
     << " inconclusive";
  out.message = os.str();
  return out;
}

ExperimentOutcome run_convergence(const ExperimentConfig& c) {
  const ProductMeasure mu = make_product(c.measure_rule);
  const LinearFunctional f = parse_functional(c.functional_rule);
  const ConvergenceReport report = run_convergence_study(
      f, mu, c.kind, c.depths, c.point_count, c.eval_depth, c.seed, c.probe_depth);
  ExperimentOutcome out;
  out.csv = to_csv(report);
  out.json = to_json(report);
  if (!report.hypothesis_met) {
    out.exit_code = kExitHypothesisNotMet;
  } else {
    out.exit_code = report.pass ? kExitPass : kExitPropertyFailure;
  }
  std::ostringstream os;
  os << "convergence (" << to_string(c.kind) << "): " << (report.pass ? "pass" : "fail")
     << ", bound violations " << report.bound_violations;
  if (!report.hypothesis_note.empty()) os << "; " << report.hypothesis_note;
  out.message = os.str();
  return out;
}

ExperimentOutcome run_criterion(const ExperimentConfig& c) {
  const ProductMeasure mu = make_product(c.measure_rule);
  const LinearFunctional f = parse_functional(c.functional_rule);
  const CriterionReport report = check_theorem3_criterion(f, mu, c.depths, c.probe_depth);
  ExperimentOutcome out;
  out.csv = to_csv(report);
  out.json = to_json(report);
  switch (report.status) {
    case CriterionStatus::Satisfied: out.exit_code = kExitPass; break;
    case CriterionStatus::Unverified: out.exit_code = kExitHypothesisNotMet; break;
    case CriterionStatus::Divergent: out.exit_code = kExitTailDiverges; break;
  }
  out.message = std::string("criterion: ") + to_string(report.status) +
                ", extrapolated c = " + format_number(report.last_estimate);
  return out;
}

ExperimentOutcome run_bound(const ExperimentConfig& c) {
  const ProductMeasure mu = make_product(c.measure_rule);
  const LinearFunctional f = parse_functional(c.functional_rule);
  std::vector<TruncatedPoint> points;
  points.reserve(c.point_count);
  for (std::size_t i = 0; i < c.point_count; ++i) {
    points.push_back(sample_point(mu, c.eval_depth, derive_seed(c.seed, i)));
  }
  std::vector<BoundRow> rows;
  std::size_t violations = 0;
  for (std::size_t n : c.depths) {
    const double c_n = tail_constant(f, mu, n, c.probe_depth).value;
    const auto checks = theorem3_bound_check(f, mu, n, points, c.eval_depth, c.probe_depth);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      if (!checks[i].holds) ++violations;
      rows.push_back(BoundRow{n, i, c_n, checks[i]});
    }
  }
  ExperimentOutcome out;
  out.csv = to_csv(rows);
  out.json = to_json(rows);
  out.exit_code = violations ? kExitPropertyFailure : kExitPass;
  out.message = "bound: " + std::to_string(violations) + " violations in " +
                std::to_string(rows.size()) + " checks";
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << contents;
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace

ExperimentOutcome execute_experiment(const ExperimentConfig& config) {
  try {
    switch (config.experiment) {
      case ExperimentType::Convexity: return run_convexity(config);
      case ExperimentType::Convergence: return run_convergence(config);
      case ExperimentType::Criterion: return run_criterion(config);
      case ExperimentType::Bound: return run_bound(config);
    }
  } catch (const Error& e) {
    ExperimentOutcome out;
    out.message = e.what();
    switch (e.code()) {
      case ErrorCode::TailDiverges: out.exit_code = kExitTailDiverges; break;
      case ErrorCode::HypothesisNotMet: out.exit_code = kExitHypothesisNotMet; break;
      default: out.exit_code = kExitIoOrConfig; break;
    }
    out.json = {{"error", to_string(e.code())}, {"message", e.what()}};
    return out;
  }
  return {kExitIoOrConfig, {}, {}, "unknown experiment type"};
}

nlohmann::json make_manifest(const ExperimentConfig& config, const ExperimentOutcome& outcome,
                             double wall_seconds) {
  std::ostringstream boost_version;
  boost_version << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.'
                << BOOST_VERSION % 100;
  return {
      {"config", to_config_text(config)},
      {"seed", config.seed},
      {"experiment", to_string(config.experiment)},
      {"exit_code", outcome.exit_code},
      {"summary", outcome.message},
      {"wall_time_seconds", wall_seconds},
      {"versions",
       {{"lcprod", library_version()},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", boost_version.str()},
        {"compiler", __VERSION__},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
  };
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentOutcome out = execute_experiment(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    const std::filesystem::path base(config.output);
    if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
    write_file(config.output + ".csv", out.csv);
    write_file(config.output + ".json", out.json.dump(2) + "\n");
    write_file(config.output + ".manifest.json",
               make_manifest(config, out, wall).dump(2) + "\n");
  } catch (const std::exception& e) {
    out.exit_code = kExitIoOrConfig;
    out.message = e.what();
  }
  return out;
}

}  // namespace lcprod
