#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcprod/approximation.hpp"

namespace lcprod {

// Sets A, B and the interpolation weight lambda. The Minkowski combination
// lambda A + (1 - lambda) B of two boxes is again a box.
struct BoxPair {
  Box a;
  Box b;
  double lambda = 0.5;

  Index dim() const { return a.dim(); }
  Box combination() const;
};

// Throws ShapeError on mismatched dimensions, lo > hi or lambda outside [0, 1].
BoxPair make_box_pair(Box a, Box b, double lambda);

// Box pair scaled to a block's spread: corners at mean + sd * U(-2, 1), widths
// sd * U(0.3, 2.5) per coordinate.
BoxPair random_box_pair(const BlockMeasure& measure, Rng& rng);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct ExactMasses {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_mix = 0.0;
  bool holds = true;  // p_mix >= p_a^lambda p_b^(1-lambda) - kQuadratureTolerance
};

struct InequalityReport {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_mix = 0.0;
  double rhs = 0.0;     // p_a^lambda * p_b^(1 - lambda)
  double margin = 0.0;  // 3 * propagated standard error of p_mix - rhs
  std::size_t samples = 0;
  std::optional<ExactMasses> exact;  // one-dimensional blocks only
  Verdict verdict = Verdict::Pass;
};

inline constexpr double kQuadratureTolerance = 1e-6;
inline constexpr std::size_t kMinConvexitySamples = 10000;

// Monte Carlo side of the log-concavity inequality on a fixed sample set.
InequalityReport evaluate_convexity_inequality(std::span<const VectorXd> samples,
                                               const BoxPair& pair);

// Samples the block and checks mu(lambda A + (1 - lambda) B) >=
// mu(A)^lambda mu(B)^(1 - lambda) against three propagated standard errors,
// plus an exact quadrature check when the block lives in R^1.
InequalityReport check_convexity_inequality(const BlockMeasure& measure, const BoxPair& pair,
                                            std::size_t samples, std::uint64_t seed);

// Mass of [lo, hi] under a block on R^1, by quadrature of its density.
double interval_mass(const BlockMeasure& measure, double lo, double hi);

struct ConvergenceReport {
  ApproximantKind kind = ApproximantKind::CondExp;
  std::vector<std::size_t> depths;
  std::vector<std::array<double, 3>> error_quantiles;  // 0.5, 0.9, 0.99 per depth
  std::vector<double> c_n;
  double truncation_bound = 0.0;
  std::size_t point_count = 0;
  std::size_t eval_depth = 0;
  std::size_t probe_depth = 0;
  std::uint64_t seed = 0;
  std::size_t bound_checks = 0;
  std::size_t bound_violations = 0;
  bool hypothesis_met = true;
  std::string hypothesis_note;
  bool pass = false;
};

inline constexpr std::array<double, 3> kReportQuantiles{0.5, 0.9, 0.99};
inline constexpr double kTruncationFactor = 5.0;
inline constexpr double kErrorFloor = 1e-8;
inline constexpr double kMonotoneSlack = 0.10;

// Linear-interpolation quantile of an unsorted sample.
double empirical_quantile(std::vector<double> values, double q);

// Samples point_count points at eval_depth (point i seeded with
// derive_seed(seed, i)), builds the approximant of `kind` at each depth and
// records quantiles of |approximant(x) - f(x truncated at eval_depth)|.
// Passes when the 0.9 quantile at the largest depth is within
// max(5 * truncation_bound, 1e-8), the 0.9 quantiles never grow by more than
// 10% from one depth to the next, the bound e- <= 2|c_n| + e+ holds at every
// point and the kind's hypothesis is met.
ConvergenceReport run_convergence_study(const LinearFunctional& f, const ProductMeasure& mu,
                                        ApproximantKind kind, std::vector<std::size_t> depths,
                                        std::size_t point_count, std::size_t eval_depth,
                                        std::uint64_t seed,
                                        std::size_t probe_depth = kDefaultProbeDepth);

enum class CriterionStatus { Satisfied, Unverified, Divergent };
const char* to_string(CriterionStatus s);

struct CriterionReport {
  std::vector<std::size_t> depths;
  std::vector<double> c_n;           // partial tail sums up to probe_depth
  std::size_t probe_depth = 0;
  double last_window = 0.0;          // movement over (probe/2, probe]
  double window_ratio = 0.0;         // last window / previous window
  double remainder_estimate = 0.0;   // geometric extrapolation beyond probe_depth
  double last_estimate = 0.0;        // c at the last depth plus the remainder
  bool tail_converged = false;
  CriterionStatus status = CriterionStatus::Unverified;
};

inline constexpr double kCriterionThreshold = 1e-6;
inline constexpr double kDivergenceRatio = 0.99;

// Tracks c_n over increasing depths. Satisfied when |c| at the last depth,
// with the extrapolated remainder beyond probe_depth, is below 1e-6.
// Divergent when the dyadic windows of the series stop shrinking (ratio of
// the last two at least 0.99), which is how a harmonic-type tail shows up.
CriterionReport check_theorem3_criterion(const LinearFunctional& f, const ProductMeasure& mu,
                                         std::vector<std::size_t> depths,
                                         std::size_t probe_depth);

struct TestFunction {
  std::string name;
  // Receives the first m~_n coordinates, flattened.
  std::function<double(const VectorXd&)> g;
};

struct DefiningPropertyCheck {
  std::string name;
  double with_f = 0.0;       // mean of g * f^
  double with_approx = 0.0;  // mean of g * E^{B_n} f
  double se_f = 0.0;
  double se_approx = 0.0;
  bool holds = true;  // |difference| <= 4 * sqrt(se_f^2 + se_approx^2)
};

// Monte Carlo check that integral g f dmu = integral g E^{B_n} f dmu for
// bounded test functions g of the first n blocks.
std::vector<DefiningPropertyCheck> check_defining_property(
    const LinearFunctional& f, const ProductMeasure& mu, std::size_t n,
    const std::vector<TestFunction>& tests, std::size_t samples, std::size_t eval_depth,
    std::uint64_t seed, std::size_t probe_depth = kDefaultProbeDepth);

}  // namespace lcprod
