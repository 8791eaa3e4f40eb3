#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lcprod/functional.hpp"

namespace lcprod {

enum class ApproximantKind { CondExp, CondExpReflected, Theorem1, HalfSum, Theorem3Linear };

const char* to_string(ApproximantKind kind);
std::optional<ApproximantKind> approximant_kind_from_string(std::string_view name);

struct ApproximantProvenance {
  double c_n = 0.0;            // tail constant under mu
  double reflected_c_n = 0.0;  // tail constant under the reflected measure
  std::optional<VectorXd> psi_vector;  // affine-support correction w, length m~_n
  bool hypothesis_met = true;
  std::string hypothesis_note;
};

// x -> sum_{k <= n} <coeffs_k, x_k> + constant
struct AffineApproximant {
  std::size_t n = 0;
  std::vector<VectorXd> coeffs;
  double constant = 0.0;
  ApproximantKind kind = ApproximantKind::CondExp;
  ApproximantProvenance provenance;

  double operator()(const TruncatedPoint& x) const;
  // Evaluation on a flat vector of the first m~_n coordinates.
  double operator()(const VectorXd& flat) const;
  double value_at_origin() const { return constant; }
};

inline constexpr std::size_t kDefaultProbeDepth = 4096;

// E^{B_n} f under mu (or under the reflected measure): the truncation of f
// plus the tail constant, +c_n or -c_n. Throws TailDiverges when the tail
// sum has not converged at probe_depth.
AffineApproximant conditional_expectation(const LinearFunctional& f, const ProductMeasure& mu,
                                          std::size_t n, bool reflected,
                                          std::size_t probe_depth = kDefaultProbeDepth);

// g_n = E^{B_n} f + phi_n, phi_n(x) = <w, x> - <w, h~> with
// w = c_n h~ / |h~|^2. Linear, and equal to E^{B_n} f on the prefix support.
// Throws HypothesisNotMet when the prefix support passes through the origin.
AffineApproximant theorem1_approximant(const LinearFunctional& f, const ProductMeasure& mu,
                                       std::size_t n,
                                       std::size_t probe_depth = kDefaultProbeDepth);

// (E_+ f + E_- f) / 2: the truncation of f with the +-c_n constants
// cancelled. Provenance records whether every block support up to n is
// symmetric (h_k = 0).
AffineApproximant half_sum_approximant(const LinearFunctional& f, const ProductMeasure& mu,
                                       std::size_t n,
                                       std::size_t probe_depth = kDefaultProbeDepth);

// The same half-sum, justified instead by c_n -> 0; provenance records
// |c_n| so callers can watch the decay.
AffineApproximant theorem3_linear_approximant(const LinearFunctional& f,
                                              const ProductMeasure& mu, std::size_t n,
                                              std::size_t probe_depth = kDefaultProbeDepth);

AffineApproximant build_approximant(ApproximantKind kind, const LinearFunctional& f,
                                    const ProductMeasure& mu, std::size_t n,
                                    std::size_t probe_depth = kDefaultProbeDepth);

struct BoundCheck {
  double e_minus = 0.0;  // |E_- f(x) - f^(x)|
  double e_plus = 0.0;   // |E_+ f(x) - f^(x)|
  double bound = 0.0;    // 2|c_n| + e_plus + 1e-9
  bool holds = true;
};

inline constexpr double kBoundSlack = 1e-9;

// Per-point check of |E_- f - f^| <= 2|c_n| + |E_+ f - f^| with f^ = f
// truncated at eval_depth.
std::vector<BoundCheck> theorem3_bound_check(const LinearFunctional& f, const ProductMeasure& mu,
                                             std::size_t n,
                                             const std::vector<TruncatedPoint>& points,
                                             std::size_t eval_depth,
                                             std::size_t probe_depth = kDefaultProbeDepth);

}  // namespace lcprod
