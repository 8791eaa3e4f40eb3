#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lcprod/product_measure.hpp"
#include "lcprod/sequence.hpp"

namespace lcprod {

struct Term;

// Why sum_k <a_k, x_k - mean_k> converges almost everywhere.
struct FiniteSupport {
  std::size_t last_block;  // a_k = 0 for k > last_block
};
struct SquareSummable {};  // sum_k <a_k, Cov_k a_k> < inf against the paired measure
using DeclaredTail = std::variant<FiniteSupport, SquareSummable>;

class CoefficientRule {
 public:
  virtual ~CoefficientRule() = default;
  // a_k for a block of dimension `dim`; throws ShapeError if the rule fixes
  // a different length.
  virtual VectorXd coeffs(std::size_t k, Index dim) const = 0;
  virtual std::string describe() const = 0;
};

// f(x) = sum_k <a_k, x_k>, given by its coefficient stream.
class LinearFunctional {
 public:
  LinearFunctional(std::shared_ptr<const CoefficientRule> rule, DeclaredTail tail);

  VectorXd coeffs(std::size_t k, Index dim) const { return rule_->coeffs(k, dim); }
  const DeclaredTail& declared_tail() const { return tail_; }
  std::string describe() const { return rule_->describe(); }

 private:
  std::shared_ptr<const CoefficientRule> rule_;
  DeclaredTail tail_;
};

LinearFunctional zero_functional();
// a_k = value(k) in every coordinate; zero after `support` blocks if given.
LinearFunctional series_functional(Sequence value,
                                   std::optional<std::size_t> support = std::nullopt);
// a_1..a_n given explicitly, then `tail`.
LinearFunctional explicit_functional(std::vector<VectorXd> head, LinearFunctional tail);

// Coefficient rule text:
//   zero()
//   series(value=geom(1, 0.5)[, support=K])
//   explicit(blocks=[[1, 0], [0.5]], tail=series(value=const(1)))
// A finite support is declared for zero(), series with support=K, and
// explicit lists whose tail has finite support; everything else declares
// square summability.
LinearFunctional parse_functional(std::string_view text);
LinearFunctional functional_from_term(const Term& term);

// a_1..a_n against the block dimensions of mu.
std::vector<VectorXd> coefficient_prefix(const LinearFunctional& f,
                                         const ProductMeasure& mu, std::size_t n);

// f(x_1, ..., x_n, 0, ...) = sum_{k <= n} <a_k, x_k>
double eval_truncated(const LinearFunctional& f, const TruncatedPoint& x, std::size_t n);
double eval_truncated(std::span<const VectorXd> coeffs, const TruncatedPoint& x,
                      std::size_t n);

enum class TailStatus { Converged, Unconverged };

struct TailConstant {
  double value = 0.0;   // sum_{n < k <= probe_depth} <a_k, mean_k>
  double window = 0.0;  // sum over (probe_depth/2, probe_depth]
  TailStatus status = TailStatus::Converged;

  bool converged() const { return status == TailStatus::Converged; }
};

inline constexpr double kTailWindowTolerance = 1e-10;
inline constexpr double kVarianceWindowTolerance = 1e-12;

// c_n: the integral of f(0, ..., 0, x_{n+1}, ...) over the tail blocks, which
// for a coefficient series is the sum of <a_k, mean_k> over k > n. Unconverged
// when the last dyadic window moves the partial sum by kTailWindowTolerance or
// more. Validates the declared tail first.
TailConstant tail_constant(const LinearFunctional& f, const ProductMeasure& mu,
                           std::size_t n, std::size_t probe_depth);

// Throws DeclaredTailViolated if the declaration fails at probe_depth.
void validate_declared_tail(const LinearFunctional& f, const ProductMeasure& mu,
                            std::size_t probe_depth);

// Partial tail sums for several n in one backward pass from probe_depth, plus
// the dyadic windows (probe_depth / 2^{j+1}, probe_depth / 2^j] for j = 0, 1, 2.
struct TailSeries {
  std::vector<std::size_t> depths;
  std::vector<double> values;
  std::vector<double> windows;
};
TailSeries tail_series(const LinearFunctional& f, const ProductMeasure& mu,
                       std::vector<std::size_t> depths, std::size_t probe_depth);

// sum_{from < k <= probe_depth} <a_k, Cov_k a_k>
double tail_variance(const LinearFunctional& f, const ProductMeasure& mu,
                     std::size_t from, std::size_t probe_depth);

struct SeminormEstimate {
  double mean_abs = 0.0;
  double std_error = 0.0;
  std::size_t sample_count = 0;
};

// Monte Carlo estimate of the integral of |f truncated at depth| over mu.
// Point i is sample_point(mu, depth, derive_seed(seed, i)).
SeminormEstimate estimate_seminorm_integral(const LinearFunctional& f,
                                            const ProductMeasure& mu, std::size_t depth,
                                            std::size_t samples, std::uint64_t seed);

}  // namespace lcprod
