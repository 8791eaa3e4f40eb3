#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lcprod {

// Inverse of a continuous CDF on [lo, hi], tabulated on an adaptively refined
// grid and inverted by linear interpolation. The grid starts uniform with
// `min_intervals` cells; a cell is bisected while the CDF at its midpoint
// differs from the linear interpolant by more than `tolerance`.
class TabulatedInverseCdf {
 public:
  static constexpr std::size_t kMinIntervals = 4096;
  static constexpr double kTolerance = 1e-8;

  TabulatedInverseCdf(const std::function<double(double)>& cdf, double lo,
                      double hi, std::size_t min_intervals = kMinIntervals,
                      double tolerance = kTolerance);

  double operator()(double u) const;

  std::size_t node_count() const { return nodes_.size(); }
  // Largest midpoint interpolation error over the final grid.
  double max_interpolation_error() const { return max_error_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& cdf_values() const { return values_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  double max_error_ = 0.0;
};

}  // namespace lcprod
