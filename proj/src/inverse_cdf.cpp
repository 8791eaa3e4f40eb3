#include "lcprod/inverse_cdf.hpp"

#include <algorithm>
#include <cmath>

#include "lcprod/error.hpp"

namespace lcprod {

namespace {

constexpr int kMaxBisections = 40;

struct Refiner {
  const std::function<double(double)>& cdf;
  double tolerance;
  std::vector<double>& nodes;
  std::vector<double>& values;
  double max_error = 0.0;

  // Appends the interior nodes of (x0, x1] in increasing order, x1 included.
  void refine(double x0, double f0, double x1, double f1, int depth) {
    const double xm = 0.5 * (x0 + x1);
    const double fm = cdf(xm);
    const double err = std::abs(fm - 0.5 * (f0 + f1));
    if (err > tolerance && depth < kMaxBisections) {
      refine(x0, f0, xm, fm, depth + 1);
      refine(xm, fm, x1, f1, depth + 1);
      return;
    }
    max_error = std::max(max_error, err);
    nodes.push_back(x1);
    values.push_back(f1);
  }
};

}  // namespace

TabulatedInverseCdf::TabulatedInverseCdf(
    const std::function<double(double)>& cdf, double lo, double hi,
    std::size_t min_intervals, double tolerance) {
  if (!(lo < hi) || min_intervals == 0) {
    throw Error(ErrorCode::InvalidPotential,
                "inverse CDF table needs lo < hi and at least one interval");
  }
  nodes_.reserve(min_intervals + 1);
  values_.reserve(min_intervals + 1);
  nodes_.push_back(lo);
  values_.push_back(cdf(lo));

  Refiner refiner{cdf, tolerance, nodes_, values_};
  const double step = (hi - lo) / static_cast<double>(min_intervals);
  for (std::size_t i = 0; i < min_intervals; ++i) {
    const double x0 = nodes_.back();
    const double f0 = values_.back();
    const double x1 = (i + 1 == min_intervals)
                          ? hi
                          : lo + step * static_cast<double>(i + 1);
    refiner.refine(x0, f0, x1, cdf(x1), 0);
  }
  max_error_ = refiner.max_error;
}

double TabulatedInverseCdf::operator()(double u) const {
  if (u <= values_.front()) return nodes_.front();
  if (u >= values_.back()) return nodes_.back();
  const auto it = std::upper_bound(values_.begin(), values_.end(), u);
  const auto i = static_cast<std::size_t>(it - values_.begin()) - 1;
  const double df = values_[i + 1] - values_[i];
  if (df <= 0.0) return nodes_[i];
  const double t = (u - values_[i]) / df;
  return nodes_[i] + t * (nodes_[i + 1] - nodes_[i]);
}

}  // namespace lcprod
