#include "lcprod/functional.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "lcprod/error.hpp"
#include "lcprod/parallel.hpp"
#include "lcprod/rule_syntax.hpp"

namespace lcprod {

namespace {

class ZeroRule final : public CoefficientRule {
 public:
  VectorXd coeffs(std::size_t, Index dim) const override { return VectorXd::Zero(dim); }
  std::string describe() const override { return "zero()"; }
};

class SeriesRule final : public CoefficientRule {
 public:
  SeriesRule(Sequence value, std::optional<std::size_t> support)
      : value_(value), support_(support) {}

  VectorXd coeffs(std::size_t k, Index dim) const override {
    if (support_ && k > *support_) return VectorXd::Zero(dim);
    return VectorXd::Constant(dim, value_(k));
  }
  std::string describe() const override {
    std::string s = "series(value=" + value_.to_string();
    if (support_) s += ", support=" + std::to_string(*support_);
    return s + ")";
  }

 private:
  Sequence value_;
  std::optional<std::size_t> support_;
};

class ExplicitCoefficients final : public CoefficientRule {
 public:
  ExplicitCoefficients(std::vector<VectorXd> head, LinearFunctional tail)
      : head_(std::move(head)), tail_(std::move(tail)) {}

  VectorXd coeffs(std::size_t k, Index dim) const override {
    if (k > head_.size()) return tail_.coeffs(k, dim);
    const VectorXd& a = head_[k - 1];
    if (a.size() != dim) {
      throw Error(ErrorCode::ShapeError,
                  "coefficient block " + std::to_string(k) + " has length " +
                      std::to_string(a.size()) + " but the block has dimension " +
                      std::to_string(dim),
                  k);
    }
    return a;
  }
  std::string describe() const override {
    std::string s = "explicit(blocks=[";
    for (std::size_t i = 0; i < head_.size(); ++i) {
      if (i) s += ", ";
      Term t;
      t.kind = Term::Kind::List;
      for (Index j = 0; j < head_[i].size(); ++j) {
        Term x;
        x.number = head_[i][j];
        t.positional.push_back(x);
      }
      s += t.to_string();
    }
    return s + "], tail=" + tail_.describe() + ")";
  }

 private:
  std::vector<VectorXd> head_;
  LinearFunctional tail_;
};

}  // namespace

LinearFunctional::LinearFunctional(std::shared_ptr<const CoefficientRule> rule,
                                   DeclaredTail tail)
    : rule_(std::move(rule)), tail_(tail) {}

LinearFunctional zero_functional() {
  return LinearFunctional(std::make_shared<ZeroRule>(), FiniteSupport{0});
}

LinearFunctional series_functional(Sequence value, std::optional<std::size_t> support) {
  DeclaredTail tail = SquareSummable{};
  if (support) tail = FiniteSupport{*support};
  return LinearFunctional(std::make_shared<SeriesRule>(value, support), tail);
}

LinearFunctional explicit_functional(std::vector<VectorXd> head, LinearFunctional tail) {
  DeclaredTail declared = SquareSummable{};
  if (const auto* fs = std::get_if<FiniteSupport>(&tail.declared_tail())) {
    declared = FiniteSupport{std::max(fs->last_block, head.size())};
  }
  return LinearFunctional(
      std::make_shared<ExplicitCoefficients>(std::move(head), std::move(tail)), declared);
}

LinearFunctional functional_from_term(const Term& t) {
  if (t.is_call("zero")) {
    t.expect_args({}, 0);
    return zero_functional();
  }
  if (t.is_call("series")) {
    t.expect_args({"value", "support"}, 1);
    std::optional<std::size_t> support;
    if (const Term* s = t.arg("support")) support = s->as_count();
    return series_functional(Sequence::from_term(t.require("value", 0)), support);
  }
  if (t.is_call("explicit")) {
    t.expect_args({"blocks", "tail"}, 0);
    const Term& list = t.require("blocks");
    if (list.kind != Term::Kind::List) {
      throw Error(ErrorCode::ParseError, "explicit coefficient blocks must be a list");
    }
    std::vector<VectorXd> head;
    for (const Term& b : list.positional) head.push_back(b.as_vector());
    const Term* tail = t.arg("tail");
    return explicit_functional(std::move(head),
                               tail ? functional_from_term(*tail) : zero_functional());
  }
  throw Error(ErrorCode::ParseError, "unknown coefficient rule '" + t.to_string() +
                                         "' at offset " + std::to_string(t.offset));
}

LinearFunctional parse_functional(std::string_view text) {
  return functional_from_term(parse_term(text));
}

std::vector<VectorXd> coefficient_prefix(const LinearFunctional& f,
                                         const ProductMeasure& mu, std::size_t n) {
  std::vector<VectorXd> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) out.push_back(f.coeffs(k, mu.dim(k)));
  return out;
}

double eval_truncated(std::span<const VectorXd> coeffs, const TruncatedPoint& x,
                      std::size_t n) {
  if (n > x.depth()) {
    throw Error(ErrorCode::InsufficientDepth,
                "evaluation at " + std::to_string(n) + " blocks but the point has depth " +
                    std::to_string(x.depth()));
  }
  if (n > coeffs.size()) {
    throw Error(ErrorCode::ShapeError, "not enough coefficient blocks for evaluation");
  }
  double total = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const VectorXd& a = coeffs[k - 1];
    if (a.size() != x.block(k).size()) {
      throw Error(ErrorCode::ShapeError,
                  "coefficient and point dimensions differ at block " + std::to_string(k), k);
    }
    total += a.dot(x.block(k));
  }
  return total;
}

double eval_truncated(const LinearFunctional& f, const TruncatedPoint& x, std::size_t n) {
  if (n > x.depth()) {
    throw Error(ErrorCode::InsufficientDepth,
                "evaluation at " + std::to_string(n) + " blocks but the point has depth " +
                    std::to_string(x.depth()));
  }
  std::vector<VectorXd> coeffs;
  coeffs.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) coeffs.push_back(f.coeffs(k, x.block(k).size()));
  return eval_truncated(coeffs, x, n);
}

void validate_declared_tail(const LinearFunctional& f, const ProductMeasure& mu,
                            std::size_t probe_depth) {
  if (const auto* fs = std::get_if<FiniteSupport>(&f.declared_tail())) {
    for (std::size_t k = fs->last_block + 1; k <= probe_depth; ++k) {
      if (!f.coeffs(k, mu.dim(k)).isZero(0.0)) {
        throw Error(ErrorCode::DeclaredTailViolated,
                    "finite support " + std::to_string(fs->last_block) +
                        " declared but a_" + std::to_string(k) + " is nonzero",
                    k);
      }
    }
    return;
  }
  double window = 0.0;
  for (std::size_t k = probe_depth; k > probe_depth / 2; --k) {
    window += mu.variance_pairing(k, f.coeffs(k, mu.dim(k)));
  }
  if (!(window < kVarianceWindowTolerance)) {
    throw Error(ErrorCode::DeclaredTailViolated,
                "variance series is not Cauchy at depth " + std::to_string(probe_depth) +
                    ": window sum " + std::to_string(window));
  }
}

TailSeries tail_series(const LinearFunctional& f, const ProductMeasure& mu,
                       std::vector<std::size_t> depths, std::size_t probe_depth) {
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (!depths.empty() && depths.back() >= probe_depth) {
    throw Error(ErrorCode::InsufficientDepth,
                "probe depth " + std::to_string(probe_depth) +
                    " must exceed every requested depth");
  }
  constexpr int kWindows = 3;
  TailSeries out;
  out.depths = depths;
  out.values.assign(depths.size(), 0.0);
  out.windows.assign(kWindows, 0.0);

  std::size_t stop = probe_depth >> kWindows;
  if (!depths.empty()) stop = std::min(stop, depths.front());

  // Summed from the far end so small terms accumulate first.
  double acc = 0.0;
  auto next = depths.rbegin();
  for (std::size_t k = probe_depth; k > stop; --k) {
    const double term = mu.mean_pairing(k, f.coeffs(k, mu.dim(k)));
    acc += term;
    for (int j = 0; j < kWindows; ++j) {
      if (k > (probe_depth >> (j + 1)) && k <= (probe_depth >> j)) out.windows[j] += term;
    }
    while (next != depths.rend() && *next == k - 1) {
      out.values[static_cast<std::size_t>(depths.rend() - next) - 1] = acc;
      ++next;
    }
  }
  return out;
}

TailConstant tail_constant(const LinearFunctional& f, const ProductMeasure& mu,
                           std::size_t n, std::size_t probe_depth) {
  if (probe_depth <= n) {
    throw Error(ErrorCode::InsufficientDepth,
                "probe depth " + std::to_string(probe_depth) + " must exceed n = " +
                    std::to_string(n));
  }
  validate_declared_tail(f, mu, probe_depth);
  const TailSeries series = tail_series(f, mu, {n}, probe_depth);
  TailConstant c;
  c.value = series.values.front();
  c.window = series.windows.front();
  c.status = std::abs(c.window) < kTailWindowTolerance ? TailStatus::Converged
                                                       : TailStatus::Unconverged;
  return c;
}

double tail_variance(const LinearFunctional& f, const ProductMeasure& mu,
                     std::size_t from, std::size_t probe_depth) {
  double acc = 0.0;
  for (std::size_t k = probe_depth; k > from; --k) {
    acc += mu.variance_pairing(k, f.coeffs(k, mu.dim(k)));
  }
  return acc;
}

SeminormEstimate estimate_seminorm_integral(const LinearFunctional& f,
                                            const ProductMeasure& mu, std::size_t depth,
                                            std::size_t samples, std::uint64_t seed) {
  if (samples < 100) {
    throw Error(ErrorCode::ShapeError, "seminorm estimate needs at least 100 samples");
  }
  const std::vector<VectorXd> coeffs = coefficient_prefix(f, mu, depth);
  for (std::size_t k = 1; k <= depth; ++k) mu.block(k);

  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t i) {
    const TruncatedPoint x = sample_point(mu, depth, derive_seed(seed, i));
    values[i] = std::abs(eval_truncated(coeffs, x, depth));
  });

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(samples);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(samples - 1));
  return SeminormEstimate{mean, sd / std::sqrt(static_cast<double>(samples)), samples};
}

}  // namespace lcprod
