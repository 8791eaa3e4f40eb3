#include "lcprod/approximation.hpp"

#include <cmath>
#include <sstream>

#include "lcprod/error.hpp"

namespace lcprod {

const char* to_string(ApproximantKind kind) {
  switch (kind) {
    case ApproximantKind::CondExp: return "CondExp";
    case ApproximantKind::CondExpReflected: return "CondExpReflected";
    case ApproximantKind::Theorem1: return "Theorem1";
    case ApproximantKind::HalfSum: return "HalfSum";
    case ApproximantKind::Theorem3Linear: return "Theorem3Linear";
  }
  return "Unknown";
}

std::optional<ApproximantKind> approximant_kind_from_string(std::string_view name) {
  for (auto kind : {ApproximantKind::CondExp, ApproximantKind::CondExpReflected,
                    ApproximantKind::Theorem1, ApproximantKind::HalfSum,
                    ApproximantKind::Theorem3Linear}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

double AffineApproximant::operator()(const TruncatedPoint& x) const {
  if (x.depth() < n) {
    throw Error(ErrorCode::InsufficientDepth,
                "approximant reads " + std::to_string(n) + " blocks, point has " +
                    std::to_string(x.depth()));
  }
  double total = constant;
  for (std::size_t k = 1; k <= n; ++k) total += coeffs[k - 1].dot(x.block(k));
  return total;
}

double AffineApproximant::operator()(const VectorXd& flat) const {
  double total = constant;
  Index offset = 0;
  for (const VectorXd& a : coeffs) {
    if (offset + a.size() > flat.size()) {
      throw Error(ErrorCode::ShapeError, "flat point shorter than the approximant");
    }
    total += a.dot(flat.segment(offset, a.size()));
    offset += a.size();
  }
  if (offset != flat.size()) {
    throw Error(ErrorCode::ShapeError, "flat point longer than the approximant");
  }
  return total;
}

namespace {

TailConstant converged_tail(const LinearFunctional& f, const ProductMeasure& mu,
                            std::size_t n, std::size_t probe_depth) {
  TailConstant c = tail_constant(f, mu, n, probe_depth);
  if (!c.converged()) {
    std::ostringstream os;
    os << "tail sum after block " << n << " has not settled at probe depth " << probe_depth
       << " (last window moved it by " << c.window << ")";
    throw Error(ErrorCode::TailDiverges, os.str());
  }
  return c;
}

AffineApproximant half_sum(const LinearFunctional& f, const ProductMeasure& mu, std::size_t n,
                           std::size_t probe_depth, ApproximantKind kind) {
  const AffineApproximant plus = conditional_expectation(f, mu, n, false, probe_depth);
  const AffineApproximant minus = conditional_expectation(f, mu, n, true, probe_depth);
  AffineApproximant out;
  out.n = n;
  out.kind = kind;
  out.coeffs = plus.coeffs;
  out.constant = 0.5 * (plus.constant + minus.constant);
  out.provenance = plus.provenance;
  return out;
}

}  // namespace

AffineApproximant conditional_expectation(const LinearFunctional& f, const ProductMeasure& mu,
                                          std::size_t n, bool reflected,
                                          std::size_t probe_depth) {
  const TailConstant plus = converged_tail(f, mu, n, probe_depth);
  const TailConstant minus = converged_tail(f, mu.reflected(), n, probe_depth);
  AffineApproximant out;
  out.n = n;
  out.kind = reflected ? ApproximantKind::CondExpReflected : ApproximantKind::CondExp;
  out.coeffs = coefficient_prefix(f, mu, n);
  out.constant = reflected ? minus.value : plus.value;
  out.provenance.c_n = plus.value;
  out.provenance.reflected_c_n = minus.value;
  return out;
}

AffineApproximant theorem1_approximant(const LinearFunctional& f, const ProductMeasure& mu,
                                       std::size_t n, std::size_t probe_depth) {
  const SupportDecomposition support = prefix_support(mu, n);
  const VectorXd& h = support.offset;
  if (support.passes_through_origin()) {
    throw Error(ErrorCode::HypothesisNotMet,
                "support of the first " + std::to_string(n) +
                    " blocks passes through the origin; no affine witness");
  }
  AffineApproximant out = conditional_expectation(f, mu, n, false, probe_depth);
  const double c = out.provenance.c_n;
  // Minimal-norm functional with <w, h> = c that vanishes on L (h is orthogonal to L).
  const VectorXd w = (c / h.squaredNorm()) * h;
  Index offset = 0;
  for (VectorXd& a : out.coeffs) {
    a += w.segment(offset, a.size());
    offset += a.size();
  }
  out.constant = c - w.dot(h);
  out.kind = ApproximantKind::Theorem1;
  out.provenance.psi_vector = w;
  return out;
}

AffineApproximant half_sum_approximant(const LinearFunctional& f, const ProductMeasure& mu,
                                       std::size_t n, std::size_t probe_depth) {
  AffineApproximant out = half_sum(f, mu, n, probe_depth, ApproximantKind::HalfSum);
  for (std::size_t k = 1; k <= n; ++k) {
    if (!mu.block(k).support().passes_through_origin()) {
      out.provenance.hypothesis_met = false;
      out.provenance.hypothesis_note =
          "support of block " + std::to_string(k) + " is not symmetric about the origin";
      break;
    }
  }
  return out;
}

AffineApproximant theorem3_linear_approximant(const LinearFunctional& f,
                                              const ProductMeasure& mu, std::size_t n,
                                              std::size_t probe_depth) {
  AffineApproximant out = half_sum(f, mu, n, probe_depth, ApproximantKind::Theorem3Linear);
  std::ostringstream os;
  os << "|c_" << n << "| = " << std::abs(out.provenance.c_n);
  out.provenance.hypothesis_note = os.str();
  return out;
}

AffineApproximant build_approximant(ApproximantKind kind, const LinearFunctional& f,
                                    const ProductMeasure& mu, std::size_t n,
                                    std::size_t probe_depth) {
  switch (kind) {
    case ApproximantKind::CondExp: return conditional_expectation(f, mu, n, false, probe_depth);
    case ApproximantKind::CondExpReflected:
      return conditional_expectation(f, mu, n, true, probe_depth);
    case ApproximantKind::Theorem1: return theorem1_approximant(f, mu, n, probe_depth);
    case ApproximantKind::HalfSum: return half_sum_approximant(f, mu, n, probe_depth);
    case ApproximantKind::Theorem3Linear:
      return theorem3_linear_approximant(f, mu, n, probe_depth);
  }
  throw Error(ErrorCode::ShapeError, "unknown approximant kind");
}

std::vector<BoundCheck> theorem3_bound_check(const LinearFunctional& f, const ProductMeasure& mu,
                                             std::size_t n,
                                             const std::vector<TruncatedPoint>& points,
                                             std::size_t eval_depth, std::size_t probe_depth) {
  if (eval_depth <= n) {
    throw Error(ErrorCode::InsufficientDepth, "evaluation depth must exceed n");
  }
  const AffineApproximant plus = conditional_expectation(f, mu, n, false, probe_depth);
  const AffineApproximant minus = conditional_expectation(f, mu, n, true, probe_depth);
  const std::vector<VectorXd> coeffs = coefficient_prefix(f, mu, eval_depth);
  const double slack = 2.0 * std::abs(plus.provenance.c_n);

  std::vector<BoundCheck> out;
  out.reserve(points.size());
  for (const TruncatedPoint& x : points) {
    const double f_hat = eval_truncated(coeffs, x, eval_depth);
    BoundCheck b;
    b.e_minus = std::abs(minus(x) - f_hat);
    b.e_plus = std::abs(plus(x) - f_hat);
    b.bound = slack + b.e_plus + kBoundSlack;
    b.holds = b.e_minus <= b.bound;
    out.push_back(b);
  }
  return out;
}

}  // namespace lcprod
