#include "lcprod/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lcprod/error.hpp"
#include "lcprod/parallel.hpp"

namespace lcprod {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_open(rng);
}

double binomial_se(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

template <class F>
double integrate(F f, double a, double b) {
  if (!(a < b)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12);
}

// Mass of [lo, hi] under the one-dimensional potential, integrating its
// normalized density over the part of the interval inside the domain and
// splitting at any kink.
double domain_interval_mass(const ConvexPotential& potential, double lo, double hi) {
  const double log_z = potential.log_normalizer();
  auto density = [&](double t) {
    return std::exp(-potential.value(VectorXd::Constant(1, t)) - log_z);
  };
  return std::visit(
      Overloaded{
          [&](const family::Quadratic&) { return integrate(density, lo, hi); },
          [&](const family::LinearTilt& t) {
            return integrate(density, std::max(lo, t.box.lo[0]), std::min(hi, t.box.hi[0]));
          },
          [&](const family::Uniform& u) {
            return integrate(density, std::max(lo, u.box.lo[0]), std::min(hi, u.box.hi[0]));
          },
          [&](const family::ScaledAbs& s) {
            const double c = s.center[0];
            if (c <= lo || c >= hi) return integrate(density, lo, hi);
            return integrate(density, lo, c) + integrate(density, c, hi);
          }},
      potential.family());
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(CriterionStatus s) {
  switch (s) {
    case CriterionStatus::Satisfied: return "satisfied";
    case CriterionStatus::Unverified: return "unverified";
    case CriterionStatus::Divergent: return "divergent";
  }
  return "unknown";
}

Box BoxPair::combination() const {
  return Box{lambda * a.lo + (1.0 - lambda) * b.lo, lambda * a.hi + (1.0 - lambda) * b.hi};
}

BoxPair make_box_pair(Box a, Box b, double lambda) {
  if (a.lo.size() != a.hi.size() || b.lo.size() != b.hi.size() || a.dim() != b.dim()) {
    throw Error(ErrorCode::ShapeError, "box pair dimensions differ");
  }
  if ((a.lo.array() > a.hi.array()).any() || (b.lo.array() > b.hi.array()).any()) {
    throw Error(ErrorCode::ShapeError, "box needs lo <= hi in every coordinate");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::ShapeError, "lambda must lie in [0, 1]");
  }
  return BoxPair{std::move(a), std::move(b), lambda};
}

BoxPair random_box_pair(const BlockMeasure& measure, Rng& rng) {
  const Index d = measure.dim();
  VectorXd spread = measure.covariance().diagonal().cwiseSqrt();
  for (Index i = 0; i < d; ++i) {
    if (!(spread[i] > 0)) spread[i] = 1.0;
  }
  auto box = [&] {
    Box b{VectorXd(d), VectorXd(d)};
    for (Index i = 0; i < d; ++i) {
      b.lo[i] = measure.mean()[i] + spread[i] * uniform_in(rng, -2.0, 1.0);
      b.hi[i] = b.lo[i] + spread[i] * uniform_in(rng, 0.3, 2.5);
    }
    return b;
  };
  Box a = box();
  Box b = box();
  return make_box_pair(std::move(a), std::move(b), uniform_open(rng));
}

InequalityReport evaluate_convexity_inequality(std::span<const VectorXd> samples,
                                               const BoxPair& pair) {
  const Box mix = pair.combination();
  std::size_t in_a = 0;
  std::size_t in_b = 0;
  std::size_t in_mix = 0;
  for (const VectorXd& x : samples) {
    in_a += pair.a.contains(x);
    in_b += pair.b.contains(x);
    in_mix += mix.contains(x);
  }
  const std::size_t n = samples.size();
  const double total = static_cast<double>(n);
  InequalityReport r;
  r.samples = n;
  r.p_a = static_cast<double>(in_a) / total;
  r.p_b = static_cast<double>(in_b) / total;
  r.p_mix = static_cast<double>(in_mix) / total;
  const double lambda = pair.lambda;
  r.rhs = std::pow(r.p_a, lambda) * std::pow(r.p_b, 1.0 - lambda);

  // Delta-method error of the right-hand side.
  double rel = 0.0;
  if (r.rhs > 0) {
    if (lambda > 0) rel += std::pow(lambda * binomial_se(r.p_a, n) / r.p_a, 2);
    if (lambda < 1) rel += std::pow((1.0 - lambda) * binomial_se(r.p_b, n) / r.p_b, 2);
  }
  const double se_rhs = r.rhs * std::sqrt(rel);
  const double se_mix = binomial_se(r.p_mix, n);
  r.margin = 3.0 * std::sqrt(se_rhs * se_rhs + se_mix * se_mix);

  if (in_a == 0 && in_b == 0) {
    r.verdict = Verdict::Inconclusive;
  } else {
    r.verdict = r.p_mix >= r.rhs - r.margin ? Verdict::Pass : Verdict::Fail;
  }
  return r;
}

double interval_mass(const BlockMeasure& measure, double lo, double hi) {
  if (measure.dim() != 1) {
    throw Error(ErrorCode::ShapeError, "interval mass needs a block on R^1");
  }
  const AffineMap& map = measure.embedding();
  const double shift = map.shift()[0];
  if (map.in_dim() == 0) return (shift >= lo && shift <= hi) ? 1.0 : 0.0;
  const double scale = map.matrix()(0, 0);
  double t0 = (lo - shift) / scale;
  double t1 = (hi - shift) / scale;
  if (t0 > t1) std::swap(t0, t1);
  return domain_interval_mass(measure.potential(), t0, t1);
}

InequalityReport check_convexity_inequality(const BlockMeasure& measure, const BoxPair& pair,
                                            std::size_t samples, std::uint64_t seed) {
  if (pair.dim() != measure.dim()) {
    throw Error(ErrorCode::ShapeError, "box dimension does not match the block");
  }
  if (samples < kMinConvexitySamples) {
    throw Error(ErrorCode::ShapeError, "convexity check needs at least 10^4 samples");
  }
  Rng rng(seed);
  const std::vector<VectorXd> xs = sample_block(measure, rng, samples);
  InequalityReport r = evaluate_convexity_inequality(xs, pair);

  if (measure.dim() == 1) {
    const Box mix = pair.combination();
    ExactMasses e;
    e.p_a = interval_mass(measure, pair.a.lo[0], pair.a.hi[0]);
    e.p_b = interval_mass(measure, pair.b.lo[0], pair.b.hi[0]);
    e.p_mix = interval_mass(measure, mix.lo[0], mix.hi[0]);
    const double rhs = std::pow(e.p_a, pair.lambda) * std::pow(e.p_b, 1.0 - pair.lambda);
    e.holds = e.p_mix >= rhs - kQuadratureTolerance;
    r.exact = e;
    if (!e.holds) r.verdict = Verdict::Fail;
  }
  return r;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ConvergenceReport run_convergence_study(const LinearFunctional& f, const ProductMeasure& mu,
                                        ApproximantKind kind, std::vector<std::size_t> depths,
                                        std::size_t point_count, std::size_t eval_depth,
                                        std::uint64_t seed, std::size_t probe_depth) {
  if (depths.empty()) throw Error(ErrorCode::ShapeError, "study needs at least one depth");
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (depths.front() == 0) throw Error(ErrorCode::ShapeError, "depths start at 1");
  if (depths.back() >= eval_depth) {
    throw Error(ErrorCode::InsufficientDepth, "every depth must be below eval_depth");
  }
  if (probe_depth <= eval_depth) {
    throw Error(ErrorCode::InsufficientDepth, "probe_depth must exceed eval_depth");
  }
  if (point_count == 0) throw Error(ErrorCode::ShapeError, "study needs points");

  ConvergenceReport report;
  report.kind = kind;
  report.depths = depths;
  report.point_count = point_count;
  report.eval_depth = eval_depth;
  report.probe_depth = probe_depth;
  report.seed = seed;
  report.truncation_bound = std::sqrt(tail_variance(f, mu, eval_depth, probe_depth));

  if (kind == ApproximantKind::Theorem3Linear) {
    const CriterionReport crit = check_theorem3_criterion(f, mu, depths, probe_depth);
    if (crit.status != CriterionStatus::Satisfied) {
      report.hypothesis_met = false;
      report.hypothesis_note = std::string("c_n criterion ") + to_string(crit.status);
    }
  }

  // Approximants first: a divergent tail should fail before any sampling.
  std::vector<std::optional<AffineApproximant>> approx;
  for (std::size_t n : depths) {
    try {
      approx.emplace_back(build_approximant(kind, f, mu, n, probe_depth));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisNotMet) throw;
      approx.emplace_back();
      report.hypothesis_met = false;
      if (report.hypothesis_note.empty()) report.hypothesis_note = e.what();
    }
  }

  for (std::size_t k = 1; k <= eval_depth; ++k) mu.block(k);
  std::vector<TruncatedPoint> points(point_count);
  parallel_for(point_count, [&](std::size_t i) {
    points[i] = sample_point(mu, eval_depth, derive_seed(seed, i));
  });
  const std::vector<VectorXd> coeffs = coefficient_prefix(f, mu, eval_depth);
  std::vector<double> f_hat(point_count);
  for (std::size_t i = 0; i < point_count; ++i) {
    f_hat[i] = eval_truncated(coeffs, points[i], eval_depth);
  }

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t d = 0; d < depths.size(); ++d) {
    const std::size_t n = depths[d];
    if (!approx[d]) {
      report.error_quantiles.push_back({kNaN, kNaN, kNaN});
      report.c_n.push_back(tail_constant(f, mu, n, probe_depth).value);
      continue;
    }
    const AffineApproximant& a = *approx[d];
    if (!a.provenance.hypothesis_met && report.hypothesis_met) {
      report.hypothesis_met = false;
      report.hypothesis_note = a.provenance.hypothesis_note;
    }
    std::vector<double> errors(point_count);
    for (std::size_t i = 0; i < point_count; ++i) {
      errors[i] = std::abs(a(points[i]) - f_hat[i]);
    }
    std::array<double, 3> q{};
    for (std::size_t j = 0; j < q.size(); ++j) {
      q[j] = empirical_quantile(errors, kReportQuantiles[j]);
    }
    report.error_quantiles.push_back(q);
    report.c_n.push_back(a.provenance.c_n);

    for (const BoundCheck& b : theorem3_bound_check(f, mu, n, points, eval_depth, probe_depth)) {
      ++report.bound_checks;
      report.bound_violations += !b.holds;
    }
  }

  bool monotone = true;
  for (std::size_t i = 1; i < report.error_quantiles.size(); ++i) {
    monotone = monotone && report.error_quantiles[i][1] <=
                               (1.0 + kMonotoneSlack) * report.error_quantiles[i - 1][1];
  }
  const double threshold = std::max(kTruncationFactor * report.truncation_bound, kErrorFloor);
  report.pass = report.hypothesis_met && monotone && report.bound_violations == 0 &&
                report.error_quantiles.back()[1] <= threshold;
  return report;
}

CriterionReport check_theorem3_criterion(const LinearFunctional& f, const ProductMeasure& mu,
                                         std::vector<std::size_t> depths,
                                         std::size_t probe_depth) {
  if (depths.empty()) throw Error(ErrorCode::ShapeError, "criterion needs depths");
  if (!std::is_sorted(depths.begin(), depths.end()) ||
      std::adjacent_find(depths.begin(), depths.end()) != depths.end()) {
    throw Error(ErrorCode::ShapeError, "criterion depths must be strictly increasing");
  }
  const TailSeries series = tail_series(f, mu, depths, probe_depth);
  CriterionReport r;
  r.depths = series.depths;
  r.c_n = series.values;
  r.probe_depth = probe_depth;
  r.last_window = series.windows[0];
  const double prev = series.windows[1];
  r.window_ratio = prev != 0.0 ? std::abs(r.last_window / prev)
                               : (r.last_window == 0.0 ? 0.0
                                                       : std::numeric_limits<double>::infinity());
  r.tail_converged = std::abs(r.last_window) < kTailWindowTolerance;

  if (!r.tail_converged && r.window_ratio >= kDivergenceRatio) {
    r.status = CriterionStatus::Divergent;
    r.last_estimate = r.c_n.back();
    return r;
  }
  if (!r.tail_converged) {
    r.remainder_estimate = r.last_window * r.window_ratio / (1.0 - r.window_ratio);
  }
  r.last_estimate = r.c_n.back() + r.remainder_estimate;
  r.status = std::abs(r.last_estimate) < kCriterionThreshold ? CriterionStatus::Satisfied
                                                             : CriterionStatus::Unverified;
  return r;
}

std::vector<DefiningPropertyCheck> check_defining_property(
    const LinearFunctional& f, const ProductMeasure& mu, std::size_t n,
    const std::vector<TestFunction>& tests, std::size_t samples, std::size_t eval_depth,
    std::uint64_t seed, std::size_t probe_depth) {
  if (eval_depth <= n) throw Error(ErrorCode::InsufficientDepth, "eval_depth must exceed n");
  const AffineApproximant approx = conditional_expectation(f, mu, n, false, probe_depth);
  const std::vector<VectorXd> coeffs = coefficient_prefix(f, mu, eval_depth);
  const Index prefix_dim = mu.cum_dim(n);
  for (std::size_t k = 1; k <= eval_depth; ++k) mu.block(k);

  const std::size_t t_count = tests.size();
  std::vector<double> gf(samples * t_count);
  std::vector<double> ge(samples * t_count);
  parallel_for(samples, [&](std::size_t i) {
    const TruncatedPoint x = sample_point(mu, eval_depth, derive_seed(seed, i));
    VectorXd flat(prefix_dim);
    Index offset = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      flat.segment(offset, x.block(k).size()) = x.block(k);
      offset += x.block(k).size();
    }
    const double fv = eval_truncated(coeffs, x, eval_depth);
    const double ev = approx(x);
    for (std::size_t t = 0; t < t_count; ++t) {
      const double g = tests[t].g(flat);
      gf[i * t_count + t] = g * fv;
      ge[i * t_count + t] = g * ev;
    }
  });

  auto mean_se = [&](const std::vector<double>& v, std::size_t t) {
    double m = 0.0;
    for (std::size_t i = 0; i < samples; ++i) m += v[i * t_count + t];
    m /= static_cast<double>(samples);
    double ss = 0.0;
    for (std::size_t i = 0; i < samples; ++i) ss += std::pow(v[i * t_count + t] - m, 2);
    const double sd = std::sqrt(ss / static_cast<double>(samples - 1));
    return std::pair{m, sd / std::sqrt(static_cast<double>(samples))};
  };

  std::vector<DefiningPropertyCheck> out;
  for (std::size_t t = 0; t < t_count; ++t) {
    DefiningPropertyCheck c;
    c.name = tests[t].name;
    std::tie(c.with_f, c.se_f) = mean_se(gf, t);
    std::tie(c.with_approx, c.se_approx) = mean_se(ge, t);
    c.holds = std::abs(c.with_f - c.with_approx) <=
              4.0 * std::sqrt(c.se_f * c.se_f + c.se_approx * c.se_approx);
    out.push_back(c);
  }
  return out;
}

}  // namespace lcprod
