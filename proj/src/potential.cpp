#include "lcprod/potential.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "lcprod/error.hpp"

namespace lcprod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool all_finite(const Eigen::Ref<const MatrixXd>& m) {
  return m.allFinite();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidPotential, message);
}

void validate_box(const Box& box, bool allow_empty) {
  require(box.lo.size() == box.hi.size(), "box bounds differ in length");
  require(allow_empty || box.lo.size() > 0, "box must have dimension >= 1");
  require(all_finite(box.lo) && all_finite(box.hi), "box must be bounded");
  require((box.lo.array() < box.hi.array()).all(),
          "box needs lo < hi in every coordinate");
}

template <class F>
double integrate(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 20, 1e-14);
}

// Mean and variance of exp(-slope * x) on [lo, hi]. The exponent is shifted to
// the end of the interval where it is largest so nothing overflows.
std::pair<double, double> tilt_moments(double slope, double lo, double hi) {
  const double ref = slope > 0 ? lo : hi;
  auto q = [&](double x) { return std::exp(-slope * (x - ref)); };
  const double mass = integrate(q, lo, hi);
  const double mean =
      integrate([&](double x) { return x * q(x); }, lo, hi) / mass;
  const double var =
      integrate([&](double x) { return (x - mean) * (x - mean) * q(x); }, lo,
                hi) /
      mass;
  return {mean, var};
}

std::pair<double, double> laplace_moments(double center, double rate) {
  const double reach = 60.0 / rate;
  auto q = [&](double x) { return std::exp(-rate * std::abs(x - center)); };
  auto both = [&](auto g) {
    return integrate(g, center - reach, center) +
           integrate(g, center, center + reach);
  };
  const double mass = both(q);
  const double mean = both([&](double x) { return x * q(x); }) / mass;
  const double var =
      both([&](double x) { return (x - mean) * (x - mean) * q(x); }) / mass;
  return {mean, var};
}

// log of the integral of exp(-slope * x) over [lo, hi].
double tilt_log_mass(double slope, double lo, double hi) {
  const double width = hi - lo;
  if (slope == 0.0) return std::log(width);
  if (slope > 0) return -slope * lo + std::log(-std::expm1(-slope * width) / slope);
  return -slope * hi + std::log(-std::expm1(slope * width) / -slope);
}

}  // namespace

bool Box::contains(const VectorXd& x) const {
  return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
         (x.array() <= hi.array()).all();
}

ConvexPotential ConvexPotential::quadratic(VectorXd center, MatrixXd precision) {
  const Index d = center.size();
  require(d > 0, "quadratic potential needs dimension >= 1");
  require(precision.rows() == d && precision.cols() == d,
          "precision must be square and match the center");
  require(all_finite(center) && all_finite(precision),
          "quadratic parameters must be finite");
  const double scale = precision.cwiseAbs().maxCoeff();
  require((precision - precision.transpose()).cwiseAbs().maxCoeff() <=
              1e-12 * std::max(1.0, scale),
          "precision must be symmetric");
  Eigen::LLT<MatrixXd> llt(precision);
  require(llt.info() == Eigen::Success &&
              (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all(),
          "precision must be positive definite");
  return ConvexPotential(family::Quadratic{std::move(center), std::move(precision)});
}

ConvexPotential ConvexPotential::linear_tilt(VectorXd slope, Box box) {
  validate_box(box, false);
  require(slope.size() == box.dim(), "slope length must match the box");
  require(all_finite(slope), "slope must be finite");
  return ConvexPotential(family::LinearTilt{std::move(slope), std::move(box)});
}

ConvexPotential ConvexPotential::uniform(Box box) {
  validate_box(box, false);
  return ConvexPotential(family::Uniform{std::move(box)});
}

ConvexPotential ConvexPotential::scaled_abs(VectorXd center, VectorXd rates) {
  require(center.size() > 0, "scaled-abs potential needs dimension >= 1");
  require(rates.size() == center.size(), "rates length must match the center");
  require(all_finite(center) && all_finite(rates),
          "scaled-abs parameters must be finite");
  require((rates.array() > 0).all(), "rates must be strictly positive");
  return ConvexPotential(family::ScaledAbs{std::move(center), std::move(rates)});
}

ConvexPotential ConvexPotential::point_mass() {
  return ConvexPotential(family::Uniform{Box{VectorXd(0), VectorXd(0)}});
}

Index ConvexPotential::domain_dim() const {
  return std::visit(
      Overloaded{[](const family::Quadratic& q) { return q.center.size(); },
                 [](const family::LinearTilt& t) { return t.slope.size(); },
                 [](const family::Uniform& u) { return u.box.dim(); },
                 [](const family::ScaledAbs& s) { return s.center.size(); }},
      family_);
}

std::string ConvexPotential::family_name() const {
  return std::visit(
      Overloaded{[](const family::Quadratic&) { return "quadratic"; },
                 [](const family::LinearTilt&) { return "linear_tilt"; },
                 [](const family::Uniform& u) {
                   return u.box.dim() == 0 ? "point" : "uniform";
                 },
                 [](const family::ScaledAbs&) { return "scaled_abs"; }},
      family_);
}

double ConvexPotential::value(const VectorXd& x) const {
  return std::visit(
      Overloaded{
          [&](const family::Quadratic& q) {
            const VectorXd d = x - q.center;
            return 0.5 * d.dot(q.precision * d);
          },
          [&](const family::LinearTilt& t) {
            return t.box.contains(x) ? t.slope.dot(x) : kInf;
          },
          [&](const family::Uniform& u) {
            return u.box.contains(x) ? 0.0 : kInf;
          },
          [&](const family::ScaledAbs& s) {
            return (s.rates.array() * (x - s.center).array().abs()).sum();
          }},
      family_);
}

double ConvexPotential::log_normalizer() const {
  return std::visit(
      Overloaded{
          [](const family::Quadratic& q) {
            const Eigen::LLT<MatrixXd> llt(q.precision);
            const double log_det =
                2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
            return 0.5 * static_cast<double>(q.center.size()) *
                       std::log(2.0 * std::numbers::pi) -
                   0.5 * log_det;
          },
          [](const family::LinearTilt& t) {
            double total = 0.0;
            for (Index i = 0; i < t.slope.size(); ++i) {
              total += tilt_log_mass(t.slope[i], t.box.lo[i], t.box.hi[i]);
            }
            return total;
          },
          [](const family::Uniform& u) {
            return (u.box.hi - u.box.lo).array().log().sum();
          },
          [](const family::ScaledAbs& s) {
            return (2.0 / s.rates.array()).log().sum();
          }},
      family_);
}

double ConvexPotential::density(const VectorXd& x) const {
  const double v = value(x);
  if (std::isinf(v)) return 0.0;
  return std::exp(-v - log_normalizer());
}

DomainMoments domain_moments(const ConvexPotential& potential) {
  return std::visit(
      Overloaded{
          [](const family::Quadratic& q) {
            return DomainMoments{q.center, q.precision.llt().solve(
                                               MatrixXd::Identity(q.center.size(),
                                                                  q.center.size()))};
          },
          [](const family::Uniform& u) {
            const VectorXd width = u.box.hi - u.box.lo;
            return DomainMoments{
                0.5 * (u.box.lo + u.box.hi),
                (width.array().square() / 12.0).matrix().asDiagonal().toDenseMatrix()};
          },
          [](const family::LinearTilt& t) {
            const Index d = t.slope.size();
            DomainMoments m{VectorXd(d), MatrixXd::Zero(d, d)};
            for (Index i = 0; i < d; ++i) {
              auto [mean, var] = tilt_moments(t.slope[i], t.box.lo[i], t.box.hi[i]);
              m.mean[i] = mean;
              m.covariance(i, i) = var;
            }
            return m;
          },
          [](const family::ScaledAbs& s) {
            const Index d = s.center.size();
            DomainMoments m{VectorXd(d), MatrixXd::Zero(d, d)};
            for (Index i = 0; i < d; ++i) {
              auto [mean, var] = laplace_moments(s.center[i], s.rates[i]);
              m.mean[i] = mean;
              m.covariance(i, i) = var;
            }
            return m;
          }},
      potential.family());
}

double tilt_cdf(double slope, double lo, double hi, double x) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  const double width = hi - lo;
  if (slope == 0.0) return (x - lo) / width;
  if (slope > 0) return std::expm1(-slope * (x - lo)) / std::expm1(-slope * width);
  const double up = -slope;
  return 1.0 - std::expm1(-up * (hi - x)) / std::expm1(-up * width);
}

double standard_normal_quantile(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

DomainSampler::DomainSampler(const ConvexPotential& potential)
    : dim_(potential.domain_dim()) {
  std::visit(
      Overloaded{
          [&](const family::Quadratic& q) {
            const Eigen::LLT<MatrixXd> llt(q.precision);
            // precision = L L', so L^{-T} whitens: Cov = L^{-T} L^{-1}.
            const MatrixXd lower = llt.matrixL();
            MatrixXd factor = lower.transpose().triangularView<Eigen::Upper>().solve(
                MatrixXd::Identity(dim_, dim_));
            impl_ = Gaussian{q.center, std::move(factor)};
          },
          [&](const family::Uniform& u) {
            impl_ = UniformBox{u.box.lo, u.box.hi - u.box.lo};
          },
          [&](const family::LinearTilt& t) {
            Tilt tilt;
            std::map<std::tuple<double, double, double>,
                     std::shared_ptr<const TabulatedInverseCdf>>
                shared;
            for (Index i = 0; i < dim_; ++i) {
              const double s = t.slope[i];
              const double lo = t.box.lo[i];
              const double hi = t.box.hi[i];
              auto& table = shared[{s, lo, hi}];
              if (!table) {
                table = std::make_shared<const TabulatedInverseCdf>(
                    [=](double x) { return tilt_cdf(s, lo, hi, x); }, lo, hi);
              }
              tilt.coords.push_back(table);
            }
            impl_ = std::move(tilt);
          },
          [&](const family::ScaledAbs& s) { impl_ = Laplace{s.center, s.rates}; }},
      potential.family());
}

void DomainSampler::draw(Rng& rng, Eigen::Ref<VectorXd> out) const {
  std::visit(
      Overloaded{
          [&](const Gaussian& g) {
            VectorXd z(dim_);
            for (Index i = 0; i < dim_; ++i) {
              z[i] = standard_normal_quantile(uniform_open(rng));
            }
            out = g.center + g.factor * z;
          },
          [&](const UniformBox& u) {
            for (Index i = 0; i < dim_; ++i) {
              out[i] = u.lo[i] + u.width[i] * uniform_open(rng);
            }
          },
          [&](const Tilt& t) {
            for (Index i = 0; i < dim_; ++i) {
              out[i] = (*t.coords[static_cast<std::size_t>(i)])(uniform_open(rng));
            }
          },
          [&](const Laplace& l) {
            for (Index i = 0; i < dim_; ++i) {
              const double u = uniform_open(rng);
              out[i] = u < 0.5 ? l.center[i] + std::log(2.0 * u) / l.rates[i]
                               : l.center[i] - std::log(2.0 * (1.0 - u)) / l.rates[i];
            }
          }},
      impl_);
}

}  // namespace lcprod
