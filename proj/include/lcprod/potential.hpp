#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lcprod/inverse_cdf.hpp"
#include "lcprod/rng.hpp"

namespace lcprod {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Box {
  VectorXd lo;
  VectorXd hi;

  Index dim() const { return lo.size(); }
  bool contains(const VectorXd& x) const;
};

namespace family {

// V(x) = (x - center)' precision (x - center) / 2
struct Quadratic {
  VectorXd center;
  MatrixXd precision;
};

// V(x) = <slope, x> on the box, +inf outside.
struct LinearTilt {
  VectorXd slope;
  Box box;
};

// V = 0 on the box, +inf outside. A zero-dimensional box is the point mass.
struct Uniform {
  Box box;
};

// V(x) = sum_i rates_i |x_i - center_i|
struct ScaledAbs {
  VectorXd center;
  VectorXd rates;
};

}  // namespace family

// Convex potential V of a density proportional to exp(-V). The family set is
// closed and every factory validates its parameters, so a constructed value is
// always convex with a finite normalizing integral.
class ConvexPotential {
 public:
  using Family = std::variant<family::Quadratic, family::LinearTilt,
                              family::Uniform, family::ScaledAbs>;

  static ConvexPotential quadratic(VectorXd center, MatrixXd precision);
  static ConvexPotential linear_tilt(VectorXd slope, Box box);
  static ConvexPotential uniform(Box box);
  static ConvexPotential scaled_abs(VectorXd center, VectorXd rates);
  // Potential on the zero-dimensional space; its pushforward is a point mass.
  static ConvexPotential point_mass();

  const Family& family() const { return family_; }
  Index domain_dim() const;
  std::string family_name() const;

  // +inf outside the domain.
  double value(const VectorXd& x) const;
  // log of the integral of exp(-V) over the domain.
  double log_normalizer() const;
  double density(const VectorXd& x) const;

 private:
  explicit ConvexPotential(Family family) : family_(std::move(family)) {}

  Family family_;
};

struct DomainMoments {
  VectorXd mean;
  MatrixXd covariance;
};

// Quadratic and Uniform moments are closed-form; LinearTilt and ScaledAbs
// moments come from adaptive Gauss-Kronrod quadrature per coordinate.
DomainMoments domain_moments(const ConvexPotential& potential);

// CDF of the one-dimensional density proportional to exp(-slope * x) on
// [lo, hi]. Stable for either sign of the slope.
double tilt_cdf(double slope, double lo, double hi, double x);

double standard_normal_quantile(double u);

// Draws from exp(-V) using exactly domain_dim() uniforms per draw: inverse
// CDFs per coordinate, with a whitening transform for correlated quadratics.
class DomainSampler {
 public:
  explicit DomainSampler(const ConvexPotential& potential);

  Index dim() const { return dim_; }
  void draw(Rng& rng, Eigen::Ref<VectorXd> out) const;

 private:
  struct Gaussian {
    VectorXd center;
    MatrixXd factor;  // factor * factor' = precision^{-1}
  };
  struct UniformBox {
    VectorXd lo;
    VectorXd width;
  };
  struct Tilt {
    std::vector<std::shared_ptr<const TabulatedInverseCdf>> coords;
  };
  struct Laplace {
    VectorXd center;
    VectorXd rates;
  };

  Index dim_;
  std::variant<Gaussian, UniformBox, Tilt, Laplace> impl_;
};

}  // namespace lcprod
