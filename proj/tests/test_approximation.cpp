#include <doctest.h>

#include <cmath>

#include "lcprod/approximation.hpp"
#include "lcprod/error.hpp"

using namespace lcprod;

namespace {

const char* kLineTail =
    "explicit(blocks=[block(potential=quadratic(center=[0], precision=[[1]]), "
    "matrix=[[1], [-1]], shift=[0, 1])], tail=gaussian(mean=geom(0.5, 0.5), sd=geom(1, 0.5)))";
const char* kLineCoeffs = "explicit(blocks=[[1, 0]], tail=series(value=const(1)))";

VectorXd flatten(const TruncatedPoint& x, std::size_t n) {
  Index size = 0;
  for (std::size_t k = 1; k <= n; ++k) size += x.block(k).size();
  VectorXd out(size);
  Index at = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    out.segment(at, x.block(k).size()) = x.block(k);
    at += x.block(k).size();
  }
  return out;
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (auto k : {ApproximantKind::CondExp, ApproximantKind::CondExpReflected, ApproximantKind::Theorem1,
                 ApproximantKind::HalfSum, ApproximantKind::Theorem3Linear}) {
    CHECK(approximant_kind_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(approximant_kind_from_string("condexp").has_value());
}

TEST_CASE("zero functional") {
  const ProductMeasure mu = make_product("gaussian(mean=const(1), sd=const(1), dim=2)");
  const AffineApproximant e = conditional_expectation(zero_functional(), mu, 3, false);
  CHECK(e.constant == 0.0);
  for (const VectorXd& a : e.coeffs) CHECK(a.isZero(0.0));
  const AffineApproximant h = half_sum_approximant(zero_functional(), mu, 3);
  CHECK(h.constant == 0.0);
}

TEST_CASE("geometric tail oracle") {
  const ProductMeasure mu = make_product("gaussian(mean=geom(1, 0.5), sd=geom(1, 0.5))");
  const LinearFunctional f = parse_functional("series(value=const(1))");
  const AffineApproximant e = conditional_expectation(f, mu, 1, false);
  double oracle = 0;
  for (int k = 200; k >= 2; --k) oracle += std::ldexp(1.0, -k);
  CHECK(std::abs(e.constant - oracle) <= 1e-12);
  CHECK(std::abs(e.constant - 0.5) <= 1e-12);
  REQUIRE(e.coeffs.size() == 1);
  CHECK(e.coeffs[0][0] == 1.0);
  CHECK(e.provenance.reflected_c_n == -e.provenance.c_n);
  CHECK(e(VectorXd::Constant(1, 2.0)) == doctest::Approx(2.5));
}

TEST_CASE("symmetric blocks give the plain truncation") {
  const ProductMeasure mu = make_product("laplace(center=const(0), rate=pow(1, 1))");
  const LinearFunctional f = parse_functional("series(value=geom(1, 0.5))");
  const AffineApproximant e = conditional_expectation(f, mu, 4, false);
  const AffineApproximant h = half_sum_approximant(f, mu, 4);
  CHECK(e.constant == 0.0);
  CHECK(h.provenance.hypothesis_met);
  for (std::size_t k = 0; k < 4; ++k) CHECK(h.coeffs[k] == e.coeffs[k]);
  CHECK(h.constant == e.constant);
}

TEST_CASE("tower identity") {
  for (const char* rule : {"gaussian(mean=geom(1, 0.5), sd=geom(1, 0.5))", "uniform(halfwidth=const(1))",
                           "gaussian(mean=pow(1, -2), sd=geom(1, 0.5))"}) {
    const ProductMeasure mu = make_product(rule);
    const LinearFunctional f = parse_functional("series(value=geom(1, 0.5))");
    for (std::size_t n = 1; n <= 30; ++n) {
      const AffineApproximant a = conditional_expectation(f, mu, n, false);
      const AffineApproximant b = conditional_expectation(f, mu, n + 1, false);
      const VectorXd& next = b.coeffs[n];
      CHECK(std::abs(a.constant - (mu.mean_pairing(n + 1, next) + b.constant)) <= 1e-12);
      for (std::size_t k = 0; k < n; ++k) CHECK(a.coeffs[k] == b.coeffs[k]);
    }
  }
}

TEST_CASE("divergent tails are refused") {
  const ProductMeasure mu = make_product("gaussian(mean=pow(1, -1), sd=geom(1, 0.5))");
  try {
    conditional_expectation(parse_functional("series(value=const(1))"), mu, 3, false);
    FAIL("expected TailDiverges");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TailDiverges);
  }
}

TEST_CASE("affine-support correction") {
  const ProductMeasure mu = make_product(kLineTail);
  const LinearFunctional f = parse_functional(kLineCoeffs);
  const AffineApproximant g = theorem1_approximant(f, mu, 1);
  const AffineApproximant e = conditional_expectation(f, mu, 1, false);

  CHECK(e.constant == doctest::Approx(0.25).epsilon(1e-12));
  REQUIRE(g.provenance.psi_vector.has_value());
  CHECK(g.provenance.psi_vector->isApprox(Eigen::Vector2d(0.25, 0.25), 1e-12));
  CHECK(g.coeffs[0].isApprox(Eigen::Vector2d(1.25, 0.25), 1e-12));
  CHECK(std::abs(g.value_at_origin()) <= 1e-12);
  CHECK(std::abs(g(VectorXd::Zero(2))) <= 1e-12);

  const SupportDecomposition s = prefix_support(mu, 1);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double t = 20 * uniform_open(rng) - 10;
    const VectorXd x = s.offset + s.basis.col(0) * t;
    CHECK(std::abs(g(x) - e(x)) <= 1e-10);
    CHECK(g(x) == doctest::Approx(x[0] + 0.25));
  }
}

TEST_CASE("affine-support correction at deeper n") {
  const ProductMeasure mu = make_product(kLineTail);
  const LinearFunctional f = parse_functional(kLineCoeffs);
  for (std::size_t n : {2, 5}) {
    const AffineApproximant g = theorem1_approximant(f, mu, n);
    const AffineApproximant e = conditional_expectation(f, mu, n, false);
    CHECK(std::abs(g.value_at_origin()) <= 1e-12);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const TruncatedPoint x = sample_point(mu, n, s);
      CHECK(std::abs(g(x) - e(x)) <= 1e-10);
      CHECK(std::abs(g(flatten(x, n)) - g(x)) <= 1e-12);
    }
  }
}

TEST_CASE("affine-support correction with zero tail constant") {
  const ProductMeasure mu = make_product(
      "explicit(blocks=[block(potential=quadratic(center=[0], precision=[[1]]), matrix=[[1], [-1]], "
      "shift=[0, 1])], tail=gaussian(mean=const(0), sd=const(1)))");
  const LinearFunctional f = parse_functional("explicit(blocks=[[1, 0]], tail=series(value=geom(1, 0.5)))");
  const AffineApproximant g = theorem1_approximant(f, mu, 2);
  const AffineApproximant e = conditional_expectation(f, mu, 2, false);
  CHECK(g.provenance.psi_vector->isZero(0.0));
  CHECK(g.constant == 0.0);
  for (std::size_t k = 0; k < 2; ++k) CHECK(g.coeffs[k] == e.coeffs[k]);
}

TEST_CASE("affine-support correction needs an affine support") {
  const ProductMeasure mu = make_product("gaussian(mean=geom(1, 0.5), sd=const(1))");
  try {
    theorem1_approximant(parse_functional("series(value=geom(1, 0.5))"), mu, 3);
    FAIL("expected HypothesisNotMet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisNotMet);
  }
}

TEST_CASE("half-sum on tilted blocks") {
  const ProductMeasure mu = make_product("tilt(slope=const(-1), box=[-1, 1])");
  const LinearFunctional f = parse_functional("series(value=geom(1, 0.5))");
  const double block_mean = 2.0 / (std::exp(2.0) - 1.0);
  for (std::size_t n : {1, 3, 8}) {
    const AffineApproximant plus = conditional_expectation(f, mu, n, false);
    const AffineApproximant minus = conditional_expectation(f, mu, n, true);
    const AffineApproximant h = half_sum_approximant(f, mu, n);
    CHECK(plus.constant == doctest::Approx(block_mean * std::ldexp(1.0, -int(n))).epsilon(1e-10));
    CHECK(std::abs(minus.constant + plus.constant) <= 1e-12);
    CHECK(h.constant == 0.0);
    CHECK(h.provenance.hypothesis_met);
    for (std::size_t k = 1; k <= n; ++k) CHECK(h.coeffs[k - 1][0] == std::ldexp(1.0, -int(k)));
    const AffineApproximant t3 = theorem3_linear_approximant(f, mu, n);
    CHECK(t3.constant == 0.0);
  }
}

TEST_CASE("half-sum flags asymmetric supports") {
  const ProductMeasure mu = make_product("point(at=const(1))");
  const AffineApproximant h =
      half_sum_approximant(parse_functional("series(value=geom(1, 0.5))"), mu, 2);
  CHECK_FALSE(h.provenance.hypothesis_met);
}

TEST_CASE("triangle bound") {
  const LinearFunctional f = parse_functional("series(value=const(1))");
  SUBCASE("zero tail constant gives equal errors") {
    const ProductMeasure mu = make_product("uniform(halfwidth=geom(1, 0.5))");
    std::vector<TruncatedPoint> pts;
    for (std::uint64_t s = 0; s < 50; ++s) pts.push_back(sample_point(mu, 30, s));
    for (const BoundCheck& b : theorem3_bound_check(f, mu, 4, pts, 30)) {
      CHECK(b.e_minus == b.e_plus);
      CHECK(b.holds);
    }
  }
  SUBCASE("geometric means") {
    const ProductMeasure mu = make_product("gaussian(mean=geom(1, 0.5), sd=geom(1, 0.5))");
    std::vector<TruncatedPoint> pts;
    for (std::uint64_t s = 0; s < 200; ++s) pts.push_back(sample_point(mu, 40, s));
    for (std::size_t n = 1; n <= 6; ++n) {
      for (const BoundCheck& b : theorem3_bound_check(f, mu, n, pts, 40)) {
        CHECK(b.e_minus - b.e_plus <= std::ldexp(1.0, 1 - int(n)) + 1e-12);
        CHECK(b.holds);
      }
    }
  }
  SUBCASE("point at the means") {
    const ProductMeasure mu = make_product("gaussian(mean=geom(1, 0.5), sd=geom(1, 0.5))");
    TruncatedPoint x;
    for (std::size_t k = 1; k <= 128; ++k) x.coords.push_back(mu.block(k).mean());
    const auto checks = theorem3_bound_check(f, mu, 3, {x}, 128, 128);
    CHECK(checks[0].e_plus <= 1e-15);
    CHECK(checks[0].e_minus == doctest::Approx(2 * 0.125).epsilon(1e-12));
    CHECK(checks[0].holds);
  }
  CHECK_THROWS_AS(theorem3_bound_check(f, make_product("point(at=const(0))"), 5, {}, 5), Error);
}
