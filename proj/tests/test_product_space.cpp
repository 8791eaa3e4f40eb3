#include <doctest.h>

#include <cmath>

#include "lcprod/error.hpp"
#include "lcprod/product_measure.hpp"
#include "lcprod/rule_syntax.hpp"
#include "lcprod/sequence.hpp"

using namespace lcprod;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

const char* kLineBlock =
    "block(potential=quadratic(center=[0], precision=[[1]]), matrix=[[1], [-1]], shift=[0, 1])";

}  // namespace

TEST_CASE("sequences") {
  CHECK(Sequence::geom(1, 0.5)(3) == 0.125);
  CHECK(Sequence::power(2, -2)(4) == 0.125);
  CHECK(Sequence::constant(-1.5)(1000) == -1.5);
  const Sequence s = Sequence::from_term(parse_term("geom(0.3, 0.7)"));
  CHECK(s == Sequence::geom(0.3, 0.7));
  CHECK(Sequence::from_term(parse_term(s.to_string())) == s);
  CHECK_THROWS_AS(Sequence::from_term(parse_term("expo(1)")), Error);
}

TEST_CASE("term parser") {
  const Term t = parse_term("f(1, [2, 3e-1], g(x=-4), name=[[1,2],[3,4]])");
  CHECK(t.is_call("f"));
  CHECK(t.positional.size() == 3);
  CHECK(t.positional[1].as_vector().isApprox(vec({2, 0.3})));
  CHECK(t.arg("name")->as_matrix().determinant() == doctest::Approx(-2));
  CHECK(parse_term(t.to_string()).to_string() == t.to_string());

  for (const char* bad : {"f(", "f(1,)", "f(x=1, 2)", "[1, 2", "f(x=1, x=2)", "f() g", "@"}) {
    try {
      parse_term(bad);
      FAIL("parsed: " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
  }
}

TEST_CASE("gaussian rule arithmetic") {
  const ProductMeasure mu = make_product("gaussian(mean=geom(1, 0.5), sd=geom(1, 0.5))");
  CHECK(mu.block(2).mean()[0] == 0.25);
  CHECK(mu.block(3).mean()[0] == 0.125);
  CHECK(std::sqrt(mu.block(3).covariance()(0, 0)) == doctest::Approx(0.125));
  CHECK(mu.mean_pairing(3, vec({2})) == doctest::Approx(0.25));
  CHECK(mu.variance_pairing(3, vec({1})) == doctest::Approx(0.125 * 0.125));
}

TEST_CASE("closed-form pairings agree with built blocks") {
  for (const char* rule :
       {"gaussian(mean=pow(1, -1), sd=const(2), dim=2)", "uniform(halfwidth=geom(2, 0.9), center=const(1))",
        "tilt(slope=pow(1, 1), box=[-1, 2])", "laplace(center=const(-1), rate=pow(1, 0.5), dim=3)",
        "point(at=geom(1, 0.5))"}) {
    const ProductMeasure mu = make_product(rule);
    for (std::size_t k : {1, 2, 5}) {
      const BlockMeasure& b = mu.block(k);
      const VectorXd a = VectorXd::LinSpaced(b.dim(), 1.0, 2.0);
      CHECK(mu.mean_pairing(k, a) == doctest::Approx(a.dot(b.mean())).epsilon(1e-10));
      CHECK(mu.variance_pairing(k, a) == doctest::Approx(a.dot(b.covariance() * a)).epsilon(1e-9));
    }
  }
}

TEST_CASE("uniform rule is symmetric") {
  const ProductMeasure mu = make_product("uniform(halfwidth=const(1))");
  for (std::size_t k = 1; k <= 10; ++k) {
    CHECK(mu.block(k).mean()[0] == 0.0);
    CHECK(mu.block(k).support().passes_through_origin());
  }
}

TEST_CASE("rule errors carry the block index") {
  const ProductMeasure mu = make_product("gaussian(mean=const(0), sd=pow(1, 1))");
  const ProductMeasure bad = make_product("uniform(halfwidth=geom(-1, 0.5))");
  try {
    bad.block(3);
    FAIL("expected InvalidPotential");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPotential);
    CHECK(e.block() == 3u);
  }
  CHECK_NOTHROW(mu.block(7));
  CHECK_THROWS_AS(make_product("gaussian(mean=const(0))"), Error);
  CHECK_THROWS_AS(make_product("cauchy(scale=const(1))"), Error);
  CHECK_THROWS_AS(make_product("gaussian(mean=const(0), sd=const(1), colour=1)"), Error);
}

TEST_CASE("explicit rule dimensions") {
  const ProductMeasure mu = make_product(std::string("explicit(blocks=[") + kLineBlock +
                                         "], tail=gaussian(mean=const(0), sd=const(1)))");
  CHECK(mu.dim(1) == 2);
  CHECK(mu.cum_dim(1) == 2);
  CHECK(mu.cum_dim(2) == 3);
  CHECK(mu.cum_dim(3) == 4);
  CHECK(mu.block(2).dim() == 1);
  CHECK(mu.block(1).support().offset.isApprox(vec({0.5, 0.5})));
}

TEST_CASE("explicit tail sees the global index") {
  const ProductMeasure mu = make_product(
      "explicit(blocks=[point(at=[3])], tail=gaussian(mean=geom(1, 0.5), sd=const(1)))");
  CHECK(mu.block(1).mean()[0] == 3.0);
  CHECK(mu.block(2).mean()[0] == 0.25);
}

TEST_CASE("extending a point keeps its prefix") {
  const ProductMeasure mu = make_product("laplace(center=const(0), rate=const(1), dim=2)");
  TruncatedPoint p = sample_point(mu, 5, 77);
  const TruncatedPoint q = sample_point(mu, 8, 77);
  const auto prefix = p.coords;
  extend_point(mu, p, 8);
  CHECK(p.depth() == 8);
  CHECK(std::equal(prefix.begin(), prefix.end(), p.coords.begin()));
  CHECK(p.coords == q.coords);
  CHECK_THROWS_AS(sample_point(mu, 0, 1), Error);
}

TEST_CASE("extension determinism over random triples") {
  const ProductMeasure mu = make_product("tilt(slope=geom(4, 0.8), box=[-1, 1])");
  Rng meta(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t seed = meta();
    const std::size_t d1 = 1 + meta() % 30;
    const std::size_t d2 = d1 + meta() % 30;
    const TruncatedPoint a = sample_point(mu, d1, seed);
    TruncatedPoint b = sample_point(mu, d1, seed);
    extend_point(mu, b, d2);
    const TruncatedPoint c = sample_point(mu, d2, seed);
    REQUIRE(std::equal(a.coords.begin(), a.coords.end(), c.coords.begin()));
    REQUIRE(b.coords == c.coords);
  }
}

TEST_CASE("different seeds give different points") {
  const ProductMeasure mu = make_product("gaussian(mean=const(0), sd=const(1))");
  int differ = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    differ += sample_point(mu, 3, s).coords != sample_point(mu, 3, s + 1000).coords;
  }
  CHECK(differ == 100);
}

TEST_CASE("point masses give their locations") {
  const ProductMeasure mu = make_product("point(at=pow(1, 1))");
  const TruncatedPoint x = sample_point(mu, 6, 3);
  for (std::size_t k = 1; k <= 6; ++k) CHECK(x.block(k)[0] == double(k));
}

TEST_CASE("prefix support") {
  SUBCASE("full support") {
    const ProductMeasure mu = make_product("gaussian(mean=const(1), sd=const(1), dim=2)");
    const SupportDecomposition s = prefix_support(mu, 3);
    CHECK(s.linear_dim() == 6);
    CHECK(s.passes_through_origin());
  }
  SUBCASE("two line blocks") {
    const ProductMeasure mu = make_product(std::string("explicit(blocks=[") + kLineBlock + ", " +
                                           kLineBlock + "], tail=uniform(halfwidth=const(1)))");
    const SupportDecomposition s = prefix_support(mu, 2);
    CHECK(s.ambient_dim() == 4);
    CHECK(s.linear_dim() == 2);
    CHECK(s.offset.isApprox(vec({0.5, 0.5, 0.5, 0.5}), 1e-12));
    CHECK((s.basis.transpose() * s.basis).isIdentity(1e-12));
  }
  SUBCASE("point mass then gaussian") {
    const ProductMeasure mu = make_product(
        "explicit(blocks=[point(at=[1, 0])], tail=gaussian(mean=const(0), sd=const(1)))");
    const SupportDecomposition s = prefix_support(mu, 2);
    CHECK(s.linear_dim() == 1);
    CHECK(std::abs(std::abs(s.basis(2, 0)) - 1.0) < 1e-12);
    CHECK(s.offset.isApprox(vec({1, 0, 0}), 1e-12));
  }
  SUBCASE("offset is zero iff every block offset is zero") {
    const ProductMeasure mixed = make_product(std::string("explicit(blocks=[") + kLineBlock +
                                              "], tail=uniform(halfwidth=const(1)))");
    CHECK_FALSE(prefix_support(mixed, 3).passes_through_origin());
    const ProductMeasure sym = make_product("uniform(halfwidth=const(1), dim=2)");
    CHECK(prefix_support(sym, 4).passes_through_origin());
  }
}

TEST_CASE("reflected product") {
  const ProductMeasure mu = make_product("tilt(slope=const(-1), box=[-1, 1])");
  const ProductMeasure r = mu.reflected();
  CHECK(r.block(2).mean()[0] == doctest::Approx(-mu.block(2).mean()[0]));
  CHECK(r.mean_pairing(4, vec({1})) == -mu.mean_pairing(4, vec({1})));
  CHECK(r.variance_pairing(4, vec({1})) == mu.variance_pairing(4, vec({1})));
}
