#include <cmath>
#include <numbers>

#include <doctest.h>

#include "rfbm/types.hpp"
#include "rfbm/warp.hpp"

using namespace rfbm;

TEST_CASE("catalog warps match their closed forms") {
  const Warp h = Warp::sinh(2.0);
  const WarpValues v = h.eval(0.7);
  CHECK(v.f == doctest::Approx(std::sinh(1.4) / 2.0).epsilon(1e-14));
  CHECK(v.df == doctest::Approx(std::cosh(1.4)).epsilon(1e-14));
  CHECK(v.d2f == doctest::Approx(2.0 * std::sinh(1.4)).epsilon(1e-14));

  const Warp s = Warp::sin(0.5);
  CHECK(s.domain_limit() == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(s.eval(1.0).f == doctest::Approx(std::sin(0.5) / 0.5));

  const Warp g = Warp::gauss_exp(0.3);
  const double r = 0.9;
  CHECK(g.eval(r).f == doctest::Approx(r * std::exp(0.3 * r * r)));
  CHECK(g.eval(r).df == doctest::Approx((1.0 + 0.6 * r * r) * std::exp(0.3 * r * r)));

  const Warp p = Warp::polynomial({1.0, 0.0, -0.1});
  CHECK(p.eval(2.0).f == doctest::Approx(2.0 - 0.8));
  CHECK(p.eval(2.0).df == doctest::Approx(1.0 - 1.2));
}

TEST_CASE("warp derivatives agree with central differences") {
  for (const Warp& w : {Warp::sinh(1.3), Warp::sin(0.8), Warp::gauss_exp(-0.2),
                        Warp::polynomial({1.0, 0.1, 0.05})}) {
    for (double r : {0.2, 0.9, 1.7}) {
      const double e = 1e-5;
      const double fd1 = (w.f(r + e) - w.f(r - e)) / (2 * e);
      const double fd2 = (w.eval(r + e).df - w.eval(r - e).df) / (2 * e);
      CHECK(w.eval(r).df == doctest::Approx(fd1).epsilon(1e-8));
      CHECK(w.eval(r).d2f == doctest::Approx(fd2).epsilon(1e-7));
    }
  }
}

TEST_CASE("log derivative stays finite where f overflows") {
  CHECK(Warp::sinh(1.0).log_derivative(2000.0) == doctest::Approx(1.0));
  CHECK(Warp::sinh(1.0).log_derivative(0.5) == doctest::Approx(1.0 / std::tanh(0.5)));
  CHECK(Warp::sin(1.0).log_derivative(1.0) == doctest::Approx(1.0 / std::tan(1.0)));
  CHECK(Warp::linear().log_derivative(4.0) == doctest::Approx(0.25));
}

TEST_CASE("polynomial warp must start with r") {
  CHECK_THROWS_AS(Warp::polynomial({2.0, 1.0}), ConfigError);
}

TEST_CASE("curvature sign classification") {
  CHECK(Warp::sinh(1.0).nonpositively_curved(5.0, 3));
  CHECK(Warp::linear().nonpositively_curved(5.0, 2));
  CHECK_FALSE(Warp::sin(1.0).nonpositively_curved(1.0, 2));
}

TEST_CASE("scale curves") {
  const ScaleCurve lin = ScaleCurve::linear(4.0, -1.0);
  CHECK(lin.a(1.5) == doctest::Approx(2.5));
  CHECK(lin.da(0.3) == doctest::Approx(-1.0));
  CHECK(lin.min_over(3.6) == doctest::Approx(0.4));
  CHECK(lin.max_over(3.6) == doctest::Approx(4.0));
  CHECK_FALSE(lin.is_static());

  const ScaleCurve ex = ScaleCurve::exponential(2.0, 0.5);
  CHECK(ex.a(2.0) == doctest::Approx(2.0 * std::exp(1.0)));
  CHECK(ex.da(2.0) == doctest::Approx(std::exp(1.0)));
  CHECK(ScaleCurve::constant(3.0).is_static());
}
